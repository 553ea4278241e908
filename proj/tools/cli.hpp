#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "qdopt/harness.hpp"

namespace qdopt::cli {

/// Every knob the command line can set. Serializes to JSON so that a printed
/// effective configuration can be fed back with --config.
struct CliConfig {
    std::string subcommand;
    std::vector<std::string> algorithms{"bip"};
    std::vector<std::string> functions{"F7"};
    std::vector<std::size_t> dims{10};
    /// 0 means 10000 * dim.
    std::uint64_t max_fes = 0;
    std::size_t trials = 51;
    std::uint64_t base_seed = 1;
    std::string out_dir = ".";
    std::size_t workers = 1;
    std::optional<std::vector<double>> init;
    std::size_t bins = 50;
    std::vector<std::string> groups;
    std::string input;
    AlgorithmSettings settings;

    std::uint64_t budget_for(std::size_t dim) const { return max_fes ? max_fes : 10000 * dim; }
    /// Throws std::invalid_argument before any work starts.
    void validate() const;
};

std::string to_json(const CliConfig& config);
CliConfig config_from_json(const std::string& text);

/// Parses argv (program name first) and executes the subcommand. Returns the
/// process exit status; diagnostics go to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace qdopt::cli
