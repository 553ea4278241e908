#include "qdopt/io.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace qdopt {

using nlohmann::json;

std::string format_real(double value) {
    if (std::isnan(value)) return "nan";
    if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", value);
    return buf;
}

double parse_real(const std::string& text) {
    if (text.empty()) throw std::invalid_argument("empty number");
    errno = 0;
    char* end = nullptr;
    const double v = std::strtod(text.c_str(), &end);
    if (end != text.c_str() + text.size()) throw std::invalid_argument("not a number: '" + text + "'");
    // strtod flags ERANGE on subnormal results; those values are still exact
    // enough for error bookkeeping.
    return v;
}

namespace {

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> fields;
    std::string field;
    std::istringstream ss(line);
    while (std::getline(ss, field, sep)) fields.push_back(field);
    if (!line.empty() && line.back() == sep) fields.emplace_back();
    return fields;
}

std::uint64_t parse_unsigned(const std::string& text, const char* what) {
    if (text.empty() || text.find_first_not_of("0123456789") != std::string::npos) {
        throw std::invalid_argument(std::string("bad ") + what + ": '" + text + "'");
    }
    errno = 0;
    const auto v = std::strtoull(text.c_str(), nullptr, 10);
    if (errno == ERANGE) throw std::invalid_argument(std::string(what) + " out of range");
    return v;
}

json real_json(double v) {
    if (std::isfinite(v)) return v;
    return format_real(v);
}

json stats_json(const AggregateStats& s) {
    return {{"best", real_json(s.best)}, {"mean", real_json(s.mean)}, {"std", real_json(s.std)},
            {"sr", s.sr},                {"n_trials", s.n_trials},   {"n_succeeded", s.n_succeeded}};
}

json ranking_to_json(const NamedRanking& r) {
    json ranks = json::object();
    for (const auto& alg : r.table.algorithms) {
        json per = json::object();
        for (const auto& f : r.table.functions) per[f] = r.table.ranks.at({alg, f});
        ranks[alg] = per;
    }
    json avg = json::object();
    for (const auto& [alg, v] : r.table.average_rank) avg[alg] = v;
    return {{"group", r.group},
            {"dim", r.dim},
            {"functions", r.table.functions},
            {"algorithms", r.table.algorithms},
            {"ranks", ranks},
            {"average_rank", avg}};
}

}  // namespace

void write_trials_csv(std::ostream& out, std::span<const TrialOutcome> outcomes) {
    out << kTrialsCsvHeader << '\n';
    for (const auto& o : outcomes) {
        out << o.algorithm << ',' << o.function << ',' << o.dim << ',' << o.seed << ','
            << format_real(o.final_error) << ',' << o.evals_used << ',' << (o.succeeded ? 1 : 0) << '\n';
    }
}

std::string trial_json(const TrialOutcome& o) {
    json trace = json::array();
    for (const auto& p : o.error_trace) trace.push_back({p.evaluation_index, real_json(p.best_error)});
    json doc = {{"schema_version", kSummarySchemaVersion},
                {"algorithm", o.algorithm},
                {"function", o.function},
                {"dim", o.dim},
                {"seed", o.seed},
                {"final_error", real_json(o.final_error)},
                {"evals_used", o.evals_used},
                {"succeeded", o.succeeded},
                {"best_position", o.has_best ? json(o.best.position) : json(nullptr)},
                {"best_fitness", o.has_best ? real_json(o.best.fitness) : json(nullptr)},
                {"error_trace", trace}};
    return doc.dump(2) + "\n";
}

std::vector<TrialOutcome> read_trials_csv(std::istream& in) {
    std::vector<TrialOutcome> outcomes;
    std::string line;
    std::size_t row = 0;
    auto chomp = [](std::string& s) {
        if (!s.empty() && s.back() == '\r') s.pop_back();
    };
    if (!std::getline(in, line)) throw CsvError(1, "missing header");
    ++row;
    chomp(line);
    if (line != kTrialsCsvHeader) throw CsvError(row, "unexpected header '" + line + "'");

    while (std::getline(in, line)) {
        ++row;
        chomp(line);
        if (line.empty()) continue;
        const auto f = split(line, ',');
        if (f.size() != 7) {
            throw CsvError(row, "expected 7 fields, got " + std::to_string(f.size()) + " in '" + line + "'");
        }
        try {
            TrialOutcome o;
            o.algorithm = f[0];
            o.function = f[1];
            if (o.algorithm.empty() || o.function.empty()) throw std::invalid_argument("empty identifier");
            o.dim = static_cast<std::size_t>(parse_unsigned(f[2], "dim"));
            o.seed = parse_unsigned(f[3], "seed");
            o.final_error = parse_real(f[4]);
            o.evals_used = parse_unsigned(f[5], "evals_used");
            if (f[6] == "1" || f[6] == "true") {
                o.succeeded = true;
            } else if (f[6] == "0" || f[6] == "false") {
                o.succeeded = false;
            } else {
                throw std::invalid_argument("bad succeeded flag '" + f[6] + "'");
            }
            o.has_best = std::isfinite(o.final_error);
            outcomes.push_back(std::move(o));
        } catch (const std::invalid_argument& e) {
            throw CsvError(row, std::string(e.what()) + " in '" + line + "'");
        }
    }
    return outcomes;
}

std::map<StatsKey, AggregateStats> aggregate_cells(std::span<const TrialOutcome> outcomes,
                                                   double success_threshold) {
    std::map<StatsKey, std::vector<TrialOutcome>> cells;
    for (const auto& o : outcomes) cells[{o.algorithm, o.function, o.dim}].push_back(o);
    std::map<StatsKey, AggregateStats> stats;
    for (const auto& [key, list] : cells) stats[key] = aggregate(list, success_threshold);
    return stats;
}

std::string summary_json(const std::map<StatsKey, AggregateStats>& stats,
                         std::span<const NamedRanking> rankings, std::span<const FailedCell> failures,
                         const std::string& config_json) {
    json cells = json::array();
    for (const auto& [key, s] : stats) {
        json cell = stats_json(s);
        cell["algorithm"] = std::get<0>(key);
        cell["function"] = std::get<1>(key);
        cell["dim"] = std::get<2>(key);
        cells.push_back(std::move(cell));
    }
    json ranks = json::array();
    for (const auto& r : rankings) ranks.push_back(ranking_to_json(r));
    json failed = json::array();
    for (const auto& f : failures) {
        failed.push_back({{"algorithm", f.algorithm}, {"function", f.function}, {"dim", f.dim}, {"error", f.message}});
    }
    json doc = {{"schema_version", kSummarySchemaVersion},
                {"config", json::parse(config_json)},
                {"cells", cells},
                {"rankings", ranks},
                {"failed_cells", failed}};
    return doc.dump(2) + "\n";
}

std::string rankings_json(std::span<const NamedRanking> rankings) {
    json ranks = json::array();
    for (const auto& r : rankings) ranks.push_back(ranking_to_json(r));
    json doc = {{"schema_version", kSummarySchemaVersion}, {"rankings", ranks}};
    return doc.dump(2) + "\n";
}

std::vector<std::string> parse_function_group(const std::string& spec) {
    auto make_range = [](int lo, int hi) {
        std::vector<std::string> out;
        for (int i = lo; i <= hi; ++i) out.push_back("F" + std::to_string(i));
        return out;
    };
    if (spec == "multimodal") return make_range(1, 6);
    if (spec == "unimodal") return make_range(7, 12);
    if (spec == "all") return make_range(1, 12);

    std::vector<std::string> out;
    for (const auto& part : split(spec, ',')) {
        const auto dash = part.find('-');
        if (dash != std::string::npos && part.size() > 1 && part[0] == 'F') {
            const auto a = part.substr(0, dash);
            const auto b = part.substr(dash + 1);
            if (a.size() < 2 || b.size() < 2 || b[0] != 'F') throw std::invalid_argument("bad function range: " + part);
            const int lo = static_cast<int>(parse_unsigned(a.substr(1), "function index"));
            const int hi = static_cast<int>(parse_unsigned(b.substr(1), "function index"));
            if (lo < 1 || hi > 12 || lo > hi) throw std::invalid_argument("bad function range: " + part);
            for (auto& f : make_range(lo, hi)) out.push_back(std::move(f));
        } else if (!part.empty()) {
            out.push_back(part);
        } else {
            throw std::invalid_argument("empty entry in function group '" + spec + "'");
        }
    }
    if (out.empty()) throw std::invalid_argument("empty function group");
    return out;
}

std::vector<NamedRanking> rank_from_outcomes(
    std::span<const TrialOutcome> outcomes,
    std::span<const std::pair<std::string, std::vector<std::string>>> groups, double success_threshold) {
    const auto stats = aggregate_cells(outcomes, success_threshold);
    std::set<std::size_t> dims;
    for (const auto& [key, _] : stats) dims.insert(std::get<2>(key));

    std::vector<NamedRanking> out;
    for (std::size_t dim : dims) {
        std::map<CellKey, AggregateStats> slice;
        for (const auto& [key, s] : stats) {
            if (std::get<2>(key) == dim) slice[{std::get<0>(key), std::get<1>(key)}] = s;
        }
        for (const auto& [name, functions] : groups) {
            out.push_back({name, dim, rank_algorithms(slice, functions)});
        }
    }
    return out;
}

std::string diagnostics_basename(const TrajectoryLog& log) {
    return log.algorithm + "_" + log.function + "_d" + std::to_string(log.dim) + "_s" + std::to_string(log.seed);
}

void write_events_csv(std::ostream& out, const TrajectoryLog& log) {
    out << "evaluation_index,particle_index,event,fitness,delta_f,delta_x,gamma,probability,tunneling,"
           "sigma,sweep,scale_index";
    for (std::size_t d = 0; d < log.dim; ++d) out << ",x" << d;
    out << '\n';
    for (const auto& e : log.events) {
        out << e.evaluation_index << ',' << e.particle_index << ',' << to_string(e.kind) << ','
            << format_real(e.fitness) << ',' << format_real(e.delta_f) << ',' << format_real(e.delta_x) << ','
            << format_real(e.gamma) << ',' << format_real(e.probability) << ',' << (e.tunneling ? 1 : 0) << ','
            << format_real(e.sigma) << ',' << e.sweep << ',' << e.scale_index;
        for (std::size_t d = 0; d < log.dim; ++d) {
            out << ',' << (d < e.position.size() ? format_real(e.position[d]) : std::string());
        }
        out << '\n';
    }
}

std::string histogram_json(std::span<const WaveHistogram> histograms, bool joint) {
    json list = json::array();
    for (const auto& h : histograms) {
        list.push_back({{"edges", h.edges}, {"counts", h.counts}, {"density", h.density}, {"total", h.total}});
    }
    json doc = {{"schema_version", kSummarySchemaVersion},
                {"kind", joint ? "joint" : "marginal"},
                {"histograms", list}};
    return doc.dump() + "\n";
}

std::string transmission_json(std::span<const TransmissionPoint> trace) {
    json points = json::array();
    for (const auto& p : trace) {
        points.push_back({{"evaluation_index", p.evaluation_index},
                          {"probability", p.probability},
                          {"sweep", p.sweep},
                          {"scale_index", p.scale_index}});
    }
    json doc = {{"schema_version", kSummarySchemaVersion}, {"transmission", points}};
    return doc.dump() + "\n";
}

}  // namespace qdopt
