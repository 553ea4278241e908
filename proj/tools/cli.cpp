#include "cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <tuple>

#include <CLI11.hpp>
#include <json.hpp>

#include "qdopt/diagnostics.hpp"
#include "qdopt/io.hpp"

namespace qdopt::cli {

using nlohmann::json;
namespace fs = std::filesystem;

void CliConfig::validate() const {
    if (algorithms.empty()) throw std::invalid_argument("no algorithm given");
    if (functions.empty()) throw std::invalid_argument("no function given");
    if (dims.empty()) throw std::invalid_argument("no dimension given");
    const auto& known = algorithm_ids();
    for (const auto& a : algorithms) {
        if (std::find(known.begin(), known.end(), a) == known.end()) {
            throw std::invalid_argument("unknown algorithm: " + a);
        }
    }
    for (std::size_t d : dims) {
        if (d == 0) throw std::invalid_argument("dimension must be positive");
        for (const auto& f : functions) make_objective(f, d);
    }
    if (trials == 0) throw std::invalid_argument("trials must be positive");
    if (workers == 0) throw std::invalid_argument("workers must be positive");
    if (bins == 0) throw std::invalid_argument("bins must be positive");
    if (init) {
        for (std::size_t d : dims) {
            if (init->size() != d) throw std::invalid_argument("--init has " + std::to_string(init->size()) +
                                                               " coordinates but dim is " + std::to_string(d));
        }
    }
    settings.validate();
}

std::string to_json(const CliConfig& c) {
    const auto& s = c.settings;
    json doc = {
        {"subcommand", c.subcommand},
        {"algorithms", c.algorithms},
        {"functions", c.functions},
        {"dims", c.dims},
        {"max_fes", c.max_fes},
        {"trials", c.trials},
        {"base_seed", c.base_seed},
        {"out_dir", c.out_dir},
        {"workers", c.workers},
        {"init", c.init ? json(*c.init) : json(nullptr)},
        {"bins", c.bins},
        {"groups", c.groups},
        {"input", c.input},
        {"success_threshold", s.success_threshold},
        {"bip",
         {{"k", s.bip.k},
          {"A", s.bip.amplitude_a},
          {"tau", s.bip.anneal_tau},
          {"scale_divisor", s.bip.scale_divisor},
          {"min_scale", s.bip.min_scale},
          {"bounds", to_string(s.bip.bounds_policy)},
          {"spread", to_string(s.bip.spread)},
          {"mean_replacement", s.bip.mean_replacement},
          {"stop_on_success", s.bip.stop_on_success}}},
        {"bbpso", {{"np", s.bbpso.np}, {"stop_on_success", s.bbpso.stop_on_success}}},
        {"bbfwa",
         {{"np", s.bbfwa.np},
          {"amp_init", s.bbfwa.amp_init},
          {"amp_grow", s.bbfwa.amp_grow},
          {"amp_shrink", s.bbfwa.amp_shrink},
          {"stop_on_success", s.bbfwa.stop_on_success}}},
        {"gbde",
         {{"np", s.gbde.np},
          {"cr_mean", s.gbde.cr_mean},
          {"cr_std", s.gbde.cr_std},
          {"stop_on_success", s.gbde.stop_on_success}}},
    };
    return doc.dump(2) + "\n";
}

CliConfig config_from_json(const std::string& text) {
    const json j = json::parse(text);
    CliConfig c;
    c.subcommand = j.value("subcommand", c.subcommand);
    c.algorithms = j.value("algorithms", c.algorithms);
    c.functions = j.value("functions", c.functions);
    c.dims = j.value("dims", c.dims);
    c.max_fes = j.value("max_fes", c.max_fes);
    c.trials = j.value("trials", c.trials);
    c.base_seed = j.value("base_seed", c.base_seed);
    c.out_dir = j.value("out_dir", c.out_dir);
    c.workers = j.value("workers", c.workers);
    if (j.contains("init") && !j["init"].is_null()) c.init = j["init"].get<std::vector<double>>();
    c.bins = j.value("bins", c.bins);
    c.groups = j.value("groups", c.groups);
    c.input = j.value("input", c.input);

    auto& s = c.settings;
    s.success_threshold = j.value("success_threshold", s.success_threshold);
    if (j.contains("bip")) {
        const auto& b = j["bip"];
        s.bip.k = b.value("k", s.bip.k);
        s.bip.amplitude_a = b.value("A", s.bip.amplitude_a);
        s.bip.anneal_tau = b.value("tau", s.bip.anneal_tau);
        s.bip.scale_divisor = b.value("scale_divisor", s.bip.scale_divisor);
        s.bip.min_scale = b.value("min_scale", s.bip.min_scale);
        if (b.contains("bounds")) s.bip.bounds_policy = parse_bounds_policy(b["bounds"].get<std::string>());
        if (b.contains("spread")) s.bip.spread = parse_spread_aggregation(b["spread"].get<std::string>());
        s.bip.mean_replacement = b.value("mean_replacement", s.bip.mean_replacement);
        s.bip.stop_on_success = b.value("stop_on_success", s.bip.stop_on_success);
    }
    if (j.contains("bbpso")) {
        const auto& b = j["bbpso"];
        s.bbpso.np = b.value("np", s.bbpso.np);
        s.bbpso.stop_on_success = b.value("stop_on_success", s.bbpso.stop_on_success);
    }
    if (j.contains("bbfwa")) {
        const auto& b = j["bbfwa"];
        s.bbfwa.np = b.value("np", s.bbfwa.np);
        s.bbfwa.amp_init = b.value("amp_init", s.bbfwa.amp_init);
        s.bbfwa.amp_grow = b.value("amp_grow", s.bbfwa.amp_grow);
        s.bbfwa.amp_shrink = b.value("amp_shrink", s.bbfwa.amp_shrink);
        s.bbfwa.stop_on_success = b.value("stop_on_success", s.bbfwa.stop_on_success);
    }
    if (j.contains("gbde")) {
        const auto& b = j["gbde"];
        s.gbde.np = b.value("np", s.gbde.np);
        s.gbde.cr_mean = b.value("cr_mean", s.gbde.cr_mean);
        s.gbde.cr_std = b.value("cr_std", s.gbde.cr_std);
        s.gbde.stop_on_success = b.value("stop_on_success", s.gbde.stop_on_success);
    }
    return c;
}

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const fs::path& path, const std::string& content) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << content;
    if (!out.flush()) throw std::runtime_error("write failed: " + path.string());
}

std::string trial_basename(const std::string& alg, const std::string& func, std::size_t dim,
                           std::uint64_t seed) {
    return alg + "_" + func + "_d" + std::to_string(dim) + "_s" + std::to_string(seed);
}

AlgorithmSettings effective_settings(const CliConfig& c) {
    AlgorithmSettings s = c.settings;
    s.bip.init_position = c.init;
    return s;
}

/// Default ranking groups: the multimodal and unimodal benchmark sets, each
/// cut down to the functions actually present.
std::vector<std::pair<std::string, std::vector<std::string>>> resolve_groups(
    const std::vector<std::string>& requested, const std::set<std::string>& present) {
    std::vector<std::pair<std::string, std::vector<std::string>>> groups;
    if (!requested.empty()) {
        for (const auto& g : requested) groups.emplace_back(g, parse_function_group(g));
        return groups;
    }
    for (const char* name : {"multimodal", "unimodal"}) {
        std::vector<std::string> members;
        for (const auto& f : parse_function_group(name)) {
            if (present.count(f)) members.push_back(f);
        }
        if (!members.empty()) groups.emplace_back(name, std::move(members));
    }
    return groups;
}

int cmd_run(const CliConfig& c, std::ostream& out) {
    const auto& alg = c.algorithms.front();
    const auto& func = c.functions.front();
    const std::size_t dim = c.dims.front();
    const auto outcome = run_trial(alg, func, dim, c.budget_for(dim), c.base_seed, effective_settings(c));

    const fs::path dir(c.out_dir);
    const auto base = trial_basename(alg, func, dim, c.base_seed);
    std::ostringstream csv;
    write_trials_csv(csv, std::span(&outcome, 1));
    write_file(dir / (base + ".csv"), csv.str());
    write_file(dir / (base + ".json"), trial_json(outcome));

    out << "algorithm " << alg << "\nfunction " << func << "\ndim " << dim << "\nseed " << c.base_seed
        << "\nfinal_error " << format_real(outcome.final_error) << "\nevals_used " << outcome.evals_used
        << "\nsucceeded " << (outcome.succeeded ? 1 : 0) << '\n';
    return 0;
}

int cmd_experiment(const CliConfig& c, std::ostream& out, std::ostream& err) {
    ExperimentOptions opts;
    opts.n_trials = c.trials;
    opts.base_seed = c.base_seed;
    opts.workers = c.workers;
    opts.settings = effective_settings(c);

    std::vector<TrialOutcome> rows;
    std::vector<FailedCell> failures;
    for (const auto& alg : c.algorithms) {
        for (const auto& func : c.functions) {
            for (std::size_t dim : c.dims) {
                opts.max_fes = c.budget_for(dim);
                try {
                    auto cell = run_experiment(alg, func, dim, opts);
                    rows.insert(rows.end(), cell.begin(), cell.end());
                } catch (const std::exception& e) {
                    failures.push_back({alg, func, dim, e.what()});
                    err << "cell (" << alg << ", " << func << ", " << dim << ") failed: " << e.what() << '\n';
                }
            }
        }
    }
    std::stable_sort(rows.begin(), rows.end(), [](const TrialOutcome& a, const TrialOutcome& b) {
        return std::tie(a.algorithm, a.function, a.dim, a.seed) < std::tie(b.algorithm, b.function, b.dim, b.seed);
    });

    const auto stats = aggregate_cells(rows, c.settings.success_threshold);
    std::set<std::string> present;
    for (const auto& r : rows) present.insert(r.function);
    std::vector<NamedRanking> rankings;
    for (const auto& group : resolve_groups(c.groups, present)) {
        try {
            auto r = rank_from_outcomes(rows, std::span(&group, 1), c.settings.success_threshold);
            rankings.insert(rankings.end(), r.begin(), r.end());
        } catch (const std::exception& e) {
            err << "ranking for group " << group.first << " skipped: " << e.what() << '\n';
        }
    }

    const fs::path dir(c.out_dir);
    std::ostringstream csv;
    write_trials_csv(csv, rows);
    write_file(dir / "results.csv", csv.str());
    write_file(dir / "summary.json", summary_json(stats, rankings, failures, to_json(c)));

    for (const auto& [key, s] : stats) {
        out << std::get<0>(key) << ' ' << std::get<1>(key) << " d" << std::get<2>(key) << " mean "
            << format_real(s.mean) << " std " << format_real(s.std) << " best " << format_real(s.best) << " sr "
            << s.sr << '\n';
    }
    for (const auto& r : rankings) {
        out << "AR " << r.group << " d" << r.dim << ':';
        for (const auto& [alg, v] : r.table.average_rank) out << ' ' << alg << '=' << v;
        out << '\n';
    }
    out << "wrote " << rows.size() << " rows to " << (dir / "results.csv").string() << '\n';
    return failures.empty() ? 0 : 1;
}

int cmd_diagnose(const CliConfig& c, std::ostream& out) {
    const auto& alg = c.algorithms.front();
    const auto& func = c.functions.front();
    const std::size_t dim = c.dims.front();
    BudgetedObjective objective(make_objective(func, dim), c.budget_for(dim));
    const auto run = record_run(alg, objective, effective_settings(c), c.base_seed);

    const fs::path dir(c.out_dir);
    const auto base = diagnostics_basename(run.log);
    std::ostringstream events;
    write_events_csv(events, run.log);
    write_file(dir / (base + "_events.csv"), events.str());

    std::vector<WaveHistogram> hists;
    const bool joint = dim <= 2;
    if (joint) {
        hists.push_back(wave_modulus(run.log, c.bins));
    } else {
        hists = wave_marginals(run.log, c.bins);
    }
    write_file(dir / (base + "_histogram.json"), histogram_json(hists, joint));
    const auto trace = transmission_trace(run.log);
    write_file(dir / (base + "_transmission.json"), transmission_json(trace));

    out << "final_error " << format_real(run.outcome.final_error) << "\nevals_used " << run.outcome.evals_used
        << "\nevents " << run.log.events.size() << "\ntunneling_decisions " << trace.size()
        << "\nexpected_solution_value " << format_real(expected_solution_value(run.log)) << '\n';
    if (joint) {
        const auto& h = hists.front();
        const auto idx = h.unflatten(h.mode_cell());
        out << "mode_cell";
        for (std::size_t a = 0; a < idx.size(); ++a) {
            out << " [" << format_real(h.edges[a][idx[a]]) << ',' << format_real(h.edges[a][idx[a] + 1]) << ']';
        }
        out << '\n';
    }
    out << "wrote " << (dir / (base + "_events.csv")).string() << '\n';
    return 0;
}

int cmd_rank(const CliConfig& c, std::ostream& out) {
    if (c.input.empty()) throw std::invalid_argument("rank needs --input results.csv");
    std::ifstream in(c.input);
    if (!in) throw std::runtime_error("cannot open " + c.input);
    const auto rows = read_trials_csv(in);
    if (rows.empty()) throw std::invalid_argument("no trial rows in " + c.input);
    std::set<std::string> present;
    for (const auto& r : rows) present.insert(r.function);
    const auto groups = resolve_groups(c.groups, present);
    if (groups.empty()) throw std::invalid_argument("no ranking group matches the input functions");
    const auto rankings = rank_from_outcomes(rows, groups, c.settings.success_threshold);
    const auto doc = rankings_json(rankings);
    out << doc;
    if (!c.out_dir.empty() && c.out_dir != ".") write_file(fs::path(c.out_dir) / "rankings.json", doc);
    return 0;
}

/// Finds --config before the real parse so that explicit flags override the
/// file's values.
std::optional<std::string> find_config_path(const std::vector<std::string>& args) {
    for (std::size_t i = 1; i < args.size(); ++i) {
        if (args[i] == "--config" && i + 1 < args.size()) return args[i + 1];
        if (args[i].rfind("--config=", 0) == 0) return args[i].substr(9);
    }
    return std::nullopt;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CliConfig cfg;
    try {
        if (const auto path = find_config_path(args)) cfg = config_from_json(read_file(*path));
    } catch (const std::exception& e) {
        err << "error: bad --config: " << e.what() << '\n';
        return 2;
    }

    CLI::App app{"Bare-bones quantum-inspired optimizer and benchmark harness"};
    app.require_subcommand(1);

    std::string config_path;
    bool print_config = false;
    std::string preset;
    std::vector<double> init;
    std::string bounds(to_string(cfg.settings.bip.bounds_policy));
    std::string spread(to_string(cfg.settings.bip.spread));
    std::size_t np = 0;
    bool stop_on_success = false;
    auto& s = cfg.settings;

    auto add_common = [&](CLI::App* sub, bool grid) {
        sub->add_option("--config", config_path, "Load settings from a JSON file (flags still override)");
        sub->add_flag("--print-config", print_config, "Print the effective configuration as JSON and exit");
        if (grid) {
            sub->add_option("--algo,--algos", cfg.algorithms, "Algorithms: bip, bbpso, bbfwa, gbde")->delimiter(',');
            sub->add_option("--func,--funcs", cfg.functions, "Functions: F1..F12, double_well, paraboloid")->delimiter(',');
            sub->add_option("--dim,--dims", cfg.dims, "Dimensions")->delimiter(',');
            sub->add_option("--trials", cfg.trials, "Trials per cell");
            sub->add_option("--workers", cfg.workers, "Concurrent trials");
            sub->add_option("--group", cfg.groups, "Ranking groups (multimodal, unimodal, all, F1-F4, F1,F3)");
            sub->add_option("--preset", preset, "desk: 10D, 50000 FES, 20 trials")->check(CLI::IsMember({"desk"}));
        } else {
            sub->add_option("--algo", cfg.algorithms, "Algorithm: bip, bbpso, bbfwa, gbde")->expected(1);
            sub->add_option("--func", cfg.functions, "Function: F1..F12, double_well, paraboloid")->expected(1);
            sub->add_option("--dim", cfg.dims, "Dimension")->expected(1);
        }
        sub->add_option("--max-fes", cfg.max_fes, "Evaluation budget (default 10000 * dim)");
        sub->add_option("--seed", cfg.base_seed, "Seed (first seed of a trial series)");
        sub->add_option("--threshold", s.success_threshold, "Success threshold on the final error");
        sub->add_option("--out", cfg.out_dir, "Output directory");
        sub->add_option("--init", init, "BIP start position, e.g. 2,2")->delimiter(',');
        sub->add_option("--k", s.bip.k, "BIP population size");
        sub->add_option("--A", s.bip.amplitude_a, "BIP tunneling amplitude (0 disables tunneling)");
        sub->add_option("--tau", s.bip.anneal_tau, "BIP annealing time constant");
        sub->add_option("--scale-divisor", s.bip.scale_divisor, "BIP scale reduction factor");
        sub->add_option("--min-scale", s.bip.min_scale, "BIP stops once the scale drops below this");
        sub->add_option("--bounds", bounds, "BIP bounds policy: clamp, reflect, resample");
        sub->add_option("--spread", spread, "BIP spread aggregation: max, mean, rms");
        sub->add_flag_callback("--no-mean-replace", [&] { s.bip.mean_replacement = false; },
                               "Disable BIP mean replacement");
        sub->add_option("--np", np, "Population size of every baseline");
        sub->add_option("--cr-mean", s.gbde.cr_mean, "GBDE crossover rate mean");
        sub->add_option("--cr-std", s.gbde.cr_std, "GBDE crossover rate deviation");
        sub->add_option("--amp-init", s.bbfwa.amp_init, "BBFWA initial amplitude (0 = box span)");
        sub->add_option("--amp-grow", s.bbfwa.amp_grow, "BBFWA amplitude growth factor");
        sub->add_option("--amp-shrink", s.bbfwa.amp_shrink, "BBFWA amplitude shrink factor");
        sub->add_flag("--stop-on-success", stop_on_success, "Stop a trial once the threshold is reached");
        sub->add_option("--bins", cfg.bins, "Histogram bins per dimension");
    };

    auto* run = app.add_subcommand("run", "One seeded trial");
    add_common(run, false);
    auto* experiment = app.add_subcommand("experiment", "Algorithms x functions x dims grid");
    add_common(experiment, true);
    auto* diagnose = app.add_subcommand("diagnose", "One trial with trajectory, histogram and transmission export");
    add_common(diagnose, false);
    auto* rank = app.add_subcommand("rank", "Average ranks from a results CSV");
    rank->add_option("--config", config_path, "Load settings from a JSON file");
    rank->add_flag("--print-config", print_config, "Print the effective configuration as JSON and exit");
    rank->add_option("--input,input", cfg.input, "Trials CSV");
    rank->add_option("--group", cfg.groups, "Ranking groups (multimodal, unimodal, all, F1-F4, F1,F3)");
    rank->add_option("--threshold", s.success_threshold, "Success threshold for Sr");
    rank->add_option("--out", cfg.out_dir, "Also write rankings.json here");

    std::vector<const char*> argv;
    argv.reserve(args.size());
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err);
    }

    CLI::App* sub = app.get_subcommands().front();
    cfg.subcommand = sub->get_name();
    try {
        if (!init.empty()) cfg.init = init;
        if (sub != rank) {
            if (sub->count("--bounds")) s.bip.bounds_policy = parse_bounds_policy(bounds);
            if (sub->count("--spread")) s.bip.spread = parse_spread_aggregation(spread);
        }
        if (np > 0) s.bbpso.np = s.bbfwa.np = s.gbde.np = np;
        if (stop_on_success) {
            s.bip.stop_on_success = s.bbpso.stop_on_success = s.bbfwa.stop_on_success = s.gbde.stop_on_success = true;
        }
        if (preset == "desk") {
            if (!sub->count("--dim")) cfg.dims = {10};
            if (!sub->count("--max-fes")) cfg.max_fes = 50000;
            if (!sub->count("--trials")) cfg.trials = 20;
        }
        if (sub != rank) cfg.validate();
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n' << sub->help();
        return 1;
    }

    try {
        if (print_config) {
            out << to_json(cfg);
            return 0;
        }
        if (cfg.subcommand == "run") return cmd_run(cfg, out);
        if (cfg.subcommand == "experiment") return cmd_experiment(cfg, out, err);
        if (cfg.subcommand == "diagnose") return cmd_diagnose(cfg, out);
        return cmd_rank(cfg, out);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
}

}  // namespace qdopt::cli
