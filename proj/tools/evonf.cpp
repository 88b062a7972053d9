/*
 * evonf: experiment front end.
 *
 *   evonf run --config cfg.json [--mode type1|type2|type3] [--seeds 1,2,3]
 *             [--holdout] [--out DIR] [--threads N] [--stable-timing]
 *   evonf gen-mackey [--tau 17] [--n 1024] [--dt 0.1] [--washout 200] --out series.csv
 *   evonf report DIR
 */

#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include <evonf/evonf.hpp>

using nlohmann::json;

namespace {

std::size_t column_index(const evonf::SeriesSpec& s, const json& j, const char* what) {
    if (j.is_number_unsigned() || j.is_number_integer()) return j.get<std::size_t>();
    const std::string name = j.get<std::string>();
    if (s.source == evonf::SeriesSpec::Source::MackeyGlass) {
        if (name == "x") return 0;
        throw evonf::InvalidArgument(std::string(what) + ": the synthetic series has one column, 'x'");
    }
    for (std::size_t i = 0; i < s.csv.columns.size(); ++i)
        if (s.csv.columns[i] == name) return i;
    throw evonf::MissingColumn(std::string(what) + ": column '" + name +
                               "' not among the loaded columns");
}

evonf::SeriesSpec series_from_json(const json& j) {
    evonf::SeriesSpec s;
    const json& src = j.at("source");
    const std::string type = src.at("type").get<std::string>();
    if (type == "mackey_glass") {
        s.source = evonf::SeriesSpec::Source::MackeyGlass;
        if (src.contains("tau")) s.mg.tau = src["tau"].get<double>();
        if (src.contains("n")) s.mg.n = src["n"].get<std::size_t>();
        if (src.contains("dt")) s.mg.dt = src["dt"].get<double>();
        if (src.contains("x0")) s.mg.x0 = src["x0"].get<double>();
        if (src.contains("washout")) s.mg.washout = src["washout"].get<double>();
    } else if (type == "csv") {
        s.source = evonf::SeriesSpec::Source::Csv;
        s.csv.path = src.at("path").get<std::string>();
        for (const auto& c : src.at("columns")) s.csv.columns.push_back(c.get<std::string>());
    } else {
        throw evonf::InvalidArgument("series.source.type must be mackey_glass or csv");
    }
    if (j.contains("lags")) {
        s.lags.clear();
        for (const auto& l : j["lags"]) {
            evonf::LagSpec ls;
            if (l.is_object()) {
                ls.column = column_index(s, l.at("column"), "lags");
                ls.lag = l.at("lag").get<std::size_t>();
            } else {
                ls.column = 0;
                ls.lag = l.get<std::size_t>();
            }
            s.lags.push_back(ls);
        }
    }
    if (j.contains("target")) {
        const json& t = j["target"];
        if (t.contains("column")) s.target_column = column_index(s, t["column"], "target");
        if (t.contains("horizon")) s.horizon = t["horizon"].get<std::size_t>();
    }
    if (j.contains("split")) s.split_fraction = j["split"].get<double>();
    if (j.contains("normalize")) s.normalize = j["normalize"].get<bool>();
    return s;
}

evonf::ExperimentConfig config_from_json(const json& j) {
    evonf::ExperimentConfig cfg;
    cfg.series = series_from_json(j.at("series"));
    if (j.contains("mode")) cfg.mode = evonf::parse_learning_mode(j["mode"].get<std::string>());
    if (j.contains("ea")) {
        const json& e = j["ea"];
        if (e.contains("population_size")) cfg.ea.population_size = e["population_size"].get<std::size_t>();
        if (e.contains("generations")) cfg.ea.generations = e["generations"].get<std::size_t>();
        if (e.contains("rank_pressure")) cfg.ea.rank_pressure = e["rank_pressure"].get<double>();
        if (e.contains("elitism_fraction")) cfg.ea.elitism_fraction = e["elitism_fraction"].get<double>();
        if (e.contains("mutation_rate_start")) cfg.ea.mutation_rate_start = e["mutation_rate_start"].get<double>();
        if (e.contains("mutation_floor")) cfg.ea.mutation_floor = e["mutation_floor"].get<double>();
        if (e.contains("mutation_b")) cfg.ea.mutation_b = e["mutation_b"].get<double>();
        if (e.contains("crossover_rate")) cfg.ea.crossover_rate = e["crossover_rate"].get<double>();
        if (e.contains("n_threads")) cfg.ea.n_threads = e["n_threads"].get<std::size_t>();
    }
    if (j.contains("encoding")) {
        const json& e = j["encoding"];
        if (e.contains("initial_mf_counts"))
            for (const auto& c : e["initial_mf_counts"])
                cfg.initial_mf_counts.push_back(c.get<std::size_t>());
        if (e.contains("initial_shape")) {
            const std::string sh = e["initial_shape"].get<std::string>();
            if (sh == "bell") cfg.initial_shape = evonf::MfShape::Bell;
            else if (sh == "gaussian") cfg.initial_shape = evonf::MfShape::Gaussian;
            else throw evonf::InvalidArgument("encoding.initial_shape must be bell or gaussian");
        }
        if (e.contains("count_min")) cfg.count_min = e["count_min"].get<std::size_t>();
        if (e.contains("count_max")) cfg.count_max = e["count_max"].get<std::size_t>();
        if (e.contains("max_mf")) cfg.max_mf = e["max_mf"].get<std::size_t>();
        if (e.contains("evolve_label_masks")) cfg.evolve_label_masks = e["evolve_label_masks"].get<bool>();
    }
    if (j.contains("epochs")) cfg.epochs = j["epochs"].get<std::size_t>();
    if (j.contains("seeds")) {
        cfg.seeds.clear();
        for (const auto& s : j["seeds"]) cfg.seeds.push_back(s.get<std::uint64_t>());
    }
    if (j.contains("holdout")) cfg.holdout = j["holdout"].get<bool>();
    if (j.contains("holdout_fraction")) cfg.holdout_fraction = j["holdout_fraction"].get<double>();
    if (j.contains("output_dir")) cfg.out_dir = j["output_dir"].get<std::string>();
    return cfg;
}

std::vector<std::uint64_t> parse_seed_list(const std::string& s) {
    std::vector<std::uint64_t> out;
    std::size_t start = 0;
    while (start <= s.size()) {
        std::size_t pos = s.find(',', start);
        if (pos == std::string::npos) pos = s.size();
        const std::string tok = s.substr(start, pos - start);
        if (!tok.empty()) out.push_back(std::stoull(tok));
        start = pos + 1;
    }
    if (out.empty()) throw evonf::InvalidArgument("--seeds: empty list");
    return out;
}

int cmd_run(const std::string& config_path, const std::string& mode, const std::string& seeds,
            bool holdout, const std::string& out_dir, std::size_t threads, bool stable_timing) {
    std::ifstream in(config_path);
    if (!in) throw evonf::IoError("cannot open config '" + config_path + "'");
    json j = json::parse(in);
    evonf::ExperimentConfig cfg = config_from_json(j);
    if (!mode.empty()) cfg.mode = evonf::parse_learning_mode(mode);
    if (!seeds.empty()) cfg.seeds = parse_seed_list(seeds);
    if (holdout) cfg.holdout = true;
    if (!out_dir.empty()) cfg.out_dir = out_dir;
    if (threads > 0) cfg.ea.n_threads = threads;
    cfg.zero_timing = stable_timing;

    std::printf("running %s on %s: %zu seed(s), population %zu, %zu generations\n",
                evonf::learning_mode_name(cfg.mode), evonf::dataset_label(cfg.series).c_str(),
                cfg.seeds.size(), cfg.ea.population_size, cfg.ea.generations);
    const evonf::ExperimentResult res = evonf::run_experiment(cfg);
    std::fputs(evonf::report_text(res, cfg).c_str(), stdout);
    if (!cfg.out_dir.empty()) {
        evonf::emit_report(res, cfg, cfg.out_dir);
        std::printf("report, histories, and winner genomes written to %s/\n", cfg.out_dir.c_str());
    }
    return 0;
}

int cmd_gen_mackey(double tau, std::size_t n, double dt, double x0, double washout,
                   const std::string& out) {
    evonf::MackeyGlassSpec spec;
    spec.tau = tau;
    spec.n = n;
    spec.dt = dt;
    spec.x0 = x0;
    spec.washout = washout;
    const std::vector<double> xs = evonf::gen_mackey_glass(spec);
    std::vector<double> ts(xs.size());
    for (std::size_t i = 0; i < ts.size(); ++i) ts[i] = static_cast<double>(i);
    evonf::save_csv_series(out, {"t", "x"}, {ts, xs});
    std::printf("%zu samples written to %s\n", xs.size(), out.c_str());
    return 0;
}

int cmd_report(const std::string& dir) {
    const std::string path = dir + "/report.json";
    std::ifstream in(path);
    if (!in) throw evonf::IoError("cannot open '" + path + "'");
    json j = json::parse(in);
    const json& e = j.at("experiment");
    std::printf("dataset: %s   protocol: %s   fitness split: %s\n",
                e.at("dataset").get<std::string>().c_str(),
                e.at("mode").get<std::string>().c_str(),
                e.at("fitness_split").get<std::string>().c_str());
    std::printf("train/test samples: %zu/%zu\n\n", e.at("train_samples").get<std::size_t>(),
                e.at("test_samples").get<std::size_t>());
    std::printf("%6s  %10s  %10s  %12s  %16s\n", "seed", "train", "test", "mf counts",
                "rules (from)");
    for (const auto& s : j.at("seeds")) {
        std::string counts;
        for (const auto& c : s.at("mf_counts"))
            counts += (counts.empty() ? "" : "x") + std::to_string(c.get<std::size_t>());
        const std::string rules = std::to_string(s.at("active_rules").get<std::size_t>()) + " (" +
                                  std::to_string(s.at("initial_rules").get<std::size_t>()) + ")";
        std::printf("%6llu  %10.6f  %10.6f  %12s  %16s\n",
                    static_cast<unsigned long long>(s.at("seed").get<std::uint64_t>()),
                    s.at("train_rmse").get<double>(), s.at("test_rmse").get<double>(),
                    counts.c_str(), rules.c_str());
    }
    const json& a = j.at("aggregate");
    std::printf("\nmedian test RMSE %.6f   best %.6f   worst %.6f\n",
                a.at("median_test_rmse").get<double>(), a.at("best_test_rmse").get<double>(),
                a.at("worst_test_rmse").get<double>());
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"genetic-fuzzy time-series modeling"};
    app.require_subcommand(1);

    std::string config_path, mode, seeds, out_dir, report_dir;
    bool holdout = false, stable_timing = false;
    std::size_t threads = 0;
    CLI::App* run = app.add_subcommand("run", "run an experiment from a JSON config");
    run->add_option("--config", config_path, "experiment config (JSON)")->required();
    run->add_option("--mode", mode, "override learning mode: type1|type2|type3");
    run->add_option("--seeds", seeds, "override seed list, comma separated");
    run->add_flag("--holdout", holdout, "score fitness on a holdout carved from the training split");
    run->add_option("--out", out_dir, "override output directory");
    run->add_option("--threads", threads, "fitness evaluation threads (same results any value)");
    run->add_flag("--stable-timing", stable_timing,
                  "write zeros for wall-clock fields (byte-stable outputs)");

    double tau = 17.0, dt = 0.1, x0 = 1.2, washout = 200.0;
    std::size_t n = 1024;
    std::string mg_out = "mackey_glass.csv";
    CLI::App* gen = app.add_subcommand("gen-mackey", "synthesize a delay-feedback benchmark series");
    gen->add_option("--tau", tau, "delay (time units)");
    gen->add_option("--n", n, "number of unit-spaced samples");
    gen->add_option("--dt", dt, "integration step");
    gen->add_option("--x0", x0, "constant history value");
    gen->add_option("--washout", washout, "discarded prefix (time units)");
    gen->add_option("--out", mg_out, "output CSV path");

    CLI::App* rep = app.add_subcommand("report", "print the table for an experiment directory");
    rep->add_option("dir", report_dir, "directory containing report.json")->required();

    CLI11_PARSE(app, argc, argv);
    try {
        if (run->parsed())
            return cmd_run(config_path, mode, seeds, holdout, out_dir, threads, stable_timing);
        if (gen->parsed()) return cmd_gen_mackey(tau, n, dt, x0, washout, mg_out);
        if (rep->parsed()) return cmd_report(report_dir);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
