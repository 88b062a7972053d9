#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <memory>
#include <string>
#include <vector>

#include "dataset.hpp"
#include "errors.hpp"
#include "evolution.hpp"
#include "genome.hpp"
#include "gradient.hpp"
#include "rulegen.hpp"

namespace evonf {

/*
 * End-to-end experiment protocols over one windowed dataset:
 *
 *   Type 1  evolve everything; fitness = RMSE after gradient-descent
 *           fine-tuning of the candidate's membership functions (the tuning
 *           is part of the evaluation only -- nothing is written back into
 *           the genome).
 *   Type 2  evolve everything; fitness = RMSE of the decoded system as-is
 *           (no gradient descent anywhere in the loop).
 *   Type 3  operators frozen at min/max; evolve the rest; fitness as Type 1.
 *
 * By default the fitness split is the test split, reproducing the original
 * protocol faithfully (which makes test RMSE an optimistically biased model
 * selection target); pass holdout = true to carve a validation split off the
 * training data and keep the test split unseen until the final report.
 */

enum class LearningMode { Type1, Type2, Type3 };

inline const char* learning_mode_name(LearningMode m) {
    switch (m) {
        case LearningMode::Type1: return "type1";
        case LearningMode::Type2: return "type2";
        default: return "type3";
    }
}

inline LearningMode parse_learning_mode(const std::string& s) {
    if (s == "type1" || s == "1") return LearningMode::Type1;
    if (s == "type2" || s == "2") return LearningMode::Type2;
    if (s == "type3" || s == "3") return LearningMode::Type3;
    throw InvalidArgument("unknown learning mode '" + s + "' (type1|type2|type3)");
}

struct ExperimentConfig {
    SeriesSpec series;
    LearningMode mode = LearningMode::Type1;
    EAConfig ea; /* master_seed is overridden by each entry of seeds */
    std::vector<std::size_t> initial_mf_counts; /* seed individual; empty = 3 per input */
    MfShape initial_shape = MfShape::Bell;
    std::size_t count_min = 2, count_max = 4, max_mf = 4;
    bool evolve_label_masks = true;
    std::size_t epochs = 100; /* gradient-descent epochs inside Type 1/3 evaluations */
    std::vector<std::uint64_t> seeds = {1, 2, 3};
    std::string out_dir; /* empty = no files written */
    bool holdout = false;
    double holdout_fraction = 0.2;
    bool zero_timing = false; /* write 0 for all wall-clock fields (byte-stable output) */
};

struct SeedResult {
    std::uint64_t seed = 0;
    double train_rmse = 0.0; /* final tuned system on the full training split */
    double test_rmse = 0.0;  /* final tuned system on the test split */
    std::vector<std::size_t> mf_counts; /* decoded per-variable MF counts of the winner */
    std::size_t active_rules = 0;
    std::size_t initial_rules = 0; /* grid size of the seed individual */
    std::size_t generations = 0;
    double wall_ms = 0.0;
    std::size_t penalty_evals = 0;  /* evaluations that failed and drew the penalty fitness */
    std::size_t gd_invocations = 0; /* gradient-descent runs inside fitness (0 for Type 2) */
    RunHistory history;
    Genome best_genome;
    FuzzyInferenceSystem tuned_fis; /* decoded winner after the final fine-tune */
    double best_fitness = 0.0;      /* fitness-split RMSE of the winner */
};

struct ExperimentResult {
    LearningMode mode = LearningMode::Type1;
    std::size_t train_size = 0, test_size = 0;
    std::vector<SeedResult> seeds;
    double median_test_rmse = 0.0;
    double best_test_rmse = 0.0;
    double worst_test_rmse = 0.0;
    double median_train_rmse = 0.0;
    double total_wall_ms = 0.0;
};

namespace detail {

inline double median_of(std::vector<double> v) {
    if (v.empty()) throw InvalidArgument("median of nothing");
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

/* Universe of each input: [0,1] for normalized data, observed min/max of the
 * training split otherwise. */
inline std::vector<std::pair<double, double>> input_universes(const WindowedDataset& train,
                                                              bool normalized) {
    std::vector<std::pair<double, double>> u(train.n_inputs);
    if (normalized) {
        for (auto& p : u) p = {0.0, 1.0};
        return u;
    }
    for (std::size_t j = 0; j < train.n_inputs; ++j) {
        double lo = train.input(0, j), hi = lo;
        for (std::size_t s = 1; s < train.size(); ++s) {
            lo = std::min(lo, train.input(s, j));
            hi = std::max(hi, train.input(s, j));
        }
        if (!(lo < hi))
            throw ConstantColumn("input " + std::to_string(j) +
                                 " is constant on the training split");
        u[j] = {lo, hi};
    }
    return u;
}

/* Last `fraction` of the training split, as (head, tail). */
inline std::pair<WindowedDataset, WindowedDataset> carve_tail(const WindowedDataset& d,
                                                              double fraction) {
    auto parts = split(d, 1.0 - fraction);
    return {std::move(parts.first), std::move(parts.second)};
}

} // namespace detail

inline EncodingSpec encoding_spec_for(const ExperimentConfig& cfg, const WindowedDataset& train,
                                      bool normalized) {
    EncodingSpec spec;
    spec.n_inputs = train.n_inputs;
    spec.universes = detail::input_universes(train, normalized);
    spec.max_mf = cfg.max_mf;
    spec.count_min = cfg.count_min;
    spec.count_max = cfg.count_max;
    spec.fixed_min_operators = cfg.mode == LearningMode::Type3;
    spec.evolve_label_masks = cfg.evolve_label_masks;
    return spec;
}

/* The grid-partition seed system every run starts from (individual 0):
 * evenly spaced sets, one rule per grid cell, product-like operators. */
inline FuzzyInferenceSystem seed_system(const ExperimentConfig& cfg, const EncodingSpec& spec) {
    std::vector<std::size_t> counts = cfg.initial_mf_counts;
    if (counts.empty()) counts.assign(spec.n_inputs, 3);
    if (counts.size() != spec.n_inputs)
        throw InvalidArgument("initial_mf_counts: need one count per input");
    OperatorParams ops;
    ops.tnorm_p = 1.0;
    ops.tconorm_p = 1.0;
    ops.fixed_min = spec.fixed_min_operators;
    return make_grid_fis(spec.universes, counts, cfg.initial_shape, ops);
}

inline ExperimentResult run_experiment(const ExperimentConfig& cfg) {
    cfg.ea.validate();
    if (cfg.seeds.empty()) throw InvalidArgument("experiment: need at least one seed");
    if (cfg.holdout && !(cfg.holdout_fraction > 0.0 && cfg.holdout_fraction < 1.0))
        throw InvalidArgument("experiment: holdout_fraction in (0, 1)");

    const PreparedData data = prepare_dataset(cfg.series);
    const EncodingSpec spec = encoding_spec_for(cfg, data.train, cfg.series.normalize);
    const GeneLayout layout = spec.layout();

    /* gd split: where fine-tuning descends; fit split: what fitness scores. */
    WindowedDataset gd_split = data.train, fit_split = data.test;
    if (cfg.holdout) {
        auto parts = detail::carve_tail(data.train, cfg.holdout_fraction);
        gd_split = std::move(parts.first);
        fit_split = std::move(parts.second);
    }

    const FuzzyInferenceSystem seed_fis = seed_system(cfg, spec);
    const Genome seed_genome = encode(seed_fis, spec);
    const bool with_gd = cfg.mode != LearningMode::Type2;

    ExperimentResult result;
    result.mode = cfg.mode;
    result.train_size = data.train.size();
    result.test_size = data.test.size();

    if (!cfg.out_dir.empty()) std::filesystem::create_directories(cfg.out_dir);

    const auto t_all = std::chrono::steady_clock::now();
    for (std::uint64_t seed : cfg.seeds) {
        auto penalty_evals = std::make_shared<std::atomic<std::size_t>>(0);
        auto gd_invocations = std::make_shared<std::atomic<std::size_t>>(0);

        FitnessFn fitness = [&, penalty_evals, gd_invocations](const Genome& g) -> double {
            try {
                Phenotype ph = decode(g, spec);
                double r;
                if (!with_gd) {
                    TsEngine engine(ph.fis, fit_split);
                    r = engine.epoch(false);
                } else {
                    TsEngine engine(ph.fis, gd_split);
                    gd_invocations->fetch_add(1, std::memory_order_relaxed);
                    for (std::size_t e = 0; e < cfg.epochs; ++e) {
                        engine.epoch(true);
                        engine.sgd_step(ph.learning_rate, MembershipFunction::kParamFloor, false);
                    }
                    r = engine.rmse_on(fit_split);
                }
                /* A non-finite loss is a failed evaluation, not a ranking:
                 * it must draw the penalty or it would poison sorting. */
                if (!std::isfinite(r)) throw NumericalFailure("non-finite fitness");
                return r;
            } catch (const Error&) {
                penalty_evals->fetch_add(1, std::memory_order_relaxed);
                return 1e100; /* sorts behind every valid candidate */
            }
        };
        InitFn init = [&](std::size_t index, Rng& rng) -> Genome {
            return index == 0 ? seed_genome : random_genome(spec, rng);
        };
        ActiveRulesFn active_rules = [&](const Genome& g) -> double {
            return static_cast<double>(decode(g, spec).fis.active_rule_count());
        };

        EAConfig ea = cfg.ea;
        ea.master_seed = seed;
        const auto t_seed = std::chrono::steady_clock::now();
        EvolveResult evo = evolve(ea, layout, fitness, init, active_rules);

        SeedResult sr;
        sr.seed = seed;
        sr.generations = ea.generations;
        sr.history = std::move(evo.history);
        sr.best_genome = std::move(evo.best.genome);
        sr.best_fitness = evo.best.fitness;
        sr.penalty_evals = penalty_evals->load();
        sr.gd_invocations = gd_invocations->load();
        sr.initial_rules = 1;
        for (std::size_t v = 0; v < spec.n_inputs; ++v)
            sr.initial_rules *=
                cfg.initial_mf_counts.empty() ? 3 : cfg.initial_mf_counts[v];

        /* Final model: decode the winner; Type 1/3 re-run the fine-tune that
         * its fitness was measured under. */
        Phenotype ph = decode(sr.best_genome, spec);
        if (with_gd) {
            TrainSpec ts;
            ts.learning_rate = ph.learning_rate;
            ts.epochs = cfg.epochs;
            sr.tuned_fis = gd_finetune(ph.fis, gd_split, ts).fis;
        } else {
            sr.tuned_fis = ph.fis;
        }
        for (const auto& var : sr.tuned_fis.inputs) sr.mf_counts.push_back(var.partitions.size());
        sr.active_rules = sr.tuned_fis.active_rule_count();
        {
            TsEngine train_eval(sr.tuned_fis, data.train);
            sr.train_rmse = train_eval.epoch(false);
            sr.test_rmse = train_eval.rmse_on(data.test);
        }
        sr.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() -
                                                               t_seed)
                         .count();
        result.seeds.push_back(std::move(sr));
    }
    result.total_wall_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t_all)
            .count();

    std::vector<double> tests, trains;
    for (const auto& s : result.seeds) {
        tests.push_back(s.test_rmse);
        trains.push_back(s.train_rmse);
    }
    result.median_test_rmse = detail::median_of(tests);
    result.best_test_rmse = *std::min_element(tests.begin(), tests.end());
    result.worst_test_rmse = *std::max_element(tests.begin(), tests.end());
    result.median_train_rmse = detail::median_of(trains);
    return result;
}

/* ------------------------------------------------------------------ */
/* Report emission                                                     */
/* ------------------------------------------------------------------ */

namespace detail {

inline std::string fmt_g(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

inline std::string fmt_ms(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.3f", v);
    return buf;
}

inline std::string json_counts(const std::vector<std::size_t>& v) {
    std::string s = "[";
    for (std::size_t i = 0; i < v.size(); ++i)
        s += (i ? "," : "") + std::to_string(v[i]);
    return s + "]";
}

} // namespace detail

inline std::string dataset_label(const SeriesSpec& s) {
    return s.source == SeriesSpec::Source::MackeyGlass ? std::string("mackey_glass")
                                                       : s.csv.path;
}

/* report.json: hand-assembled (fixed schema, deterministic key order). */
inline std::string report_json(const ExperimentResult& r, const ExperimentConfig& cfg) {
    const bool z = cfg.zero_timing;
    std::string j = "{\n";
    j += "  \"experiment\": {\n";
    j += "    \"mode\": \"" + std::string(learning_mode_name(r.mode)) + "\",\n";
    j += "    \"dataset\": \"" + dataset_label(cfg.series) + "\",\n";
    j += "    \"train_samples\": " + std::to_string(r.train_size) + ",\n";
    j += "    \"test_samples\": " + std::to_string(r.test_size) + ",\n";
    j += "    \"population\": " + std::to_string(cfg.ea.population_size) + ",\n";
    j += "    \"generations\": " + std::to_string(cfg.ea.generations) + ",\n";
    j += "    \"gd_epochs\": " + std::to_string(cfg.mode == LearningMode::Type2 ? 0 : cfg.epochs) +
         ",\n";
    j += "    \"fitness_split\": \"" + std::string(cfg.holdout ? "holdout" : "test") + "\"\n";
    j += "  },\n";
    j += "  \"seeds\": [\n";
    for (std::size_t i = 0; i < r.seeds.size(); ++i) {
        const SeedResult& s = r.seeds[i];
        j += "    {\n";
        j += "      \"seed\": " + std::to_string(s.seed) + ",\n";
        j += "      \"train_rmse\": " + detail::fmt_g(s.train_rmse) + ",\n";
        j += "      \"test_rmse\": " + detail::fmt_g(s.test_rmse) + ",\n";
        j += "      \"fitness_rmse\": " + detail::fmt_g(s.best_fitness) + ",\n";
        j += "      \"mf_counts\": " + detail::json_counts(s.mf_counts) + ",\n";
        j += "      \"active_rules\": " + std::to_string(s.active_rules) + ",\n";
        j += "      \"initial_rules\": " + std::to_string(s.initial_rules) + ",\n";
        j += "      \"penalty_evals\": " + std::to_string(s.penalty_evals) + ",\n";
        j += "      \"gd_invocations\": " + std::to_string(s.gd_invocations) + ",\n";
        j += "      \"wall_ms\": " + detail::fmt_ms(z ? 0.0 : s.wall_ms) + "\n";
        j += i + 1 < r.seeds.size() ? "    },\n" : "    }\n";
    }
    j += "  ],\n";
    j += "  \"aggregate\": {\n";
    j += "    \"median_test_rmse\": " + detail::fmt_g(r.median_test_rmse) + ",\n";
    j += "    \"best_test_rmse\": " + detail::fmt_g(r.best_test_rmse) + ",\n";
    j += "    \"worst_test_rmse\": " + detail::fmt_g(r.worst_test_rmse) + ",\n";
    j += "    \"median_train_rmse\": " + detail::fmt_g(r.median_train_rmse) + ",\n";
    j += "    \"total_wall_ms\": " + detail::fmt_ms(z ? 0.0 : r.total_wall_ms) + "\n";
    j += "  }\n";
    j += "}\n";
    return j;
}

inline std::string report_text(const ExperimentResult& r, const ExperimentConfig& cfg) {
    std::string t;
    t += "dataset: " + dataset_label(cfg.series) + "   protocol: " +
         learning_mode_name(r.mode) + "   fitness split: " +
         (cfg.holdout ? "holdout" : "test") + "\n";
    t += "train/test samples: " + std::to_string(r.train_size) + "/" +
         std::to_string(r.test_size) + "   population " +
         std::to_string(cfg.ea.population_size) + ", " + std::to_string(cfg.ea.generations) +
         " generations";
    if (r.mode != LearningMode::Type2)
        t += ", " + std::to_string(cfg.epochs) + " descent epochs per evaluation";
    t += "\n\n";
    char line[256];
    std::snprintf(line, sizeof(line), "%6s  %10s  %10s  %12s  %16s  %10s\n", "seed", "train",
                  "test", "mf counts", "rules (from)", "wall s");
    t += line;
    for (const auto& s : r.seeds) {
        std::string counts;
        for (std::size_t i = 0; i < s.mf_counts.size(); ++i)
            counts += (i ? "x" : "") + std::to_string(s.mf_counts[i]);
        const std::string rules =
            std::to_string(s.active_rules) + " (" + std::to_string(s.initial_rules) + ")";
        std::snprintf(line, sizeof(line), "%6llu  %10.6f  %10.6f  %12s  %16s  %10.1f\n",
                      static_cast<unsigned long long>(s.seed), s.train_rmse, s.test_rmse,
                      counts.c_str(), rules.c_str(),
                      cfg.zero_timing ? 0.0 : s.wall_ms / 1000.0);
        t += line;
    }
    std::snprintf(line, sizeof(line),
                  "\nmedian test RMSE %.6f   best %.6f   worst %.6f   (normalized units)\n",
                  r.median_test_rmse, r.best_test_rmse, r.worst_test_rmse);
    t += line;
    return t;
}

/* Write report.json, report.txt, per-seed histories, and winner genomes. */
inline void emit_report(const ExperimentResult& r, const ExperimentConfig& cfg,
                        const std::string& dir) {
    std::filesystem::create_directories(dir);
    auto write = [&](const std::string& name, const std::string& content) {
        const std::string path = dir + "/" + name;
        std::ofstream out(path);
        if (!out) throw IoError("cannot write '" + path + "'");
        out << content;
        if (!out) throw IoError("write failed for '" + path + "'");
    };
    write("report.json", report_json(r, cfg));
    write("report.txt", report_text(r, cfg));
    for (const auto& s : r.seeds) {
        RunHistory h = s.history;
        if (cfg.zero_timing)
            for (auto& g : h.gens) g.elapsed_ms = 0.0;
        h.write_csv(dir + "/history_seed" + std::to_string(s.seed) + ".csv");
        save_genome(dir + "/best_genome_seed" + std::to_string(s.seed) + ".txt", s.best_genome);
    }
}

} // namespace evonf
