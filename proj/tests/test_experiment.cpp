#include <gtest/gtest.h>

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "evonf/experiment.hpp"
#include "evonf/genome.hpp"

using evonf::ExperimentConfig;
using evonf::ExperimentResult;
using evonf::LearningMode;
using evonf::run_experiment;
using evonf::SeriesSpec;
using evonf::WindowedDataset;

namespace {

/* Tiny-budget gas-furnace protocol: enough structure to exercise every code
 * path, small enough to run in well under a second. */
ExperimentConfig furnace_config(LearningMode mode) {
    ExperimentConfig cfg;
    cfg.series.source = SeriesSpec::Source::Csv;
    cfg.series.csv.path = "data/gas_furnace.csv";
    cfg.series.csv.columns = {"u", "y"};
    cfg.series.lags = {{0, 3}, {1, 0}};
    cfg.series.target_column = 1;
    cfg.series.horizon = 1;
    cfg.series.split_fraction = 0.5;
    cfg.mode = mode;
    cfg.ea.population_size = 8;
    cfg.ea.generations = 4;
    cfg.initial_mf_counts = {3, 3};
    cfg.epochs = 5;
    cfg.seeds = {1};
    cfg.zero_timing = true;
    return cfg;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    EXPECT_TRUE(in.good()) << path;
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

WindowedDataset counting_dataset(std::size_t n_inputs, std::size_t n_samples) {
    WindowedDataset d;
    d.n_inputs = n_inputs;
    std::vector<double> row(n_inputs);
    for (std::size_t s = 0; s < n_samples; ++s) {
        for (std::size_t j = 0; j < n_inputs; ++j)
            row[j] = static_cast<double>(s * n_inputs + j);
        d.add_row(row.data(), static_cast<double>(s));
    }
    return d;
}

} // namespace

TEST(ExperimentHelpers, MedianOf) {
    EXPECT_DOUBLE_EQ(evonf::detail::median_of({3.0}), 3.0);
    EXPECT_DOUBLE_EQ(evonf::detail::median_of({2.0, 1.0}), 1.5);
    EXPECT_DOUBLE_EQ(evonf::detail::median_of({5.0, 1.0, 3.0}), 3.0);
    EXPECT_DOUBLE_EQ(evonf::detail::median_of({4.0, 1.0, 3.0, 2.0}), 2.5);
    EXPECT_THROW(evonf::detail::median_of({}), evonf::InvalidArgument);
}

TEST(ExperimentHelpers, InputUniversesObservedOrUnit) {
    const WindowedDataset d = counting_dataset(2, 5);
    const auto unit = evonf::detail::input_universes(d, true);
    EXPECT_EQ(unit[0], (std::pair<double, double>{0.0, 1.0}));
    EXPECT_EQ(unit[1], (std::pair<double, double>{0.0, 1.0}));
    const auto observed = evonf::detail::input_universes(d, false);
    EXPECT_DOUBLE_EQ(observed[0].first, 0.0);
    EXPECT_DOUBLE_EQ(observed[0].second, 8.0);
    EXPECT_DOUBLE_EQ(observed[1].first, 1.0);
    EXPECT_DOUBLE_EQ(observed[1].second, 9.0);

    WindowedDataset flat;
    flat.n_inputs = 1;
    const double x = 0.5;
    flat.add_row(&x, 1.0);
    flat.add_row(&x, 2.0);
    EXPECT_THROW(evonf::detail::input_universes(flat, false), evonf::ConstantColumn);
}

TEST(ExperimentHelpers, CarveTailTakesChronologicalSuffix) {
    const WindowedDataset d = counting_dataset(1, 10);
    const auto [head, tail] = evonf::detail::carve_tail(d, 0.2);
    ASSERT_EQ(head.size(), 8u);
    ASSERT_EQ(tail.size(), 2u);
    EXPECT_DOUBLE_EQ(tail.target(0), 8.0);
    EXPECT_DOUBLE_EQ(tail.target(1), 9.0);
    EXPECT_DOUBLE_EQ(tail.input(0, 0), 8.0);
}

TEST(ExperimentHelpers, EncodingSpecTracksModeAndSeedSystemIsGrid) {
    ExperimentConfig cfg = furnace_config(LearningMode::Type1);
    const evonf::PreparedData data = evonf::prepare_dataset(cfg.series);
    ASSERT_EQ(data.train.n_inputs, 2u);

    evonf::EncodingSpec spec = evonf::encoding_spec_for(cfg, data.train, true);
    EXPECT_EQ(spec.n_inputs, 2u);
    EXPECT_FALSE(spec.fixed_min_operators);
    EXPECT_EQ(spec.universes[0], (std::pair<double, double>{0.0, 1.0}));

    cfg.mode = LearningMode::Type3;
    spec = evonf::encoding_spec_for(cfg, data.train, true);
    EXPECT_TRUE(spec.fixed_min_operators);

    const evonf::FuzzyInferenceSystem seed = evonf::seed_system(cfg, spec);
    EXPECT_EQ(seed.rules.size(), 9u);
    EXPECT_EQ(seed.inputs[0].partitions.size(), 3u);
    EXPECT_TRUE(seed.operators.fixed_min);

    ExperimentConfig bad = furnace_config(LearningMode::Type1);
    bad.initial_mf_counts = {3}; /* two inputs need two counts */
    const evonf::EncodingSpec spec1 = evonf::encoding_spec_for(bad, data.train, true);
    EXPECT_THROW(evonf::seed_system(bad, spec1), evonf::InvalidArgument);
}

TEST(Experiment, Type2NeverInvokesGradientDescent) {
    const ExperimentResult r = run_experiment(furnace_config(LearningMode::Type2));
    ASSERT_EQ(r.seeds.size(), 1u);
    const evonf::SeedResult& s = r.seeds[0];
    EXPECT_EQ(s.gd_invocations, 0u);
    EXPECT_TRUE(std::isfinite(s.test_rmse));
    EXPECT_GT(s.test_rmse, 0.0);
    EXPECT_EQ(s.mf_counts.size(), 2u);
    EXPECT_EQ(s.history.gens.size(), 5u); /* generations + 1 */
    EXPECT_EQ(r.train_size, 146u);
    EXPECT_EQ(r.test_size, 146u);
}

TEST(Experiment, Type1RunsDescentInsideEveryEvaluation) {
    ExperimentConfig cfg = furnace_config(LearningMode::Type1);
    const ExperimentResult r = run_experiment(cfg);
    ASSERT_EQ(r.seeds.size(), 1u);
    const evonf::SeedResult& s = r.seeds[0];
    /* N initial + generations * (N - elite) children, one descent run each */
    const std::size_t expected =
        cfg.ea.population_size +
        cfg.ea.generations * (cfg.ea.population_size - cfg.ea.elite_count());
    EXPECT_EQ(s.gd_invocations, expected);
    EXPECT_EQ(s.penalty_evals, 0u);
    EXPECT_EQ(s.initial_rules, 9u);
    EXPECT_EQ(s.generations, 4u);
    EXPECT_TRUE(std::isfinite(s.train_rmse));
}

TEST(Experiment, Type3WinnerUsesFrozenMinMaxOperators) {
    const ExperimentResult r = run_experiment(furnace_config(LearningMode::Type3));
    for (const auto& s : r.seeds) {
        EXPECT_TRUE(s.tuned_fis.operators.fixed_min);
        EXPECT_DOUBLE_EQ(s.tuned_fis.operators.tnorm_p, 1.0);
        EXPECT_DOUBLE_EQ(s.tuned_fis.operators.tconorm_p, 1.0);
        EXPECT_GT(s.gd_invocations, 0u);
    }
}

TEST(Experiment, RerunsAreDeterministic) {
    const ExperimentConfig cfg = furnace_config(LearningMode::Type1);
    const ExperimentResult a = run_experiment(cfg);
    const ExperimentResult b = run_experiment(cfg);
    ASSERT_EQ(a.seeds.size(), b.seeds.size());
    for (std::size_t i = 0; i < a.seeds.size(); ++i) {
        EXPECT_EQ(a.seeds[i].train_rmse, b.seeds[i].train_rmse);
        EXPECT_EQ(a.seeds[i].test_rmse, b.seeds[i].test_rmse);
        EXPECT_EQ(a.seeds[i].best_genome, b.seeds[i].best_genome);
        ASSERT_EQ(a.seeds[i].history.gens.size(), b.seeds[i].history.gens.size());
        for (std::size_t g = 0; g < a.seeds[i].history.gens.size(); ++g) {
            EXPECT_EQ(a.seeds[i].history.gens[g].best, b.seeds[i].history.gens[g].best);
            EXPECT_EQ(a.seeds[i].history.gens[g].mean, b.seeds[i].history.gens[g].mean);
            EXPECT_EQ(a.seeds[i].history.gens[g].active_rules,
                      b.seeds[i].history.gens[g].active_rules);
        }
    }
    EXPECT_EQ(a.median_test_rmse, b.median_test_rmse);
}

TEST(Experiment, BestFitnessIsMonotoneAndAggregatesAreOrdered) {
    ExperimentConfig cfg = furnace_config(LearningMode::Type2);
    cfg.seeds = {1, 2, 3};
    const ExperimentResult r = run_experiment(cfg);
    ASSERT_EQ(r.seeds.size(), 3u);
    for (const auto& s : r.seeds)
        for (std::size_t g = 1; g < s.history.gens.size(); ++g)
            EXPECT_LE(s.history.gens[g].best, s.history.gens[g - 1].best);
    EXPECT_LE(r.best_test_rmse, r.median_test_rmse);
    EXPECT_LE(r.median_test_rmse, r.worst_test_rmse);
}

TEST(Experiment, EmitReportWritesAllArtifacts) {
    ExperimentConfig cfg = furnace_config(LearningMode::Type1);
    cfg.seeds = {1, 2};
    const ExperimentResult r = run_experiment(cfg);
    const std::string dir = std::string(::testing::TempDir()) + "evonf_report";
    std::filesystem::remove_all(dir);
    evonf::emit_report(r, cfg, dir);

    const auto json = nlohmann::json::parse(read_file(dir + "/report.json"));
    EXPECT_EQ(json["experiment"]["mode"], "type1");
    EXPECT_EQ(json["experiment"]["train_samples"], 146);
    EXPECT_EQ(json["experiment"]["test_samples"], 146);
    EXPECT_EQ(json["experiment"]["gd_epochs"], 5);
    ASSERT_EQ(json["seeds"].size(), 2u);
    EXPECT_EQ(json["seeds"][0]["seed"], 1);
    EXPECT_EQ(json["seeds"][1]["seed"], 2);
    EXPECT_NEAR(json["seeds"][0]["test_rmse"].get<double>(), r.seeds[0].test_rmse, 1e-9);
    EXPECT_EQ(json["seeds"][0]["wall_ms"], 0.0); /* zero_timing */
    EXPECT_NEAR(json["aggregate"]["median_test_rmse"].get<double>(), r.median_test_rmse, 1e-9);
    EXPECT_EQ(json["aggregate"]["total_wall_ms"], 0.0);

    const std::string text = read_file(dir + "/report.txt");
    EXPECT_NE(text.find("median test RMSE"), std::string::npos);
    EXPECT_NE(text.find("type1"), std::string::npos);

    for (std::uint64_t seed : {1u, 2u}) {
        const std::string hist =
            read_file(dir + "/history_seed" + std::to_string(seed) + ".csv");
        std::istringstream lines(hist);
        std::string line;
        ASSERT_TRUE(std::getline(lines, line));
        EXPECT_EQ(line, "generation,best_rmse,mean_rmse,active_rules,elapsed_ms");
        std::size_t rows = 0;
        while (std::getline(lines, line)) {
            ++rows;
            EXPECT_EQ(line.substr(line.rfind(',') + 1), "0.000"); /* zero_timing */
        }
        EXPECT_EQ(rows, 5u);

        const evonf::Genome g =
            evonf::load_genome(dir + "/best_genome_seed" + std::to_string(seed) + ".txt");
        EXPECT_EQ(g, r.seeds[seed - 1].best_genome);
    }
}

TEST(Experiment, ZeroTimingReportsAreByteIdentical) {
    const ExperimentConfig cfg = furnace_config(LearningMode::Type2);
    const ExperimentResult a = run_experiment(cfg);
    const ExperimentResult b = run_experiment(cfg);
    const std::string da = std::string(::testing::TempDir()) + "evonf_rep_a";
    const std::string db = std::string(::testing::TempDir()) + "evonf_rep_b";
    std::filesystem::remove_all(da);
    std::filesystem::remove_all(db);
    evonf::emit_report(a, cfg, da);
    evonf::emit_report(b, cfg, db);
    EXPECT_EQ(read_file(da + "/report.json"), read_file(db + "/report.json"));
    EXPECT_EQ(read_file(da + "/report.txt"), read_file(db + "/report.txt"));
    EXPECT_EQ(read_file(da + "/history_seed1.csv"), read_file(db + "/history_seed1.csv"));
    EXPECT_EQ(read_file(da + "/best_genome_seed1.txt"), read_file(db + "/best_genome_seed1.txt"));
}

TEST(Experiment, HoldoutCarvesFitnessSplitFromTraining) {
    ExperimentConfig cfg = furnace_config(LearningMode::Type2);
    cfg.holdout = true;
    cfg.holdout_fraction = 0.25;
    const ExperimentResult r = run_experiment(cfg);
    EXPECT_EQ(r.train_size, 146u); /* reported sizes are the outer split */
    EXPECT_EQ(r.test_size, 146u);
    EXPECT_TRUE(std::isfinite(r.median_test_rmse));

    cfg.holdout_fraction = 1.5;
    EXPECT_THROW(run_experiment(cfg), evonf::InvalidArgument);
}

TEST(Experiment, MackeyGlassPipelineEndToEnd) {
    ExperimentConfig cfg;
    cfg.series.source = SeriesSpec::Source::MackeyGlass;
    cfg.series.mg.n = 80;
    cfg.mode = LearningMode::Type2;
    cfg.ea.population_size = 6;
    cfg.ea.generations = 3;
    cfg.seeds = {1};
    cfg.zero_timing = true;
    const ExperimentResult r = run_experiment(cfg);
    /* 80 samples - max lag 18 - horizon 6 = 56 -> 28/28 */
    EXPECT_EQ(r.train_size, 28u);
    EXPECT_EQ(r.test_size, 28u);
    ASSERT_EQ(r.seeds.size(), 1u);
    EXPECT_EQ(r.seeds[0].mf_counts.size(), 4u);
    EXPECT_EQ(r.seeds[0].initial_rules, 81u); /* default 3 per input */
    EXPECT_TRUE(std::isfinite(r.seeds[0].test_rmse));
}

TEST(Experiment, RejectsEmptySeedList) {
    ExperimentConfig cfg = furnace_config(LearningMode::Type2);
    cfg.seeds.clear();
    EXPECT_THROW(run_experiment(cfg), evonf::InvalidArgument);
}
