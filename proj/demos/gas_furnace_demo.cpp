/*
 * End-to-end identification on the bundled furnace-style series with a small
 * budget (a few seconds): evolve structure + parameters, fine-tune the best
 * system's membership functions, report train/test RMSE.
 *
 * Run from the repository root so data/gas_furnace.csv resolves.
 */

#include <cstdio>

#include <evonf/evonf.hpp>

using namespace evonf;

int main() {
    ExperimentConfig cfg;
    cfg.series.source = SeriesSpec::Source::Csv;
    cfg.series.csv.path = "data/gas_furnace.csv";
    cfg.series.csv.columns = {"u", "y"};
    cfg.series.lags = {{0, 3}, {1, 0}}; /* u three steps back, current y */
    cfg.series.target_column = 1;
    cfg.series.horizon = 1;

    cfg.mode = LearningMode::Type1;
    cfg.initial_mf_counts = {3, 3};
    cfg.epochs = 25;
    cfg.ea.population_size = 12;
    cfg.ea.generations = 10;
    cfg.seeds = {1};

    std::printf("evolving (population %zu, %zu generations, %zu descent epochs)...\n",
                cfg.ea.population_size, cfg.ea.generations, cfg.epochs);
    const ExperimentResult res = run_experiment(cfg);
    std::fputs(report_text(res, cfg).c_str(), stdout);

    const SeedResult& best = res.seeds.front();
    std::printf("winner: %zu rules", best.active_rules);
    std::printf(" | MF counts");
    for (std::size_t c : best.mf_counts) std::printf(" %zu", c);
    std::printf(" | t-norm p %.3f\n", best.tuned_fis.operators.tnorm_p);
    return 0;
}
