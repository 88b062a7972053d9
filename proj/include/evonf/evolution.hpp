#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <string>
#include <thread>
#include <vector>

#include "errors.hpp"
#include "genome.hpp"
#include "rng.hpp"

namespace evonf {

/*
 * Generational evolutionary loop over fixed-length genomes: linear rank
 * selection, elitism, uniform crossover on discrete genes, whole-arithmetic
 * crossover on real genes, and decaying non-uniform mutation.  Survivor
 * selection keeps the best of parents plus offspring, so the elite count is
 * a lower bound on parent survival and the best fitness is monotone.
 */

struct EAConfig {
    std::size_t population_size = 30;
    std::size_t generations = 60;
    double rank_pressure = 0.5;       /* eta+ = 1 + pressure, eta- = 1 - pressure */
    double elitism_fraction = 0.05;   /* elite count = ceil(fraction * N) */
    double mutation_rate_start = 0.7; /* per-gene rate decays linearly ... */
    double mutation_floor = 0.05;     /* ... down to this floor */
    double mutation_b = 5.0;          /* non-uniform mutation decay exponent */
    double crossover_rate = 0.9;
    std::uint64_t master_seed = 0;
    std::size_t n_threads = 1; /* fitness evaluation only; results identical */

    void validate() const {
        if (population_size < 2) throw InvalidArgument("ea: population_size >= 2");
        if (rank_pressure < 0.0 || rank_pressure > 1.0)
            throw InvalidArgument("ea: rank_pressure in [0, 1]");
        if (elitism_fraction < 0.0 || elitism_fraction > 1.0)
            throw InvalidArgument("ea: elitism_fraction in [0, 1]");
        if (mutation_rate_start < 0.0 || mutation_rate_start > 1.0 || mutation_floor < 0.0 ||
            mutation_floor > 1.0)
            throw InvalidArgument("ea: mutation rates in [0, 1]");
        if (mutation_b <= 0.0) throw InvalidArgument("ea: mutation_b > 0");
        if (crossover_rate < 0.0 || crossover_rate > 1.0)
            throw InvalidArgument("ea: crossover_rate in [0, 1]");
    }

    std::size_t elite_count() const {
        return static_cast<std::size_t>(
            std::ceil(elitism_fraction * static_cast<double>(population_size)));
    }

    /* Per-gene mutation probability at generation t of tmax. */
    double mutation_rate(std::size_t t) const {
        const double frac =
            generations == 0 ? 1.0
                             : static_cast<double>(t) / static_cast<double>(generations);
        return std::max(mutation_floor, mutation_rate_start * (1.0 - frac));
    }
};

struct Individual {
    Genome genome;
    double fitness = 0.0; /* minimized */
    bool evaluated = false;
};

struct GenStats {
    std::size_t generation = 0;
    double best = 0.0;
    double mean = 0.0;
    double active_rules = 0.0; /* of the generation's best individual */
    double elapsed_ms = 0.0;   /* cumulative wall time when recorded */
};

struct RunHistory {
    std::vector<GenStats> gens;

    void write_csv(const std::string& path) const {
        std::ofstream out(path);
        if (!out) throw IoError("cannot write '" + path + "'");
        out << "generation,best_rmse,mean_rmse,active_rules,elapsed_ms\n";
        char buf[160];
        for (const auto& s : gens) {
            std::snprintf(buf, sizeof(buf), "%zu,%.12g,%.12g,%.12g,%.3f\n", s.generation,
                          s.best, s.mean, s.active_rules, s.elapsed_ms);
            out << buf;
        }
        if (!out) throw IoError("write failed for '" + path + "'");
    }
};

/* Selection probability of each rank (0 = best): the classic linear scheme
 * p_k = (1/n) * (eta+ - (eta+ - eta-) * k / (n - 1)). */
inline std::vector<double> linear_rank_probabilities(std::size_t n, double pressure) {
    if (n == 0) throw InvalidArgument("rank probabilities: empty population");
    const double eta_plus = 1.0 + pressure, eta_minus = 1.0 - pressure;
    std::vector<double> p(n);
    if (n == 1) {
        p[0] = 1.0;
        return p;
    }
    for (std::size_t k = 0; k < n; ++k)
        p[k] = (eta_plus - (eta_plus - eta_minus) * static_cast<double>(k) /
                               static_cast<double>(n - 1)) /
               static_cast<double>(n);
    return p;
}

/* ------------------------------------------------------------------ */
/* Variation operators (templated on the RNG so tests can force draws) */
/* ------------------------------------------------------------------ */

/* Whole-arithmetic crossover on real genes (one blend factor per gene),
 * uniform crossover on bits and categoricals.  Frozen genes pass through. */
template <class R>
inline void crossover(Genome& a, Genome& b, const GeneLayout& L, R& rng) {
    if (a.size() != L.size() || b.size() != L.size())
        throw SpecMismatch("crossover: genome size differs from layout");
    for (std::size_t i = 0; i < L.size(); ++i) {
        const GeneInfo& gi = L.genes[i];
        if (gi.frozen) continue;
        if (gi.kind == GeneKind::Real) {
            /* beta*a + (1-beta)*b in delta form, clamped to the parents'
             * hull: equal parents reproduce exactly and children can never
             * leave [min(a,b), max(a,b)] (hence never the gene bounds). */
            const double beta = rng.uniform();
            const double lo = std::min(a[i], b[i]), hi = std::max(a[i], b[i]);
            const double d = a[i] - b[i];
            const double c1 = std::clamp(b[i] + beta * d, lo, hi);
            const double c2 = std::clamp(a[i] - beta * d, lo, hi);
            a[i] = c1;
            b[i] = c2;
        } else if (rng.uniform() < 0.5) {
            std::swap(a[i], b[i]);
        }
    }
}

/* Non-uniform mutation of a single real gene: the step shrinks toward zero
 * as t approaches tmax (delta = span * (1 - gamma^((1 - t/tmax)^b))). */
template <class R>
inline double nonuniform_mutate(double x, double lo, double hi, std::size_t t,
                                const EAConfig& cfg, R& rng) {
    const bool up = rng.uniform() < 0.5;
    const double gamma = rng.uniform();
    const double tmax = static_cast<double>(cfg.generations);
    const double frac =
        tmax <= 0.0 ? 0.0 : std::max(0.0, 1.0 - static_cast<double>(t) / tmax);
    const double delta_frac = 1.0 - std::pow(gamma, std::pow(frac, cfg.mutation_b));
    const double y = up ? x + (hi - x) * delta_frac : x - (x - lo) * delta_frac;
    return std::clamp(y, lo, hi);
}

/* Per-gene mutation pass: reals move non-uniformly, bits flip, categoricals
 * resample uniformly.  Frozen genes never change. */
template <class R>
inline void mutate_genome(Genome& g, const GeneLayout& L, std::size_t t, const EAConfig& cfg,
                          R& rng) {
    if (g.size() != L.size()) throw SpecMismatch("mutate: genome size differs from layout");
    const double rate = cfg.mutation_rate(t);
    for (std::size_t i = 0; i < L.size(); ++i) {
        const GeneInfo& gi = L.genes[i];
        if (gi.frozen) continue;
        if (rng.uniform() >= rate) continue;
        switch (gi.kind) {
            case GeneKind::Real:
                g[i] = nonuniform_mutate(g[i], gi.lo, gi.hi, t, cfg, rng);
                break;
            case GeneKind::Bit:
                g[i] = g[i] < 0.5 ? 1.0 : 0.0;
                break;
            case GeneKind::Categorical:
                g[i] = gi.lo + static_cast<double>(
                                   rng.below(static_cast<std::uint64_t>(gi.hi - gi.lo) + 1));
                break;
        }
    }
}

/* ------------------------------------------------------------------ */
/* The evolutionary loop                                               */
/* ------------------------------------------------------------------ */

using FitnessFn = std::function<double(const Genome&)>;
using InitFn = std::function<Genome(std::size_t index, Rng& rng)>;
using ActiveRulesFn = std::function<double(const Genome&)>;

struct EvolveResult {
    Individual best;
    RunHistory history;
};

namespace detail {

/* Evaluate every unevaluated individual.  Index-sharded threading: the work
 * split depends only on vector positions and the fitness function is pure,
 * so results are bit-identical for any thread count. */
inline void evaluate_all(std::vector<Individual>& pop, const FitnessFn& fitness,
                         std::size_t n_threads, std::size_t generation) {
    std::vector<std::size_t> todo;
    for (std::size_t i = 0; i < pop.size(); ++i)
        if (!pop[i].evaluated) todo.push_back(i);
    if (todo.empty()) return;

    std::vector<std::string> errors(todo.size());
    auto work = [&](std::size_t begin, std::size_t end) {
        for (std::size_t k = begin; k < end; ++k) {
            try {
                pop[todo[k]].fitness = fitness(pop[todo[k]].genome);
                pop[todo[k]].evaluated = true;
            } catch (const std::exception& e) {
                errors[k] = e.what();
            }
        }
    };
    if (n_threads <= 1 || todo.size() <= 1) {
        work(0, todo.size());
    } else {
        const std::size_t nt = std::min(n_threads, todo.size());
        std::vector<std::thread> threads;
        const std::size_t chunk = (todo.size() + nt - 1) / nt;
        for (std::size_t t = 0; t < nt; ++t) {
            const std::size_t begin = t * chunk;
            const std::size_t end = std::min(begin + chunk, todo.size());
            if (begin < end) threads.emplace_back(work, begin, end);
        }
        for (auto& th : threads) th.join();
    }
    for (std::size_t k = 0; k < todo.size(); ++k)
        if (!errors[k].empty())
            throw EvolveError("fitness failed at generation " + std::to_string(generation) +
                              ", individual " + std::to_string(todo[k]) + ": " + errors[k]);
}

inline void sort_best_first(std::vector<Individual>& pop) {
    std::stable_sort(pop.begin(), pop.end(),
                     [](const Individual& a, const Individual& b) { return a.fitness < b.fitness; });
}

} // namespace detail

/*
 * Run the EA.  Determinism contract: every random decision comes from a
 * substream seeded by (master_seed, generation, counter), so runs with the
 * same seed are identical regardless of thread count or wall time.
 */
inline EvolveResult evolve(const EAConfig& cfg, const GeneLayout& layout,
                           const FitnessFn& fitness, const InitFn& init,
                           const ActiveRulesFn& active_rules = nullptr) {
    cfg.validate();
    if (layout.size() == 0) throw InvalidArgument("evolve: empty gene layout");
    const std::size_t N = cfg.population_size;
    const std::size_t E = std::min(cfg.elite_count(), N);
    const auto t0 = std::chrono::steady_clock::now();
    auto elapsed_ms = [&] {
        return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
            .count();
    };

    std::vector<Individual> pop(N);
    for (std::size_t i = 0; i < N; ++i) {
        Rng rng(substream_seed(cfg.master_seed, 0, i));
        pop[i].genome = init(i, rng);
        if (pop[i].genome.size() != layout.size())
            throw SpecMismatch("evolve: init produced a genome of the wrong size");
    }
    detail::evaluate_all(pop, fitness, cfg.n_threads, 0);
    detail::sort_best_first(pop);

    RunHistory history;
    auto record = [&](std::size_t gen) {
        GenStats s;
        s.generation = gen;
        s.best = pop.front().fitness;
        long double acc = 0.0L;
        for (const auto& ind : pop) acc += ind.fitness;
        s.mean = static_cast<double>(acc / static_cast<long double>(N));
        s.active_rules = active_rules ? active_rules(pop.front().genome) : 0.0;
        s.elapsed_ms = elapsed_ms();
        history.gens.push_back(s);
    };
    record(0);

    const std::vector<double> rank_p = linear_rank_probabilities(N, cfg.rank_pressure);
    std::vector<double> cum(N);
    double acc = 0.0;
    for (std::size_t k = 0; k < N; ++k) {
        acc += rank_p[k];
        cum[k] = acc;
    }
    cum.back() = 1.0; /* guard against round-off at the top end */

    for (std::size_t t = 1; t <= cfg.generations; ++t) {
        const std::size_t lambda = N - E; /* children per generation */
        std::vector<Individual> children;
        children.reserve(lambda);
        std::size_t pair_counter = 0;
        while (children.size() < lambda) {
            Rng rng(substream_seed(cfg.master_seed, t, pair_counter++));
            auto pick = [&]() -> const Genome& {
                const double u = rng.uniform();
                const std::size_t k = static_cast<std::size_t>(
                    std::upper_bound(cum.begin(), cum.end(), u) - cum.begin());
                return pop[std::min(k, N - 1)].genome;
            };
            Genome c1 = pick();
            Genome c2 = pick();
            if (rng.uniform() < cfg.crossover_rate) crossover(c1, c2, layout, rng);
            mutate_genome(c1, layout, t, cfg, rng);
            mutate_genome(c2, layout, t, cfg, rng);
            children.push_back({std::move(c1), 0.0, false});
            if (children.size() < lambda) children.push_back({std::move(c2), 0.0, false});
        }
        detail::evaluate_all(children, fitness, cfg.n_threads, t);

        /* Survivor selection: best N of (sorted parents ++ children); the
         * stable sort prefers parents on ties, so the elite always survive. */
        std::vector<Individual> pool;
        pool.reserve(N + lambda);
        for (auto& ind : pop) pool.push_back(std::move(ind));
        for (auto& ind : children) pool.push_back(std::move(ind));
        detail::sort_best_first(pool);
        pool.resize(N);
        pop = std::move(pool);
        record(t);
    }

    EvolveResult res;
    res.best = pop.front();
    res.history = std::move(history);
    return res;
}

} // namespace evonf
