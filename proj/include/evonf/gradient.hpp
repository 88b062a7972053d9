#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "dataset.hpp"
#include "errors.hpp"
#include "fis.hpp"
#include "membership.hpp"
#include "operators.hpp"

namespace evonf {

/*
 * Gradient-descent fine-tuning of membership-function parameters (and,
 * optionally, the operator parameters) against the half-MSE loss
 *
 *   L(theta) = 1/(2 n) * sum_s (yhat_s - y_s)^2 .
 *
 * Rule consequents stay fixed: they belong to the genetic layer.  TsEngine
 * mirrors ts_evaluate's arithmetic operation for operation (same degree
 * lookups, same generator-form folds, same accumulation order), so its
 * forward pass agrees with the reference evaluator to the last bit while
 * sharing work across rules: membership degrees and per-variable aggregated
 * degrees are computed once per (variable, mask) pair instead of once per
 * rule, and consequent values are cached up front since they never change
 * during descent.
 */

struct TrainSpec {
    double learning_rate = 0.1;
    std::size_t epochs = 100;
    bool tune_operators = false;
    double param_floor = MembershipFunction::kParamFloor;

    void validate() const {
        /* zero is a legal override: it makes descent a no-op */
        if (!(learning_rate >= 0.0)) throw InvalidArgument("train: learning_rate >= 0");
        if (epochs == 0) throw InvalidArgument("train: epochs >= 1");
        if (!(param_floor > 0.0)) throw InvalidArgument("train: param_floor > 0");
    }
};

struct GdResult {
    FuzzyInferenceSystem fis;
    std::vector<double> trace; /* epochs+1 RMSE values: initial, then after each step */
};

class TsEngine {
  public:
    TsEngine(const FuzzyInferenceSystem& fis, const WindowedDataset& data)
        : proto_(fis), data_(&data) {
        if (fis.kind != FisKind::TakagiSugeno)
            throw UnsupportedFisKind(std::string("gradient descent: only takagi-sugeno, got ") +
                                     fis_kind_name(fis.kind));
        fis.validate();
        if (data.size() == 0) throw EmptyDataset("gradient descent: empty dataset");
        if (data.n_inputs != fis.n_inputs())
            throw SpecMismatch("gradient descent: dataset has " + std::to_string(data.n_inputs) +
                               " inputs, system expects " + std::to_string(fis.n_inputs()));
        n_ = fis.n_inputs();
        pt_ = fis.operators.tnorm_p;
        ps_ = fis.operators.tconorm_p;
        fixed_min_ = fis.operators.fixed_min;

        for (const auto& var : fis.inputs) {
            VarState vs;
            vs.shape = var.partitions[0].shape; /* decode guarantees one shape per variable */
            vs.m = var.partitions.size();
            vs.lo = var.lo;
            vs.hi = var.hi;
            for (std::size_t l = 0; l < vs.m; ++l) {
                vs.mf[l] = var.partitions[l];
                if (var.partitions[l].shape != vs.shape)
                    throw InvalidArgument("gradient descent: mixed shapes within '" + var.name +
                                          "'");
            }
            vars_.push_back(vs);
        }

        /* Dedupe (variable, mask) pairs across active rules. */
        std::vector<std::vector<std::int32_t>> pair_id(n_, std::vector<std::int32_t>(256, -1));
        for (const auto& rule : fis.rules) {
            if (!rule.active) continue;
            RuleInfo ri;
            for (std::size_t v = 0; v < n_; ++v) {
                const std::uint8_t m = rule.masks[v];
                if (m == 0) continue;
                std::int32_t& id = pair_id[v][m];
                if (id < 0) {
                    id = static_cast<std::int32_t>(pairs_.size());
                    PairInfo pi;
                    pi.v = v;
                    for (std::size_t l = 0; l < vars_[v].m; ++l)
                        if (m & (1u << l)) pi.labels[pi.nd++] = static_cast<std::uint8_t>(l);
                    pairs_.push_back(pi);
                }
                if (ri.k >= 8)
                    throw InvalidCount("gradient descent: more than 8 conjuncts per rule");
                ri.pair_ids[ri.k++] = static_cast<std::uint32_t>(id);
            }
            if (ri.k == 0) throw MalformedRule("gradient descent: active rule with empty masks");
            rules_.push_back(ri);
        }
        if (rules_.empty()) throw NoActiveRules("gradient descent: no active rule");

        /* Consequent values per (sample, rule): fixed during descent. */
        const std::size_t S = data.size(), R = rules_.size();
        f_cache_.resize(S * R);
        sum_f_.resize(S);
        std::size_t r = 0;
        for (const auto& rule : fis.rules) {
            if (!rule.active) continue;
            for (std::size_t s = 0; s < S; ++s) {
                double f = rule.consequent[0];
                const double* x = data.row(s);
                for (std::size_t j = 0; j < n_; ++j) f += rule.consequent[j + 1] * x[j];
                f_cache_[s * R + r] = f;
            }
            ++r;
        }
        for (std::size_t s = 0; s < S; ++s) {
            double acc = 0.0;
            for (std::size_t k = 0; k < R; ++k) acc += f_cache_[s * R + k];
            sum_f_[s] = acc;
        }

        deg_.resize(n_ * 4);
        adj_deg_.resize(n_ * 4);
        D_.resize(pairs_.size());
        U_.resize(pairs_.size());
        Blin_.resize(pairs_.size());
        argmax_.resize(pairs_.size());
        w_.resize(R);
        srs_.resize(R);
        gp_.resize(n_ * 4);
        gq_.resize(n_ * 4);
        gr_.resize(n_ * 4);
    }

    std::size_t n_rules() const { return rules_.size(); }
    std::size_t n_pairs() const { return pairs_.size(); }

    /* One sweep over the training data: returns the current RMSE and, when
     * with_grads holds, leaves d(half-MSE)/d(parameter) in the accumulators
     * read by sgd_step / gradients(). */
    double epoch(bool with_grads) {
        std::fill(gp_.begin(), gp_.end(), 0.0);
        std::fill(gq_.begin(), gq_.end(), 0.0);
        std::fill(gr_.begin(), gr_.end(), 0.0);
        gpt_ = gps_ = 0.0;
        const std::size_t S = data_->size();
        double sse = 0.0;
        for (std::size_t s = 0; s < S; ++s)
            sse += sample_pass(data_->row(s), data_->target(s), s, with_grads);
        if (with_grads) {
            const double inv = 1.0 / static_cast<double>(S);
            for (auto& g : gp_) g *= inv;
            for (auto& g : gq_) g *= inv;
            for (auto& g : gr_) g *= inv;
            gpt_ *= inv;
            gps_ *= inv;
        }
        return std::sqrt(sse / static_cast<double>(S));
    }

    /* RMSE of the current parameters on any dataset (no gradients). */
    double rmse_on(const WindowedDataset& other) {
        if (other.size() == 0) throw EmptyDataset("rmse_on: empty dataset");
        if (other.n_inputs != n_) throw SpecMismatch("rmse_on: input-arity mismatch");
        double sse = 0.0;
        for (std::size_t s = 0; s < other.size(); ++s) {
            const double e = predict_other(other, s) - other.target(s);
            sse += e * e;
        }
        return std::sqrt(sse / static_cast<double>(other.size()));
    }

    /* Descend along the last epoch's gradients; restores the parameter
     * floors and keeps centers inside their universes.  A non-finite
     * gradient component (possible only in pathological saturation) is
     * treated as zero so it can never poison a parameter. */
    void sgd_step(double lr, double floor, bool tune_operators) {
        const auto step = [lr](double x, double g) { return std::isfinite(g) ? x - lr * g : x; };
        for (std::size_t v = 0; v < n_; ++v) {
            VarState& vs = vars_[v];
            for (std::size_t l = 0; l < vs.m; ++l) {
                MembershipFunction& mf = vs.mf[l];
                mf.p = step(mf.p, gp_[v * 4 + l]);
                mf.q = step(mf.q, gq_[v * 4 + l]);
                mf.r = step(mf.r, gr_[v * 4 + l]);
                if (mf.p < floor) mf.p = floor;
                if (mf.shape == MfShape::Bell && mf.q < floor) mf.q = floor;
                mf.r = std::clamp(mf.r, vs.lo, vs.hi);
            }
        }
        if (tune_operators && !fixed_min_) {
            pt_ = std::clamp(step(pt_, gpt_), kOpPMin, kOpPMax);
            ps_ = std::clamp(step(ps_, gps_), kOpPMin, kOpPMax);
        }
    }

    /* Flat gradient view, variable-major, 3 slots (p, q, r) per MF slot l < m_v. */
    std::vector<double> gradients() const {
        std::vector<double> out;
        for (std::size_t v = 0; v < n_; ++v)
            for (std::size_t l = 0; l < vars_[v].m; ++l) {
                out.push_back(gp_[v * 4 + l]);
                out.push_back(gq_[v * 4 + l]);
                out.push_back(gr_[v * 4 + l]);
            }
        return out;
    }

    double grad_tnorm_p() const { return gpt_; }
    double grad_tconorm_p() const { return gps_; }

    /* The tuned system: the original with updated MF (and operator) parameters. */
    FuzzyInferenceSystem export_fis() const {
        FuzzyInferenceSystem out = proto_;
        for (std::size_t v = 0; v < n_; ++v)
            for (std::size_t l = 0; l < vars_[v].m; ++l) out.inputs[v].partitions[l] = vars_[v].mf[l];
        out.operators.tnorm_p = pt_;
        out.operators.tconorm_p = ps_;
        return out;
    }

  private:
    struct VarState {
        MfShape shape = MfShape::Bell;
        std::size_t m = 0;
        double lo = 0.0, hi = 1.0;
        MembershipFunction mf[4];
    };
    struct PairInfo {
        std::size_t v = 0;
        std::uint8_t labels[4] = {0, 0, 0, 0};
        std::uint8_t nd = 0;
    };
    struct RuleInfo {
        std::uint32_t pair_ids[8] = {}; /* ascending variable order */
        std::uint8_t k = 0;
    };

    /* Aggregated degree of one (variable, mask) pair: t-conorm over the
     * selected labels, mirroring ss_tconorm_fold's arithmetic. */
    double pair_degree(const PairInfo& pi, const double* deg_v) const {
        if (pi.nd == 1) return std::clamp(deg_v[pi.labels[0]], 0.0, 1.0);
        double acc = 0.0;
        for (std::size_t i = 0; i < pi.nd; ++i) {
            const double c = 1.0 - deg_v[pi.labels[i]];
            if (c <= 0.0) return 1.0;
            acc += c >= 1.0 ? 1.0 : std::pow(c, -ps_);
        }
        const double sum = acc - static_cast<double>(pi.nd - 1);
        if (sum <= 0.0) return 1.0;
        return 1.0 - std::pow(sum, -1.0 / ps_);
    }

    /* Forward for one sample of the training set into the scratch arrays;
     * returns the squared error and (optionally) accumulates gradients. */
    double sample_pass(const double* x, double y, std::size_t s, bool with_grads) {
        const std::size_t R = rules_.size(), P = pairs_.size();
        for (std::size_t v = 0; v < n_; ++v)
            for (std::size_t l = 0; l < vars_[v].m; ++l)
                deg_[v * 4 + l] = mf_eval(vars_[v].mf[l], x[v]);

        for (std::size_t p = 0; p < P; ++p) {
            const PairInfo& pi = pairs_[p];
            const double* dv = &deg_[pi.v * 4];
            if (fixed_min_) {
                double best = dv[pi.labels[0]];
                std::uint8_t arg = pi.labels[0];
                for (std::size_t i = 1; i < pi.nd; ++i)
                    if (dv[pi.labels[i]] > best) {
                        best = dv[pi.labels[i]];
                        arg = pi.labels[i];
                    }
                D_[p] = best;
                argmax_[p] = arg;
            } else {
                const double d = pair_degree(pi, dv);
                D_[p] = d;
                U_[p] = d <= 0.0 ? std::numeric_limits<double>::infinity()
                                 : (d >= 1.0 ? 1.0 : std::pow(d, -pt_));
            }
        }

        const double* f = &f_cache_[s * R];
        double wsum = 0.0, wf = 0.0;
        for (std::size_t r = 0; r < R; ++r) {
            const RuleInfo& ri = rules_[r];
            double w;
            double sr = 0.0;
            if (fixed_min_) {
                w = D_[ri.pair_ids[0]];
                for (std::size_t i = 1; i < ri.k; ++i) w = std::min(w, D_[ri.pair_ids[i]]);
            } else if (ri.k == 1) {
                w = D_[ri.pair_ids[0]]; /* lone conjunct is returned unchanged */
            } else {
                /* U_ already holds pow(D, -pt) per deduped pair; reusing it
                 * here keeps rules from re-deriving the same power. */
                bool dead = false;
                double acc = 0.0;
                for (std::size_t i = 0; i < ri.k; ++i) {
                    if (D_[ri.pair_ids[i]] <= 0.0) {
                        dead = true;
                        break;
                    }
                    acc += U_[ri.pair_ids[i]];
                }
                if (dead) {
                    w = 0.0;
                } else {
                    sr = acc - static_cast<double>(ri.k - 1);
                    w = sr <= 0.0 ? 0.0 : std::pow(sr, -1.0 / pt_);
                }
            }
            w_[r] = w;
            srs_[r] = sr;
            wsum += w;
            wf += w * f[r];
        }

        const double yhat = wsum < kEpsFire ? sum_f_[s] / static_cast<double>(R) : wf / wsum;
        const double e = yhat - y;
        if (!with_grads || wsum < kEpsFire) return e * e;
        /* Below the firing floor the output is the constant consequent mean;
         * membership parameters get zero gradient there by construction. */

        std::fill(Blin_.begin(), Blin_.end(), 0.0);
        std::fill(adj_deg_.begin(), adj_deg_.end(), 0.0);
        for (std::size_t r = 0; r < R; ++r) {
            const double w = w_[r];
            const double a = (f[r] - yhat) / wsum; /* d(yhat)/d(w_r) */
            const double g = e * a;
            const RuleInfo& ri = rules_[r];
            if (fixed_min_) {
                /* Subgradient of min: route to the first minimal conjunct. */
                std::size_t argmin = ri.pair_ids[0];
                double best = D_[ri.pair_ids[0]];
                for (std::size_t i = 1; i < ri.k; ++i)
                    if (D_[ri.pair_ids[i]] < best) {
                        best = D_[ri.pair_ids[i]];
                        argmin = ri.pair_ids[i];
                    }
                Blin_[argmin] += g;
                continue;
            }
            if (w <= 0.0) continue; /* dead rule: no parameter influences it smoothly */
            if (ri.k == 1) {
                Blin_[ri.pair_ids[0]] += g; /* w == D, derivative 1 */
                continue;
            }
            /* dw/dD_i = (U_i / sr) * (w / D_i).  Each U_j >= 1, so
             * sr = sum U_j - (k-1) >= U_i and w = sr^(-1/pt) <= D_i: both
             * ratios live in (0, 1] and the adjoint stays bounded by |g|
             * even when U_i is astronomically large. */
            for (std::size_t i = 0; i < ri.k; ++i) {
                const std::size_t pid = ri.pair_ids[i];
                Blin_[pid] += g * (U_[pid] / srs_[r]) * (w / D_[pid]);
            }
            if (tune_ops_pass_) {
                /* dw/dpt = w * (ln(sr)/pt^2 - sr'/(pt*sr)),
                 * sr' = d(sr)/dpt = sum -ln(D_i) * U_i; keep U_i/sr <= 1
                 * grouped so the sum cannot overflow. */
                double sprime_over_sr = 0.0;
                for (std::size_t i = 0; i < ri.k; ++i) {
                    const double d = D_[ri.pair_ids[i]];
                    if (d < 1.0) sprime_over_sr -= std::log(d) * (U_[ri.pair_ids[i]] / srs_[r]);
                }
                gpt_ += g * w * (std::log(srs_[r]) / (pt_ * pt_) - sprime_over_sr / pt_);
            }
        }

        for (std::size_t p = 0; p < P; ++p) {
            const PairInfo& pi = pairs_[p];
            const double adj_D = Blin_[p];
            if (adj_D == 0.0) continue;
            const double* dv = &deg_[pi.v * 4];
            double* adj_dv = &adj_deg_[pi.v * 4];
            if (fixed_min_) {
                adj_dv[argmax_[p]] += adj_D; /* subgradient of max: first maximal label */
            } else if (pi.nd == 1) {
                adj_dv[pi.labels[0]] += adj_D; /* identity through the clamp interior */
            } else {
                /* Dual chain: D = 1 - Sc^(-1/ps), Sc = sum (1-d_l)^(-ps) - (nd-1). */
                double Sc = -(static_cast<double>(pi.nd) - 1.0);
                double E[4] = {0.0, 0.0, 0.0, 0.0};
                bool saturated = false;
                std::uint8_t sat_label = 0;
                std::size_t worst = 0;
                double worst_c = 2.0;
                for (std::size_t i = 0; i < pi.nd; ++i) {
                    const double c = 1.0 - dv[pi.labels[i]];
                    if (c <= 0.0) {
                        saturated = true;
                        sat_label = pi.labels[i];
                        break;
                    }
                    E[i] = c >= 1.0 ? 1.0 : std::pow(c, -ps_);
                    Sc += E[i];
                    if (c < worst_c) {
                        worst_c = c;
                        worst = i;
                    }
                }
                if (saturated) {
                    adj_dv[sat_label] += adj_D; /* D pinned at 1 by this label */
                } else if (!std::isfinite(Sc)) {
                    /* Pinned at 1 within double precision; in the limit the
                     * derivative routes entirely to the most saturated label. */
                    adj_dv[pi.labels[worst]] += adj_D;
                } else {
                    /* dD/dd_i = (Dc / c_i) * (E_i / Sc).  Sc >= E_i and
                     * Dc = Sc^(-1/ps) <= c_i, so both ratios are in (0, 1]. */
                    const double Dc = std::pow(Sc, -1.0 / ps_);
                    for (std::size_t i = 0; i < pi.nd; ++i) {
                        const double c = 1.0 - dv[pi.labels[i]];
                        adj_dv[pi.labels[i]] += adj_D * (Dc / c) * (E[i] / Sc);
                    }
                    if (tune_ops_pass_) {
                        double sprime_over_sc = 0.0;
                        for (std::size_t i = 0; i < pi.nd; ++i) {
                            const double c = 1.0 - dv[pi.labels[i]];
                            if (c < 1.0) sprime_over_sc -= std::log(c) * (E[i] / Sc);
                        }
                        gps_ += adj_D * (-Dc) *
                                (std::log(Sc) / (ps_ * ps_) - sprime_over_sc / ps_);
                    }
                }
            }
        }

        for (std::size_t v = 0; v < n_; ++v)
            for (std::size_t l = 0; l < vars_[v].m; ++l) {
                const double a = adj_deg_[v * 4 + l];
                if (a == 0.0) continue;
                const MfGrad mg = mf_grad(vars_[v].mf[l], x[v]);
                gp_[v * 4 + l] += a * mg.dp;
                gq_[v * 4 + l] += a * mg.dq;
                gr_[v * 4 + l] += a * mg.dr;
            }
        return e * e;
    }

    /* Prediction on a foreign dataset (no caches, no gradients). */
    double predict_other(const WindowedDataset& other, std::size_t s) {
        const double* x = other.row(s);
        for (std::size_t v = 0; v < n_; ++v)
            for (std::size_t l = 0; l < vars_[v].m; ++l)
                deg_[v * 4 + l] = mf_eval(vars_[v].mf[l], x[v]);
        const std::size_t R = rules_.size(), P = pairs_.size();
        for (std::size_t p = 0; p < P; ++p) {
            const PairInfo& pi = pairs_[p];
            const double* dv = &deg_[pi.v * 4];
            if (fixed_min_) {
                double best = dv[pi.labels[0]];
                for (std::size_t i = 1; i < pi.nd; ++i) best = std::max(best, dv[pi.labels[i]]);
                D_[p] = best;
            } else {
                const double d = pair_degree(pi, dv);
                D_[p] = d;
                U_[p] = d <= 0.0 ? std::numeric_limits<double>::infinity()
                                 : (d >= 1.0 ? 1.0 : std::pow(d, -pt_));
            }
        }
        double wsum = 0.0, wf = 0.0, fsum = 0.0;
        std::size_t r = 0;
        for (const auto& rule : proto_.rules) {
            if (!rule.active) continue;
            const RuleInfo& ri = rules_[r];
            double w;
            if (fixed_min_) {
                w = D_[ri.pair_ids[0]];
                for (std::size_t i = 1; i < ri.k; ++i) w = std::min(w, D_[ri.pair_ids[i]]);
            } else if (ri.k == 1) {
                w = D_[ri.pair_ids[0]];
            } else {
                bool dead = false;
                double acc = 0.0;
                for (std::size_t i = 0; i < ri.k; ++i) {
                    if (D_[ri.pair_ids[i]] <= 0.0) {
                        dead = true;
                        break;
                    }
                    acc += U_[ri.pair_ids[i]];
                }
                const double sr = acc - static_cast<double>(ri.k - 1);
                w = dead || sr <= 0.0 ? 0.0 : std::pow(sr, -1.0 / pt_);
            }
            double f = rule.consequent[0];
            for (std::size_t j = 0; j < n_; ++j) f += rule.consequent[j + 1] * x[j];
            wsum += w;
            wf += w * f;
            fsum += f;
            ++r;
        }
        if (wsum < kEpsFire) return fsum / static_cast<double>(R);
        return wf / wsum;
    }

  public:
    /* Arm operator-parameter gradients for subsequent epoch() calls. */
    void set_tune_operators(bool on) { tune_ops_pass_ = on && !fixed_min_; }

  private:
    FuzzyInferenceSystem proto_;
    const WindowedDataset* data_;
    std::size_t n_ = 0;
    double pt_ = 1.0, ps_ = 1.0;
    bool fixed_min_ = false;
    bool tune_ops_pass_ = false;
    std::vector<VarState> vars_;
    std::vector<PairInfo> pairs_;
    std::vector<RuleInfo> rules_;
    std::vector<double> f_cache_, sum_f_;
    /* scratch */
    std::vector<double> deg_, adj_deg_, D_, U_, Blin_, w_, srs_;
    std::vector<std::uint8_t> argmax_;
    /* gradient accumulators */
    std::vector<double> gp_, gq_, gr_;
    double gpt_ = 0.0, gps_ = 0.0;
};

/* Training loss used by gradient descent (reference path, for test oracles). */
inline double half_mse(const FuzzyInferenceSystem& fis, const WindowedDataset& data) {
    if (data.size() == 0) throw EmptyDataset("half_mse: empty dataset");
    double acc = 0.0;
    for (std::size_t s = 0; s < data.size(); ++s) {
        const double e = ts_evaluate(fis, data.row(s)) - data.target(s);
        acc += e * e;
    }
    return 0.5 * acc / static_cast<double>(data.size());
}

/* One analytic gradient of the half-MSE loss with respect to the MF
 * parameters, flattened variable-major with 3 entries (p, q, r) per fuzzy
 * set.  The q entry of a Gaussian set is 0. */
inline std::vector<double> mf_gradients(const FuzzyInferenceSystem& fis,
                                        const WindowedDataset& data) {
    TsEngine engine(fis, data);
    engine.epoch(true);
    return engine.gradients();
}

/*
 * Batch gradient descent on the membership parameters.  trace[k] is the
 * training RMSE before step k (trace[0] = the untouched system), plus one
 * final entry after the last step: epochs+1 entries in total.
 */
inline GdResult gd_finetune(const FuzzyInferenceSystem& fis, const WindowedDataset& data,
                            const TrainSpec& spec) {
    spec.validate();
    TsEngine engine(fis, data);
    engine.set_tune_operators(spec.tune_operators);
    GdResult out;
    out.trace.reserve(spec.epochs + 1);
    for (std::size_t e = 0; e < spec.epochs; ++e) {
        out.trace.push_back(engine.epoch(true));
        engine.sgd_step(spec.learning_rate, spec.param_floor, spec.tune_operators);
    }
    out.trace.push_back(engine.epoch(false));
    out.fis = engine.export_fis();
    return out;
}

} // namespace evonf
