#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"

namespace evonf {

/*
 * Benchmark data plumbing: synthesize the Mackey-Glass series, load arbitrary
 * CSV series, lag-embed into supervised samples, min-max normalize (fit on
 * the chronological training prefix only), and split without shuffling.
 */

/* ------------------------------------------------------------------ */
/* Windowed regression dataset                                         */
/* ------------------------------------------------------------------ */

struct NormRecord {
    /* per column: inputs 0..n-1, target last */
    std::vector<double> mins, maxs;
    bool normalized = false;
};

struct WindowedDataset {
    std::size_t n_inputs = 0;
    std::vector<double> x; /* row-major, size() x n_inputs */
    std::vector<double> y;
    NormRecord norm;

    std::size_t size() const { return y.size(); }
    double input(std::size_t s, std::size_t j) const { return x[s * n_inputs + j]; }
    const double* row(std::size_t s) const { return x.data() + s * n_inputs; }
    double target(std::size_t s) const { return y[s]; }

    void add_row(const double* in, double t) {
        x.insert(x.end(), in, in + n_inputs);
        y.push_back(t);
    }
};

/* ------------------------------------------------------------------ */
/* Mackey-Glass synthesis                                              */
/* ------------------------------------------------------------------ */

struct MackeyGlassSpec {
    double tau = 17.0;     /* delay, time units */
    std::size_t n = 1024;  /* sampled points (unit spacing) after washout */
    double dt = 0.1;       /* integration step */
    double x0 = 1.2;       /* constant history value, x(t) = x0 for t <= 0 */
    double washout = 200.0;/* discarded prefix, time units */
};

namespace detail {

inline double mg_rhs(double x, double xd) {
    const double x2 = xd * xd, x4 = x2 * x2, x8 = x4 * x4;
    return 0.2 * xd / (1.0 + x8 * x2) - 0.1 * x;
}

/* Cubic-Hermite lookup of x at step position u (t = u*dt) from node values
 * and node derivatives; constant history x0 for t <= 0. */
inline double mg_history(const std::vector<double>& xs, const std::vector<double>& fs,
                         double u, double dt, double x0) {
    if (u <= 0.0) return x0;
    const double fl = std::floor(u);
    const std::size_t i = static_cast<std::size_t>(fl);
    const double th = u - fl;
    if (th == 0.0) return xs[i];
    const double t2 = th * th, t3 = t2 * th;
    const double h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
    const double h10 = t3 - 2.0 * t2 + th;
    const double h01 = -2.0 * t3 + 3.0 * t2;
    const double h11 = t3 - t2;
    return h00 * xs[i] + h10 * dt * fs[i] + h01 * xs[i + 1] + h11 * dt * fs[i + 1];
}

} // namespace detail

/*
 * Integrate dx/dt = 0.2 x(t-tau) / (1 + x(t-tau)^10) - 0.1 x(t) with RK4.
 * The delayed argument at off-node stage times comes from cubic Hermite
 * interpolation of the stored node values/derivatives, so halving dt moves
 * the sampled series by far less than 1e-4.  tau = 0 degenerates to the
 * ordinary ODE; 0 < tau < dt is rejected (the delayed argument would fall
 * inside the step being computed).
 */
inline std::vector<double> gen_mackey_glass(const MackeyGlassSpec& spec) {
    if (spec.n == 0)
        throw InsufficientLength("gen_mackey_glass: n must be positive");
    if (!(spec.dt > 0.0))
        throw InvalidArgument("gen_mackey_glass: dt must be positive");
    const double su_d = 1.0 / spec.dt;
    const long su = std::lround(su_d);
    if (su < 1 || std::fabs(su_d - static_cast<double>(su)) > 1e-9)
        throw InvalidArgument("gen_mackey_glass: dt must divide the unit sampling interval");
    if (spec.tau != 0.0 && spec.tau < spec.dt)
        throw InvalidArgument("gen_mackey_glass: need tau = 0 or tau >= dt");
    if (spec.washout < 0.0)
        throw InvalidArgument("gen_mackey_glass: washout must be non-negative");

    const std::size_t washout_steps =
        static_cast<std::size_t>(std::llround(spec.washout * static_cast<double>(su)));
    const std::size_t total = washout_steps + (spec.n - 1) * static_cast<std::size_t>(su) + 1;
    const bool delayed = spec.tau != 0.0;
    const double dsteps = spec.tau / spec.dt; /* delay in step units */
    const double dt = spec.dt;

    std::vector<double> xs, fs;
    xs.reserve(total);
    fs.reserve(total);
    xs.push_back(spec.x0);
    fs.push_back(detail::mg_rhs(spec.x0, spec.x0));

    for (std::size_t k = 0; k + 1 < total; ++k) {
        const double tk = static_cast<double>(k);
        const double xk = xs[k];
        double xd1 = delayed ? detail::mg_history(xs, fs, tk - dsteps, dt, spec.x0) : xk;
        const double k1 = detail::mg_rhs(xk, delayed ? xd1 : xk);
        const double xm1 = xk + 0.5 * dt * k1;
        const double xdm = delayed ? detail::mg_history(xs, fs, tk + 0.5 - dsteps, dt, spec.x0) : 0.0;
        const double k2 = detail::mg_rhs(xm1, delayed ? xdm : xm1);
        const double xm2 = xk + 0.5 * dt * k2;
        const double k3 = detail::mg_rhs(xm2, delayed ? xdm : xm2);
        const double xe = xk + dt * k3;
        const double xde = delayed ? detail::mg_history(xs, fs, tk + 1.0 - dsteps, dt, spec.x0) : 0.0;
        const double k4 = detail::mg_rhs(xe, delayed ? xde : xe);
        const double xn = xk + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        xs.push_back(xn);
        const double xdn = delayed ? detail::mg_history(xs, fs, tk + 1.0 - dsteps, dt, spec.x0) : xn;
        fs.push_back(detail::mg_rhs(xn, xdn));
    }

    std::vector<double> out(spec.n);
    for (std::size_t j = 0; j < spec.n; ++j)
        out[j] = xs[washout_steps + j * static_cast<std::size_t>(su)];
    return out;
}

/* ------------------------------------------------------------------ */
/* CSV series                                                          */
/* ------------------------------------------------------------------ */

struct RawSeries {
    std::vector<std::string> columns;      /* names, in load order */
    std::vector<std::vector<double>> data; /* column-major */

    std::size_t rows() const { return data.empty() ? 0 : data[0].size(); }
};

namespace detail {

inline std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        std::size_t pos = line.find(',', start);
        if (pos == std::string::npos) {
            out.push_back(trim(line.substr(start)));
            break;
        }
        out.push_back(trim(line.substr(start, pos - start)));
        start = pos + 1;
    }
    return out;
}

inline double parse_cell(const std::string& cell, std::size_t file_row, const std::string& col) {
    double v = 0.0;
    const char* b = cell.data();
    const char* e = b + cell.size();
    auto [ptr, ec] = std::from_chars(b, e, v);
    if (ec != std::errc() || ptr != e)
        throw ParseError("CSV parse error at row " + std::to_string(file_row) + ", column '" +
                         col + "': not numeric: '" + cell + "'");
    return v;
}

} // namespace detail

/*
 * Load named columns (in the requested order) from a comma-separated file
 * with a header row, '.' decimals, numeric body.  Errors carry the offending
 * 1-based file row.
 */
inline RawSeries load_csv_series(const std::string& path, const std::vector<std::string>& columns) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path + "'");
    std::string line;
    if (!std::getline(in, line)) throw ParseError("'" + path + "': empty file");
    const std::vector<std::string> header = detail::split_csv(line);
    if (columns.empty()) throw InvalidArgument("load_csv_series: no columns requested");

    std::vector<std::size_t> idx;
    for (const auto& want : columns) {
        auto it = std::find(header.begin(), header.end(), want);
        if (it == header.end())
            throw MissingColumn("'" + path + "': column '" + want + "' not in header");
        idx.push_back(static_cast<std::size_t>(it - header.begin()));
    }

    RawSeries s;
    s.columns = columns;
    s.data.assign(columns.size(), {});
    std::size_t file_row = 1;
    while (std::getline(in, line)) {
        ++file_row;
        if (detail::trim(line).empty()) continue;
        const std::vector<std::string> cells = detail::split_csv(line);
        if (cells.size() != header.size())
            throw ParseError("'" + path + "': row " + std::to_string(file_row) + " has " +
                             std::to_string(cells.size()) + " fields, header has " +
                             std::to_string(header.size()));
        for (std::size_t c = 0; c < idx.size(); ++c)
            s.data[c].push_back(detail::parse_cell(cells[idx[c]], file_row, columns[c]));
    }
    if (s.rows() == 0) throw ParseError("'" + path + "': no data rows");
    return s;
}

/* Write columns (same length) as CSV with a header row. */
inline void save_csv_series(const std::string& path, const std::vector<std::string>& columns,
                            const std::vector<std::vector<double>>& data) {
    if (columns.size() != data.size() || columns.empty())
        throw InvalidArgument("save_csv_series: column/name count mismatch");
    std::ofstream out(path);
    if (!out) throw IoError("cannot write '" + path + "'");
    for (std::size_t c = 0; c < columns.size(); ++c)
        out << (c ? "," : "") << columns[c];
    out << "\n";
    char buf[64];
    for (std::size_t r = 0; r < data[0].size(); ++r) {
        for (std::size_t c = 0; c < data.size(); ++c) {
            std::snprintf(buf, sizeof(buf), "%.12g", data[c][r]);
            out << (c ? "," : "") << buf;
        }
        out << "\n";
    }
    if (!out) throw IoError("write failed for '" + path + "'");
}

/* ------------------------------------------------------------------ */
/* Embedding, normalization, split                                     */
/* ------------------------------------------------------------------ */

/* One model input: column `column` of the raw series, `lag` steps back. */
struct LagSpec {
    std::size_t column = 0;
    std::size_t lag = 0;
};

/*
 * Sample t (t = max_lag .. rows-1-horizon) gets inputs
 * [col(lag_k.column)[t - lag_k.lag]]_k and target col(target_column)[t + horizon].
 * Sample count = rows - max_lag - horizon.
 */
inline WindowedDataset embed(const RawSeries& series, const std::vector<LagSpec>& lags,
                             std::size_t target_column, std::size_t horizon) {
    if (lags.empty()) throw InvalidArgument("embed: need at least one lag");
    if (horizon < 1) throw InvalidArgument("embed: horizon must be >= 1");
    for (const auto& l : lags)
        if (l.column >= series.data.size()) throw InvalidArgument("embed: lag column out of range");
    if (target_column >= series.data.size())
        throw InvalidArgument("embed: target column out of range");

    std::size_t max_lag = 0;
    for (const auto& l : lags) max_lag = std::max(max_lag, l.lag);
    const std::size_t rows = series.rows();
    if (rows <= max_lag + horizon)
        throw InsufficientLength("embed: series of " + std::to_string(rows) +
                                 " rows too short for max lag " + std::to_string(max_lag) +
                                 " + horizon " + std::to_string(horizon));

    WindowedDataset d;
    d.n_inputs = lags.size();
    const std::size_t count = rows - max_lag - horizon;
    d.x.reserve(count * d.n_inputs);
    d.y.reserve(count);
    std::vector<double> in(d.n_inputs);
    for (std::size_t t = max_lag; t + horizon < rows; ++t) {
        for (std::size_t k = 0; k < lags.size(); ++k)
            in[k] = series.data[lags[k].column][t - lags[k].lag];
        d.add_row(in.data(), series.data[target_column][t + horizon]);
    }
    return d;
}

/* Single-column convenience overload. */
inline WindowedDataset embed(const std::vector<double>& series, const std::vector<std::size_t>& lags,
                             std::size_t horizon) {
    RawSeries s;
    s.columns = {"x"};
    s.data = {series};
    std::vector<LagSpec> ls;
    for (std::size_t l : lags) ls.push_back({0, l});
    return embed(s, ls, 0, horizon);
}

/*
 * Affine map of every column (inputs and target) to [0,1], with min/max
 * fitted on the first fit_rows rows only (0 = all rows).  Fitting on the
 * chronological training prefix and applying to everything is how the
 * experiment pipeline avoids test-set leakage; later rows may leave [0,1]
 * slightly, which downstream code tolerates.
 */
inline WindowedDataset normalize_minmax(const WindowedDataset& d, std::size_t fit_rows = 0) {
    if (d.size() == 0) throw EmptyDataset("normalize_minmax: empty dataset");
    if (fit_rows == 0 || fit_rows > d.size()) fit_rows = d.size();
    const std::size_t nc = d.n_inputs + 1;
    NormRecord rec;
    rec.mins.assign(nc, std::numeric_limits<double>::infinity());
    rec.maxs.assign(nc, -std::numeric_limits<double>::infinity());
    for (std::size_t s = 0; s < fit_rows; ++s) {
        for (std::size_t j = 0; j < d.n_inputs; ++j) {
            rec.mins[j] = std::min(rec.mins[j], d.input(s, j));
            rec.maxs[j] = std::max(rec.maxs[j], d.input(s, j));
        }
        rec.mins[nc - 1] = std::min(rec.mins[nc - 1], d.target(s));
        rec.maxs[nc - 1] = std::max(rec.maxs[nc - 1], d.target(s));
    }
    for (std::size_t c = 0; c < nc; ++c)
        if (!(rec.mins[c] < rec.maxs[c]))
            throw ConstantColumn("normalize_minmax: column " + std::to_string(c) +
                                 " is constant on the fitted rows");
    rec.normalized = true;

    WindowedDataset out;
    out.n_inputs = d.n_inputs;
    out.x.resize(d.x.size());
    out.y.resize(d.y.size());
    for (std::size_t s = 0; s < d.size(); ++s) {
        for (std::size_t j = 0; j < d.n_inputs; ++j)
            out.x[s * d.n_inputs + j] =
                (d.input(s, j) - rec.mins[j]) / (rec.maxs[j] - rec.mins[j]);
        out.y[s] = (d.target(s) - rec.mins[nc - 1]) / (rec.maxs[nc - 1] - rec.mins[nc - 1]);
    }
    out.norm = rec;
    return out;
}

/* Invert the affine map for one column (inputs 0..n-1, target = n). */
inline double denormalize(const NormRecord& rec, std::size_t column, double v) {
    if (!rec.normalized || column >= rec.mins.size())
        throw InvalidArgument("denormalize: no record for column");
    return rec.mins[column] + v * (rec.maxs[column] - rec.mins[column]);
}

/* Chronological, contiguous split; no shuffling. */
inline std::pair<WindowedDataset, WindowedDataset> split(const WindowedDataset& d, double fraction) {
    if (!(fraction > 0.0 && fraction < 1.0))
        throw InvalidArgument("split: fraction must be in (0,1)");
    const std::size_t n_train =
        static_cast<std::size_t>(std::llround(static_cast<double>(d.size()) * fraction));
    if (n_train == 0 || n_train >= d.size())
        throw DegenerateSplit("split: fraction " + std::to_string(fraction) + " of " +
                              std::to_string(d.size()) + " samples leaves an empty side");
    WindowedDataset a, b;
    a.n_inputs = b.n_inputs = d.n_inputs;
    a.norm = b.norm = d.norm;
    a.x.assign(d.x.begin(), d.x.begin() + static_cast<long>(n_train * d.n_inputs));
    a.y.assign(d.y.begin(), d.y.begin() + static_cast<long>(n_train));
    b.x.assign(d.x.begin() + static_cast<long>(n_train * d.n_inputs), d.x.end());
    b.y.assign(d.y.begin() + static_cast<long>(n_train), d.y.end());
    return {std::move(a), std::move(b)};
}

/* ------------------------------------------------------------------ */
/* Series pipeline                                                     */
/* ------------------------------------------------------------------ */

struct CsvSourceSpec {
    std::string path;
    std::vector<std::string> columns;
};

/* Full recipe from raw source to train/test datasets. */
struct SeriesSpec {
    enum class Source { MackeyGlass, Csv };
    Source source = Source::MackeyGlass;
    MackeyGlassSpec mg;
    CsvSourceSpec csv;
    std::vector<LagSpec> lags = {{0, 18}, {0, 12}, {0, 6}, {0, 0}};
    std::size_t target_column = 0;
    std::size_t horizon = 6;
    double split_fraction = 0.5;
    bool normalize = true;
};

struct PreparedData {
    WindowedDataset train, test;
};

/* embed -> fit normalization on the training prefix -> apply -> split */
inline PreparedData prepare_dataset(const SeriesSpec& spec) {
    RawSeries raw;
    if (spec.source == SeriesSpec::Source::MackeyGlass) {
        raw.columns = {"x"};
        raw.data = {gen_mackey_glass(spec.mg)};
    } else {
        raw = load_csv_series(spec.csv.path, spec.csv.columns);
    }
    WindowedDataset all = embed(raw, spec.lags, spec.target_column, spec.horizon);
    if (spec.normalize) {
        const std::size_t n_train = static_cast<std::size_t>(
            std::llround(static_cast<double>(all.size()) * spec.split_fraction));
        all = normalize_minmax(all, n_train);
    }
    PreparedData out;
    auto [train, test] = split(all, spec.split_fraction);
    out.train = std::move(train);
    out.test = std::move(test);
    return out;
}

} // namespace evonf
