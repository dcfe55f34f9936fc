#ifndef SEMIREG_EXPERIMENT_HPP
#define SEMIREG_EXPERIMENT_HPP

// Experiment grids over noise levels, table-shaped CSV output and log-log
// rate fits.

#include <atomic>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "semireg/adaptive_driver.hpp"
#include "semireg/errors.hpp"
#include "semireg/semiiterative.hpp"
#include "semireg/test_problems.hpp"

namespace semireg {

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class SeedPolicy { Fixed, PerRow };

/// delta_max, delta_max/2, ... while >= delta_min (relative slack 1e-9).
inline std::vector<double> halving_deltas(double delta_max, double delta_min) {
    if (!(delta_max > 0.0) || !(delta_min > 0.0) || delta_min > delta_max)
        throw ConfigError("delta range must satisfy 0 < delta_min <= delta_max");
    std::vector<double> out;
    for (double d = delta_max; d >= delta_min * (1.0 - 1e-9); d /= 2.0) out.push_back(d);
    return out;
}

struct ExperimentGrid {
    int problem_id = 1;
    int algorithm = 1;
    double nu = 1.5;
    std::vector<double> deltas = halving_deltas(0x1p-4, 0x1p-13);
    RunParams params;
    SeedPolicy seed_policy = SeedPolicy::Fixed;
    std::optional<double> mu_diagnostic;  ///< default: the problem's smoothness limit
    bool scaled = true;
    std::size_t ambient_dim = std::size_t{1} << 20;
    unsigned jobs = 1;

    void validate() const {
        if (deltas.empty()) throw ConfigError("empty delta list");
        for (std::size_t i = 0; i < deltas.size(); ++i) {
            if (!(deltas[i] > 0.0)) throw ConfigError("delta values must be positive");
            if (i > 0 && !(deltas[i] < deltas[i - 1])) throw ConfigError("delta list must be strictly decreasing");
        }
        if (algorithm != 1 && algorithm != 2) throw ConfigError("algorithm must be 1 or 2");
        if (ambient_dim < 1) throw ConfigError("ambient dimension must be positive");
    }

    double diagnostic_mu() const {
        if (mu_diagnostic) return *mu_diagnostic;
        return problem_id == 1 ? 1.25 : 0.25;
    }
};

struct GridRow {
    double delta = 0.0;
    std::uint64_t seed = 0;
    std::optional<RunReport> report;
    std::string error;
    int exit_code = 0;  ///< 0 ok, 1 configuration error, 2 cap exceeded
};

inline RunParams row_params(const ExperimentGrid& g, std::size_t row) {
    RunParams p = g.params;
    p.delta = g.deltas[row];
    if (g.seed_policy == SeedPolicy::PerRow) p.seed = g.params.seed + row;
    return p;
}

/// One row per delta, in grid order; a failing row records its error and the
/// remaining rows still run. Rows are distributed over g.jobs threads.
inline std::vector<GridRow> run_grid(const ExperimentGrid& g, const Problem& problem) {
    g.validate();
    const MethodSpec spec = nu_method(g.nu);
    const double mu = g.diagnostic_mu();
    const bool with_constants = mu > 0.0 && mu <= spec.qualification;

    std::vector<GridRow> rows(g.deltas.size());
    auto run_row = [&](std::size_t i) {
        const RunParams p = row_params(g, i);
        GridRow& row = rows[i];
        row.delta = p.delta;
        row.seed = p.seed;
        try {
            std::optional<double> diag;
            if (with_constants) diag = mu;
            row.report = run_problem(problem, g.algorithm, spec, p, diag);
        } catch (const ConfigError& e) {
            row.error = e.what();
            row.exit_code = 1;
        } catch (const CapExceeded& e) {
            row.error = e.what();
            row.exit_code = 2;
        } catch (const std::exception& e) {
            row.error = e.what();
            row.exit_code = 2;
        }
    };

    const unsigned jobs = std::max(1u, std::min<unsigned>(g.jobs, static_cast<unsigned>(rows.size())));
    if (jobs == 1) {
        for (std::size_t i = 0; i < rows.size(); ++i) run_row(i);
        return rows;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < jobs; ++t)
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < rows.size(); i = next++) run_row(i);
        });
    for (std::thread& th : pool) th.join();
    return rows;
}

inline std::vector<GridRow> run_grid(const ExperimentGrid& g) {
    g.validate();
    const Problem problem = make_problem(g.problem_id, g.ambient_dim, g.scaled);
    return run_grid(g, problem);
}

/// Least-squares slope of log(value) against log(delta).
inline double rate_fit(std::span<const std::pair<double, double>> pairs) {
    if (pairs.size() < 3) throw std::invalid_argument("rate_fit: need at least 3 pairs");
    double sx = 0.0, sy = 0.0;
    for (const auto& [d, v] : pairs) {
        if (!(d > 0.0) || !(v > 0.0)) throw std::invalid_argument("rate_fit: entries must be positive");
        sx += std::log(d);
        sy += std::log(v);
    }
    const double n = static_cast<double>(pairs.size());
    const double mx = sx / n, my = sy / n;
    double sxx = 0.0, sxy = 0.0;
    for (const auto& [d, v] : pairs) {
        const double dx = std::log(d) - mx;
        sxx += dx * dx;
        sxy += dx * (std::log(v) - my);
    }
    if (sxx == 0.0) throw std::invalid_argument("rate_fit: all delta values coincide");
    return sxy / sxx;
}

inline constexpr const char* csv_header = "algorithm,nu,delta,n,K_n,K,rel_error,expected_rate,info_count,seed";

inline std::string format_real(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

/// Header plus one row per grid entry; reals with 17 significant digits.
/// Failed rows keep algorithm, nu, delta, expected_rate and seed and leave
/// the run columns empty.
inline void emit_csv(const std::vector<GridRow>& rows, int algorithm, double nu, double mu, std::ostream& os) {
    os << csv_header << '\n';
    for (const GridRow& row : rows) {
        const double expected = std::pow(row.delta, mu / (mu + 1.0));
        os << algorithm << ',' << format_real(nu) << ',' << format_real(row.delta) << ',';
        if (row.report) {
            const RunReport& r = *row.report;
            os << r.final_level << ',' << r.final_k_n() << ',' << r.stop_index << ','
               << (r.rel_error ? format_real(*r.rel_error) : std::string()) << ',';
        } else {
            os << ",,,,";
        }
        os << format_real(expected) << ',';
        if (row.report) os << row.report->info_count;
        os << ',' << row.seed << '\n';
    }
}

inline void emit_csv(const std::vector<GridRow>& rows, int algorithm, double nu, double mu, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw IoError("cannot open '" + path + "' for writing");
    emit_csv(rows, algorithm, nu, mu, os);
    if (!os) throw IoError("write to '" + path + "' failed");
}

/// Scalars of one CSV row; run columns are empty (nullopt) for failed rows.
struct CsvRecord {
    int algorithm = 0;
    double nu = 0.0;
    double delta = 0.0;
    std::optional<unsigned> n;
    std::optional<std::size_t> k_n;
    std::optional<std::size_t> k;
    std::optional<double> rel_error;
    double expected_rate = 0.0;
    std::optional<std::size_t> info_count;
    std::uint64_t seed = 0;
};

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    for (char ch : line) {
        if (ch == ',') {
            fields.push_back(cur);
            cur.clear();
        } else if (ch != '\r') {
            cur.push_back(ch);
        }
    }
    fields.push_back(cur);
    return fields;
}

inline std::vector<CsvRecord> parse_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line)) throw IoError("empty CSV input");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != csv_header) throw IoError("unexpected CSV header: " + line);

    std::vector<CsvRecord> out;
    std::size_t lineno = 1;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty() || line == "\r") continue;
        const std::vector<std::string> f = split_csv_line(line);
        if (f.size() != 10) throw IoError("line " + std::to_string(lineno) + ": expected 10 columns");
        try {
            CsvRecord r;
            r.algorithm = std::stoi(f[0]);
            r.nu = std::stod(f[1]);
            r.delta = std::stod(f[2]);
            if (!f[3].empty()) r.n = static_cast<unsigned>(std::stoul(f[3]));
            if (!f[4].empty()) r.k_n = std::stoull(f[4]);
            if (!f[5].empty()) r.k = std::stoull(f[5]);
            if (!f[6].empty()) r.rel_error = std::stod(f[6]);
            r.expected_rate = std::stod(f[7]);
            if (!f[8].empty()) r.info_count = std::stoull(f[8]);
            r.seed = std::stoull(f[9]);
            out.push_back(r);
        } catch (const std::logic_error&) {
            throw IoError("line " + std::to_string(lineno) + ": malformed field");
        }
    }
    return out;
}

struct RateSummary {
    std::optional<double> error_slope;
    std::optional<double> stop_index_slope;
    std::size_t rows_used = 0;
};

/// Fits rel_error ~ delta^s and K ~ delta^t over the rows that completed.
inline RateSummary fit_rates(const std::vector<CsvRecord>& records) {
    std::vector<std::pair<double, double>> err, kk;
    for (const CsvRecord& r : records) {
        if (r.rel_error && *r.rel_error > 0.0) err.emplace_back(r.delta, *r.rel_error);
        if (r.k && *r.k > 0) kk.emplace_back(r.delta, static_cast<double>(*r.k));
    }
    RateSummary s;
    s.rows_used = err.size();
    if (err.size() >= 3) s.error_slope = rate_fit(err);
    if (kk.size() >= 3) s.stop_index_slope = rate_fit(kk);
    return s;
}

/// Two-column "delta value" files <prefix>_error.dat and <prefix>_K.dat.
inline void write_plot_data(const std::vector<GridRow>& rows, const std::string& prefix) {
    std::ofstream err(prefix + "_error.dat");
    std::ofstream kk(prefix + "_K.dat");
    if (!err || !kk) throw IoError("cannot open plot files with prefix '" + prefix + "'");
    for (const GridRow& row : rows) {
        if (!row.report) continue;
        if (row.report->rel_error) err << format_real(row.delta) << ' ' << format_real(*row.report->rel_error) << '\n';
        kk << format_real(row.delta) << ' ' << row.report->stop_index << '\n';
    }
    if (!err || !kk) throw IoError("writing plot files failed");
}

}  // namespace semireg

#endif  // SEMIREG_EXPERIMENT_HPP
