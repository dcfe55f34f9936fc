#ifndef SEMIREG_ADAPTIVE_DRIVER_HPP
#define SEMIREG_ADAPTIVE_DRIVER_HPP

// Adaptive hyperbolic-cross regularization.
//
// Both drivers start at the smallest level n with
//     (1 + 2^{r+3}) 2^{-2rn} n < gamma delta / (2 rho)
// and at every level iterate at most K_n times, K_n the largest integer with
//     (1 + 2^{r+3}) 2^{-2rn} n < gamma delta / (2 K_n rho).
// Each level restarts the iteration from x_{-1} = 0 on A_n and P_{4^n} f_delta.
//
//   run_discrepancy : stop at the first k <= K_n with ||A_n x_k - P f_delta|| <= tau delta.
//   run_balancing   : compute K_n + K_sec iterates and stop at min D_n^+.
//
// Neither driver uses the smoothness mu; it only enters the diagnostics.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "semireg/coeff_space.hpp"
#include "semireg/errors.hpp"
#include "semireg/hypercross.hpp"
#include "semireg/semiiterative.hpp"
#include "semireg/stopping.hpp"
#include "semireg/test_problems.hpp"

namespace semireg {

struct RunParams {
    double delta = 0.0625;
    double rho = 1.0;
    double gamma = 0.5;
    std::optional<double> tau;  ///< default: admissibility threshold + 0.01
    double r = 2.0;
    std::size_t k_sec = 20;
    std::uint64_t seed = 1;
    unsigned n_max = 12;
    std::size_t k_abs_max = 1'000'000;
    std::size_t noise_dim = 4096;  ///< support of the noise direction, 0 = dim(f)
};

/// kappa0 (1 + sqrt(1/2 + kappa2/kappa0) gamma): tau must exceed this.
inline double tau_threshold(const MethodSpec& spec, double gamma) {
    return spec.kappa0 * (1.0 + std::sqrt(0.5 + spec.kappa2 / spec.kappa0) * gamma);
}

inline double effective_tau(const MethodSpec& spec, const RunParams& p) {
    return p.tau ? *p.tau : tau_threshold(spec, p.gamma) + 0.01;
}

/// (1 + 2^{r+3}) 2^{-2rn} n.
inline double discretization_defect(double r, unsigned n) {
    return discretization_bounds(r, n).normal_defect;
}

inline void validate(const RunParams& p) {
    if (!(p.delta > 0.0)) throw ConfigError("delta must be positive");
    if (!(p.rho > 0.0)) throw ConfigError("rho must be positive");
    if (!(p.gamma > 0.0)) throw ConfigError("gamma must be positive");
    if (!(p.r > 0.0)) throw ConfigError("r must be positive");
    if (p.k_sec < 1) throw ConfigError("K_sec must be >= 1");
    if (p.n_max < 1) throw ConfigError("n_max must be >= 1");
    if (p.k_abs_max < 1) throw ConfigError("k_abs_max must be >= 1");
}

/// Smallest n >= 1 with (1 + 2^{r+3}) 2^{-2rn} n < gamma delta / (2 rho).
inline unsigned initial_level(const RunParams& p) {
    validate(p);
    const double target = p.gamma * p.delta / (2.0 * p.rho);
    for (unsigned n = 1; n <= p.n_max; ++n)
        if (discretization_defect(p.r, n) < target) return n;
    throw CapExceeded("no discretization level n <= " + std::to_string(p.n_max) +
                      " satisfies the initial accuracy condition");
}

/// Largest K with (1 + 2^{r+3}) 2^{-2rn} n < gamma delta / (2 K rho); 0 when
/// not even K = 1 qualifies.
inline std::size_t max_iter_count(unsigned n, const RunParams& p) {
    const double lhs = discretization_defect(p.r, n);
    const auto holds = [&](double k) { return lhs < p.gamma * p.delta / (2.0 * k * p.rho); };
    const double bound = p.gamma * p.delta / (2.0 * p.rho * lhs);
    if (!(bound > 0.0)) return 0;
    if (!std::isfinite(bound) || bound > 1e15) throw CapExceeded("K_n bound is not representable");
    double k = std::floor(bound);
    while (k >= 1.0 && !holds(k)) k -= 1.0;
    while (holds(k + 1.0)) k += 1.0;
    return static_cast<std::size_t>(k);
}

/// The constants of the error, stopping-index and complexity estimates.
struct TheoreticalConstants {
    double mu = 0.0;
    double c1 = 0.0;       ///< residual transfer constant
    double c2 = 0.0;       ///< stopping-index constant
    double C_alg1 = 0.0;   ///< error constant, discrepancy principle
    double C_alg2 = 0.0;   ///< error constant, balancing principle
    std::size_t K_opt = 0;
    double c3 = 0.0;       ///< information-count constant
    double c4 = 0.0;       ///< level bound offset
    double c5 = 0.0;       ///< level bound slope in ln(rho/delta)
};

inline TheoreticalConstants theoretical_constants(const MethodSpec& spec, const RunParams& p, double mu,
                                                  unsigned n) {
    if (!(mu > 0.0) || mu > spec.qualification)
        throw ConfigError("diagnostic mu must lie in (0, qualification]");
    if (n < 1) throw ConfigError("level must be >= 1");
    const double tau = effective_tau(spec, p);
    const double threshold = tau_threshold(spec, p.gamma);
    if (!(tau > threshold))
        throw ConfigError("tau = " + std::to_string(tau) + " must exceed " + std::to_string(threshold));

    const double k0 = spec.kappa0;
    const double k2 = spec.kappa2;
    const double kmu = spec.kappa_mu(mu);
    const double g = p.gamma;
    const double r = p.r;
    const double e1 = 1.0 / (mu + 1.0);
    const double e2 = mu / (mu + 1.0);

    TheoreticalConstants c;
    c.mu = mu;
    c.c1 = k0 + 2.0 + (std::sqrt(k0 * (k0 / 2.0 + k2)) + 1.0 / (2.0 * n)) * g;
    c.c2 = std::max(std::pow(kmu / (tau - threshold), e1), 1.0);
    c.C_alg1 = std::pow(k0, e1) * std::pow(tau + c.c1, e2) + 2.0 * k0 * (1.0 + g) * c.c2;
    c.C_alg2 = 12.0 * std::pow(kmu, e1) * std::pow(2.0 * (1.0 + g) * k0, e2);
    c.K_opt = static_cast<std::size_t>(std::ceil(std::pow(2.0 * (1.0 + g) * p.delta / (kmu * p.rho), -e1)));
    const double amp = 1.0 + std::exp2(r + 3.0);
    c.c3 = std::pow(c.c2 / g * std::exp2(2.0 * r + 1.0) * amp, 1.0 / r);
    c.c4 = std::log(c.c2 / g * std::exp2(r + 1.0) * amp / (std::exp2(r) - 1.0)) / (r * std::log(2.0));
    c.c5 = (mu + 2.0) / ((mu + 1.0) * r * std::log(2.0));
    return c;
}

/// ||x - x_exact|| <= C rho^{1/(mu+1)} delta^{mu/(mu+1)}: the right-hand side.
inline double order_optimal_bound(double C, double rho, double delta, double mu) {
    return C * std::pow(rho, 1.0 / (mu + 1.0)) * std::pow(delta, mu / (mu + 1.0));
}

/// K < c2 rho^{1/(mu+1)} delta^{-1/(mu+1)}: the right-hand side.
inline double stopping_index_bound(const TheoreticalConstants& c, double rho, double delta) {
    return c.c2 * std::pow(rho / delta, 1.0 / (c.mu + 1.0));
}

/// n < c4 + c5 ln(rho/delta): the right-hand side.
inline double level_bound(const TheoreticalConstants& c, double rho, double delta) {
    return c.c4 + c.c5 * std::log(rho / delta);
}

/// #Gamma_n < c3 (rho/delta)^{(mu+2)/(r(mu+1))} (1 + c4 + c5 ln(rho/delta))^{1+1/r}: the right-hand side.
inline double information_bound(const TheoreticalConstants& c, double r, double rho, double delta) {
    return c.c3 * std::pow(rho / delta, (c.mu + 2.0) / (r * (c.mu + 1.0))) *
           std::pow(1.0 + level_bound(c, rho, delta), 1.0 + 1.0 / r);
}

struct LevelRecord {
    unsigned n = 0;
    std::size_t k_n = 0;
    std::size_t iterations = 0;
};

struct RunReport {
    int algorithm = 0;
    unsigned final_level = 0;
    std::size_t stop_index = 0;  ///< K
    std::vector<LevelRecord> levels;
    CoeffVec solution;
    std::vector<double> residual_norms;  ///< ||A_n x_k - P f_delta||, k = 1.., final level
    std::size_t info_count = 0;          ///< Galerkin coefficients (A e_j, e_i) queried
    std::size_t total_iterations = 0;
    double delta = 0.0;
    double tau = 0.0;
    std::size_t k_sec = 0;
    std::uint64_t seed = 0;
    std::optional<double> abs_error;
    std::optional<double> rel_error;
    std::optional<TheoreticalConstants> constants;
    std::vector<std::string> warnings;

    std::size_t final_k_n() const { return levels.empty() ? 0 : levels.back().k_n; }
};

/// Data of one run: operator information, noisy right-hand side and the
/// exact solution when known.
struct RunInput {
    const GalerkinInfo* info = nullptr;
    CoeffVec data;
    std::optional<CoeffVec> exact;
    double clean_norm = 0.0;  ///< ||f||, for the delta < ||f|| check
};

/// Noisy data for `problem` according to delta, seed and noise_dim of p.
inline RunInput make_input(const Problem& problem, const RunParams& p) {
    RunInput in;
    in.info = problem.info.get();
    in.data = perturb(problem.f, p.delta, p.seed, p.noise_dim);
    in.exact = problem.x_exact;
    in.clean_norm = norm(problem.f);
    return in;
}

namespace detail {

class GalerkinInfoRef {
public:
    explicit GalerkinInfoRef(const GalerkinInfo& info) : info_(&info) {}
    double entry(std::size_t row, std::size_t col) const { return info_->entry(row, col); }

private:
    const GalerkinInfo* info_;
};

inline RunReport start_report(int algorithm, const RunInput& in, const RunParams& p, double tau) {
    if (in.info == nullptr) throw ConfigError("run input has no operator information");
    RunReport rep;
    rep.algorithm = algorithm;
    rep.delta = p.delta;
    rep.tau = tau;
    rep.k_sec = p.k_sec;
    rep.seed = p.seed;
    if (in.clean_norm > 0.0 && !(p.delta < in.clean_norm))
        rep.warnings.push_back("delta >= ||f||: order-optimality estimates do not apply");
    if (std::fabs(in.info->smoothness() - p.r) > 0.0)
        rep.warnings.push_back("run parameter r differs from the operator's smoothness class");
    return rep;
}

inline void finish_report(RunReport& rep, const RunInput& in, std::size_t info_count) {
    rep.info_count = info_count;
    if (in.exact) {
        const double err = distance(rep.solution, *in.exact);
        rep.abs_error = err;
        const double ref = norm(*in.exact);
        if (ref > 0.0) rep.rel_error = err / ref;
    }
}

inline void charge_iteration(RunReport& rep, const RunParams& p) {
    if (++rep.total_iterations > p.k_abs_max)
        throw CapExceeded("total iteration count exceeded k_abs_max = " + std::to_string(p.k_abs_max));
}

inline void check_level_cap(unsigned next, const RunParams& p) {
    if (next > p.n_max)
        throw CapExceeded("discretization level would exceed n_max = " + std::to_string(p.n_max));
}

}  // namespace detail

/// Adaptive discretization with the discrepancy principle.
inline RunReport run_discrepancy(const RunInput& in, const MethodSpec& spec, const RunParams& p) {
    validate(p);
    const double tau = effective_tau(spec, p);
    const double threshold = tau_threshold(spec, p.gamma);
    if (!(tau > threshold))
        throw ConfigError("tau = " + std::to_string(tau) + " must exceed kappa0(1 + sqrt(1/2 + kappa2/kappa0) gamma) = " +
                          std::to_string(threshold));

    RunReport rep = detail::start_report(1, in, p, tau);
    const detail::GalerkinInfoRef ref(*in.info);
    CountingSource<detail::GalerkinInfoRef> counted(ref);

    unsigned n = initial_level(p);
    GalerkinOperator op = assemble(counted, n);
    for (;;) {
        const std::size_t k_n = max_iter_count(n, p);
        rep.levels.push_back({n, k_n, 0});
        if (k_n > 0) {
            const CoeffVec rhs = resized(in.data, op.dim());
            IterState state = init_state(op, rhs, spec);
            std::vector<double> residuals;
            for (std::size_t k = 1; k <= k_n; ++k) {
                detail::charge_iteration(rep, p);
                state = step(state, op, rhs, spec);
                ++rep.levels.back().iterations;
                const double res = norm(state.residual);
                residuals.push_back(res);
                if (discrepancy_met(res, tau, p.delta)) {
                    rep.final_level = n;
                    rep.stop_index = k;
                    rep.solution = std::move(state.x_curr);
                    rep.residual_norms = std::move(residuals);
                    detail::finish_report(rep, in, counted.count());
                    return rep;
                }
            }
        }
        detail::check_level_cap(n + 1, p);
        op = refine(op, counted);
        ++n;
    }
}

/// Adaptive discretization with the balancing principle.
inline RunReport run_balancing(const RunInput& in, const MethodSpec& spec, const RunParams& p) {
    validate(p);
    RunReport rep = detail::start_report(2, in, p, effective_tau(spec, p));
    const detail::GalerkinInfoRef ref(*in.info);
    CountingSource<detail::GalerkinInfoRef> counted(ref);

    unsigned n = initial_level(p);
    GalerkinOperator op = assemble(counted, n);
    for (;;) {
        const std::size_t k_n = max_iter_count(n, p);
        rep.levels.push_back({n, k_n, 0});
        if (k_n > 0) {
            const CoeffVec rhs = resized(in.data, op.dim());
            IterState state = init_state(op, rhs, spec);
            BalancingWindow window;
            window.k_n = k_n;
            window.k_sec = p.k_sec;
            window.bound_factor = 8.0 * (1.0 + p.gamma) * spec.kappa0 * p.delta;
            window.iterates.reserve(k_n + p.k_sec);
            std::vector<double> residuals;
            residuals.reserve(k_n + p.k_sec);
            for (std::size_t k = 1; k <= k_n + p.k_sec; ++k) {
                detail::charge_iteration(rep, p);
                state = step(state, op, rhs, spec);
                ++rep.levels.back().iterations;
                residuals.push_back(norm(state.residual));
                window.iterates.push_back(trimmed(state.x_curr));
            }
            if (const auto stop = first_admissible(window)) {
                rep.final_level = n;
                rep.stop_index = *stop;
                rep.solution = resized(window.at(*stop), op.dim());
                residuals.resize(*stop);
                rep.residual_norms = std::move(residuals);
                detail::finish_report(rep, in, counted.count());
                return rep;
            }
        }
        detail::check_level_cap(n + 1, p);
        op = refine(op, counted);
        ++n;
    }
}

/// Runs the requested algorithm (1: discrepancy, 2: balancing) on `problem`
/// and attaches the theoretical constants for the diagnostic mu, if given.
inline RunReport run_problem(const Problem& problem, int algorithm, const MethodSpec& spec, const RunParams& p,
                             std::optional<double> mu_diagnostic = std::nullopt) {
    const RunInput in = make_input(problem, p);
    RunReport rep;
    if (algorithm == 1)
        rep = run_discrepancy(in, spec, p);
    else if (algorithm == 2)
        rep = run_balancing(in, spec, p);
    else
        throw ConfigError("algorithm must be 1 or 2");
    if (mu_diagnostic) rep.constants = theoretical_constants(spec, p, *mu_diagnostic, rep.final_level);
    return rep;
}

}  // namespace semireg

#endif  // SEMIREG_ADAPTIVE_DRIVER_HPP
