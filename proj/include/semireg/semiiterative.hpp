#ifndef SEMIREG_SEMIITERATIVE_HPP
#define SEMIREG_SEMIITERATIVE_HPP

// Semiiterative regularization methods generated by monic orthogonal
// polynomials P_k on [-1, 1] with recurrence
//
//     P_{k+1}(x) = (x - alpha_k) P_k(x) - beta_k P_{k-1}(x),  P_0 = 1, P_1 = x - alpha_0,
//
// and the two-step iteration
//
//     x_{-1} = 0,  x_0 = 2 w_0 A^* f,
//     x_k = x_{k-1} + ((1 - alpha_k) w_k - 1)(x_{k-1} - x_{k-2}) + 2 w_k A^*(f - A x_{k-1}),
//     w_0 = 1/(1 - alpha_0),  w_k = 1/(1 - alpha_k - beta_k w_{k-1}).
//
// The residual polynomial of the method is r_k(l) = P_k(1 - 2l)/P_k(1). The
// iterate labelled x_k above has residual polynomial r_{k+1}: x_0 = g_1(A^*A)A^*f
// with g_1 = 2 w_0, and in general x_k = g_{k+1}(A^*A) A^* f.

#include <cmath>
#include <concepts>
#include <cstddef>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "semireg/coeff_space.hpp"
#include "semireg/errors.hpp"

namespace semireg {

/// Square linear operator on coefficient space with an adjoint.
template <class Op>
concept LinearOperator = requires(const Op& op, const CoeffVec& v) {
    { op.apply(v) } -> std::convertible_to<CoeffVec>;
    { op.apply_adjoint(v) } -> std::convertible_to<CoeffVec>;
    { op.dim() } -> std::convertible_to<std::size_t>;
};

/// A semiiterative method: recurrence coefficients plus the constants of
///   (i)  |r_k(l)| <= kappa0,
///   (ii) |l^{mu/2} r_k(l)| <= kappa_mu(mu) / (k+1)^mu,  0 < mu <= qualification.
struct MethodSpec {
    std::string name;
    std::function<double(std::size_t)> alpha;  ///< alpha_k, k >= 0
    std::function<double(std::size_t)> beta;   ///< beta_k > 0, k >= 1
    double kappa0 = 1.0;
    double kappa2 = 1.0;  ///< kappa_mu at mu = 2; meaningful only when qualification >= 2
    std::function<double(double)> kappa_mu;
    double qualification = 1.0;  ///< mu_0
    double nu = 0.0;             ///< nu for nu-methods, 0 otherwise
};

namespace detail {

// Monic Jacobi recursion coefficients for the weight (1-x)^a (1+x)^b.
// The generic alpha_k formula is 0/0 at k = 0 when a + b = 0, and the
// generic beta_k formula is 0/0 at k = 1 when a + b = -1.
inline double jacobi_alpha(double a, double b, std::size_t k) {
    if (k == 0) return (b - a) / (a + b + 2.0);
    const double s = 2.0 * static_cast<double>(k) + a + b;
    return (b * b - a * a) / (s * (s + 2.0));
}

inline double jacobi_beta(double a, double b, std::size_t k) {
    const double kk = static_cast<double>(k);
    if (k == 1) {
        const double s = 2.0 + a + b;
        return 4.0 * (1.0 + a) * (1.0 + b) / (s * s * (s + 1.0));
    }
    const double s = 2.0 * kk + a + b;
    return 4.0 * kk * (kk + a) * (kk + b) * (kk + a + b) / (s * s * (s + 1.0) * (s - 1.0));
}

}  // namespace detail

/// Brakhage's nu-method: monic Jacobi polynomials with (a, b) = (2nu - 1/2, -1/2).
inline MethodSpec nu_method(double nu) {
    if (!(nu > 0.0) || !std::isfinite(nu)) throw ConfigError("nu_method: nu must be positive");
    const double a = 2.0 * nu - 0.5;
    const double b = -0.5;
    // kappa_{2nu} = (2nu)! for integer 2nu; Gamma(2nu+1) otherwise (diagnostics only).
    const double kappa_top = std::max(1.0, std::tgamma(2.0 * nu + 1.0));

    MethodSpec spec;
    spec.name = "nu-method(" + std::to_string(nu) + ")";
    spec.alpha = [a, b](std::size_t k) { return detail::jacobi_alpha(a, b, k); };
    spec.beta = [a, b](std::size_t k) { return detail::jacobi_beta(a, b, k); };
    spec.kappa0 = 1.0;
    spec.kappa2 = kappa_top;
    spec.kappa_mu = [kappa_top](double) { return kappa_top; };
    spec.qualification = 2.0 * nu;
    spec.nu = nu;
    return spec;
}

/// w_0 = 1/(1 - alpha_0) for k == 0, else 1/(1 - alpha_k - beta_k w_{k-1}).
inline double omega_next(const MethodSpec& spec, std::size_t k, double omega_prev) {
    const double denom = (k == 0) ? 1.0 - spec.alpha(0)
                                  : 1.0 - spec.alpha(k) - spec.beta(k) * omega_prev;
    if (!(std::fabs(denom) >= 1e-14))
        throw NumericalDegeneracy("omega recursion denominator vanished at k = " + std::to_string(k));
    return 1.0 / denom;
}

/// State of one run of the two-step iteration. x_curr holds x_k, x_prev holds
/// x_{k-1}; residual caches rhs - A x_curr so each step costs one apply and
/// one adjoint apply.
struct IterState {
    std::size_t k = 0;
    CoeffVec x_curr;
    CoeffVec x_prev;
    double omega = 0.0;
    CoeffVec residual;
};

namespace detail {

template <LinearOperator Op>
void check_dims(const Op& op, const CoeffVec& rhs) {
    if (rhs.dim() != op.dim())
        throw DimensionError("operator dimension " + std::to_string(op.dim()) +
                             " does not match rhs dimension " + std::to_string(rhs.dim()));
}

template <LinearOperator Op>
CoeffVec residual_of(const Op& op, const CoeffVec& rhs, const CoeffVec& x) {
    return rhs - op.apply(x);
}

}  // namespace detail

template <LinearOperator Op>
IterState init_state(const Op& op, const CoeffVec& rhs, const MethodSpec& spec) {
    detail::check_dims(op, rhs);
    IterState s;
    s.k = 0;
    s.omega = omega_next(spec, 0, 0.0);
    s.x_prev = CoeffVec(op.dim());
    s.x_curr = resized((2.0 * s.omega) * op.apply_adjoint(rhs), op.dim());
    s.residual = detail::residual_of(op, rhs, s.x_curr);
    return s;
}

template <LinearOperator Op>
IterState step(const IterState& state, const Op& op, const CoeffVec& rhs, const MethodSpec& spec) {
    detail::check_dims(op, rhs);
    if (state.x_curr.dim() != op.dim() || state.x_prev.dim() != op.dim())
        throw DimensionError("iteration state does not live in the operator's space");

    const std::size_t k = state.k + 1;
    const double omega = omega_next(spec, k, state.omega);
    const double momentum = (1.0 - spec.alpha(k)) * omega - 1.0;
    const double gain = 2.0 * omega;

    const CoeffVec grad = op.apply_adjoint(state.residual);
    const std::size_t n = op.dim();
    std::vector<double> next(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double xc = state.x_curr[i];
        next[i] = xc + momentum * (xc - state.x_prev[i]) + gain * (i < grad.dim() ? grad[i] : 0.0);
    }

    IterState out;
    out.k = k;
    out.omega = omega;
    out.x_prev = state.x_curr;
    out.x_curr = CoeffVec(std::move(next));
    out.residual = detail::residual_of(op, rhs, out.x_curr);
    return out;
}

/// r_k(lambda) = P_k(1 - 2 lambda) / P_k(1), both recurrences run jointly and
/// divided once at the end. Both sequences are rescaled by the same power of
/// two when P_k(1) gets small, which leaves the ratio bit-identical.
inline double residual_value(const MethodSpec& spec, std::size_t k, double lambda) {
    if (k == 0) return 1.0;
    const double x = 1.0 - 2.0 * lambda;
    double p_prev = 1.0, p_curr = x - spec.alpha(0);
    double q_prev = 1.0, q_curr = 1.0 - spec.alpha(0);
    for (std::size_t j = 1; j < k; ++j) {
        const double a = spec.alpha(j);
        const double b = spec.beta(j);
        const double p_next = (x - a) * p_curr - b * p_prev;
        const double q_next = (1.0 - a) * q_curr - b * q_prev;
        p_prev = p_curr;
        p_curr = p_next;
        q_prev = q_curr;
        q_curr = q_next;
        if (std::fabs(q_curr) < 0x1p-500) {
            p_prev = std::ldexp(p_prev, 500);
            p_curr = std::ldexp(p_curr, 500);
            q_prev = std::ldexp(q_prev, 500);
            q_curr = std::ldexp(q_curr, 500);
        }
    }
    return p_curr / q_curr;
}

/// g_k(lambda) = (1 - r_k(lambda))/lambda; lambda <= 0 is evaluated at 1e-12.
inline double filter_value(const MethodSpec& spec, std::size_t k, double lambda) {
    const double l = lambda > 0.0 ? lambda : 1e-12;
    return (1.0 - residual_value(spec, k, l)) / l;
}

}  // namespace semireg

#endif  // SEMIREG_SEMIITERATIVE_HPP
