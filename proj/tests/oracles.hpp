#ifndef SEMIREG_TESTS_ORACLES_HPP
#define SEMIREG_TESTS_ORACLES_HPP

// Independent reference computations used by the unit and acceptance tests.
// Nothing here calls into the code under test except for plain data types.

#include <cmath>
#include <cstddef>
#include <numbers>
#include <random>
#include <set>
#include <utility>
#include <vector>

#include "semireg/coeff_space.hpp"
#include "semireg/hypercross.hpp"
#include "semireg/test_problems.hpp"

namespace oracle {

/// Diagonal operator diag(d_1..d_n); symmetric, so adjoint == apply.
class DiagonalOperator {
public:
    explicit DiagonalOperator(std::vector<double> d) : d_(std::move(d)) {}
    std::size_t dim() const noexcept { return d_.size(); }
    double sigma(std::size_t i) const { return d_[i]; }
    semireg::CoeffVec apply(const semireg::CoeffVec& v) const {
        std::vector<double> out(d_.size());
        for (std::size_t i = 0; i < d_.size(); ++i) out[i] = d_[i] * v.coeff(i + 1);
        return semireg::CoeffVec(std::move(out));
    }
    semireg::CoeffVec apply_adjoint(const semireg::CoeffVec& v) const { return apply(v); }

private:
    std::vector<double> d_;
};

/// Chebyshev polynomial of the fourth kind normalised at 1:
/// W_k(cos t) / W_k(1) with W_k(cos t) = sin((k + 1/2) t) / sin(t/2), x = 1 - 2 lambda.
inline double chebyshev_w_residual(std::size_t k, double lambda) {
    const double x = 1.0 - 2.0 * lambda;
    const double kk = static_cast<double>(k);
    if (x >= 1.0) return 1.0;
    if (x <= -1.0) return (k % 2 == 0 ? 1.0 : -1.0) / (2.0 * kk + 1.0);
    const double t = std::acos(x);
    return std::sin((kk + 0.5) * t) / std::sin(0.5 * t) / (2.0 * kk + 1.0);
}

/// Brute force: every (row, col) in [1, 4^n]^2 with row_eff * col <= 4^n,
/// where row_eff is the smallest power of two >= row (row 1 counts as 1).
/// This is the union of the strips {1} x [1,4^n] and (2^{k-1}, 2^k] x [1, 4^n / 2^k].
inline std::set<std::pair<std::size_t, std::size_t>> gamma_brute_force(unsigned n) {
    const std::size_t dim = std::size_t{1} << (2 * n);
    std::set<std::pair<std::size_t, std::size_t>> out;
    for (std::size_t row = 1; row <= dim; ++row) {
        std::size_t band = 1;
        while (band < row) band *= 2;
        for (std::size_t col = 1; col <= dim; ++col)
            if (band * col <= dim) out.insert({row, col});
    }
    return out;
}

/// Dense A_n: Galerkin entries on Gamma_n, zero elsewhere, computed straight
/// from the membership test of gamma_brute_force.
template <class S>
std::vector<std::vector<double>> dense_hyperbolic(const S& src, unsigned n) {
    const auto set = gamma_brute_force(n);
    const std::size_t dim = std::size_t{1} << (2 * n);
    std::vector<std::vector<double>> m(dim, std::vector<double>(dim, 0.0));
    for (const auto& [r, c] : set) m[r - 1][c - 1] = src.entry(r, c);
    return m;
}

inline std::vector<double> dense_apply(const std::vector<std::vector<double>>& m, const std::vector<double>& v) {
    std::vector<double> out(m.size(), 0.0);
    for (std::size_t i = 0; i < m.size(); ++i)
        for (std::size_t j = 0; j < v.size() && j < m[i].size(); ++j) out[i] += m[i][j] * v[j];
    return out;
}

inline std::vector<double> dense_apply_transpose(const std::vector<std::vector<double>>& m,
                                                 const std::vector<double>& w) {
    std::vector<double> out(m.empty() ? 0 : m[0].size(), 0.0);
    for (std::size_t i = 0; i < m.size() && i < w.size(); ++i)
        for (std::size_t j = 0; j < m[i].size(); ++j) out[j] += m[i][j] * w[i];
    return out;
}

/// Gauss-Legendre rule on [-1, 1] by Newton iteration on std::legendre.
inline std::pair<std::vector<double>, std::vector<double>> gauss_legendre(unsigned points) {
    std::vector<double> x(points), w(points);
    for (unsigned i = 0; i < points; ++i) {
        double t = std::cos(std::numbers::pi * (i + 0.75) / (points + 0.5));
        for (int it = 0; it < 100; ++it) {
            const double p = std::legendre(points, t);
            const double p1 = std::legendre(points - 1, t);
            const double dp = points * (t * p - p1) / (t * t - 1.0);
            const double dt = p / dp;
            t -= dt;
            if (std::fabs(dt) < 1e-16) break;
        }
        const double p1 = std::legendre(points - 1, t);
        const double dp = points * (t * std::legendre(points, t) - p1) / (t * t - 1.0);
        x[i] = t;
        w[i] = 2.0 / ((1.0 - t * t) * dp * dp);
    }
    return {x, w};
}

/// sqrt(2) int g(t) sin(pi k t) dt by composite Gauss-Legendre quadrature with
/// `panels` panels per polynomial piece.
inline double quadrature_sine_coefficient(const semireg::PiecewisePoly& g, std::size_t k, unsigned panels,
                                          unsigned points = 64) {
    static const auto rule = gauss_legendre(points);
    const auto& [x, w] = rule;
    double s = 0.0;
    for (const auto& piece : g) {
        const double lo = boost::rational_cast<double>(piece.lo);
        const double hi = boost::rational_cast<double>(piece.hi);
        std::vector<double> c;
        for (const auto& r : piece.c) c.push_back(boost::rational_cast<double>(r));
        const double h = (hi - lo) / panels;
        for (unsigned p = 0; p < panels; ++p) {
            const double a = lo + p * h;
            for (std::size_t i = 0; i < x.size(); ++i) {
                const double t = a + 0.5 * h * (x[i] + 1.0);
                double v = 0.0;
                for (std::size_t m = c.size(); m-- > 0;) v = v * t + c[m];
                s += 0.5 * h * w[i] * v * std::sin(std::numbers::pi * static_cast<double>(k) * t);
            }
        }
    }
    return std::numbers::sqrt2 * s;
}

inline std::vector<double> gaussian_vector(std::size_t n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g(0.0, 1.0);
    std::vector<double> v(n);
    for (double& x : v) x = g(rng);
    return v;
}

}  // namespace oracle

#endif  // SEMIREG_TESTS_ORACLES_HPP
