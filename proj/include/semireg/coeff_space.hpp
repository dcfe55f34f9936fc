#ifndef SEMIREG_COEFF_SPACE_HPP
#define SEMIREG_COEFF_SPACE_HPP

// Elements of a separable Hilbert space represented by their coefficient
// sequence in a fixed orthonormal basis {e_k}. Coefficient k (1-based in all
// public documentation) is stored at position k-1. Entries past dim() are
// zero, and binary operations zero-extend the shorter operand.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <utility>
#include <vector>

namespace semireg {

class CoeffVec {
public:
    CoeffVec() = default;

    /// Zero vector of the given ambient length.
    explicit CoeffVec(std::size_t dim) : coeffs_(dim, 0.0) {}

    explicit CoeffVec(std::vector<double> coeffs) : coeffs_(std::move(coeffs)) {}

    CoeffVec(std::initializer_list<double> coeffs) : coeffs_(coeffs) {}

    std::size_t dim() const noexcept { return coeffs_.size(); }
    bool empty() const noexcept { return coeffs_.empty(); }

    /// Storage access, 0-based, no bounds check.
    double operator[](std::size_t pos) const noexcept { return coeffs_[pos]; }

    /// Coefficient of e_k, k >= 1; zero beyond dim().
    double coeff(std::size_t k) const noexcept {
        return (k >= 1 && k <= coeffs_.size()) ? coeffs_[k - 1] : 0.0;
    }

    std::span<const double> values() const noexcept { return coeffs_; }

    /// Number of leading coefficients up to and including the last nonzero.
    std::size_t support() const noexcept {
        std::size_t s = coeffs_.size();
        while (s > 0 && coeffs_[s - 1] == 0.0) --s;
        return s;
    }

    std::vector<double> release() && { return std::move(coeffs_); }

    friend bool operator==(const CoeffVec&, const CoeffVec&) = default;

private:
    std::vector<double> coeffs_;
};

/// Orthoprojector P_m: keeps coefficients 1..m, zeroes the rest, keeps dim.
inline CoeffVec project(const CoeffVec& v, std::size_t m) {
    std::vector<double> out(v.values().begin(), v.values().end());
    if (m < out.size()) std::fill(out.begin() + static_cast<std::ptrdiff_t>(m), out.end(), 0.0);
    return CoeffVec(std::move(out));
}

/// Same element viewed in an ambient space of length dim: truncates (which
/// is P_dim followed by dropping the zero tail) or zero-extends.
inline CoeffVec resized(const CoeffVec& v, std::size_t dim) {
    std::vector<double> out(dim, 0.0);
    const std::size_t keep = std::min(dim, v.dim());
    std::copy_n(v.values().begin(), keep, out.begin());
    return CoeffVec(std::move(out));
}

/// Drops trailing zeros. The represented element is unchanged.
inline CoeffVec trimmed(const CoeffVec& v) { return resized(v, v.support()); }

inline double inner(const CoeffVec& u, const CoeffVec& v) noexcept {
    const std::size_t n = std::min(u.dim(), v.dim());
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += u[i] * v[i];
    return s;
}

inline double norm(const CoeffVec& v) noexcept { return std::sqrt(inner(v, v)); }

/// ||u - v|| without materialising the difference.
inline double distance(const CoeffVec& u, const CoeffVec& v) noexcept {
    const std::size_t common = std::min(u.dim(), v.dim());
    double s = 0.0;
    for (std::size_t i = 0; i < common; ++i) {
        const double d = u[i] - v[i];
        s += d * d;
    }
    for (std::size_t i = common; i < u.dim(); ++i) s += u[i] * u[i];
    for (std::size_t i = common; i < v.dim(); ++i) s += v[i] * v[i];
    return std::sqrt(s);
}

/// a*u + b*v, zero-extended to the larger dimension.
inline CoeffVec combine(double a, const CoeffVec& u, double b, const CoeffVec& v) {
    std::vector<double> out(std::max(u.dim(), v.dim()), 0.0);
    for (std::size_t i = 0; i < u.dim(); ++i) out[i] = a * u[i];
    for (std::size_t i = 0; i < v.dim(); ++i) out[i] += b * v[i];
    return CoeffVec(std::move(out));
}

inline CoeffVec operator+(const CoeffVec& u, const CoeffVec& v) { return combine(1.0, u, 1.0, v); }
inline CoeffVec operator-(const CoeffVec& u, const CoeffVec& v) { return combine(1.0, u, -1.0, v); }

inline CoeffVec operator*(double a, const CoeffVec& v) {
    std::vector<double> out(v.values().begin(), v.values().end());
    for (double& x : out) x *= a;
    return CoeffVec(std::move(out));
}

}  // namespace semireg

#endif  // SEMIREG_COEFF_SPACE_HPP
