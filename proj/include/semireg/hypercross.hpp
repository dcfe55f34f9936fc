#ifndef SEMIREG_HYPERCROSS_HPP
#define SEMIREG_HYPERCROSS_HPP

// Hyperbolic-cross Galerkin discretisation.
//
//   Gamma_n = U_{k=1}^{2n} (2^{k-1}, 2^k] x [1, 2^{2n-k}]  U  {1} x [1, 2^{2n}]
//   A_n     = sum_k (P_{2^k} - P_{2^{k-1}}) A P_{2^{2n-k}} + P_1 A P_{2^{2n}}
//
// The first coordinate of a pair is the output (row) index, the second the
// input (column) index, so A_n has the matrix entry (A e_col, e_row) at every
// retained (row, col). Seen row by row, Gamma_n keeps a prefix [1, w_n(row)]
// of the columns, with w_n(1) = 4^n and w_n(row) = 2^{2n-k} on the band
// (2^{k-1}, 2^k]. Refinement from n to n+1 therefore only appends columns.

#include <algorithm>
#include <bit>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <cstdint>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "semireg/coeff_space.hpp"
#include "semireg/errors.hpp"

namespace semireg {

struct IndexPair {
    std::size_t row = 0;  ///< output index (band coordinate)
    std::size_t col = 0;  ///< input index
    friend auto operator<=>(const IndexPair&, const IndexPair&) = default;
};

/// Anything that can deliver Galerkin coefficients (A e_col, e_row).
template <class S>
concept GalerkinSource = requires(const S& s, std::size_t row, std::size_t col) {
    { s.entry(row, col) } -> std::convertible_to<double>;
};

/// Runtime-polymorphic Galerkin information about an operator A in H^r.
class GalerkinInfo {
public:
    virtual ~GalerkinInfo() = default;
    /// (A e_col, e_row), 1-based indices; must be deterministic.
    virtual double entry(std::size_t row, std::size_t col) const = 0;
    /// Smoothness exponent r of the class H^r the operator belongs to.
    virtual double smoothness() const = 0;
};

/// Counts every entry() query forwarded to the wrapped source. One counter
/// per run; not safe for concurrent use.
template <GalerkinSource S>
class CountingSource {
public:
    explicit CountingSource(const S& source) : source_(&source) {}

    double entry(std::size_t row, std::size_t col) const {
        ++count_;
        return source_->entry(row, col);
    }

    std::size_t count() const noexcept { return count_; }
    const S& inner() const noexcept { return *source_; }

private:
    const S* source_;
    mutable std::size_t count_ = 0;
};

inline constexpr std::size_t level_dim(unsigned n) { return std::size_t{1} << (2 * n); }

/// |Gamma_n| = 2^{2n} (n + 1).
inline constexpr std::size_t gamma_cardinality(unsigned n) {
    return level_dim(n) * (static_cast<std::size_t>(n) + 1);
}

/// Number of retained columns of `row` in Gamma_n.
inline constexpr std::size_t row_width(unsigned n, std::size_t row) {
    const std::size_t dim = level_dim(n);
    if (row == 1) return dim;
    if (row == 0 || row > dim) return 0;
    const auto band = static_cast<unsigned>(std::bit_width(row - 1));  // row in (2^{band-1}, 2^band]
    return std::size_t{1} << (2 * n - band);
}

/// Gamma_n generated strip by strip: {1} x [1, 4^n] first, then the bands
/// k = 1..2n. The strips are disjoint and the result is sorted by (row, col).
inline std::vector<IndexPair> gamma_set(unsigned n) {
    std::vector<IndexPair> out;
    out.reserve(gamma_cardinality(n));
    const std::size_t dim = level_dim(n);
    for (std::size_t c = 1; c <= dim; ++c) out.push_back({1, c});
    for (unsigned k = 1; k <= 2 * n; ++k) {
        const std::size_t lo = std::size_t{1} << (k - 1);
        const std::size_t hi = std::size_t{1} << k;
        const std::size_t width = std::size_t{1} << (2 * n - k);
        for (std::size_t r = lo + 1; r <= hi; ++r)
            for (std::size_t c = 1; c <= width; ++c) out.push_back({r, c});
    }
    return out;
}

/// Gamma_n \ Gamma_{n-1}, generated from the row widths of both levels.
inline std::vector<IndexPair> gamma_delta(unsigned n) {
    if (n == 0) throw std::invalid_argument("gamma_delta: level must be >= 1");
    std::vector<IndexPair> out;
    out.reserve(gamma_cardinality(n) - gamma_cardinality(n - 1));
    const std::size_t dim = level_dim(n);
    for (std::size_t r = 1; r <= dim; ++r) {
        const std::size_t from = row_width(n - 1, r);
        const std::size_t to = row_width(n, r);
        for (std::size_t c = from + 1; c <= to; ++c) out.push_back({r, c});
    }
    return out;
}

/// Writes Gamma_n as "j i" lines (second coordinate first), sorted by (j, i).
inline void write_gamma(std::ostream& os, unsigned n) {
    std::vector<IndexPair> pairs = gamma_set(n);
    std::sort(pairs.begin(), pairs.end(), [](const IndexPair& a, const IndexPair& b) {
        return a.col != b.col ? a.col < b.col : a.row < b.row;
    });
    for (const IndexPair& p : pairs) os << p.col << ' ' << p.row << '\n';
}

namespace detail {

// Row-compressed storage of the nonzero retained entries. Retained zeros are
// implied by the index set and not stored, which leaves apply() results
// unchanged.
class RowCompressed {
public:
    RowCompressed() : row_start_{0} {}

    void push(std::uint32_t col, double value) {
        cols_.push_back(col);
        vals_.push_back(value);
    }
    void close_row() { row_start_.push_back(cols_.size()); }
    std::size_t rows() const noexcept { return row_start_.size() - 1; }
    std::size_t nonzeros() const noexcept { return vals_.size(); }

    void reserve(std::size_t rows, std::size_t nnz) {
        row_start_.reserve(rows + 1);
        cols_.reserve(nnz);
        vals_.reserve(nnz);
    }

    template <class F>
    void for_each_in_row(std::size_t row0, F&& f) const {
        for (std::size_t e = row_start_[row0]; e < row_start_[row0 + 1]; ++e) f(cols_[e], vals_[e]);
    }

    double lookup(std::size_t row0, std::size_t col) const {
        const auto first = cols_.begin() + static_cast<std::ptrdiff_t>(row_start_[row0]);
        const auto last = cols_.begin() + static_cast<std::ptrdiff_t>(row_start_[row0 + 1]);
        const auto it = std::lower_bound(first, last, static_cast<std::uint32_t>(col));
        return (it != last && *it == col) ? vals_[static_cast<std::size_t>(it - cols_.begin())] : 0.0;
    }

    // y = M v, y of length out_dim, v zero-extended.
    CoeffVec apply(const CoeffVec& v, std::size_t out_dim) const {
        std::vector<double> y(out_dim, 0.0);
        const std::size_t nrows = std::min(rows(), out_dim);
        for (std::size_t r = 0; r < nrows; ++r) {
            double s = 0.0;
            for (std::size_t e = row_start_[r]; e < row_start_[r + 1]; ++e)
                s += vals_[e] * v.coeff(cols_[e]);
            y[r] = s;
        }
        return CoeffVec(std::move(y));
    }

    // z = M^T w, z of length out_dim.
    CoeffVec apply_transpose(const CoeffVec& w, std::size_t out_dim) const {
        std::vector<double> z(out_dim, 0.0);
        const std::size_t nrows = std::min(rows(), w.dim());
        for (std::size_t r = 0; r < nrows; ++r) {
            const double wr = w[r];
            if (wr == 0.0) continue;
            for (std::size_t e = row_start_[r]; e < row_start_[r + 1]; ++e)
                z[cols_[e] - 1] += vals_[e] * wr;
        }
        return CoeffVec(std::move(z));
    }

private:
    std::vector<std::size_t> row_start_;
    std::vector<std::uint32_t> cols_;
    std::vector<double> vals_;
};

}  // namespace detail

/// The hyperbolic-cross discretisation A_n acting on span{e_1..e_{4^n}}.
/// Immutable after construction.
class GalerkinOperator {
public:
    unsigned level() const noexcept { return level_; }
    std::size_t dim() const noexcept { return level_dim(level_); }
    std::size_t retained_count() const noexcept { return gamma_cardinality(level_); }
    std::size_t nonzero_count() const noexcept { return storage_.nonzeros(); }

    bool contains(std::size_t row, std::size_t col) const noexcept {
        return col >= 1 && col <= row_width(level_, row);
    }

    /// Retained Galerkin coefficient at (row, col) in Gamma_n.
    double entry(std::size_t row, std::size_t col) const {
        if (!contains(row, col))
            throw std::out_of_range("(" + std::to_string(row) + "," + std::to_string(col) +
                                    ") is not in Gamma_" + std::to_string(level_));
        return storage_.lookup(row - 1, col);
    }

    CoeffVec apply(const CoeffVec& v) const { return storage_.apply(v, dim()); }
    CoeffVec apply_adjoint(const CoeffVec& w) const { return storage_.apply_transpose(w, dim()); }

    template <GalerkinSource S>
    friend GalerkinOperator assemble(const S& src, unsigned n);
    template <GalerkinSource S>
    friend GalerkinOperator refine(const GalerkinOperator& op, const S& src);

private:
    unsigned level_ = 0;
    detail::RowCompressed storage_;
};

/// Queries src exactly once per element of Gamma_n.
template <GalerkinSource S>
GalerkinOperator assemble(const S& src, unsigned n) {
    if (n > 15) throw std::invalid_argument("assemble: level too large for 32-bit column indices");
    GalerkinOperator op;
    op.level_ = n;
    const std::size_t dim = level_dim(n);
    op.storage_.reserve(dim, 0);
    for (std::size_t r = 1; r <= dim; ++r) {
        const std::size_t width = row_width(n, r);
        for (std::size_t c = 1; c <= width; ++c) {
            const double v = src.entry(r, c);
            if (v != 0.0) op.storage_.push(static_cast<std::uint32_t>(c), v);
        }
        op.storage_.close_row();
    }
    return op;
}

/// Level n+1 operator; queries src only on Gamma_{n+1} \ Gamma_n.
template <GalerkinSource S>
GalerkinOperator refine(const GalerkinOperator& op, const S& src) {
    const unsigned n = op.level_ + 1;
    if (n > 15) throw std::invalid_argument("refine: level too large for 32-bit column indices");
    GalerkinOperator out;
    out.level_ = n;
    const std::size_t old_dim = op.dim();
    const std::size_t dim = level_dim(n);
    out.storage_.reserve(dim, op.storage_.nonzeros());
    for (std::size_t r = 1; r <= dim; ++r) {
        if (r <= old_dim)
            op.storage_.for_each_in_row(r - 1, [&](std::uint32_t c, double v) { out.storage_.push(c, v); });
        const std::size_t from = row_width(n - 1, r);
        const std::size_t to = row_width(n, r);
        for (std::size_t c = from + 1; c <= to; ++c) {
            const double v = src.entry(r, c);
            if (v != 0.0) out.storage_.push(static_cast<std::uint32_t>(c), v);
        }
        out.storage_.close_row();
    }
    return out;
}

/// P_M A P_N on the full rectangle [1..M] x [1..N]; reference for information
/// cost comparisons (M*N coefficients against |Gamma_n|).
class RectangularOperator {
public:
    template <GalerkinSource S>
    RectangularOperator(const S& src, std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols) {
        storage_.reserve(rows, 0);
        for (std::size_t r = 1; r <= rows; ++r) {
            for (std::size_t c = 1; c <= cols; ++c) {
                const double v = src.entry(r, c);
                if (v != 0.0) storage_.push(static_cast<std::uint32_t>(c), v);
            }
            storage_.close_row();
        }
    }

    std::size_t dim() const noexcept { return std::max(rows_, cols_); }
    std::size_t retained_count() const noexcept { return rows_ * cols_; }
    CoeffVec apply(const CoeffVec& v) const { return storage_.apply(v, dim()); }
    CoeffVec apply_adjoint(const CoeffVec& w) const { return storage_.apply_transpose(w, dim()); }

private:
    std::size_t rows_;
    std::size_t cols_;
    detail::RowCompressed storage_;
};

/// Right-hand sides of the H^r discretisation estimates at level n:
///   ||A^*A - A_n^*A_n|| <= (1 + 2^{r+3}) 2^{-2rn} n,
///   ||A_n^*(A - A_n)||  <= 3 * 2^{-2rn + r} n,
///   ||A - A P_{2^{2n}}|| <= 2^{-2rn}.
struct DiscretizationBounds {
    double normal_defect;
    double adjoint_defect;
    double tail;
};

inline DiscretizationBounds discretization_bounds(double r, unsigned n) {
    if (!(r > 0.0)) throw std::invalid_argument("discretization_bounds: r must be positive");
    if (n < 1) throw std::invalid_argument("discretization_bounds: level must be >= 1");
    const double nn = static_cast<double>(n);
    const double decay = std::exp2(-2.0 * r * nn);
    return {(1.0 + std::exp2(r + 3.0)) * decay * nn, 3.0 * std::exp2(-2.0 * r * nn + r) * nn, decay};
}

}  // namespace semireg

#endif  // SEMIREG_HYPERCROSS_HPP
