#ifndef SEMIREG_STOPPING_HPP
#define SEMIREG_STOPPING_HPP

// Stopping rules: the discrepancy principle and the balancing principle.
// Both comparisons are inclusive, so ties stop.

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <vector>

#include "semireg/coeff_space.hpp"

namespace semireg {

/// ||A_n x - P f_delta|| <= tau * delta.
inline bool discrepancy_met(double residual_norm, double tau, double delta) noexcept {
    return residual_norm <= tau * delta;
}

/// Iterates x_{n,1} .. x_{n,K_n+K_sec} of one level; iterates[i] is x_{n,i+1}.
struct BalancingWindow {
    std::vector<CoeffVec> iterates;
    std::size_t k_n = 0;
    std::size_t k_sec = 0;
    double bound_factor = 0.0;  ///< 8 (1 + gamma) kappa0 delta

    void validate() const {
        if (k_n < 1) throw std::invalid_argument("BalancingWindow: K_n must be >= 1");
        if (iterates.size() != k_n + k_sec)
            throw std::invalid_argument("BalancingWindow: expected K_n + K_sec iterates");
        if (bound_factor < 0.0) throw std::invalid_argument("BalancingWindow: negative bound factor");
    }

    const CoeffVec& at(std::size_t k) const { return iterates[k - 1]; }
    std::size_t length() const noexcept { return iterates.size(); }
};

namespace detail {

// k is admissible iff ||x_k - x_j|| <= bound_factor * j for all k < j <= K_n + K_sec.
inline bool balancing_admissible(const BalancingWindow& w, std::size_t k) {
    for (std::size_t j = k + 1; j <= w.length(); ++j)
        if (!(distance(w.at(k), w.at(j)) <= w.bound_factor * static_cast<double>(j))) return false;
    return true;
}

}  // namespace detail

/// D_n^+ as a sorted list of 1-based indices. Each candidate k is checked
/// against the later iterates, stopping at its first violation.
inline std::vector<std::size_t> balancing_admissible_set(const BalancingWindow& w) {
    w.validate();
    std::vector<std::size_t> out;
    for (std::size_t k = 1; k <= w.k_n; ++k)
        if (detail::balancing_admissible(w, k)) out.push_back(k);
    return out;
}

/// min D_n^+ without building the whole set; equals
/// balancing_stop_index(balancing_admissible_set(w)).
inline std::optional<std::size_t> first_admissible(const BalancingWindow& w) {
    w.validate();
    for (std::size_t k = 1; k <= w.k_n; ++k)
        if (detail::balancing_admissible(w, k)) return k;
    return std::nullopt;
}

/// min D, or nullopt when D is empty (the level must be refined).
inline std::optional<std::size_t> balancing_stop_index(const std::vector<std::size_t>& admissible) {
    if (admissible.empty()) return std::nullopt;
    std::size_t m = admissible.front();
    for (std::size_t k : admissible) m = k < m ? k : m;
    return m;
}

}  // namespace semireg

#endif  // SEMIREG_STOPPING_HPP
