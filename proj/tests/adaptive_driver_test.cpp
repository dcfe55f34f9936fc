#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "semireg/adaptive_driver.hpp"
#include "semireg/stopping.hpp"

using semireg::RunParams;

namespace {

constexpr double kReferenceTau = 2.2847718;  // 1.01 + sqrt(13/8), rounded up

RunParams params(double delta) {
    RunParams p;
    p.delta = delta;
    p.tau = kReferenceTau;
    return p;
}

}  // namespace

TEST(Levels, InitialLevelRegression) {
    EXPECT_EQ(semireg::initial_level(params(0.0625)), 4u);
    EXPECT_EQ(semireg::initial_level(params(0x1p-13)), 6u);
}

TEST(Levels, InitialLevelIsSmallestAdmissible) {
    for (double delta = 0.5; delta > 1e-6; delta /= 3.0) {
        const auto p = params(delta);
        const unsigned n = semireg::initial_level(p);
        const double target = p.gamma * p.delta / (2.0 * p.rho);
        EXPECT_LT(semireg::discretization_defect(p.r, n), target);
        if (n > 1) {
            EXPECT_GE(semireg::discretization_defect(p.r, n - 1), target);
        }
    }
}

TEST(Levels, InitialLevelCap) {
    auto p = params(1e-30);
    p.n_max = 8;
    EXPECT_THROW(semireg::initial_level(p), semireg::CapExceeded);
}

TEST(Levels, IterationBudget) {
    const auto p = params(0.0625);
    EXPECT_EQ(semireg::max_iter_count(6, p), 1323u);
    EXPECT_EQ(semireg::max_iter_count(4, p), 7u);
    for (unsigned n = 1; n <= 10; ++n) {
        const std::size_t k = semireg::max_iter_count(n, p);
        const double lhs = semireg::discretization_defect(p.r, n);
        if (k > 0) {
            EXPECT_LT(lhs, p.gamma * p.delta / (2.0 * static_cast<double>(k) * p.rho));
        }
        EXPECT_GE(lhs, p.gamma * p.delta / (2.0 * static_cast<double>(k + 1) * p.rho));
    }
}

TEST(Tau, ThresholdAndDefault) {
    const auto spec = semireg::nu_method(1.5);
    EXPECT_NEAR(semireg::tau_threshold(spec, 0.5), 1.0 + 0.5 * std::sqrt(6.5), 1e-15);
    RunParams p;
    EXPECT_NEAR(semireg::effective_tau(spec, p), 1.01 + 0.5 * std::sqrt(6.5), 1e-15);
    EXPECT_GT(kReferenceTau, semireg::tau_threshold(spec, 0.5));
}

TEST(Tau, InadmissibleTauRejected) {
    const auto problem = semireg::make_problem(1, 1024);
    auto p = params(0.01);
    p.tau = 2.0;
    EXPECT_THROW(semireg::run_problem(problem, 1, semireg::nu_method(1.5), p), semireg::ConfigError);
}

TEST(Params, Validation) {
    auto p = params(-1.0);
    EXPECT_THROW(semireg::validate(p), semireg::ConfigError);
    p = params(0.1);
    p.k_sec = 0;
    EXPECT_THROW(semireg::validate(p), semireg::ConfigError);
}

TEST(Constants, ValuesForReferenceSetting) {
    const auto spec = semireg::nu_method(1.5);
    const auto c = semireg::theoretical_constants(spec, params(0.0625), 1.2, 4);
    const double tau = kReferenceTau;
    const double thr = semireg::tau_threshold(spec, 0.5);
    EXPECT_NEAR(c.c1, 1.0 + 2.0 + (std::sqrt(6.5) + 1.0 / 8.0) * 0.5, 1e-13);
    EXPECT_NEAR(c.c2, std::pow(6.0 / (tau - thr), 1.0 / 2.2), 1e-12);
    EXPECT_GT(c.C_alg1, 0.0);
    EXPECT_GT(c.C_alg2, 0.0);
    EXPECT_THROW(semireg::theoretical_constants(spec, params(0.0625), 3.5, 4), semireg::ConfigError);
    EXPECT_THROW(semireg::theoretical_constants(spec, params(0.0625), 0.0, 4), semireg::ConfigError);
}

class DriverRun : public ::testing::TestWithParam<int> {};

TEST_P(DriverRun, InformationEqualsFinalCrossCardinality) {
    const int algorithm = GetParam();
    const auto problem = semireg::make_problem(1, 1 << 16);
    const auto spec = semireg::nu_method(1.5);
    for (double delta : {0.0625, 0x1p-8, 0x1p-11}) {
        const auto rep = semireg::run_problem(problem, algorithm, spec, params(delta));
        EXPECT_EQ(rep.info_count, semireg::gamma_cardinality(rep.final_level));
        EXPECT_GE(rep.stop_index, 1u);
        EXPECT_LE(rep.stop_index, rep.final_k_n());
        EXPECT_EQ(rep.levels.back().n, rep.final_level);
        ASSERT_TRUE(rep.rel_error.has_value());
        EXPECT_GT(*rep.rel_error, 0.0);
        std::size_t iters = 0;
        for (const auto& l : rep.levels) iters += l.iterations;
        EXPECT_EQ(iters, rep.total_iterations);
    }
}

TEST_P(DriverRun, Deterministic) {
    const auto problem = semireg::make_problem(2, 1 << 14);
    const auto spec = semireg::nu_method(1.5);
    const auto a = semireg::run_problem(problem, GetParam(), spec, params(0x1p-9));
    const auto b = semireg::run_problem(problem, GetParam(), spec, params(0x1p-9));
    EXPECT_EQ(a.solution, b.solution);
    EXPECT_EQ(a.stop_index, b.stop_index);
    EXPECT_EQ(a.final_level, b.final_level);
}

TEST_P(DriverRun, IterationCapThrows) {
    const auto problem = semireg::make_problem(1, 1 << 14);
    auto p = params(0x1p-10);
    p.k_abs_max = 3;
    EXPECT_THROW(semireg::run_problem(problem, GetParam(), semireg::nu_method(1.5), p), semireg::CapExceeded);
}

TEST_P(DriverRun, LevelCapThrows) {
    const auto problem = semireg::make_problem(1, 1 << 14);
    auto p = params(0x1p-12);
    p.n_max = 6;
    EXPECT_THROW(semireg::run_problem(problem, GetParam(), semireg::nu_method(1.5), p), semireg::CapExceeded);
}

INSTANTIATE_TEST_SUITE_P(BothAlgorithms, DriverRun, ::testing::Values(1, 2));

TEST(Discrepancy, StopsAtFirstResidualBelowThreshold) {
    const auto problem = semireg::make_problem(1, 1 << 16);
    const auto p = params(0x1p-10);
    const auto rep = semireg::run_problem(problem, 1, semireg::nu_method(1.5), p);
    ASSERT_EQ(rep.residual_norms.size(), rep.stop_index);
    const double bound = *p.tau * p.delta;
    EXPECT_LE(rep.residual_norms.back(), bound);
    for (std::size_t k = 0; k + 1 < rep.residual_norms.size(); ++k) EXPECT_GT(rep.residual_norms[k], bound);
    // every coarser level exhausted its budget
    for (std::size_t l = 0; l + 1 < rep.levels.size(); ++l) EXPECT_EQ(rep.levels[l].iterations, rep.levels[l].k_n);
}

TEST(Discrepancy, RefinesWhenBudgetIsExhausted) {
    const auto problem = semireg::make_problem(2, 1 << 16);
    const auto rep = semireg::run_problem(problem, 1, semireg::nu_method(1.5), params(0x1p-11));
    EXPECT_GT(rep.levels.size(), 1u);
    EXPECT_GT(rep.final_level, semireg::initial_level(params(0x1p-11)));
}

// Re-run the final level by hand and check that the returned index is min D_n^+.
TEST(Balancing, ReturnedIndexIsMinimalAdmissible) {
    const auto problem = semireg::make_problem(1, 1 << 16);
    const auto spec = semireg::nu_method(1.5);
    const auto p = params(0x1p-12);
    const auto rep = semireg::run_problem(problem, 2, spec, p);

    const auto in = semireg::make_input(problem, p);
    const auto op = semireg::assemble(*problem.info, rep.final_level);
    const semireg::CoeffVec rhs = semireg::resized(in.data, op.dim());
    semireg::BalancingWindow w;
    w.k_n = rep.final_k_n();
    w.k_sec = p.k_sec;
    w.bound_factor = 8.0 * 1.5 * p.delta;
    auto state = semireg::init_state(op, rhs, spec);
    for (std::size_t k = 1; k <= w.k_n + w.k_sec; ++k) {
        state = semireg::step(state, op, rhs, spec);
        w.iterates.push_back(state.x_curr);
    }
    const auto set = semireg::balancing_admissible_set(w);
    ASSERT_FALSE(set.empty());
    EXPECT_EQ(set.front(), rep.stop_index);
    EXPECT_LE(semireg::distance(rep.solution, w.at(rep.stop_index)), 0.0);
}

TEST(Report, WarnsWhenNoiseExceedsData) {
    const auto problem = semireg::make_problem(1, 1024);
    const auto rep = semireg::run_problem(problem, 1, semireg::nu_method(1.5), params(0.0625));
    // ||f1|| ~ 0.09 > 0.0625: no warning; a huge delta triggers it
    EXPECT_TRUE(rep.warnings.empty());
    const auto big = semireg::run_problem(problem, 1, semireg::nu_method(1.5), params(0.5));
    EXPECT_FALSE(big.warnings.empty());
}

TEST(Report, ConstantsAttachedForDiagnosticMu) {
    const auto problem = semireg::make_problem(1, 1 << 14);
    const auto rep = semireg::run_problem(problem, 1, semireg::nu_method(1.5), params(0x1p-6), 1.2);
    ASSERT_TRUE(rep.constants.has_value());
    EXPECT_EQ(rep.constants->mu, 1.2);
}
