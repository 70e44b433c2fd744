#include <cmath>

#include <gtest/gtest.h>

#include "hotelling/monte_carlo.hpp"
#include "fixtures.hpp"

using namespace hotelling;

namespace {

EnsembleConfig config_b(std::size_t n, unsigned threads) {
    const auto& s = fixtures::surface_b();
    EnsembleConfig c;
    c.x0 = 1.0;
    c.r0 = 0.5 * (s.frontier_at(1.0) + s.frontier().r0);
    c.n_paths = n;
    c.horizon = 100.0;
    c.base_seed = 11;
    c.time_intervals = 50;
    c.threads = threads;
    return c;
}

}  // namespace

TEST(MonteCarlo, ThreadCountDoesNotChangeResults) {
    const auto& s = fixtures::surface_b();
    const auto one = run_ensemble(s, config_b(400, 1));
    const auto four = run_ensemble(s, config_b(400, 4));
    EXPECT_EQ(one.price, four.price);
    EXPECT_EQ(one.reserves, four.reserves);
    EXPECT_EQ(one.stats.mean_price, four.stats.mean_price);
}

TEST(MonteCarlo, QuantilesOrderedAndSurvivalDecreasing) {
    const auto& s = fixtures::surface_b();
    const auto e = run_ensemble(s, config_b(1000, 0));
    const auto& st = e.stats;
    for (std::size_t m = 0; m < st.times.size(); ++m) {
        EXPECT_LE(st.q05[m], st.q25[m]);
        EXPECT_LE(st.q25[m], st.q50[m]);
        EXPECT_LE(st.q50[m], st.q75[m]);
        EXPECT_LE(st.q75[m], st.q95[m]);
        if (m > 0) {
            EXPECT_LE(st.survival[m], st.survival[m - 1]);
        }
    }
    EXPECT_DOUBLE_EQ(st.survival.front(), 1.0);
}

TEST(MonteCarlo, MeanMixesSurvivorsAndExhausted) {
    const auto& s = fixtures::surface_b();
    const auto e = run_ensemble(s, config_b(1000, 0));
    const auto& st = e.stats;
    for (std::size_t m = 0; m < st.times.size(); ++m) {
        const double surv = st.survival[m];
        if (!std::isfinite(st.mean_price_conditional[m]) || !std::isfinite(st.mean_price_exhausted[m])) continue;
        const double mixed = surv * st.mean_price_conditional[m] + (1.0 - surv) * st.mean_price_exhausted[m];
        EXPECT_NEAR(mixed / st.mean_price[m], 1.0, 1e-10) << m;
    }
}

TEST(MonteCarlo, ReservesDrainAtHotellingRate) {
    // Expected reserves + cumulative expected consumption = R0 + a * expected finds, checked at the horizon.
    const auto& s = fixtures::surface_b();
    const auto e = run_ensemble(s, config_b(500, 0));
    for (std::size_t i = 0; i < e.paths.size(); ++i) {
        const auto& path = e.paths[i];
        const auto& p = path.params;
        double consumed = 0.0;
        for (const auto& seg : path.segments) {
            const double tau = std::min(seg.duration, path.horizon - seg.start_time);
            if (tau <= 0.0) continue;
            consumed += seg.r_start - seg.reserves_after(p, tau);
        }
        const double final_r = e.reserves[e.index(i, e.n_times() - 1)];
        EXPECT_NEAR(path.r0 + p.a * path.total_finds() - consumed, final_r, 1e-9);
    }
}

TEST(MonteCarlo, MartingaleHoldsOnOptimalStrategy) {
    const auto& s = fixtures::surface_b();
    auto c = config_b(5000, 0);
    c.time_intervals = 100;
    const auto e = run_ensemble(s, c);
    const std::vector<double> at{25.0, 50.0, 100.0};
    const auto rep = martingale_test(e, 3.0, at);
    EXPECT_TRUE(rep.all_pass);
    const std::vector<double> off{33.3};
    EXPECT_THROW(martingale_test(e, 3.0, off), TimeOutOfRange);
}

TEST(MonteCarlo, MisplacedFrontierFailsMartingale) {
    // Negative control: stopping 10% above the optimal frontier breaks the martingale property.
    // The bias is small, so a large ensemble on a coarse time grid is needed for power.
    const auto& s = fixtures::surface_b();
    auto c = config_b(200000, 0);
    c.time_intervals = 4;
    c.frontier_scale = 1.1;
    const auto e = run_ensemble(s, c);
    const std::vector<double> at{25.0, 50.0, 100.0};
    const auto rep = martingale_test(e, 3.0, at);
    EXPECT_FALSE(rep.all_pass);
}

TEST(MonteCarlo, ExhaustionAlwaysRaisesPrice) {
    const auto& s = fixtures::surface_b();
    const auto e = run_ensemble(s, config_b(1000, 0));
    const auto rep = exhaustion_jump_check(e);
    EXPECT_GT(rep.exhaustion_events, 0u);
    EXPECT_TRUE(rep.all_exhaustion_up());
}

TEST(MonteCarlo, RejectsEmptyEnsemble) {
    const auto& s = fixtures::surface_b();
    auto c = config_b(0, 1);
    EXPECT_THROW(run_ensemble(s, c), DomainError);
}

TEST(MonteCarlo, DisjointStreamsAgreeWithinError) {
    const auto& s = fixtures::surface_b();
    auto c1 = config_b(3000, 0);
    auto c2 = c1;
    c2.base_seed = c1.base_seed + 1'000'000;
    const auto e1 = run_ensemble(s, c1);
    const auto e2 = run_ensemble(s, c2);
    for (std::size_t m = 0; m < e1.n_times(); m += 10) {
        const auto& a = e1.stats;
        const auto& b = e2.stats;
        const double se_p = std::hypot(a.se_price[m], b.se_price[m]);
        const double se_r = std::hypot(a.se_reserves[m], b.se_reserves[m]);
        if (se_p > 0.0) {
            EXPECT_LE(std::abs(a.mean_price[m] - b.mean_price[m]), 4.0 * se_p) << m;
        }
        if (se_r > 0.0) {
            EXPECT_LE(std::abs(a.mean_reserves[m] - b.mean_reserves[m]), 4.0 * se_r) << m;
        }
    }
}

TEST(MonteCarlo, NoAreaMeansPureHotellingGrowth) {
    const auto& s = fixtures::surface_b();
    auto c = config_b(50, 1);
    c.x0 = 0.0;
    const auto e = run_ensemble(s, c);
    const auto g = conditional_growth_check(e);
    EXPECT_NEAR(g.slope, s.params().r, 1e-9);
    EXPECT_TRUE(martingale_test(e).all_pass);
}
