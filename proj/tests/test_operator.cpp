#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "hotelling/exploration_operator.hpp"
#include "fixtures.hpp"

using namespace hotelling;

namespace {

// Composite trapezoid of int_0^x f(x-s) lambda e^{-lambda s} ds on n panels.
template <class F>
double trapezoid(F&& f, double lambda, double x, int n) {
    const double h = x / n;
    double sum = 0.0;
    for (int m = 0; m <= n; ++m) {
        const double s = h * m;
        const double w = (m == 0 || m == n) ? 0.5 : 1.0;
        sum += w * f(x - s) * lambda * std::exp(-lambda * s);
    }
    return sum * h;
}

}  // namespace

TEST(ExplorationOperator, ExactForLinearIntegrand) {
    const auto p = fixtures::set_a();
    std::vector<double> nodes;
    for (int i = 0; i <= 20; ++i) nodes.push_back(0.05 * i);
    auto value = [](double y, double R) { return 3.0 + 2.0 * y + R; };
    const double x = 0.83;
    const double R = 1.1;
    const double L = p.lambda;
    // int_0^x (3 + 2(x-s) + R + a) L e^{-Ls} ds in closed form
    const double c0 = 3.0 + 2.0 * x + R + p.a;
    const double e = std::exp(-L * x);
    const double exact = c0 * (1.0 - e) - 2.0 * ((1.0 - e) / L - x * e);
    const double expected = exact + hotelling_value(p, R) * e - exploration_cost_term(p, x);
    EXPECT_NEAR(apply_exploration_operator(p, nodes, value, x, R), expected, 1e-12);
}

TEST(ExplorationOperator, MatchesDenseTrapezoid) {
    const auto p = fixtures::set_b();
    auto value = [&](double y, double R) { return hotelling_value(p, R) * (1.0 + std::sin(3.0 * y)); };
    auto nodes_with = [](double h) {
        std::vector<double> nodes;
        for (int i = 0; i * h <= 1.0 + 1e-12; ++i) nodes.push_back(h * i);
        return nodes;
    };
    const auto coarse = nodes_with(0.01);
    const auto fine = nodes_with(0.005);
    // linear interpolation error h^2/8 max|f''| over min f on [0, 1]: 9 / (8 (1 + sin 3)) h^2
    const double bound = 9.0 / (8.0 * (1.0 + std::sin(3.0))) * 1e-4;
    for (double x : {0.05, 0.4, 1.0}) {
        const double R = 0.7;
        const double dense = trapezoid([&](double y) { return value(y, R + p.a); }, p.lambda, x, 100 * 100);
        const double expected = dense + hotelling_value(p, R) * std::exp(-p.lambda * x) - exploration_cost_term(p, x);
        const double err_coarse = std::abs(apply_exploration_operator(p, coarse, value, x, R) / expected - 1.0);
        const double err_fine = std::abs(apply_exploration_operator(p, fine, value, x, R) / expected - 1.0);
        EXPECT_LE(err_coarse, bound) << "x = " << x;
        EXPECT_GT(err_coarse / err_fine, 3.5) << "x = " << x;
    }
}

TEST(ExplorationOperator, ZeroAreaIsHotelling) {
    const auto p = fixtures::set_a();
    std::vector<double> nodes{0.0, 0.5};
    auto value = [](double, double) { return 1e9; };
    EXPECT_DOUBLE_EQ(apply_exploration_operator(p, nodes, value, 0.0, 2.0), hotelling_value(p, 2.0));
}

TEST(ExplorationOperator, RejectsOutOfRange) {
    const auto p = fixtures::set_a();
    std::vector<double> nodes{0.0, 0.5};
    auto value = [](double, double) { return 1.0; };
    EXPECT_THROW(apply_exploration_operator(p, nodes, value, 0.6, 1.0), GridError);
    EXPECT_THROW(apply_exploration_operator(p, nodes, value, -0.1, 1.0), DomainError);
    EXPECT_THROW(apply_exploration_operator(p, nodes, value, 0.2, -1.0), DomainError);
}

TEST(ExplorationOperator, AgreesWithSolverOnNodes) {
    const auto& s = fixtures::surface_a();
    const auto& g = s.grid();
    auto value = [&](double y, double R) { return s.value_at(y, R); };
    for (std::size_t i : {std::size_t{5}, g.n_x() / 2, g.n_x() - 1}) {
        for (std::size_t j : {std::size_t{3}, g.n_r / 2}) {
            const double R = g.r_node(j);
            const double mv = apply_exploration_operator(s.params(), g.x_nodes, value, g.x_nodes[i], R);
            EXPECT_NEAR(mv / s.mv_row(i)[j], 1.0, 1e-9) << i << "," << j;
        }
    }
}
