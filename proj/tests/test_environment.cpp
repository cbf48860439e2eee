#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "kpzlab/environment.hpp"
#include "kpzlab/numeric.hpp"
#include "kpzlab/rng.hpp"
#include "oracles.hpp"

using namespace kpzlab;

TEST_CASE("brownian sampler is deterministic per seed and stream") {
    const RngSpec spec{1234, 7};
    auto a = sample_brownian(3, -1.0, 0.01, 201, spec);
    auto b = sample_brownian(3, -1.0, 0.01, 201, spec);
    for (int k = 1; k <= 3; ++k)
        for (std::size_t i = 0; i < a.num_points(); ++i)
            REQUIRE(a.at(i, k) == b.at(i, k));

    auto c = sample_brownian(3, -1.0, 0.01, 201, RngSpec{1234, 8});
    auto d = sample_brownian(3, -1.0, 0.01, 201, RngSpec{1235, 7});
    bool differs_stream = false, differs_seed = false;
    for (std::size_t i = 0; i < a.num_points(); ++i) {
        differs_stream = differs_stream || a.at(i, 1) != c.at(i, 1);
        differs_seed = differs_seed || a.at(i, 1) != d.at(i, 1);
    }
    REQUIRE(differs_stream);
    REQUIRE(differs_seed);
}

TEST_CASE("brownian sampler anchors each level at the grid point nearest zero") {
    auto env = sample_brownian(4, -1.0, 0.01, 201, RngSpec{5, 0});
    const std::size_t i0 = env.index_of(0.0);
    REQUIRE(i0 == 100);
    for (int k = 1; k <= 4; ++k) REQUIRE(env.at(i0, k) == 0.0);

    // window not containing 0: nearest point is the left endpoint
    auto off = sample_brownian(2, 3.0, 0.1, 11, RngSpec{5, 1});
    for (int k = 1; k <= 2; ++k) REQUIRE(off.at(0, k) == 0.0);
}

TEST_CASE("brownian increments match N(0, dx) moments") {
    const double dx = 0.01;
    const std::size_t n = 100001;
    auto env = sample_brownian(1, 0.0, dx, n, RngSpec{99, 0});
    std::vector<double> inc(n - 1);
    for (std::size_t i = 1; i < n; ++i) inc[i - 1] = env.at(i, 1) - env.at(i - 1, 1);

    REQUIRE(std::abs(oracles::mean_of(inc)) < 1.5e-3);
    REQUIRE(std::abs(oracles::variance_of(inc) - dx) < 3e-4);

    // increments over disjoint intervals are uncorrelated
    std::vector<double> left, right;
    for (std::size_t i = 0; i + 5 < inc.size(); i += 6) {
        left.push_back(inc[i]);
        right.push_back(inc[i + 5]);
    }
    REQUIRE(std::abs(oracles::correlation_of(left, right)) < 0.02);

    // distribution check against the exact Gaussian CDF
    const double sd = std::sqrt(dx);
    const double ks = oracles::ks_against_cdf(
        inc, [&](double z) { return oracles::normal_cdf(z / sd); });
    REQUIRE(ks < 0.012);
}

TEST_CASE("levels of a brownian environment are independent walks") {
    auto env = sample_brownian(2, 0.0, 0.01, 50001, RngSpec{7, 3});
    std::vector<double> a, b;
    for (std::size_t i = 1; i < env.num_points(); ++i) {
        a.push_back(env.at(i, 1) - env.at(i - 1, 1));
        b.push_back(env.at(i, 2) - env.at(i - 1, 2));
    }
    REQUIRE(std::abs(oracles::correlation_of(a, b)) < 0.02);
}

TEST_CASE("raw generator streams match reference distributions") {
    CounterRng rng(RngSpec{2024, 11});
    const std::size_t n = 100000;

    SECTION("uniform") {
        std::vector<double> u(n);
        for (auto& x : u) {
            x = rng.uniform();
            REQUIRE(x > 0.0);
            REQUIRE(x < 1.0);
        }
        const double ks = oracles::ks_against_cdf(u, [](double x) { return x; });
        REQUIRE(ks < 0.012);
    }

    SECTION("normal") {
        std::vector<double> z(n);
        for (auto& x : z) x = rng.normal();
        auto st = compute_stats(z);
        REQUIRE(std::abs(st.mean) < 1.5e-2);
        REQUIRE(std::abs(st.variance - 1.0) < 3e-2);
        REQUIRE(std::abs(st.skewness) < 5e-2);
        const double ks = oracles::ks_against_cdf(z, oracles::normal_cdf);
        REQUIRE(ks < 0.012);
    }

    SECTION("inverse gamma across shape regimes") {
        for (double theta : {0.6, 1.5, 3.0, 8.0}) {
            std::vector<double> w(n);
            for (auto& x : w) x = rng.inverse_gamma(theta);
            const double ks = oracles::ks_against_cdf(
                w, [&](double x) { return oracles::inverse_gamma_cdf(theta, x); });
            INFO("theta = " << theta);
            REQUIRE(ks < 0.012);
        }
    }
}

TEST_CASE("inverse gamma lattice has unit spacing, zero left column, correct weights") {
    const double theta = 3.0;
    auto env = sample_inverse_gamma_lattice(theta, 6, 4, RngSpec{31, 0});
    REQUIRE(env.delta() == 1.0);
    REQUIRE(env.x0() == 0.0);
    REQUIRE(env.num_points() == 7);
    REQUIRE(env.num_levels() == 4);
    for (int k = 1; k <= 4; ++k) REQUIRE(env.at(0, k) == 0.0);

    // E[W] = 1/(theta-1) = 0.5 for the per-site weights W = exp(increment)
    auto big = sample_inverse_gamma_lattice(theta, 100000, 1, RngSpec{31, 1});
    std::vector<double> w(big.num_points() - 1);
    for (std::size_t i = 1; i < big.num_points(); ++i)
        w[i - 1] = std::exp(big.increment(i, 1));
    REQUIRE(std::abs(oracles::mean_of(w) - 0.5) < 0.01);
}

TEST_CASE("constant and linear fixtures evaluate exactly") {
    auto c = constant_environment(2.5, 3, -1.0, 0.25, 9);
    for (int k = 1; k <= 3; ++k)
        for (std::size_t i = 0; i < 9; ++i) REQUIRE(c.at(i, k) == 2.5);

    auto lin = linear_environment({1.0, -2.0}, 0.0, 0.5, 5);
    REQUIRE(lin.num_levels() == 2);
    REQUIRE(lin.at(4, 1) == 2.0);
    REQUIRE(lin.at(4, 2) == -4.0);
    REQUIRE(lin.at(0, 1) == 0.0);
}

TEST_CASE("grid index lookup is exact with a small snap tolerance") {
    GridEnvironment env(-1.0, 0.01, 201, 1);
    REQUIRE(env.index_of(-1.0) == 0);
    REQUIRE(env.index_of(0.0) == 100);
    REQUIRE(env.index_of(1.0) == 200);
    REQUIRE(env.index_of(0.37) == 137);
    REQUIRE(env.index_of(0.37 + 1e-9) == 137);
    REQUIRE_THROWS_AS(env.index_of(0.375), std::domain_error);
    REQUIRE_THROWS_AS(env.index_of(1.01), std::domain_error);
    REQUIRE_THROWS_AS(env.index_of(-1.01), std::domain_error);
}

TEST_CASE("environment constructors and setters reject bad input") {
    REQUIRE_THROWS_AS(GridEnvironment(0.0, -0.1, 10, 1), std::invalid_argument);
    REQUIRE_THROWS_AS(GridEnvironment(0.0, 0.1, 1, 1), std::invalid_argument);
    REQUIRE_THROWS_AS(GridEnvironment(0.0, 0.1, 10, 0), std::invalid_argument);
    REQUIRE_THROWS_AS(LatticeEnvironment(0.0, 0.0, 10, 1), std::invalid_argument);

    GridEnvironment env(0.0, 0.1, 10, 2);
    REQUIRE_THROWS_AS(env.set(0, 1, std::numeric_limits<double>::infinity()),
                      std::invalid_argument);
    REQUIRE_THROWS_AS(env.set(0, 1, std::nan("")), std::invalid_argument);
    REQUIRE_THROWS_AS(env.at(10, 1), std::domain_error);
    REQUIRE_THROWS_AS(env.at(0, 3), std::domain_error);
    REQUIRE_THROWS_AS(env.at(0, 0), std::domain_error);
}

TEST_CASE("lattice view of a grid preserves values and spacing") {
    auto g = sample_brownian(2, 0.0, 0.05, 21, RngSpec{8, 8});
    auto l = lattice_from_grid(g);
    REQUIRE(l.delta() == g.dx());
    REQUIRE(l.num_points() == g.num_points());
    for (int k = 1; k <= 2; ++k)
        for (std::size_t i = 0; i < g.num_points(); ++i) REQUIRE(l.at(i, k) == g.at(i, k));
    REQUIRE(l.increment(3, 1) == g.at(3, 1) - g.at(2, 1));
    REQUIRE_THROWS_AS(l.increment(0, 1), std::domain_error);
}

TEST_CASE("pairwise summation and stats helpers agree with direct references") {
    std::vector<double> v;
    CounterRng rng(RngSpec{55, 55});
    for (int i = 0; i < 10001; ++i) v.push_back(rng.normal() * 3.0 + 1.0);
    const double direct = [&] {
        long double s = 0.0L;
        for (double x : v) s += x;
        return static_cast<double>(s);
    }();
    REQUIRE(pairwise_sum(v) == Catch::Approx(direct).epsilon(1e-14));

    auto st = compute_stats(v);
    REQUIRE(st.count == v.size());
    REQUIRE(st.mean == Catch::Approx(oracles::mean_of(v)).margin(1e-12));
    REQUIRE(st.variance == Catch::Approx(oracles::variance_of(v)).margin(1e-9));
}

TEST_CASE("log-space helpers honour minus infinity") {
    REQUIRE(log_add_exp(neg_inf, neg_inf) == neg_inf);
    REQUIRE(log_add_exp(neg_inf, 2.0) == 2.0);
    REQUIRE(log_add_exp(2.0, neg_inf) == 2.0);
    REQUIRE(log_add_exp(0.0, 0.0) == Catch::Approx(std::log(2.0)).margin(1e-15));
    REQUIRE(log_add_exp(1000.0, 1000.0) == Catch::Approx(1000.0 + std::log(2.0)).margin(1e-12));
    REQUIRE(log_sum_exp({neg_inf, 0.0, 1.0}) ==
            Catch::Approx(std::log(std::exp(0.0) + std::exp(1.0))).margin(1e-14));
    REQUIRE(log_sum_exp({neg_inf, neg_inf}) == neg_inf);
}
