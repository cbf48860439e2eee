#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "kpzlab/environment.hpp"
#include "kpzlab/lastpassage.hpp"
#include "oracles.hpp"

using namespace kpzlab;

namespace {

GridEnvironment small_brownian(int levels, std::size_t points, std::uint64_t stream) {
    return sample_brownian(levels, 0.0, 0.1, points, RngSpec{424242, stream});
}

}  // namespace

TEST_CASE("path length sums level increments") {
    auto zero = constant_environment(0.0, 3, 0.0, 0.1, 11);
    GeodesicPath p{3, 1, {0.0, 0.2, 0.5, 1.0}};
    REQUIRE(path_length(zero, p) == 0.0);

    auto env = small_brownian(3, 11, 1);
    GeodesicPath single{2, 2, {0.1, 0.8}};
    REQUIRE(path_length(env, single) ==
            Catch::Approx(env.at(8, 2) - env.at(1, 2)).margin(1e-15));

    // driver on the shallow line only: the jump position is irrelevant
    auto driver = linear_environment({1.0, 0.0}, 0.0, 0.1, 11);
    GeodesicPath jump_at_zero{2, 1, {0.0, 0.0, 1.0}};
    REQUIRE(path_length(driver, jump_at_zero) == Catch::Approx(1.0).margin(1e-15));

    GeodesicPath outside{2, 1, {0.0, 0.35, 1.0}};
    REQUIRE_THROWS_AS(path_length(env, outside), std::domain_error);

    GeodesicPath decreasing{2, 1, {0.5, 0.2, 1.0}};
    REQUIRE_THROWS_AS(path_length(env, decreasing), std::runtime_error);
    GeodesicPath wrong_size{2, 1, {0.0, 1.0}};
    REQUIRE_THROWS_AS(path_length(env, wrong_size), std::runtime_error);
}

TEST_CASE("lpp value handles the forced cases") {
    auto zero = constant_environment(0.0, 4, 0.0, 0.1, 11);
    REQUIRE(lpp_value(zero, {0.0, 4}, {1.0, 1}) == 0.0);
    REQUIRE(lpp_value(zero, {0.3, 3}, {0.3, 2}) == 0.0);

    auto env = small_brownian(3, 11, 2);
    REQUIRE(lpp_value(env, {0.2, 2}, {0.9, 2}) ==
            Catch::Approx(env.at(9, 2) - env.at(2, 2)).margin(1e-15));

    auto driver = linear_environment({1.0, 0.0}, 0.0, 0.1, 11);
    REQUIRE(lpp_value(driver, {0.0, 2}, {1.0, 1}) == Catch::Approx(1.0).margin(1e-15));

    REQUIRE_THROWS_AS(lpp_value(env, {0.5, 1}, {0.2, 1}), std::domain_error);
    REQUIRE_THROWS_AS(lpp_value(env, {0.0, 1}, {1.0, 2}), std::domain_error);
}

TEST_CASE("lpp dynamic program matches full enumeration") {
    for (std::uint64_t inst = 0; inst < 50; ++inst) {
        auto env = small_brownian(4, 6, 100 + inst);
        const double dp = lpp_value(env, {0.0, 4}, {0.5, 1});
        const double brute = oracles::lpp_enumerate(env, 0, 4, 5, 1);
        REQUIRE(dp == Catch::Approx(brute).margin(1e-10));

        const double dp2 = lpp_value(env, {0.1, 3}, {0.4, 2});
        const double brute2 = oracles::lpp_enumerate(env, 1, 3, 4, 2);
        REQUIRE(dp2 == Catch::Approx(brute2).margin(1e-10));
    }
    // a longer strip as well
    auto env = small_brownian(3, 13, 777);
    REQUIRE(lpp_value(env, {0.0, 3}, {1.2, 1}) ==
            Catch::Approx(oracles::lpp_enumerate(env, 0, 3, 12, 1)).margin(1e-10));
}

TEST_CASE("raising the environment on an optimal path cannot lower the lpp value") {
    for (std::uint64_t inst = 0; inst < 20; ++inst) {
        auto env = small_brownian(3, 6, 300 + inst);
        const double base = lpp_value(env, {0.0, 3}, {0.5, 1});
        const auto v = oracles::lpp_enumerate_argmax(env, 0, 3, 5, 1);
        // bump at sites whose increment the path collects: interior points and
        // right endpoints of each occupied interval
        for (std::size_t t = 0; t <= v.size(); ++t) {
            const std::size_t lo = (t == 0) ? 0 : v[t - 1];
            const std::size_t hi = (t == v.size()) ? 5 : v[t];
            const int k = 3 - static_cast<int>(t);
            for (std::size_t i = lo + 1; i <= hi; ++i) {
                auto bumped = env;
                bumped.set(i, k, env.at(i, k) + 0.25);
                REQUIRE(lpp_value(bumped, {0.0, 3}, {0.5, 1}) >= base - 1e-12);
            }
        }
    }
}

TEST_CASE("polymer free energy reproduces the forced integral") {
    // flat environment, single intermediate integral: log_w of the interval length
    auto zero = constant_environment(0.0, 2, 0.0, 0.01, 301);
    REQUIRE(polymer_free_energy(zero, {0.0, 2}, {3.0, 1}, std::exp(1.0)) ==
            Catch::Approx(std::log(3.0)).margin(1e-12));
    REQUIRE(polymer_free_energy(zero, {0.0, 2}, {0.5, 1}, std::exp(1.0)) ==
            Catch::Approx(std::log(0.5)).margin(1e-12));

    // same level: no integration, just the increment
    auto env = small_brownian(2, 11, 5);
    REQUIRE(polymer_free_energy(env, {0.1, 2}, {0.7, 2}, 2.0) ==
            Catch::Approx(env.at(7, 2) - env.at(1, 2)).margin(1e-12));

    REQUIRE_THROWS_AS(polymer_free_energy(env, {0.0, 2}, {1.0, 1}, 1.0),
                      std::invalid_argument);
    REQUIRE_THROWS_AS(polymer_free_energy(env, {0.0, 2}, {1.0, 1}, 0.5),
                      std::invalid_argument);
}

TEST_CASE("log-space polymer recursion matches a naive linear-space evaluation") {
    for (std::uint64_t inst = 0; inst < 25; ++inst) {
        auto env = small_brownian(3, 8, 500 + inst);
        for (double w : {std::exp(1.0), std::exp(2.0), 4.0}) {
            const double fast = polymer_free_energy(env, {0.0, 3}, {0.7, 1}, w);
            const double naive = oracles::polymer_naive(env, 0, 3, 7, 1, w);
            REQUIRE(fast == Catch::Approx(naive).epsilon(1e-12).margin(1e-12));
        }
    }
}

TEST_CASE("polymer free energy approaches the lpp value as w grows") {
    auto env = small_brownian(3, 11, 9001);
    const Point q1{0.0, 3}, q2{1.0, 1};
    const double top = lpp_value(env, q1, q2);
    double prev_gap = std::numeric_limits<double>::infinity();
    for (double lw : {4.0, 8.0, 16.0}) {
        const double f = polymer_free_energy(env, q1, q2, std::exp(lw));
        // the jump measure has total mass below 1 here, so the free energy
        // sits below the max; the deficit is at most the per-level cost of
        // concentrating the integral on one trapezoid cell
        REQUIRE(f <= top + 1e-9);
        const double gap = top - f;
        REQUIRE(gap <= 2.0 * std::log(2.0 / env.dx()) / lw + 1e-9);
        REQUIRE(gap <= prev_gap + 1e-12);
        prev_gap = gap;
    }
}

TEST_CASE("lattice partition function counts paths and matches enumeration") {
    // zero increments: the value is the log of the number of lattice paths
    LatticeEnvironment flat(0.0, 1.0, 7, 4);
    const double paths32 = lattice_partition_dp(flat, {1.0, 4}, {4.0, 1});
    // 3 rightward steps interleaved with 3 upward jumps: C(6,3) = 20
    REQUIRE(paths32 == Catch::Approx(std::log(20.0)).margin(1e-12));
    REQUIRE(lattice_partition_dp(flat, {2.0, 3}, {2.0, 1}) ==
            Catch::Approx(0.0).margin(1e-12));

    // single forced path on one level collects every increment, both ends in
    auto lg = sample_inverse_gamma_lattice(3.0, 6, 5, RngSpec{77, 0});
    REQUIRE(lattice_partition_dp(lg, {2.0, 2}, {5.0, 2}) ==
            Catch::Approx(lg.at(5, 2) - lg.at(1, 2)).margin(1e-12));

    for (std::uint64_t inst = 0; inst < 30; ++inst) {
        auto env = sample_inverse_gamma_lattice(3.0, 5, 5, RngSpec{1000, inst});
        const double dp = lattice_partition_dp(env, {1.0, 5}, {5.0, 1});
        const double brute = oracles::lattice_partition_enumerate(env, 1, 5, 5, 1);
        REQUIRE(dp == Catch::Approx(brute).margin(1e-10));
        // the log-sum dominates the best single path
        REQUIRE(lattice_partition_dp(env, {1.0, 5}, {5.0, 1}) >=
                lattice_lpp_dp(env, {1.0, 5}, {5.0, 1}) - 1e-12);
    }

    REQUIRE_THROWS_AS(lattice_partition_dp(flat, {0.0, 4}, {4.0, 1}), std::domain_error);
    REQUIRE_THROWS_AS(lattice_partition_dp(flat, {4.0, 1}, {1.0, 4}), std::domain_error);
}

TEST_CASE("lattice max-path dynamic program matches enumeration over paths") {
    for (std::uint64_t inst = 0; inst < 20; ++inst) {
        auto env = sample_inverse_gamma_lattice(2.0, 5, 4, RngSpec{2000, inst});
        const double dp = lattice_lpp_dp(env, {1.0, 4}, {5.0, 1});
        double brute = -1e300;
        for (const auto& v : oracles::nondecreasing_tuples(1, 5, 3)) {
            double weight = 0.0;
            for (std::size_t t = 0; t <= v.size(); ++t) {
                const std::size_t lo = (t == 0) ? 1 : v[t - 1];
                const std::size_t hi = (t == v.size()) ? 5 : v[t];
                const int k = 4 - static_cast<int>(t);
                weight += env.at(hi, k) - env.at(lo - 1, k);
            }
            brute = std::max(brute, weight);
        }
        REQUIRE(dp == Catch::Approx(brute).margin(1e-11));
    }
}

TEST_CASE("multi path optimum degenerates correctly at the extremes") {
    SECTION("one path is plain lpp") {
        for (std::uint64_t inst = 0; inst < 10; ++inst) {
            auto env = small_brownian(3, 6, 600 + inst);
            REQUIRE(multi_path_lpp(env, 1, {0.0, 3}, {0.5, 1}) ==
                    Catch::Approx(lpp_value(env, {0.0, 3}, {0.5, 1})).margin(1e-12));
        }
    }

    SECTION("as many paths as levels forces the full strip") {
        auto env = small_brownian(3, 6, 20);
        double strip = 0.0;
        for (int k = 1; k <= 3; ++k) strip += env.at(5, k) - env.at(0, k);
        REQUIRE(multi_path_lpp(env, 3, {0.0, 3}, {0.5, 1}) ==
                Catch::Approx(strip).margin(1e-12));

        auto lat = sample_inverse_gamma_lattice(3.0, 5, 3, RngSpec{21, 0});
        double lat_strip = 0.0;
        for (int k = 1; k <= 3; ++k) lat_strip += lat.at(5, k) - lat.at(0, k);
        REQUIRE(multi_path_lpp(lat, 3, {1.0, 3}, {5.0, 1}) ==
                Catch::Approx(lat_strip).margin(1e-12));
    }

    SECTION("two disjoint paths over a two level driver") {
        auto env = linear_environment({0.0, 1.0}, 0.0, 0.25, 5);
        REQUIRE(multi_path_lpp(env, 2, {0.0, 2}, {1.0, 1}) ==
                Catch::Approx(1.0).margin(1e-12));
    }

    SECTION("infeasible configurations are rejected") {
        auto env = small_brownian(2, 5, 30);
        REQUIRE_THROWS_AS(multi_path_lpp(env, 3, {0.0, 2}, {0.4, 1}),
                          std::invalid_argument);
        REQUIRE_THROWS_AS(multi_path_lpp(env, 0, {0.0, 2}, {0.4, 1}),
                          std::invalid_argument);
    }

    SECTION("lattice single path matches the max-path dynamic program") {
        auto lat = sample_inverse_gamma_lattice(3.0, 5, 3, RngSpec{22, 0});
        REQUIRE(multi_path_lpp(lat, 1, {1.0, 3}, {4.0, 1}) ==
                Catch::Approx(lattice_lpp_dp(lat, {1.0, 3}, {4.0, 1})).margin(1e-12));
    }
}

TEST_CASE("triangle inequality slack is nonnegative") {
    auto zero = constant_environment(0.0, 3, 0.0, 0.1, 11);
    REQUIRE(check_triangle(zero, {0.0, 3}, {0.5, 2}, {1.0, 1}) == 0.0);

    for (std::uint64_t inst = 0; inst < 200; ++inst) {
        auto env = small_brownian(5, 9, 3000 + inst);
        CounterRng rng(RngSpec{3000, 90000 + inst});
        for (int rep = 0; rep < 10; ++rep) {
            const auto pick = [&](std::size_t lo, std::size_t hi, int kl, int kh) {
                const auto span = static_cast<double>(hi - lo + 1);
                const std::size_t i =
                    lo + static_cast<std::size_t>(rng.uniform() * span) % (hi - lo + 1);
                const int k = kl + static_cast<int>(rng.uniform() * (kh - kl + 1)) % (kh - kl + 1);
                return Point{env.x(i), k};
            };
            const Point q1 = pick(0, 2, 4, 5);
            const Point q2 = pick(3, 5, 3, 4);
            const Point q3 = pick(6, 8, 1, 2);
            REQUIRE(check_triangle(env, q1, q2, q3) >= -1e-9);
        }
    }

    auto env = small_brownian(3, 9, 1);
    REQUIRE_THROWS_AS(check_triangle(env, {0.5, 3}, {0.2, 2}, {0.8, 1}),
                      std::domain_error);
}

TEST_CASE("quadrangle inequality slack is nonnegative") {
    auto zero = constant_environment(0.0, 3, 0.0, 0.1, 11);
    REQUIRE(check_quadrangle(zero, 0.0, 0.2, 0.5, 0.9, 1, 3) == 0.0);

    auto env0 = small_brownian(4, 11, 40);
    REQUIRE(check_quadrangle(env0, 0.1, 0.1, 0.5, 0.8, 2, 4) == 0.0);

    for (std::uint64_t inst = 0; inst < 200; ++inst) {
        auto env = small_brownian(5, 9, 4000 + inst);
        REQUIRE(check_quadrangle(env, 0.0, 0.2, 0.4, 0.7, 1, 5) >= -1e-9);
        REQUIRE(check_quadrangle(env, 0.1, 0.3, 0.3, 0.8, 2, 4) >= -1e-9);
        REQUIRE(check_quadrangle(env, 0.0, 0.0, 0.6, 0.6, 1, 3) >= -1e-9);
    }

    REQUIRE_THROWS_AS(check_quadrangle(env0, 0.5, 0.2, 0.6, 0.8, 1, 3),
                      std::domain_error);
    REQUIRE_THROWS_AS(check_quadrangle(env0, 0.0, 0.2, 0.5, 0.8, 3, 1),
                      std::domain_error);
}
