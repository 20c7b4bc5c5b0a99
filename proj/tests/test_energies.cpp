#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "dqlab/energies.hpp"
#include "dqlab/error.hpp"
#include "test_util.hpp"

#include <cmath>
#include <numbers>

using namespace dqlab;
using dqlab::testing::random_coeffs;
using dqlab::testing::unit;

namespace {

Basis neumann(int n = 16) { return build_basis(BasisKind::Neumann1D, n, 4 * n); }

Trajectory run_neumann(std::vector<double> u0, std::vector<double> u1, double t_end, double p = 2.0) {
    const Basis b = neumann(static_cast<int>(u0.size()));
    const Problem problem{b, Nonlinearity::local_power(p), make_state(b, std::move(u0), std::move(u1))};
    IntegratorConfig cfg;
    cfg.t_end = t_end;
    return simulate(problem, cfg, 0.0, max_admissible_delta(b));
}

Trajectory synthetic(std::vector<EnergySample> samples, double dt = 0.05, double p = 2.0) {
    Trajectory t;
    t.samples = std::move(samples);
    t.dt = dt;
    t.p = p;
    return t;
}

}  // namespace

TEST_CASE("csv column order") {
    const char* expected[] = {"t",  "norm_u",  "norm_Pu", "norm_Qu",     "norm_v", "norm_A12u", "F_pot",     "E0",
                              "F0", "E_tilde", "E_hat_basic", "E_big", "E_hat_eps", "G",         "G_hat", "Q_p"};
    const auto cols = csv_columns();
    REQUIRE(cols.size() == 16);
    for (std::size_t i = 0; i < cols.size(); ++i) CHECK(cols[i].name == expected[i]);
    EnergySample s;
    s.G_hat = 3.5;
    CHECK(column_value(s, "G_hat") == 3.5);
    CHECK_THROWS_AS(column_value(s, "nope"), InvalidArgument);
}

TEST_CASE("sample_energies closed forms") {
    const Basis b = neumann(8);
    const Nonlinearity nl = Nonlinearity::local_power(2.0);
    const double delta = max_admissible_delta(b);

    SUBCASE("kernel datum at rest") {
        const EnergySample s = sample_energies(b, nl, make_state(b, unit(8, 0, 0.3), std::vector<double>(8)), 0.25, delta);
        CHECK(s.G == 0.0);
        CHECK(s.G_hat == 0.0);
        CHECK(s.Q_p == 0.0);
    }
    SUBCASE("eps = 0 leaves E_big unperturbed") {
        std::mt19937_64 rng(1);
        const EnergySample s =
            sample_energies(b, nl, make_state(b, random_coeffs(rng, 8, 0.4), random_coeffs(rng, 8, 0.2)), 0.0, delta);
        CHECK(s.E_hat_eps == s.E_big);
    }
    SUBCASE("scalar p=2, u=0.1 at rest") {
        const Basis sb = build_basis(BasisKind::Scalar, 1, 1);
        const EnergySample s = sample_energies(sb, nl, State{0.0, {0.1}, {0.0}}, 0.0, 0.5);
        CHECK(s.G == 0.0);
        CHECK(s.E_big == doctest::Approx(5e-5).epsilon(1e-14));
        CHECK(s.E_big == doctest::Approx(2.0 * s.F_pot).epsilon(1e-15));
    }
    SUBCASE("quotients are NaN at u = 0") {
        const EnergySample s = sample_energies(b, nl, make_state(b, std::vector<double>(8), unit(8, 2, 0.1)), 0.0, delta);
        CHECK(std::isnan(s.G));
        CHECK(std::isnan(s.G_hat));
        CHECK(std::isnan(s.Q_p));
        CHECK(s.E_big > 0.0);
    }
    SUBCASE("field identities") {
        std::mt19937_64 rng(2);
        for (int i = 0; i < 20; ++i) {
            const auto a = random_coeffs(rng, 8, 0.5);
            const auto v = random_coeffs(rng, 8, 0.3);
            const EnergySample s = sample_energies(b, nl, make_state(b, a, v), 0.125, delta);
            const double v2 = s.norm_v * s.norm_v, u2 = s.norm_u * s.norm_u, au2 = s.norm_A12u * s.norm_A12u;
            CHECK(s.E0 == doctest::Approx(0.5 * (v2 + au2)));
            CHECK(s.F0 == doctest::Approx(s.E0 + s.F_pot));
            CHECK(s.E_big == doctest::Approx(2.0 * s.F0));
            CHECK(s.E_hat_basic == doctest::Approx(v2 + u2 + au2 + s.F_pot));
            CHECK(s.E_tilde == doctest::Approx(v2 + 0.5 * u2 + au2 + 2 * s.F_pot + dot(v, a)));
            CHECK(s.E_hat_eps == doctest::Approx(s.E_big + 0.125 * std::pow(s.E_big, 0.5) * dot(v, a)));
            const double den = std::pow(s.norm_u, 6.0);
            CHECK(s.G == doctest::Approx(0.5 * (v2 + au2) / den));
            CHECK(s.G_hat == doctest::Approx(s.G + delta * dot(v, range_part(b, a)) / den));
            CHECK(s.Q_p == doctest::Approx(dot(apply_A(b, a), a) / den));
            CHECK(s.norm_u * s.norm_u == doctest::Approx(s.norm_Pu * s.norm_Pu + s.norm_Qu * s.norm_Qu));
        }
    }
    SUBCASE("parameter validation") {
        const State st = make_state(b, unit(8, 0, 0.1), std::vector<double>(8));
        CHECK_THROWS_AS(sample_energies(b, nl, st, -1.0, delta), InvalidArgument);
        CHECK_THROWS_AS(sample_energies(b, nl, st, 0.0, 0.0), InvalidArgument);
        CHECK_THROWS_AS(sample_energies(b, nl, st, 0.0, delta * 1.01), InvalidArgument);
    }
}

TEST_CASE("max admissible delta") {
    const double pi2 = std::numbers::pi * std::numbers::pi;
    CHECK(max_admissible_delta(neumann(8)) == doctest::Approx(pi2 / (2 * pi2 + 1)).epsilon(1e-15));
    CHECK(max_admissible_delta(neumann(8)) == doctest::Approx(0.47590).epsilon(1e-4));
    CHECK(max_admissible_delta(build_basis(BasisKind::Scalar, 1, 1)) == 0.5);
}

TEST_CASE("monotone tolerance is 10 dt^3 per step") {
    CHECK(monotone_tolerance(0.1, 0.0, 1.0) == doctest::Approx(10 * 1e-3 * 10));
    CHECK(monotone_tolerance(0.05, 2.0, 2.05) == doctest::Approx(10 * 1.25e-4));
}

TEST_CASE("epsilon selection") {
    SUBCASE("zero trajectory takes the first grid point") {
        const Trajectory t = run_neumann(std::vector<double>(8), std::vector<double>(8), 10.0);
        const EpsilonSelection sel = select_epsilon(t, 2.0);
        CHECK(sel.valid);
        CHECK(sel.eps == 0.5);
        CHECK(sel.beta == doctest::Approx(0.5));
        CHECK(sel.scan_grid.size() == 20);
        CHECK(sel.scan_grid.back() == std::ldexp(1.0, -20));
    }
    SUBCASE("slow Neumann run: the selected eps satisfies the sandwich") {
        Trajectory t = run_neumann(unit(16, 0, 0.1), std::vector<double>(16), 1000.0);
        const EpsilonSelection sel = select_epsilon(t, 2.0);
        REQUIRE(sel.valid);
        apply_epsilon(t, sel.eps);
        CHECK(check_eps_sandwich(t).ok);
        CHECK(check_nonincreasing(t, "E_hat_eps").ok);
    }
    SUBCASE("inflated <u',u> admits no eps") {
        std::vector<EnergySample> xs(3);
        for (std::size_t i = 0; i < xs.size(); ++i) {
            xs[i].t = static_cast<double>(i);
            xs[i].E_big = 1.0;
            xs[i].dot_uv = 1e7;
        }
        const EpsilonSelection sel = select_epsilon(synthetic(xs), 2.0);
        CHECK_FALSE(sel.valid);
    }
}

TEST_CASE("basic bound") {
    SUBCASE("zero data") {
        const InvariantReport r = check_basic_bound(run_neumann(std::vector<double>(8), std::vector<double>(8), 10.0));
        CHECK(r.ok);
        CHECK(r.worst == 0.0);
    }
    SUBCASE("constant datum from rest decays monotonically") {
        const InvariantReport r = check_basic_bound(run_neumann(unit(16, 0, 0.1), std::vector<double>(16), 1000.0));
        CHECK(r.ok);
        CHECK(r.worst <= 1.0 + 1e-12);
    }
    SUBCASE("mixed-mode data stay below the factor 16") {
        std::mt19937_64 rng(12);
        for (int i = 0; i < 10; ++i) {
            const Trajectory t = run_neumann(random_coeffs(rng, 12, 0.3), random_coeffs(rng, 12, 0.5), 200.0);
            const InvariantReport r = check_basic_bound(t);
            CHECK(r.ok);
            CHECK(r.worst <= 16.0);
            CHECK(check_basic_sandwich(t).ok);
            CHECK(check_nonincreasing(t, "F0").ok);
            CHECK(check_dirichlet_quotient(t).ok);
        }
    }
}

TEST_CASE("checks flag synthetic violations") {
    std::vector<EnergySample> xs(3);
    for (std::size_t i = 0; i < xs.size(); ++i) {
        xs[i].t = static_cast<double>(i);
        xs[i].norm_u = 1.0;
        xs[i].F0 = 1.0;
        xs[i].E_hat_basic = 1.0;
        xs[i].E_tilde = 1.0;
        xs[i].E_big = 1.0;
        xs[i].E_hat_eps = 1.0;
        xs[i].G = 1.0;
        xs[i].G_hat = 1.0;
        xs[i].Q_p = 1.0;
    }
    CHECK(check_nonincreasing(synthetic(xs), "F0").ok);
    CHECK(check_quotient_sandwich(synthetic(xs)).ok);

    auto bad = xs;
    bad[2].F0 = 1.1;
    const InvariantReport mono = check_nonincreasing(synthetic(bad), "F0");
    CHECK_FALSE(mono.ok);
    CHECK(mono.worst_index == 2);

    bad = xs;
    bad[1].E_hat_basic = 17.0;
    bad[1].E_tilde = 17.0;
    CHECK_FALSE(check_basic_bound(synthetic(bad)).ok);

    bad = xs;
    bad[1].E_tilde = 0.1;
    CHECK_FALSE(check_basic_sandwich(synthetic(bad)).ok);

    bad = xs;
    bad[1].E_hat_eps = 2.5;
    CHECK_FALSE(check_eps_sandwich(synthetic(bad)).ok);

    bad = xs;
    bad[1].G_hat = 0.4;
    CHECK_FALSE(check_quotient_sandwich(synthetic(bad)).ok);

    bad = xs;
    bad[1].Q_p = 2.5;
    CHECK_FALSE(check_dirichlet_quotient(synthetic(bad)).ok);
}

TEST_CASE("u-energy bound along a slow run") {
    const Trajectory t = run_neumann(unit(16, 0, 0.1), std::vector<double>(16), 1000.0);
    const InvariantReport r = check_u_energy(t, 4.0);
    CHECK(r.ok);
    CHECK(r.worst >= 1.0);
}
