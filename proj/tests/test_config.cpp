#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "dqlab/config.hpp"
#include "dqlab/error.hpp"

#include <cmath>
#include <numbers>
#include <string>

using namespace dqlab;

namespace {

// Parses and returns the ConfigError, failing if none is thrown.
ConfigError parse_error(const std::string& text) {
    try {
        parse_config(text);
    } catch (const ConfigError& e) {
        return e;
    }
    FAIL("expected ConfigError for:\n" << text);
    return ConfigError("", 0);
}

bool contains(const std::string& s, const std::string& needle) { return s.find(needle) != std::string::npos; }

}  // namespace

TEST_CASE("minimal file takes the defaults") {
    const RunConfig c = parse_config("problem = neumann1d\np = 2\nu0_spec = const:0.1\n");
    CHECK(c.problem == ProblemKind::Neumann1D);
    CHECK(c.p == 2.0);
    CHECK(c.n_modes == 16);
    CHECK(c.n_grid == 64);
    CHECK(c.integrator.dt == 0.05);
    CHECK(c.integrator.t_end == 1e4);
    CHECK(c.integrator.sampling == Sampling::Logarithmic);
    CHECK(c.integrator.sample_count == 400);
    CHECK(c.integrator.scheme == Scheme::StrangExactLinear);
    CHECK(c.u1_spec == "zero");
    CHECK_FALSE(c.eps);
    CHECK_FALSE(c.delta);
    CHECK_FALSE(c.R);
    CHECK_FALSE(c.alpha);
    CHECK_FALSE(c.rho);
    CHECK(c.seed == 1);

    const RunConfig s = parse_config("problem = scalar_ode\np = 3\nu0_spec = const:0.2\n");
    CHECK(s.n_modes == 1);
    CHECK(s.n_grid == 1);
}

TEST_CASE("comments, blanks and n_grid follow n_modes") {
    const RunConfig c = parse_config("# header\n\n  problem=dirichlet1d  # trailing\np=1.5\nn_modes=8\nu0_spec=mode:1:0.05\n");
    CHECK(c.problem == ProblemKind::Dirichlet1D);
    CHECK(c.n_modes == 8);
    CHECK(c.n_grid == 32);
    const Problem problem = make_problem(c);
    CHECK(problem.initial.a[1] == 0.05);
    CHECK(problem.initial.a[0] == 0.0);
}

TEST_CASE("violated constraints name the key and the line") {
    const ConfigError e = parse_error("problem = neumann1d\np = -1\nu0_spec = zero\n");
    CHECK(e.line() == 2);
    CHECK(contains(e.what(), "p > 0"));
    CHECK(contains(e.what(), "line 2"));

    CHECK(parse_error("problem = neumann1d\np = 2\nu0_spec = zero\nn_grid = 20\n").line() == 4);
    CHECK(contains(parse_error("problem = neumann1d\np = 2\nu0_spec = zero\nn_grid = 20\n").what(), "2*n_modes"));
    CHECK(parse_error("problem = neumann1d\np = 2\nu0_spec = zero\ndt = 0\n").line() == 4);
    CHECK(parse_error("problem = neumann1d\np = 2\nu0_spec = zero\nt_end = 0.01\n").line() == 4);
    CHECK(parse_error("problem = neumann1d\np = 2\nu0_spec = zero\nsampling = cubic\n").line() == 4);
    CHECK(parse_error("problem = neumann1d\np = 2\nu0_spec = zero\nscheme = euler\n").line() == 4);
    CHECK(parse_error("problem = neumann1d\np = 2\nu0_spec = zero\nR = -2\n").line() == 4);
    CHECK(parse_error("problem = neumann1d\np = 2\nu0_spec = zero\neps = -0.1\n").line() == 4);
    CHECK(parse_error("problem = neumann1d\np = 2\nu0_spec = zero\nseed = -3\n").line() == 4);
    CHECK(parse_error("problem = scalar_ode\np = 2\nu0_spec = zero\nn_modes = 2\n").line() == 4);
    CHECK(parse_error("problem = neumann1d\np = 2\nu0_spec = zero\nphi_spec = kernel:1\n").line() == 4);
    CHECK(parse_error("problem = torus\np = 2\nu0_spec = zero\n").line() == 1);
    CHECK(parse_error("problem = neumann1d\np = two\nu0_spec = zero\n").line() == 2);
    CHECK(parse_error("problem = neumann1d\np = nan\nu0_spec = zero\n").line() == 2);

    // delta above nu/(2nu+1)
    const double pi2 = std::numbers::pi * std::numbers::pi;
    const double max_delta = pi2 / (2 * pi2 + 1);
    CHECK_NOTHROW(parse_config("problem = neumann1d\np = 2\nu0_spec = zero\ndelta = 0.4\n"));
    CHECK(parse_error("problem = neumann1d\np = 2\nu0_spec = zero\ndelta = " + std::to_string(max_delta * 1.01) + "\n")
              .line() == 4);
}

TEST_CASE("structural errors") {
    const ConfigError unknown = parse_error("problem = neumann1d\np = 2\nu0_spec = zero\ncolour = red\n");
    CHECK(unknown.line() == 4);
    CHECK(contains(unknown.what(), "colour"));

    const ConfigError dup = parse_error("problem = neumann1d\np = 2\np = 3\nu0_spec = zero\n");
    CHECK(dup.line() == 3);
    CHECK(contains(dup.what(), "line 2"));

    const ConfigError missing = parse_error("problem = neumann1d\nu0_spec = zero\n");
    CHECK(missing.line() == 0);
    CHECK(contains(missing.what(), "'p'"));

    CHECK(parse_error("problem = neumann1d\np 2\nu0_spec = zero\n").line() == 2);
    CHECK(parse_error("problem = neumann1d\np =\nu0_spec = zero\n").line() == 2);
    CHECK(parse_error("problem = neumann1d\n= 2\nu0_spec = zero\n").line() == 2);
}

TEST_CASE("datum grammar") {
    const Basis n = build_basis(BasisKind::Neumann1D, 8, 32);
    const Basis d = build_basis(BasisKind::DirichletShifted1D, 8, 32);

    CHECK(parse_datum("zero", n) == std::vector<double>(8));
    CHECK(parse_datum("const:0.1", n)[0] == 0.1);
    CHECK(parse_datum("kernel:0.3", n)[0] == 0.3);
    CHECK(parse_datum("mode:3:-0.2", n)[3] == -0.2);
    const auto sum = parse_datum("sum:mode:1:0.5,kernel:0.25,mode:1:0.5", n);
    CHECK(sum[0] == 0.25);
    CHECK(sum[1] == 1.0);
    const auto scaled = parse_datum("scaled:2:sum:mode:2:0.5,kernel:1", n);
    CHECK(scaled[0] == 2.0);
    CHECK(scaled[2] == 1.0);

    // const:1 on the sine basis: odd modes only, coefficients sqrt2 * 2/(m pi).
    const auto c = parse_datum("const:1", d);
    for (int k = 0; k < 8; ++k) {
        const int m = k + 1;
        const double expected = m % 2 == 1 ? std::numbers::sqrt2 * 2.0 / (m * std::numbers::pi) : 0.0;
        CHECK(c[static_cast<std::size_t>(k)] == doctest::Approx(expected).epsilon(1e-15));
    }

    for (const char* bad : {"", "one", "const:", "const:x", "mode:1", "mode:-1:0.1", "mode:a:0.1", "scaled:2",
                            "sum:", "sum:zero,,zero", "kernel:inf"}) {
        CAPTURE(bad);
        CHECK_THROWS_AS(parse_datum(bad, n), ConfigError);
        CHECK_THROWS_AS(check_datum_syntax(bad), ConfigError);
    }
    CHECK_THROWS_AS(parse_datum("mode:8:0.1", n), ConfigError);
    CHECK_NOTHROW(check_datum_syntax("mode:8:0.1"));

    const ConfigError e = parse_error("problem = neumann1d\np = 2\nn_modes = 4\nu0_spec = mode:4:0.1\n");
    CHECK(e.line() == 4);
    CHECK(contains(e.what(), "u0_spec"));
}

TEST_CASE("render round trip") {
    const char* texts[] = {
        "problem = neumann1d\np = 2\nu0_spec = const:0.1\n",
        "problem = dirichlet1d\np = 1.25\nn_modes = 12\nn_grid = 30\ndt = 0.025\nt_end = 500\nsampling = linear\n"
        "sample_count = 11\nscheme = rk4\nu0_spec = mode:1:0.05\nu1_spec = mode:2:0.01\neps = 0\ndelta = 0.3\n"
        "R = 2\nalpha = 1.5\nrho = 0.7\nseed = 99\nout_path = /tmp/x.csv\n",
        "problem = nonlocal_rank1\np = 3\nu0_spec = kernel:0.001\nphi_spec = sum:kernel:1,mode:1:0.5\n",
        "problem = nonlocal_norm\np = 0.5\nu0_spec = scaled:0.1:const:1\n",
        "problem = scalar_ode\np = 4\nu0_spec = const:0.05\nu1_spec = const:-0.01\n",
    };
    for (const char* text : texts) {
        CAPTURE(text);
        const RunConfig c = parse_config(text);
        const std::string once = render_config(c);
        const RunConfig back = parse_config(once);
        CHECK(render_config(back) == once);
        CHECK(back.p == c.p);
        CHECK(back.integrator.dt == c.integrator.dt);
        CHECK(back.eps == c.eps);
        CHECK(back.delta == c.delta);
        CHECK(back.rho == c.rho);
        CHECK(back.seed == c.seed);
        CHECK(back.out_path == c.out_path);
        CHECK(make_problem(back).initial.a == make_problem(c).initial.a);
    }

    // Non-terminating decimals survive the round trip exactly.
    RunConfig c = parse_config("problem = neumann1d\np = 2\nu0_spec = zero\n");
    c.integrator.dt = 0.1 / 3.0;
    c.rho = std::nextafter(1.0, 2.0);
    const RunConfig back = parse_config(render_config(c));
    CHECK(back.integrator.dt == c.integrator.dt);
    CHECK(back.rho == c.rho);
}

TEST_CASE("load_config reports missing files") {
    CHECK_THROWS_AS(load_config("/nonexistent/dir/run.cfg"), IoError);
}
