#pragma once

// Flat key=value run configuration.
//
//   # comment
//   problem     = neumann1d | dirichlet1d | nonlocal_norm | nonlocal_rank1 | scalar_ode
//   p           = <real > 0>
//   u0_spec     = <datum>
//
// Optional keys and defaults: n_modes=16 (1 for scalar_ode), n_grid=4*n_modes,
// dt=0.05, t_end=10000, sampling=log|linear, sample_count=400,
// scheme=strang|rk4, u1_spec=zero, phi_spec=auto, eps/delta/R/alpha/rho=auto,
// seed=1, out_path=<empty>.
//
// Datum descriptors:
//   zero | const:<v> | kernel:<v> | mode:<k>:<amp> | scaled:<f>:<datum> | sum:<datum>,<datum>,...
// const:<v> is the L2 projection of the constant function v; kernel:<v> is v
// times the first kernel mode; mode indices are 0-based basis indices.

#include "dqlab/integrator.hpp"
#include "dqlab/spectral.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace dqlab {

enum class ProblemKind { Neumann1D, Dirichlet1D, NonlocalNorm, NonlocalRank1, ScalarOde };

std::string_view to_string(ProblemKind kind);

struct RunConfig {
    ProblemKind problem = ProblemKind::Neumann1D;
    double p = 2.0;
    int n_modes = 16;
    int n_grid = 64;
    IntegratorConfig integrator;
    std::string u0_spec;
    std::string u1_spec = "zero";
    std::string phi_spec = "auto";
    // nullopt = "auto"
    std::optional<double> eps;
    std::optional<double> delta;
    std::optional<double> R;
    std::optional<double> alpha;
    std::optional<double> rho;
    std::uint64_t seed = 1;
    std::string out_path;
};

/// Throws ConfigError with the offending line number on malformed values,
/// unknown or duplicate keys, and violated constraints; missing required keys
/// are reported without a line number.
RunConfig parse_config(std::string_view text);
RunConfig load_config(const std::string& path);

/// Canonical key=value text; parse_config(render_config(c)) reproduces c.
std::string render_config(const RunConfig& config);

/// Throws ConfigError for syntax errors; mode indices are checked against
/// `basis`.
std::vector<double> parse_datum(std::string_view spec, const Basis& basis);
/// Syntax-only validation (no basis needed).
void check_datum_syntax(std::string_view spec);

Basis make_basis(const RunConfig& config);
Nonlinearity make_nonlinearity(const RunConfig& config, const Basis& basis);
Problem make_problem(const RunConfig& config);

}  // namespace dqlab
