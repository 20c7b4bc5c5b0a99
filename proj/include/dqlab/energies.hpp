#pragma once

// Lyapunov and quotient functionals along a trajectory.
//
// Naming follows the CSV schema:
//   E0          = (|u'|^2 + |A^{1/2}u|^2) / 2
//   F0          = E0 + F(u)                              (nonincreasing)
//   E_tilde     = |u'|^2 + |u|^2/2 + |A^{1/2}u|^2 + 2F(u) + <u',u>   (nonincreasing)
//   E_hat_basic = |u'|^2 + |u|^2 + |A^{1/2}u|^2 + F(u)
//   E_big       = |u'|^2 + |A^{1/2}u|^2 + 2F(u) = 2 F0
//   E_hat_eps   = E_big + eps E_big^beta <u',u>,  beta = p/(p+2)
//   G           = (|u'|^2 + |A^{1/2}u|^2) / (2 |u|^{2p+2})
//   G_hat       = G + delta <u',Qu> / |u|^{2p+2}
//   Q_p         = <Au,u> / |u|^{2p+2}
// Quotients are NaN when u = 0.

#include "dqlab/integrator.hpp"
#include "dqlab/report.hpp"
#include "dqlab/spectral.hpp"

#include <span>
#include <string_view>
#include <vector>

namespace dqlab {

struct EnergySample {
    double t = 0.0;
    double norm_u = 0.0;
    double norm_Pu = 0.0;
    double norm_Qu = 0.0;
    double norm_v = 0.0;
    double norm_A12u = 0.0;
    double F_pot = 0.0;
    double E0 = 0.0;
    double F0 = 0.0;
    double E_tilde = 0.0;
    double E_hat_basic = 0.0;
    double E_big = 0.0;
    double E_hat_eps = 0.0;
    double G = 0.0;
    double G_hat = 0.0;
    double Q_p = 0.0;
    // Not serialized; kept so derived functionals can be re-evaluated.
    double dot_uv = 0.0;   // <u', u>
    double dot_vQu = 0.0;  // <u', Qu>
};

struct Column {
    std::string_view name;
    double EnergySample::*member;
};

/// The CSV columns in their fixed order.
std::span<const Column> csv_columns();

/// Throws InvalidArgument for an unknown column name.
double column_value(const EnergySample& sample, std::string_view name);

/// nu / (2 nu + 1); 1/2 when the operator has no range (nu = infinity).
double max_admissible_delta(const Basis& basis);

EnergySample sample_energies(const Basis& basis, const Nonlinearity& nl, const State& state, double eps,
                             double delta);

/// E_big + eps E_big^beta <u',u>.
double perturbed_energy(const EnergySample& sample, double eps, double p);

struct Trajectory {
    std::vector<EnergySample> samples;
    double dt = 0.0;
    double p = 0.0;
    double eps = 0.0;
    double delta = 0.0;
};

Trajectory simulate(const Problem& problem, const IntegratorConfig& config, double eps, double delta);

/// Recomputes E_hat_eps for every sample with a new eps.
void apply_epsilon(Trajectory& trajectory, double eps);

/// Allowed growth of a quantity that is nonincreasing in continuous time
/// between two samples: 10 dt^3 per step taken.
double monotone_tolerance(double dt, double t0, double t1);

struct EpsilonSelection {
    double eps = 0.0;
    double beta = 0.0;
    bool valid = false;
    std::vector<double> scan_grid;
};

/// Largest eps in {2^-1, ..., 2^-20} for which E_big/2 <= E_hat_eps <= 2 E_big
/// at every sample and E_hat_eps is nonincreasing within monotone_tolerance.
EpsilonSelection select_epsilon(const Trajectory& trajectory, double p);

/// Checks `column` is nonincreasing within monotone_tolerance.
InvariantReport check_nonincreasing(const Trajectory& trajectory, std::string_view column);

/// E_hat_basic(t) <= 16 E_hat_basic(0) and E_tilde nonincreasing. `worst` is
/// max_t E_hat_basic(t)/E_hat_basic(0) (0 for zero data).
InvariantReport check_basic_bound(const Trajectory& trajectory);

/// E_hat_basic/8 <= E_tilde <= 2 E_hat_basic at every sample.
InvariantReport check_basic_sandwich(const Trajectory& trajectory);

/// E_big/2 <= E_hat_eps <= 2 E_big with the trajectory's eps.
InvariantReport check_eps_sandwich(const Trajectory& trajectory);

/// G/2 <= G_hat <= 2G wherever u != 0.
InvariantReport check_quotient_sandwich(const Trajectory& trajectory);

/// Q_p <= 2G wherever u != 0.
InvariantReport check_dirichlet_quotient(const Trajectory& trajectory);

/// |u|^{p+2} <= c1 E_big with c1 = |u(0)|^{p+2} / E_big(0) times `slack`.
/// `worst` is max_t (|u|^{p+2}/E_big) / c1_fitted.
InvariantReport check_u_energy(const Trajectory& trajectory, double slack);

}  // namespace dqlab
