#pragma once

// Explicit open set of initial data producing slowly decaying solutions.
//
// For (u0, u1) with u0 != 0 and delta <= nu/(2nu+1):
//   sigma0 = 4 (|u1|^2 + |u0|^2 + |A^{1/2}u0|^2 + F(u0))^{1/2}
//   sigma1 = (|u1|^2/2 + |A^{1/2}u0|^2/2 + delta |<u1,Qu0>|) / |u0|^{2p+2} + 128 R^2/delta^2
// and the data are certified when
//   sigma0 < rho,   2 sigma0^alpha R < delta/4,   4(p+1) sigma0^p sqrt(sigma1) < delta/32.
// Then |u(t)|^2 >= (|u0|^{-p} + 2p sqrt(sigma1) t)^{-2/p} for all t >= 0.

#include "dqlab/energies.hpp"
#include "dqlab/report.hpp"
#include "dqlab/spectral.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace dqlab {

struct SlowCertificate {
    double p = 0.0;
    double nu = 0.0;
    double delta = 0.0;
    double rho = 0.0;
    double R = 0.0;
    double alpha = 0.0;
    double sigma0 = 0.0;
    double sigma1 = 0.0;
    double cond1_margin = 0.0;  // rho - sigma0
    double cond2_margin = 0.0;  // delta/4 - 2 sigma0^alpha R
    double cond3_margin = 0.0;  // delta/32 - 4(p+1) sigma0^p sqrt(sigma1)
    bool member = false;
    double envelope_y0 = 0.0;    // |u0|^2
    double envelope_rate = 0.0;  // 2p sqrt(sigma1)

    /// 128 R^2 / delta^2, the asymptotic ceiling of G_hat.
    double ghat_ceiling() const { return 128.0 * R * R / (delta * delta); }
    /// Smallest margin relative to its right-hand side.
    double relative_margin() const;
};

/// 4 (|u1|^2 + |u0|^2 + |A^{1/2}u0|^2 + F(u0))^{1/2}.
double compute_sigma0(const Basis& basis, const Nonlinearity& nl, std::span<const double> u0,
                      std::span<const double> u1);

/// `delta` <= 0 selects the maximal admissible value nu/(2nu+1); a positive
/// value above that bound is rejected. Throws DomainError for u0 = 0.
SlowCertificate compute_certificate(const Basis& basis, const Nonlinearity& nl, std::span<const double> u0,
                                    std::span<const double> u1, double rho, double R, double alpha,
                                    double delta = 0.0);

/// Growth constant R in |grad F(u)| <= R (|u|^{p+1} + |A^{1/2}u|^{1+alpha}) on
/// the ball |u|_{D(A^{1/2})} <= rho. Exactly 1 for the nonlocal kinds; for
/// LocalPower, 1.5 times the largest ratio over `n_samples` random states
/// (the first sample is the unit kernel direction).
double estimate_R(const Basis& basis, const Nonlinearity& nl, double rho, double alpha, int n_samples,
                  std::uint64_t seed);

/// |grad F(u)| / (|u|^{p+1} + |A^{1/2}u|^{1+alpha}); 0 for u = 0.
double growth_ratio(const Basis& basis, const Nonlinearity& nl, std::span<const double> a, double alpha);

/// (y0^{-p/2} + rate t)^{-2/p}. Throws DomainError for a non-member certificate.
double lower_envelope(const SlowCertificate& cert, double t);

/// Unit vector along the first kernel mode. Throws DomainError if ker A = {0}.
std::vector<double> kernel_direction(const Basis& basis);

/// Largest c such that (c * kernel_direction, 0) is certified with
/// relative_margin() > required_margin, by bisection on c. Returns 0 if no
/// such c exists in (0, c_max].
double kernel_threshold(const Basis& basis, const Nonlinearity& nl, double rho, double R, double alpha,
                        double required_margin = 0.0, double c_max = 1.0);

std::string to_key_values(const SlowCertificate& cert, const std::string& prefix);

/// Slow-regime checks along a certified trajectory (whose delta must match
/// the certificate): u != 0, G <= 2 sigma1, |u|^2 >= lower_envelope and
/// G_hat <= (G_hat(0) - 128R^2/delta^2) exp(-delta t/32) + 128R^2/delta^2.
/// G-type comparisons allow `abs_tol` absolute slack.
std::vector<InvariantReport> check_slow_trajectory(const Trajectory& trajectory, const SlowCertificate& cert,
                                                   double abs_tol = 1e-8);

}  // namespace dqlab
