#pragma once

#include "dqlab/energies.hpp"
#include "dqlab/integrator.hpp"
#include "dqlab/report.hpp"
#include "dqlab/slowset.hpp"

#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace dqlab {

struct SlopeFit {
    double exponent = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
    double t_min = 0.0;
    double t_max = 0.0;
    int n_points = 0;
};

/// Least squares of log(value) against log(1+t) over samples with
/// t_min <= t <= t_max and a finite positive value. Needs at least 5 such
/// samples, otherwise throws FitError.
SlopeFit fit_slope(std::span<const double> t, std::span<const double> values, double t_min, double t_max);
SlopeFit fit_slope(const Trajectory& trajectory, std::string_view column, double t_min, double t_max);

struct UpperReport {
    double M1 = 0.0;  // max (|u'|^2 + |A^{1/2}u|^2 + F) (1+t)^{1+2/p}
    double M2 = 0.0;  // max |u| (1+t)^{1/p}
    double tail_slope_energy = 0.0;  // log-log slope of the M1 product over the last decade
    double tail_slope_norm = 0.0;    // same for the M2 product
    bool bounded = true;             // neither product grows like a power of t at the end
    bool norm_plateau = false;       // the M2 product levels off to a constant
};

/// Tail slopes use the last decade of the sampled time range; a slope above
/// kTailGrowth counts as growth, |slope| <= kTailGrowth as a plateau.
UpperReport verify_upper(const Trajectory& trajectory, double p);
inline constexpr double kTailGrowth = 0.05;

/// Dominant-balance prediction (v0^{-p} + p t)^{-1/p}; NaN for v0 <= 0.
double dominant_balance(double p, double v0, double t);

struct OracleSeries {
    std::vector<double> t;
    std::vector<double> v;
    std::vector<double> v_dot;
    std::vector<double> v_pred;
};

/// Integrates v'' + v' + |v|^p v = 0 with the same splitting scheme (the
/// single mu = 0 mode) and attaches the dominant-balance prediction.
OracleSeries ode_oracle(double p, double v0, double v1, double dt, double t_end, int sample_count = 400,
                        Sampling sampling = Sampling::Logarithmic);

enum class DecayClass { Slow, Fast, Inconclusive };
std::string_view to_string(DecayClass c);

struct DecayVerdict {
    DecayClass classification = DecayClass::Inconclusive;
    double fitted_norm_exponent = 0.0;
    double r_squared = 0.0;
    double target = 0.0;  // -1/p
    double upper_bound_M1 = 0.0;
    double upper_bound_M2 = 0.0;
    bool envelope_checked = false;
    bool lower_envelope_ok = false;
};

/// Fits the norm_u exponent over the last decade. Slow: within 10% of -1/p
/// with r^2 >= 0.99. Fast: steeper than twice the target, or a fit that
/// degrades below r^2 = 0.9 while decaying. Otherwise Inconclusive. With a
/// member certificate the lower envelope is checked as well.
DecayVerdict classify(const Trajectory& trajectory, double p, const SlowCertificate* cert = nullptr);

struct RangeDecayReport {
    InvariantReport identity;  // nu |Qu|^2 <= |A^{1/2}u|^2 at every sample
    bool slow = false;
    double pu_exponent = 0.0;
    double qu_exponent = 0.0;
    bool faster = true;  // qu_exponent <= pu_exponent - 0.4 (checked on Slow runs only)
    bool ok = true;
};

/// Fit window defaults to the last decade of the sampled range.
RangeDecayReport verify_range_decay(const Trajectory& trajectory, double p, double nu,
                                    std::optional<double> t_min = std::nullopt,
                                    std::optional<double> t_max = std::nullopt);

std::string to_key_values(const SlopeFit& fit, const std::string& prefix);
std::string to_key_values(const UpperReport& report, const std::string& prefix);
std::string to_key_values(const DecayVerdict& verdict, const std::string& prefix);
std::string to_key_values(const RangeDecayReport& report, const std::string& prefix);

}  // namespace dqlab
