#include "dqlab/analysis.hpp"

#include "dqlab/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace dqlab {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::vector<double> column_of(const Trajectory& trajectory, std::string_view name) {
    std::vector<double> out;
    out.reserve(trajectory.samples.size());
    for (const EnergySample& s : trajectory.samples) out.push_back(column_value(s, name));
    return out;
}

std::vector<double> times_of(const Trajectory& trajectory) { return column_of(trajectory, "t"); }

// Slope of the last decade; NaN when the window holds too few positive samples.
double tail_slope(std::span<const double> t, std::span<const double> values) {
    if (t.empty()) return kNaN;
    const double t_end = t.back();
    try {
        return fit_slope(t, values, t_end / 10.0, t_end).exponent;
    } catch (const FitError&) {
        return kNaN;
    }
}

}  // namespace

SlopeFit fit_slope(std::span<const double> t, std::span<const double> values, double t_min, double t_max) {
    if (t.size() != values.size()) throw InvalidArgument("fit_slope: t and values differ in length");
    std::vector<double> xs, ys;
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (t[i] < t_min || t[i] > t_max) continue;
        if (!std::isfinite(values[i]) || !(values[i] > 0.0)) continue;
        xs.push_back(std::log1p(t[i]));
        ys.push_back(std::log(values[i]));
    }
    if (xs.size() < 5) {
        throw FitError("fit_slope: need >= 5 finite positive samples in [" + format_number(t_min) + ", " +
                       format_number(t_max) + "], found " + std::to_string(xs.size()));
    }
    const double n = static_cast<double>(xs.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double dx = xs[i] - mx;
        const double dy = ys[i] - my;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    if (!(sxx > 0.0)) throw FitError("fit_slope: all samples share one time value");

    SlopeFit fit;
    fit.exponent = sxy / sxx;
    fit.intercept = my - fit.exponent * mx;
    double ss_res = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double r = ys[i] - (fit.intercept + fit.exponent * xs[i]);
        ss_res += r * r;
    }
    // A constant series is fitted exactly; its spread is rounding noise.
    const double noise = 64.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(my));
    fit.r_squared = syy > n * noise * noise ? std::clamp(1.0 - ss_res / syy, 0.0, 1.0) : 1.0;
    fit.t_min = t_min;
    fit.t_max = t_max;
    fit.n_points = static_cast<int>(xs.size());
    return fit;
}

SlopeFit fit_slope(const Trajectory& trajectory, std::string_view column, double t_min, double t_max) {
    return fit_slope(times_of(trajectory), column_of(trajectory, column), t_min, t_max);
}

UpperReport verify_upper(const Trajectory& trajectory, double p) {
    if (trajectory.samples.empty()) throw InvalidArgument("verify_upper: empty trajectory");
    UpperReport r;
    std::vector<double> t, energy, norm;
    for (const EnergySample& s : trajectory.samples) {
        const double lhs = s.norm_v * s.norm_v + s.norm_A12u * s.norm_A12u + s.F_pot;
        const double e = lhs * std::pow(1.0 + s.t, 1.0 + 2.0 / p);
        const double m = s.norm_u * std::pow(1.0 + s.t, 1.0 / p);
        r.M1 = std::max(r.M1, e);
        r.M2 = std::max(r.M2, m);
        t.push_back(s.t);
        energy.push_back(e);
        norm.push_back(m);
    }
    r.tail_slope_energy = tail_slope(t, energy);
    r.tail_slope_norm = tail_slope(t, norm);
    r.bounded = std::isfinite(r.M1) && std::isfinite(r.M2) && !(r.tail_slope_energy > kTailGrowth) &&
                !(r.tail_slope_norm > kTailGrowth);
    r.norm_plateau = std::isfinite(r.tail_slope_norm) && std::abs(r.tail_slope_norm) <= kTailGrowth;
    return r;
}

double dominant_balance(double p, double v0, double t) {
    if (!(v0 > 0.0)) return kNaN;
    return std::pow(std::pow(v0, -p) + p * t, -1.0 / p);
}

OracleSeries ode_oracle(double p, double v0, double v1, double dt, double t_end, int sample_count,
                        Sampling sampling) {
    if (!(p > 0.0)) throw InvalidArgument("ode_oracle: p must be > 0");
    Problem problem{build_basis(BasisKind::Scalar, 1, 1), Nonlinearity::local_power(p), State{0.0, {v0}, {v1}}};
    IntegratorConfig config;
    config.dt = dt;
    config.t_end = t_end;
    config.sample_count = sample_count;
    config.sampling = sampling;
    validate(config);

    OracleSeries out;
    run(problem, config, [&](const State& s) {
        out.t.push_back(s.t);
        out.v.push_back(s.a[0]);
        out.v_dot.push_back(s.b[0]);
        out.v_pred.push_back(dominant_balance(p, v0, s.t));
    });
    return out;
}

std::string_view to_string(DecayClass c) {
    switch (c) {
    case DecayClass::Slow: return "slow";
    case DecayClass::Fast: return "fast";
    case DecayClass::Inconclusive: return "inconclusive";
    }
    return "unknown";
}

DecayVerdict classify(const Trajectory& trajectory, double p, const SlowCertificate* cert) {
    DecayVerdict v;
    v.target = -1.0 / p;
    if (trajectory.samples.empty()) return v;

    const UpperReport upper = verify_upper(trajectory, p);
    v.upper_bound_M1 = upper.M1;
    v.upper_bound_M2 = upper.M2;

    const double t_end = trajectory.samples.back().t;
    if (t_end > 0.0) {
        try {
            const SlopeFit fit = fit_slope(trajectory, "norm_u", t_end / 10.0, t_end);
            v.fitted_norm_exponent = fit.exponent;
            v.r_squared = fit.r_squared;
            if (std::abs(fit.exponent - v.target) <= 0.1 * std::abs(v.target) && fit.r_squared >= 0.99) {
                v.classification = DecayClass::Slow;
            } else if (fit.exponent < 2.0 * v.target || (fit.r_squared < 0.9 && fit.exponent < 0.0)) {
                v.classification = DecayClass::Fast;
            }
        } catch (const FitError&) {
            v.fitted_norm_exponent = kNaN;
            v.r_squared = kNaN;
        }
    }

    if (cert != nullptr && cert->member) {
        v.envelope_checked = true;
        v.lower_envelope_ok = true;
        for (const EnergySample& s : trajectory.samples) {
            if (!(s.norm_u * s.norm_u >= lower_envelope(*cert, s.t) * (1.0 - 1e-12))) {
                v.lower_envelope_ok = false;
                break;
            }
        }
    }
    return v;
}

RangeDecayReport verify_range_decay(const Trajectory& trajectory, double p, double nu, std::optional<double> t_min,
                                    std::optional<double> t_max) {
    if (trajectory.samples.empty()) throw InvalidArgument("verify_range_decay: empty trajectory");
    RangeDecayReport r;
    r.identity.name = "range_coercivity";
    for (std::size_t i = 0; i < trajectory.samples.size(); ++i) {
        const EnergySample& s = trajectory.samples[i];
        const double lhs = s.norm_Qu * s.norm_Qu;
        const double rhs = std::isinf(nu) ? 0.0 : s.norm_A12u * s.norm_A12u / nu;
        const double excess = lhs - rhs;
        if (i == 0 || excess > r.identity.worst) {
            r.identity.worst = excess;
            r.identity.worst_index = i;
            r.identity.worst_t = s.t;
        }
        if (lhs > rhs * (1.0 + 1e-12) + 1e-300 && r.identity.ok) {
            r.identity.ok = false;
            r.identity.detail = "nu |Qu|^2 > |A^{1/2}u|^2 at t=" + format_number(s.t);
        }
    }

    const double t_end = trajectory.samples.back().t;
    const double lo = t_min.value_or(t_end / 10.0);
    const double hi = t_max.value_or(t_end);
    const DecayVerdict verdict = classify(trajectory, p);
    r.slow = verdict.classification == DecayClass::Slow;
    if (r.slow) {
        r.pu_exponent = fit_slope(trajectory, "norm_Pu", lo, hi).exponent;
        try {
            r.qu_exponent = fit_slope(trajectory, "norm_Qu", lo, hi).exponent;
            r.faster = r.qu_exponent <= r.pu_exponent - 0.4;
        } catch (const FitError&) {
            // Qu identically zero: the range part is trivially faster.
            r.qu_exponent = -std::numeric_limits<double>::infinity();
            r.faster = true;
        }
    }
    r.ok = r.identity.ok && r.faster;
    return r;
}

std::string to_key_values(const SlopeFit& fit, const std::string& prefix) {
    std::string out;
    out += prefix + "exponent=" + format_number(fit.exponent) + "\n";
    out += prefix + "intercept=" + format_number(fit.intercept) + "\n";
    out += prefix + "r_squared=" + format_number(fit.r_squared) + "\n";
    out += prefix + "t_min=" + format_number(fit.t_min) + "\n";
    out += prefix + "t_max=" + format_number(fit.t_max) + "\n";
    out += prefix + "n_points=" + std::to_string(fit.n_points) + "\n";
    return out;
}

std::string to_key_values(const UpperReport& report, const std::string& prefix) {
    std::string out;
    out += prefix + "M1=" + format_number(report.M1) + "\n";
    out += prefix + "M2=" + format_number(report.M2) + "\n";
    out += prefix + "tail_slope_energy=" + format_number(report.tail_slope_energy) + "\n";
    out += prefix + "tail_slope_norm=" + format_number(report.tail_slope_norm) + "\n";
    out += prefix + "bounded=" + (report.bounded ? "true" : "false") + "\n";
    out += prefix + "norm_plateau=" + (report.norm_plateau ? "true" : "false") + "\n";
    return out;
}

std::string to_key_values(const DecayVerdict& verdict, const std::string& prefix) {
    std::string out;
    out += prefix + "classification=" + std::string(to_string(verdict.classification)) + "\n";
    out += prefix + "fitted_norm_exponent=" + format_number(verdict.fitted_norm_exponent) + "\n";
    out += prefix + "r_squared=" + format_number(verdict.r_squared) + "\n";
    out += prefix + "target=" + format_number(verdict.target) + "\n";
    out += prefix + "upper_bound_M1=" + format_number(verdict.upper_bound_M1) + "\n";
    out += prefix + "upper_bound_M2=" + format_number(verdict.upper_bound_M2) + "\n";
    if (verdict.envelope_checked) {
        out += prefix + "lower_envelope_ok=" + (verdict.lower_envelope_ok ? "true" : "false") + "\n";
    }
    return out;
}

std::string to_key_values(const RangeDecayReport& report, const std::string& prefix) {
    std::string out = to_key_values(report.identity, prefix + "identity");
    out += prefix + "slow=" + (report.slow ? "true" : "false") + "\n";
    if (report.slow) {
        out += prefix + "pu_exponent=" + format_number(report.pu_exponent) + "\n";
        out += prefix + "qu_exponent=" + format_number(report.qu_exponent) + "\n";
    }
    out += prefix + "ok=" + (report.ok ? "true" : "false") + "\n";
    return out;
}

}  // namespace dqlab
