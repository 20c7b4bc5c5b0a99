#include "dqlab/slowset.hpp"

#include "dqlab/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace dqlab {

double SlowCertificate::relative_margin() const {
    const double m1 = cond1_margin / rho;
    const double m2 = cond2_margin / (delta / 4.0);
    const double m3 = cond3_margin / (delta / 32.0);
    return std::min({m1, m2, m3});
}

double compute_sigma0(const Basis& basis, const Nonlinearity& nl, std::span<const double> u0,
                      std::span<const double> u1) {
    const double n0 = norm(u0);
    const double au = norm_A12(basis, u0);
    return 4.0 * std::sqrt(dot(u1, u1) + n0 * n0 + au * au + potential_F(basis, nl, u0));
}

SlowCertificate compute_certificate(const Basis& basis, const Nonlinearity& nl, std::span<const double> u0,
                                    std::span<const double> u1, double rho, double R, double alpha,
                                    double delta) {
    if (!(rho > 0.0) || !(R > 0.0) || !(alpha > 0.0)) {
        throw InvalidArgument("compute_certificate: rho, R and alpha must be > 0");
    }
    const double n0 = norm(u0);
    if (!(n0 > 0.0)) throw DomainError("compute_certificate: u0 must be nonzero");
    if (static_cast<int>(u1.size()) != basis.n_modes()) throw InvalidArgument("compute_certificate: u1 has wrong length");

    const double delta_max = max_admissible_delta(basis);
    if (delta <= 0.0) {
        delta = delta_max;
    } else if (delta > delta_max * (1.0 + 1e-15)) {
        throw InvalidArgument("compute_certificate: delta exceeds nu/(2nu+1)");
    }

    SlowCertificate c;
    c.p = nl.p();
    c.nu = basis.nu();
    c.delta = delta;
    c.rho = rho;
    c.R = R;
    c.alpha = alpha;

    const double v2 = dot(u1, u1);
    const double au2 = std::pow(norm_A12(basis, u0), 2);
    const std::vector<double> qu0 = range_part(basis, u0);

    c.sigma0 = compute_sigma0(basis, nl, u0, u1);
    c.sigma1 = (0.5 * v2 + 0.5 * au2 + delta * std::abs(dot(u1, qu0))) / std::pow(n0, 2.0 * c.p + 2.0) +
               c.ghat_ceiling();

    c.cond1_margin = rho - c.sigma0;
    c.cond2_margin = delta / 4.0 - 2.0 * std::pow(c.sigma0, alpha) * R;
    c.cond3_margin = delta / 32.0 - 4.0 * (c.p + 1.0) * std::pow(c.sigma0, c.p) * std::sqrt(c.sigma1);
    c.member = c.cond1_margin > 0.0 && c.cond2_margin > 0.0 && c.cond3_margin > 0.0;

    c.envelope_y0 = n0 * n0;
    c.envelope_rate = 2.0 * c.p * std::sqrt(c.sigma1);
    return c;
}

double growth_ratio(const Basis& basis, const Nonlinearity& nl, std::span<const double> a, double alpha) {
    const double nu = norm(a);
    if (nu == 0.0) return 0.0;
    const double num = norm(grad_F(basis, nl, a));
    const double den = std::pow(nu, nl.p() + 1.0) + std::pow(norm_A12(basis, a), 1.0 + alpha);
    return num / den;
}

double estimate_R(const Basis& basis, const Nonlinearity& nl, double rho, double alpha, int n_samples,
                  std::uint64_t seed) {
    if (nl.kind() != NonlinearityKind::LocalPower) return 1.0;
    if (n_samples < 100) throw InvalidArgument("estimate_R: n_samples must be >= 100");
    if (!(rho > 0.0) || !(alpha > 0.0)) throw InvalidArgument("estimate_R: rho and alpha must be > 0");

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const auto n = static_cast<std::size_t>(basis.n_modes());
    const bool has_kernel = !basis.kernel_indices().empty();

    double worst = 0.0;
    std::vector<double> u(n);
    for (int i = 0; i < n_samples; ++i) {
        if (i == 0 && has_kernel) {
            u = kernel_direction(basis);
        } else {
            for (std::size_t k = 0; k < n; ++k) u[k] = gauss(rng) / (1.0 + static_cast<double>(k));
        }
        const double len = norm_D12(basis, u);
        if (!(len > 0.0)) continue;
        // Radius drawn in (0, rho]; 1 - U avoids a zero draw.
        const double r = rho * (1.0 - unit(rng));
        for (double& x : u) x *= r / len;
        worst = std::max(worst, growth_ratio(basis, nl, u, alpha));
    }
    return 1.5 * worst;
}

double lower_envelope(const SlowCertificate& cert, double t) {
    if (!cert.member) throw DomainError("lower_envelope: initial data are not certified");
    const double p = cert.p;
    return std::pow(std::pow(cert.envelope_y0, -0.5 * p) + cert.envelope_rate * t, -2.0 / p);
}

std::vector<double> kernel_direction(const Basis& basis) {
    if (basis.kernel_indices().empty()) throw DomainError("operator has a trivial kernel");
    std::vector<double> e(static_cast<std::size_t>(basis.n_modes()), 0.0);
    e[static_cast<std::size_t>(basis.kernel_indices().front())] = 1.0;
    return e;
}

double kernel_threshold(const Basis& basis, const Nonlinearity& nl, double rho, double R, double alpha,
                        double required_margin, double c_max) {
    const std::vector<double> e = kernel_direction(basis);
    const std::vector<double> zero(e.size(), 0.0);
    auto certified = [&](double c) {
        std::vector<double> u0 = e;
        for (double& x : u0) x *= c;
        const SlowCertificate cert = compute_certificate(basis, nl, u0, zero, rho, R, alpha);
        return cert.member && cert.relative_margin() > required_margin;
    };
    // All three left-hand sides grow with c at fixed direction, so membership
    // is an interval (0, c*).
    double lo = 0.0;
    double hi = c_max;
    if (certified(hi)) return hi;
    double probe = c_max;
    while (probe > 1e-300 && !certified(probe)) probe *= 0.5;
    if (!(probe > 1e-300)) return 0.0;
    lo = probe;
    hi = std::min(2.0 * probe, c_max);
    for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (certified(mid)) lo = mid; else hi = mid;
    }
    return lo;
}

std::string to_key_values(const SlowCertificate& cert, const std::string& prefix) {
    std::string out;
    auto put = [&](const char* key, double v) { out += prefix + key + "=" + format_number(v) + "\n"; };
    put("p", cert.p);
    put("nu", cert.nu);
    put("delta", cert.delta);
    put("rho", cert.rho);
    put("R", cert.R);
    put("alpha", cert.alpha);
    put("sigma0", cert.sigma0);
    put("sigma1", cert.sigma1);
    put("cond1_margin", cert.cond1_margin);
    put("cond2_margin", cert.cond2_margin);
    put("cond3_margin", cert.cond3_margin);
    out += prefix + "member=" + (cert.member ? "true" : "false") + "\n";
    put("envelope_y0", cert.envelope_y0);
    put("envelope_rate", cert.envelope_rate);
    return out;
}

std::vector<InvariantReport> check_slow_trajectory(const Trajectory& trajectory, const SlowCertificate& cert,
                                                   double abs_tol) {
    if (!cert.member) throw DomainError("check_slow_trajectory: initial data are not certified");
    if (trajectory.samples.empty()) throw InvalidArgument("check_slow_trajectory: empty trajectory");
    if (std::abs(trajectory.delta - cert.delta) > 1e-14 * cert.delta) {
        throw InvalidArgument("check_slow_trajectory: trajectory delta differs from certificate delta");
    }

    InvariantReport nonzero;
    nonzero.name = "u_nonzero";
    InvariantReport g_ceiling;
    g_ceiling.name = "G_below_2sigma1";
    InvariantReport envelope;
    envelope.name = "lower_envelope";
    InvariantReport ghat;
    ghat.name = "G_hat_exponential_bound";
    nonzero.worst = std::numeric_limits<double>::infinity();

    const auto& xs = trajectory.samples;
    const double ceiling = cert.ghat_ceiling();
    const double ghat0 = xs.front().G_hat;
    auto flag = [](InvariantReport& r, std::size_t i, double t, const std::string& what) {
        if (r.ok) {
            r.ok = false;
            r.detail = what + " at sample " + std::to_string(i) + " (t=" + format_number(t) + ")";
        }
    };

    for (std::size_t i = 0; i < xs.size(); ++i) {
        const EnergySample& s = xs[i];
        if (s.norm_u < nonzero.worst) {
            nonzero.worst = s.norm_u;
            nonzero.worst_index = i;
            nonzero.worst_t = s.t;
        }
        if (!(s.norm_u > 0.0)) {
            flag(nonzero, i, s.t, "u vanished");
            continue;
        }

        const double g_ratio = s.G / (2.0 * cert.sigma1);
        if (i == 0 || g_ratio > g_ceiling.worst) {
            g_ceiling.worst = g_ratio;
            g_ceiling.worst_index = i;
            g_ceiling.worst_t = s.t;
        }
        if (!(s.G <= 2.0 * cert.sigma1 + abs_tol)) flag(g_ceiling, i, s.t, "G exceeds 2 sigma1");

        const double y = s.norm_u * s.norm_u;
        const double env = lower_envelope(cert, s.t);
        const double env_ratio = env / y;
        if (i == 0 || env_ratio > envelope.worst) {
            envelope.worst = env_ratio;
            envelope.worst_index = i;
            envelope.worst_t = s.t;
        }
        if (!(y >= env * (1.0 - 1e-12))) flag(envelope, i, s.t, "|u|^2 below the lower envelope");

        const double bound = (ghat0 - ceiling) * std::exp(-cert.delta * s.t / 32.0) + ceiling;
        const double excess = s.G_hat - bound;
        if (i == 0 || excess > ghat.worst) {
            ghat.worst = excess;
            ghat.worst_index = i;
            ghat.worst_t = s.t;
        }
        if (!(s.G_hat <= bound + abs_tol)) flag(ghat, i, s.t, "G_hat exceeds its exponential bound");
    }
    return {nonzero, g_ceiling, envelope, ghat};
}

}  // namespace dqlab
