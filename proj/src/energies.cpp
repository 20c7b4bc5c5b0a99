#include "dqlab/energies.hpp"

#include "dqlab/error.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <string>

namespace dqlab {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kRelTol = 1e-12;

constexpr std::array<Column, 16> kColumns{{
    {"t", &EnergySample::t},
    {"norm_u", &EnergySample::norm_u},
    {"norm_Pu", &EnergySample::norm_Pu},
    {"norm_Qu", &EnergySample::norm_Qu},
    {"norm_v", &EnergySample::norm_v},
    {"norm_A12u", &EnergySample::norm_A12u},
    {"F_pot", &EnergySample::F_pot},
    {"E0", &EnergySample::E0},
    {"F0", &EnergySample::F0},
    {"E_tilde", &EnergySample::E_tilde},
    {"E_hat_basic", &EnergySample::E_hat_basic},
    {"E_big", &EnergySample::E_big},
    {"E_hat_eps", &EnergySample::E_hat_eps},
    {"G", &EnergySample::G},
    {"G_hat", &EnergySample::G_hat},
    {"Q_p", &EnergySample::Q_p},
}};

InvariantReport make_report(const std::string& name) {
    InvariantReport r;
    r.name = name;
    r.worst = -std::numeric_limits<double>::infinity();
    return r;
}

InvariantReport finish(InvariantReport r) {
    if (std::isinf(r.worst) && r.worst < 0) r.worst = 0.0;
    return r;
}

void note_worst(InvariantReport& r, double value, std::size_t i, double t) {
    if (value > r.worst) {
        r.worst = value;
        r.worst_index = i;
        r.worst_t = t;
    }
}

void fail(InvariantReport& r, std::size_t i, double t, const std::string& what) {
    if (r.ok) {
        r.ok = false;
        r.detail = what + " at sample " + std::to_string(i) + " (t=" + format_number(t) + ")";
    }
}

}  // namespace

std::span<const Column> csv_columns() { return kColumns; }

double column_value(const EnergySample& sample, std::string_view name) {
    for (const Column& c : kColumns) {
        if (c.name == name) return sample.*(c.member);
    }
    throw InvalidArgument("unknown column '" + std::string(name) + "'");
}

double max_admissible_delta(const Basis& basis) {
    const double nu = basis.nu();
    if (std::isinf(nu)) return 0.5;
    return nu / (2.0 * nu + 1.0);
}

EnergySample sample_energies(const Basis& basis, const Nonlinearity& nl, const State& state, double eps,
                             double delta) {
    if (!(eps >= 0.0)) throw InvalidArgument("sample_energies: eps must be >= 0");
    if (!(delta > 0.0) || delta > max_admissible_delta(basis) * (1.0 + 1e-15)) {
        throw InvalidArgument("sample_energies: delta must lie in (0, nu/(2nu+1)]");
    }
    const Norms n = norms(basis, state);
    const double p = nl.p();
    EnergySample s;
    s.t = state.t;
    s.norm_u = n.norm_u;
    s.norm_Pu = n.norm_Pu;
    s.norm_Qu = n.norm_Qu;
    s.norm_v = n.norm_v;
    s.norm_A12u = n.norm_A12u;
    s.F_pot = potential_F(basis, nl, state.a);
    s.dot_uv = dot(state.b, state.a);
    s.dot_vQu = dot(state.b, range_part(basis, state.a));

    const double v2 = n.norm_v * n.norm_v;
    const double u2 = n.norm_u * n.norm_u;
    const double au2 = n.norm_A12u * n.norm_A12u;
    s.E0 = 0.5 * (v2 + au2);
    s.F0 = s.E0 + s.F_pot;
    s.E_tilde = v2 + 0.5 * u2 + au2 + 2.0 * s.F_pot + s.dot_uv;
    s.E_hat_basic = v2 + u2 + au2 + s.F_pot;
    s.E_big = v2 + au2 + 2.0 * s.F_pot;
    s.E_hat_eps = perturbed_energy(s, eps, p);

    if (n.norm_u > 0.0) {
        const double denom = std::pow(n.norm_u, 2.0 * p + 2.0);
        s.G = 0.5 * (v2 + au2) / denom;
        s.G_hat = s.G + delta * s.dot_vQu / denom;
        s.Q_p = au2 / denom;
    } else {
        s.G = s.G_hat = s.Q_p = kNaN;
    }
    return s;
}

double perturbed_energy(const EnergySample& sample, double eps, double p) {
    const double beta = p / (p + 2.0);
    if (eps == 0.0 || sample.E_big <= 0.0) return sample.E_big;
    return sample.E_big + eps * std::pow(sample.E_big, beta) * sample.dot_uv;
}

Trajectory simulate(const Problem& problem, const IntegratorConfig& config, double eps, double delta) {
    Trajectory traj;
    traj.dt = config.dt;
    traj.p = problem.nonlinearity.p();
    traj.eps = eps;
    traj.delta = delta;
    run(problem, config, [&](const State& s) {
        traj.samples.push_back(sample_energies(problem.basis, problem.nonlinearity, s, eps, delta));
    });
    return traj;
}

void apply_epsilon(Trajectory& trajectory, double eps) {
    trajectory.eps = eps;
    for (EnergySample& s : trajectory.samples) s.E_hat_eps = perturbed_energy(s, eps, trajectory.p);
}

double monotone_tolerance(double dt, double t0, double t1) {
    const double steps = std::max(1.0, std::round((t1 - t0) / dt));
    return 10.0 * dt * dt * dt * steps;
}

EpsilonSelection select_epsilon(const Trajectory& trajectory, double p) {
    if (trajectory.samples.empty()) throw InvalidArgument("select_epsilon: empty trajectory");
    EpsilonSelection sel;
    sel.beta = p / (p + 2.0);
    const auto& xs = trajectory.samples;
    for (int j = 1; j <= 20; ++j) {
        const double eps = std::ldexp(1.0, -j);
        sel.scan_grid.push_back(eps);
        if (sel.valid) continue;

        bool ok = true;
        double prev = 0.0;
        for (std::size_t i = 0; i < xs.size() && ok; ++i) {
            const double e = xs[i].E_big;
            const double h = perturbed_energy(xs[i], eps, p);
            const double slack = kRelTol * std::abs(e);
            if (h < 0.5 * e - slack || h > 2.0 * e + slack) ok = false;
            if (i > 0 && h > prev + monotone_tolerance(trajectory.dt, xs[i - 1].t, xs[i].t)) ok = false;
            prev = h;
        }
        if (ok) {
            sel.eps = eps;
            sel.valid = true;
        }
    }
    return sel;
}

InvariantReport check_nonincreasing(const Trajectory& trajectory, std::string_view column) {
    InvariantReport r = make_report(std::string(column) + "_nonincreasing");
    const auto& xs = trajectory.samples;
    for (std::size_t i = 1; i < xs.size(); ++i) {
        const double prev = column_value(xs[i - 1], column);
        const double cur = column_value(xs[i], column);
        const double tol = monotone_tolerance(trajectory.dt, xs[i - 1].t, xs[i].t) + kRelTol * std::abs(prev);
        note_worst(r, cur - prev, i, xs[i].t);
        if (cur > prev + tol) fail(r, i, xs[i].t, std::string(column) + " increased by " + format_number(cur - prev));
    }
    return finish(r);
}

InvariantReport check_basic_bound(const Trajectory& trajectory) {
    if (trajectory.samples.empty()) throw InvalidArgument("check_basic_bound: empty trajectory");
    InvariantReport r;
    r.name = "basic_bound";
    const auto& xs = trajectory.samples;
    const double e0 = xs.front().E_hat_basic;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double ratio = e0 > 0.0 ? xs[i].E_hat_basic / e0 : (xs[i].E_hat_basic > 0.0 ? kNaN : 0.0);
        if (i == 0 || ratio > r.worst || std::isnan(ratio)) {
            r.worst = ratio;
            r.worst_index = i;
            r.worst_t = xs[i].t;
        }
        if (!(ratio <= 16.0 * (1.0 + kRelTol))) fail(r, i, xs[i].t, "E_hat_basic exceeds 16 E_hat_basic(0)");
    }
    const InvariantReport mono = check_nonincreasing(trajectory, "E_tilde");
    if (!mono.ok) {
        r.ok = false;
        if (r.detail.empty()) r.detail = mono.detail;
    }
    return r;
}

InvariantReport check_basic_sandwich(const Trajectory& trajectory) {
    InvariantReport r = make_report("basic_sandwich");
    const auto& xs = trajectory.samples;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double hat = xs[i].E_hat_basic;
        const double til = xs[i].E_tilde;
        const double slack = kRelTol * std::abs(hat);
        if (hat > 0.0) note_worst(r, std::max(hat / (8.0 * til), til / (2.0 * hat)), i, xs[i].t);
        if (til < hat / 8.0 - slack || til > 2.0 * hat + slack) fail(r, i, xs[i].t, "E_tilde outside [E_hat/8, 2 E_hat]");
    }
    return finish(r);
}

InvariantReport check_eps_sandwich(const Trajectory& trajectory) {
    InvariantReport r = make_report("eps_sandwich");
    const auto& xs = trajectory.samples;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double e = xs[i].E_big;
        const double h = xs[i].E_hat_eps;
        const double slack = kRelTol * std::abs(e);
        if (e > 0.0) note_worst(r, std::max(e / (2.0 * h), h / (2.0 * e)), i, xs[i].t);
        if (h < 0.5 * e - slack || h > 2.0 * e + slack) fail(r, i, xs[i].t, "E_hat_eps outside [E/2, 2E]");
    }
    return finish(r);
}

InvariantReport check_quotient_sandwich(const Trajectory& trajectory) {
    InvariantReport r = make_report("quotient_sandwich");
    const auto& xs = trajectory.samples;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (!(xs[i].norm_u > 0.0)) continue;
        const double g = xs[i].G;
        const double gh = xs[i].G_hat;
        const double slack = kRelTol * std::abs(g);
        if (g > 0.0) note_worst(r, std::max(g / (2.0 * gh), gh / (2.0 * g)), i, xs[i].t);
        if (gh < 0.5 * g - slack || gh > 2.0 * g + slack) fail(r, i, xs[i].t, "G_hat outside [G/2, 2G]");
    }
    return finish(r);
}

InvariantReport check_dirichlet_quotient(const Trajectory& trajectory) {
    InvariantReport r = make_report("dirichlet_quotient");
    const auto& xs = trajectory.samples;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (!(xs[i].norm_u > 0.0)) continue;
        if (xs[i].G > 0.0) note_worst(r, xs[i].Q_p / (2.0 * xs[i].G), i, xs[i].t);
        if (xs[i].Q_p > 2.0 * xs[i].G * (1.0 + kRelTol)) fail(r, i, xs[i].t, "Q_p exceeds 2G");
    }
    return finish(r);
}

InvariantReport check_u_energy(const Trajectory& trajectory, double slack) {
    if (trajectory.samples.empty()) throw InvalidArgument("check_u_energy: empty trajectory");
    InvariantReport r = make_report("u_energy");
    const auto& xs = trajectory.samples;
    const double q = trajectory.p + 2.0;
    const double e0 = xs.front().E_big;
    if (!(e0 > 0.0)) {
        r.detail = "E_big(0) = 0; nothing to fit";
        return r;
    }
    const double c1 = std::pow(xs.front().norm_u, q) / e0;
    if (!(c1 > 0.0)) {
        r.detail = "u(0) = 0; nothing to fit";
        return r;
    }
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (!(xs[i].E_big > 0.0)) continue;
        const double ratio = std::pow(xs[i].norm_u, q) / xs[i].E_big / c1;
        note_worst(r, ratio, i, xs[i].t);
        if (ratio > slack) fail(r, i, xs[i].t, "|u|^{p+2} exceeds c1 E_big");
    }
    return finish(r);
}

}  // namespace dqlab
