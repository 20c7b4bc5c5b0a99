#include "dqlab/integrator.hpp"

#include "dqlab/error.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace dqlab {

namespace {

// sinh(x)/x and sin(x)/x without cancellation near 0.
double sinhc(double x) {
    if (std::abs(x) < 1e-4) return 1.0 + x * x / 6.0;
    return std::sinh(x) / x;
}

double sinc(double x) {
    if (std::abs(x) < 1e-4) return 1.0 - x * x / 6.0;
    return std::sin(x) / x;
}

bool all_finite(const State& s) {
    for (std::size_t k = 0; k < s.a.size(); ++k) {
        if (!std::isfinite(s.a[k]) || !std::isfinite(s.b[k])) return false;
    }
    return true;
}

void kick(const Basis& basis, const Nonlinearity& nl, State& s, double dt) {
    const std::vector<double> g = grad_F(basis, nl, s.a);
    for (std::size_t k = 0; k < g.size(); ++k) s.b[k] -= dt * g[k];
}

}  // namespace

std::string_view to_string(Sampling s) { return s == Sampling::Linear ? "linear" : "log"; }

std::string_view to_string(Scheme s) { return s == Scheme::StrangExactLinear ? "strang" : "rk4"; }

void validate(const IntegratorConfig& config) {
    if (!(config.dt > 0.0) || !std::isfinite(config.dt)) throw InvalidArgument("dt must be > 0");
    if (!(config.t_end >= config.dt) || !std::isfinite(config.t_end)) throw InvalidArgument("t_end must satisfy t_end >= dt");
    if (config.sample_count < 2) throw InvalidArgument("sample_count must be >= 2");
}

LinearPropagator::Entry LinearPropagator::coefficients(double mu, double h) {
    // With M = [[0,1],[-mu,-1]] and N = M + I/2 we have N^2 = (1/4 - mu) I, so
    // exp(hM) = exp(-h/2) (c I + s N) with c = cosh(h sqrt(D)), s = sinh(h sqrt(D))/sqrt(D)
    // for D = 1/4 - mu > 0, the trigonometric pair for D < 0 and (1, h) at the double root.
    const double disc = 0.25 - mu;
    double c = 1.0;
    double s = h;
    if (disc > 0.0) {
        const double r = std::sqrt(disc);
        c = std::cosh(r * h);
        s = h * sinhc(r * h);
    } else if (disc < 0.0) {
        const double w = std::sqrt(-disc);
        c = std::cos(w * h);
        s = h * sinc(w * h);
    }
    const double decay = std::exp(-0.5 * h);
    return Entry{decay * (c + 0.5 * s), decay * s, -decay * mu * s, decay * (c - 0.5 * s)};
}

LinearPropagator::LinearPropagator(const Basis& basis, double h) : h_(h) {
    if (!(h > 0.0)) throw InvalidArgument("linear propagator: h must be > 0");
    entries_.reserve(static_cast<std::size_t>(basis.n_modes()));
    for (double mu : basis.eigenvalues()) entries_.push_back(coefficients(mu, h));
}

void LinearPropagator::apply(std::vector<double>& a, std::vector<double>& b) const {
    for (std::size_t k = 0; k < entries_.size(); ++k) {
        const Entry& e = entries_[k];
        const double ak = a[k];
        const double bk = b[k];
        a[k] = e.aa * ak + e.ab * bk;
        b[k] = e.ba * ak + e.bb * bk;
    }
}

State linear_half_step(const Basis& basis, const State& state, double h) {
    State out = state;
    LinearPropagator(basis, h).apply(out.a, out.b);
    out.t = state.t + h;
    return out;
}

State step(const Basis& basis, const Nonlinearity& nl, const State& state, double dt) {
    if (!(dt > 0.0)) throw InvalidArgument("step: dt must be > 0");
    const LinearPropagator half(basis, 0.5 * dt);
    State out = state;
    half.apply(out.a, out.b);
    kick(basis, nl, out, dt);
    half.apply(out.a, out.b);
    out.t = state.t + dt;
    if (!all_finite(out)) {
        throw IntegrationDiverged("integration diverged after t = " + std::to_string(state.t), state.t);
    }
    return out;
}

State rk4_step(const Basis& basis, const Nonlinearity& nl, const State& state, double dt) {
    if (!(dt > 0.0)) throw InvalidArgument("rk4_step: dt must be > 0");
    const std::size_t n = state.a.size();
    auto rhs = [&](const std::vector<double>& a, const std::vector<double>& b, std::vector<double>& da,
                   std::vector<double>& db) {
        const std::vector<double> g = grad_F(basis, nl, a);
        const auto mu = basis.eigenvalues();
        for (std::size_t k = 0; k < n; ++k) {
            da[k] = b[k];
            db[k] = -b[k] - mu[k] * a[k] - g[k];
        }
    };
    std::vector<double> ka1(n), kb1(n), ka2(n), kb2(n), ka3(n), kb3(n), ka4(n), kb4(n), ta(n), tb(n);
    rhs(state.a, state.b, ka1, kb1);
    for (std::size_t k = 0; k < n; ++k) {
        ta[k] = state.a[k] + 0.5 * dt * ka1[k];
        tb[k] = state.b[k] + 0.5 * dt * kb1[k];
    }
    rhs(ta, tb, ka2, kb2);
    for (std::size_t k = 0; k < n; ++k) {
        ta[k] = state.a[k] + 0.5 * dt * ka2[k];
        tb[k] = state.b[k] + 0.5 * dt * kb2[k];
    }
    rhs(ta, tb, ka3, kb3);
    for (std::size_t k = 0; k < n; ++k) {
        ta[k] = state.a[k] + dt * ka3[k];
        tb[k] = state.b[k] + dt * kb3[k];
    }
    rhs(ta, tb, ka4, kb4);
    State out = state;
    for (std::size_t k = 0; k < n; ++k) {
        out.a[k] += dt / 6.0 * (ka1[k] + 2.0 * ka2[k] + 2.0 * ka3[k] + ka4[k]);
        out.b[k] += dt / 6.0 * (kb1[k] + 2.0 * kb2[k] + 2.0 * kb3[k] + kb4[k]);
    }
    out.t = state.t + dt;
    if (!all_finite(out)) {
        throw IntegrationDiverged("integration diverged after t = " + std::to_string(state.t), state.t);
    }
    return out;
}

std::int64_t step_count(const IntegratorConfig& config) {
    if (!(config.dt > 0.0)) throw InvalidArgument("dt must be > 0");
    const double ratio = config.t_end / config.dt;
    return static_cast<std::int64_t>(std::floor(ratio * (1.0 + 1e-12) + 1e-9));
}

std::vector<std::int64_t> sample_steps(const IntegratorConfig& config) {
    if (config.sample_count < 2) throw InvalidArgument("sample_count must be >= 2");
    const std::int64_t n_steps = step_count(config);
    std::vector<std::int64_t> out{0};
    if (n_steps == 0) return out;

    const int m = config.sample_count - 1;
    for (int i = 1; i <= m; ++i) {
        std::int64_t k = 0;
        if (config.sampling == Sampling::Linear) {
            k = static_cast<std::int64_t>(std::llround(static_cast<double>(i) * static_cast<double>(n_steps) / m));
        } else {
            const double frac = m == 1 ? 1.0 : static_cast<double>(i - 1) / (m - 1);
            k = static_cast<std::int64_t>(std::llround(std::pow(static_cast<double>(n_steps), frac)));
        }
        k = std::clamp<std::int64_t>(k, 1, n_steps);
        if (k > out.back()) out.push_back(k);
    }
    if (out.back() != n_steps) out.push_back(n_steps);
    return out;
}

void run(const Problem& problem, const IntegratorConfig& config, const Observer& observer) {
    if (!(config.dt > 0.0)) throw InvalidArgument("dt must be > 0");
    const std::vector<std::int64_t> samples = sample_steps(config);
    const Basis& basis = problem.basis;
    const Nonlinearity& nl = problem.nonlinearity;
    const double dt = config.dt;

    State state = make_state(basis, problem.initial.a, problem.initial.b, 0.0);
    observer(state);

    const LinearPropagator half(basis, 0.5 * dt);
    std::int64_t k = 0;
    for (std::size_t s = 1; s < samples.size(); ++s) {
        for (; k < samples[s]; ++k) {
            if (config.scheme == Scheme::StrangExactLinear) {
                half.apply(state.a, state.b);
                kick(basis, nl, state, dt);
                half.apply(state.a, state.b);
            } else {
                state = rk4_step(basis, nl, state, dt);
            }
            if (!all_finite(state)) {
                const double last = static_cast<double>(k) * dt;
                std::ostringstream msg;
                msg << "integration diverged: non-finite coefficient at step " << (k + 1)
                    << " (last valid t = " << last << ")";
                throw IntegrationDiverged(msg.str(), last);
            }
            state.t = static_cast<double>(k + 1) * dt;
        }
        observer(state);
    }
}

std::vector<State> run_states(const Problem& problem, const IntegratorConfig& config) {
    std::vector<State> out;
    run(problem, config, [&](const State& s) { out.push_back(s); });
    return out;
}

}  // namespace dqlab
