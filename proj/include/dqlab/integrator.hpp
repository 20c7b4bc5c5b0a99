#pragma once

#include "dqlab/spectral.hpp"

#include <cstdint>
#include <functional>
#include <string_view>
#include <vector>

namespace dqlab {

enum class Sampling { Linear, Logarithmic };
enum class Scheme { StrangExactLinear, RK4Reference };

std::string_view to_string(Sampling s);
std::string_view to_string(Scheme s);

struct IntegratorConfig {
    double dt = 0.05;
    double t_end = 1e4;
    Sampling sampling = Sampling::Logarithmic;
    int sample_count = 400;
    Scheme scheme = Scheme::StrangExactLinear;
};

/// Throws InvalidArgument unless dt > 0, dt <= t_end and sample_count >= 2.
void validate(const IntegratorConfig& config);

struct Problem {
    Basis basis;
    Nonlinearity nonlinearity;
    State initial;
};

/// Exact flow of the damped oscillators w'' + w' + mu w = 0 over time h,
/// applied mode by mode. Coefficients are cached per (basis, h).
class LinearPropagator {
public:
    LinearPropagator(const Basis& basis, double h);

    double h() const noexcept { return h_; }
    void apply(std::vector<double>& a, std::vector<double>& b) const;

    struct Entry {
        double aa, ab, ba, bb;  // [a;b] <- [[aa,ab],[ba,bb]] [a;b]
    };
    static Entry coefficients(double mu, double h);

private:
    double h_;
    std::vector<Entry> entries_;
};

State linear_half_step(const Basis& basis, const State& state, double h);

/// One Strang step: half linear flow, kick b -= dt grad F(a), half linear flow.
State step(const Basis& basis, const Nonlinearity& nl, const State& state, double dt);

/// Classical RK4 on the first-order system; cross-validation only.
State rk4_step(const Basis& basis, const Nonlinearity& nl, const State& state, double dt);

/// Number of steps taken: floor(t_end/dt), tolerant of round-off in the ratio.
std::int64_t step_count(const IntegratorConfig& config);

/// Strictly increasing step indices at which observers fire. Always starts
/// at 0. Logarithmic sampling places indices geometrically between 1 and the
/// last step; duplicates after rounding are dropped, so early samples can be
/// fewer than requested.
std::vector<std::int64_t> sample_steps(const IntegratorConfig& config);

using Observer = std::function<void(const State&)>;

/// Integrates `problem` to t_end and calls `observer` at each sample step,
/// with state.t = step_index * dt. Throws IntegrationDiverged on a
/// non-finite coefficient.
void run(const Problem& problem, const IntegratorConfig& config, const Observer& observer);

std::vector<State> run_states(const Problem& problem, const IntegratorConfig& config);

}  // namespace dqlab
