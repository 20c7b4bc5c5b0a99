#include "dqlab/spectral.hpp"

#include "dqlab/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace dqlab {

namespace {

void require_size(std::span<const double> v, int n, const char* what) {
    if (static_cast<int>(v.size()) != n) {
        throw InvalidArgument(std::string(what) + ": expected " + std::to_string(n) +
                              " coefficients, got " + std::to_string(v.size()));
    }
}

}  // namespace

std::string_view to_string(BasisKind kind) {
    switch (kind) {
    case BasisKind::Neumann1D: return "neumann1d";
    case BasisKind::DirichletShifted1D: return "dirichlet_shifted1d";
    case BasisKind::CustomSpectrum: return "custom";
    case BasisKind::Scalar: return "scalar";
    }
    return "unknown";
}

std::string_view to_string(NonlinearityKind kind) {
    switch (kind) {
    case NonlinearityKind::LocalPower: return "local_power";
    case NonlinearityKind::NonlocalNormPower: return "nonlocal_norm_power";
    case NonlinearityKind::NonlocalRankOne: return "nonlocal_rank_one";
    }
    return "unknown";
}

bool Basis::in_kernel(int k) const noexcept {
    return std::find(kernel_.begin(), kernel_.end(), k) != kernel_.end();
}

void Basis::finalize_spectrum() {
    kernel_.clear();
    nu_ = std::numeric_limits<double>::infinity();
    for (int k = 0; k < n_modes(); ++k) {
        const double mu = eigenvalues_[static_cast<std::size_t>(k)];
        if (mu == 0.0) {
            kernel_.push_back(k);
        } else {
            nu_ = std::min(nu_, mu);
        }
    }
}

double Basis::eigenfunction(int k, double x) const {
    constexpr double pi = std::numbers::pi;
    switch (kind_) {
    case BasisKind::Neumann1D:
        return k == 0 ? 1.0 : std::numbers::sqrt2 * std::cos(k * pi * x);
    case BasisKind::DirichletShifted1D:
        return std::numbers::sqrt2 * std::sin((k + 1) * pi * x);
    case BasisKind::Scalar:
        return 1.0;
    case BasisKind::CustomSpectrum:
        break;
    }
    throw InvalidArgument("custom spectra have no eigenfunctions to evaluate");
}

std::vector<double> Basis::to_grid(std::span<const double> a) const {
    require_size(a, n_modes(), "to_grid");
    if (!has_grid()) throw InvalidArgument("basis has no collocation grid");
    const auto n = static_cast<std::size_t>(n_modes());
    std::vector<double> values(static_cast<std::size_t>(n_grid_), 0.0);
    for (std::size_t j = 0; j < values.size(); ++j) {
        const double* row = &phi_[j * n];
        double s = 0.0;
        for (std::size_t k = 0; k < n; ++k) s += row[k] * a[k];
        values[j] = s;
    }
    return values;
}

std::vector<double> Basis::from_grid(std::span<const double> values) const {
    if (!has_grid()) throw InvalidArgument("basis has no collocation grid");
    require_size(values, n_grid_, "from_grid");
    const auto n = static_cast<std::size_t>(n_modes());
    std::vector<double> a(n, 0.0);
    for (std::size_t j = 0; j < values.size(); ++j) {
        const double* row = &phi_[j * n];
        const double v = values[j];
        for (std::size_t k = 0; k < n; ++k) a[k] += row[k] * v;
    }
    for (double& c : a) c *= weight_;
    return a;
}

Basis build_basis(BasisKind kind, int n_modes, int n_grid) {
    if (n_modes < 1) throw InvalidArgument("build_basis: n_modes must be >= 1");
    if (kind == BasisKind::CustomSpectrum) {
        throw InvalidArgument("build_basis: use custom_basis() for user-supplied spectra");
    }

    Basis basis;
    basis.kind_ = kind;
    constexpr double pi2 = std::numbers::pi * std::numbers::pi;

    if (kind == BasisKind::Scalar) {
        if (n_modes != 1) throw InvalidArgument("build_basis: the scalar basis has exactly one mode");
        n_grid = 1;
        basis.eigenvalues_ = {0.0};
    } else {
        if (n_grid < 2 * n_modes) {
            throw InvalidArgument("build_basis: n_grid = " + std::to_string(n_grid) +
                                  " < 2*n_modes = " + std::to_string(2 * n_modes) + " (aliasing)");
        }
        basis.eigenvalues_.resize(static_cast<std::size_t>(n_modes));
        for (int k = 0; k < n_modes; ++k) {
            const double kk = static_cast<double>(k);
            basis.eigenvalues_[static_cast<std::size_t>(k)] =
                kind == BasisKind::Neumann1D ? kk * kk * pi2 : ((kk + 1.0) * (kk + 1.0) - 1.0) * pi2;
        }
    }

    basis.n_grid_ = n_grid;
    basis.weight_ = 1.0 / n_grid;
    basis.grid_.resize(static_cast<std::size_t>(n_grid));
    for (int j = 0; j < n_grid; ++j) basis.grid_[static_cast<std::size_t>(j)] = (j + 0.5) / n_grid;

    const auto n = static_cast<std::size_t>(n_modes);
    basis.phi_.resize(static_cast<std::size_t>(n_grid) * n);
    for (std::size_t j = 0; j < basis.grid_.size(); ++j) {
        for (int k = 0; k < n_modes; ++k) {
            basis.phi_[j * n + static_cast<std::size_t>(k)] = basis.eigenfunction(k, basis.grid_[j]);
        }
    }
    basis.finalize_spectrum();
    return basis;
}

Basis custom_basis(std::vector<double> eigenvalues) {
    if (eigenvalues.empty()) throw InvalidArgument("custom_basis: empty spectrum");
    for (double mu : eigenvalues) {
        if (!std::isfinite(mu) || mu < 0.0) throw InvalidArgument("custom_basis: eigenvalues must be finite and >= 0");
    }
    std::sort(eigenvalues.begin(), eigenvalues.end());
    Basis basis;
    basis.kind_ = BasisKind::CustomSpectrum;
    basis.eigenvalues_ = std::move(eigenvalues);
    basis.finalize_spectrum();
    return basis;
}

State make_state(const Basis& basis, std::vector<double> a, std::vector<double> b, double t) {
    require_size(a, basis.n_modes(), "make_state(a)");
    require_size(b, basis.n_modes(), "make_state(b)");
    for (std::size_t k = 0; k < a.size(); ++k) {
        if (!std::isfinite(a[k]) || !std::isfinite(b[k])) throw InvalidArgument("make_state: non-finite coefficient");
    }
    return State{t, std::move(a), std::move(b)};
}

Nonlinearity::Nonlinearity(NonlinearityKind kind, double p, std::vector<double> phi)
    : kind_(kind), p_(p), phi_(std::move(phi)) {
    if (!(p > 0.0) || !std::isfinite(p)) throw InvalidArgument("nonlinearity exponent must satisfy p > 0");
}

Nonlinearity Nonlinearity::local_power(double p) { return {NonlinearityKind::LocalPower, p, {}}; }

Nonlinearity Nonlinearity::norm_power(double p) { return {NonlinearityKind::NonlocalNormPower, p, {}}; }

Nonlinearity Nonlinearity::rank_one(double p, std::vector<double> phi, const Basis& basis) {
    require_size(phi, basis.n_modes(), "rank_one(phi)");
    const double len = norm(phi);
    if (!(len > 0.0) || !std::isfinite(len)) throw InvalidArgument("rank_one: phi must be a nonzero finite vector");
    for (double& c : phi) c /= len;
    for (int k : basis.kernel_indices()) {
        if (std::abs(phi[static_cast<std::size_t>(k)]) < 1e-12) {
            throw InvalidArgument("rank_one: phi is orthogonal to kernel mode " + std::to_string(k));
        }
    }
    return {NonlinearityKind::NonlocalRankOne, p, std::move(phi)};
}

std::vector<double> default_rank_one_profile(const Basis& basis) {
    std::vector<double> phi(static_cast<std::size_t>(basis.n_modes()));
    for (std::size_t k = 0; k < phi.size(); ++k) {
        const double kk = static_cast<double>(k) + 1.0;
        phi[k] = 1.0 / (kk * kk);
    }
    const double len = norm(phi);
    for (double& c : phi) c /= len;
    return phi;
}

double dot(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw InvalidArgument("dot: length mismatch");
    double s = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) s += x[k] * y[k];
    return s;
}

double norm(std::span<const double> x) { return std::sqrt(dot(x, x)); }

std::vector<double> apply_A(const Basis& basis, std::span<const double> a) {
    require_size(a, basis.n_modes(), "apply_A");
    std::vector<double> out(a.size());
    const auto mu = basis.eigenvalues();
    for (std::size_t k = 0; k < a.size(); ++k) out[k] = mu[k] * a[k];
    return out;
}

std::vector<double> grad_F(const Basis& basis, const Nonlinearity& nl, std::span<const double> a) {
    require_size(a, basis.n_modes(), "grad_F");
    const double p = nl.p();
    switch (nl.kind()) {
    case NonlinearityKind::LocalPower: {
        std::vector<double> values = basis.to_grid(a);
        for (double& v : values) v = std::pow(std::abs(v), p) * v;
        return basis.from_grid(values);
    }
    case NonlinearityKind::NonlocalNormPower: {
        const double scale = std::pow(norm(a), p);
        std::vector<double> out(a.begin(), a.end());
        for (double& c : out) c *= scale;
        return out;
    }
    case NonlinearityKind::NonlocalRankOne: {
        const double s = dot(a, nl.phi());
        const double g = std::pow(std::abs(s), p) * s;
        std::vector<double> out(nl.phi().begin(), nl.phi().end());
        for (double& c : out) c *= g;
        return out;
    }
    }
    return {};
}

double potential_F(const Basis& basis, const Nonlinearity& nl, std::span<const double> a) {
    require_size(a, basis.n_modes(), "potential_F");
    const double q = nl.p() + 2.0;
    switch (nl.kind()) {
    case NonlinearityKind::LocalPower: {
        const std::vector<double> values = basis.to_grid(a);
        double s = 0.0;
        for (double v : values) s += std::pow(std::abs(v), q);
        return s * basis.grid_weight() / q;
    }
    case NonlinearityKind::NonlocalNormPower:
        return std::pow(norm(a), q) / q;
    case NonlinearityKind::NonlocalRankOne:
        return std::pow(std::abs(dot(a, nl.phi())), q) / q;
    }
    return 0.0;
}

std::vector<double> kernel_part(const Basis& basis, std::span<const double> a) {
    require_size(a, basis.n_modes(), "kernel_part");
    std::vector<double> out(a.size(), 0.0);
    for (int k : basis.kernel_indices()) out[static_cast<std::size_t>(k)] = a[static_cast<std::size_t>(k)];
    return out;
}

std::vector<double> range_part(const Basis& basis, std::span<const double> a) {
    require_size(a, basis.n_modes(), "range_part");
    std::vector<double> out(a.begin(), a.end());
    for (int k : basis.kernel_indices()) out[static_cast<std::size_t>(k)] = 0.0;
    return out;
}

double norm_A12(const Basis& basis, std::span<const double> a) {
    require_size(a, basis.n_modes(), "norm_A12");
    const auto mu = basis.eigenvalues();
    double s = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) s += mu[k] * a[k] * a[k];
    return std::sqrt(s);
}

double norm_D12(const Basis& basis, std::span<const double> a) {
    const double u = norm(a);
    const double au = norm_A12(basis, a);
    return std::sqrt(u * u + au * au);
}

Norms norms(const Basis& basis, const State& state) {
    require_size(state.a, basis.n_modes(), "norms(a)");
    require_size(state.b, basis.n_modes(), "norms(b)");
    double pu2 = 0.0, qu2 = 0.0;
    for (std::size_t k = 0; k < state.a.size(); ++k) {
        const double c2 = state.a[k] * state.a[k];
        if (basis.in_kernel(static_cast<int>(k))) pu2 += c2; else qu2 += c2;
    }
    Norms n;
    n.norm_Pu = std::sqrt(pu2);
    n.norm_Qu = std::sqrt(qu2);
    n.norm_u = std::sqrt(pu2 + qu2);
    n.norm_v = norm(state.b);
    n.norm_A12u = norm_A12(basis, state.a);
    return n;
}

}  // namespace dqlab
