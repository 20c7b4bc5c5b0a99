#pragma once

// Truncated eigenbasis representation of u'' + u' + Au + grad F(u) = 0.
//
// A is diagonal in the basis, so u is stored as a coefficient vector `a`
// (u = sum_k a_k e_k) and u' as `b`. The 1D presets live on (0,1) with
// L2-orthonormal eigenfunctions, so every H-norm is a plain coefficient sum.
// Local nonlinearities are evaluated on an oversampled midpoint grid.

#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace dqlab {

enum class BasisKind { Neumann1D, DirichletShifted1D, CustomSpectrum, Scalar };

std::string_view to_string(BasisKind kind);

class Basis {
public:
    BasisKind kind() const noexcept { return kind_; }
    int n_modes() const noexcept { return static_cast<int>(eigenvalues_.size()); }
    /// Number of collocation points; 0 for CustomSpectrum (no spatial grid).
    int n_grid() const noexcept { return n_grid_; }
    bool has_grid() const noexcept { return n_grid_ > 0; }

    std::span<const double> eigenvalues() const noexcept { return eigenvalues_; }
    double eigenvalue(int k) const { return eigenvalues_.at(static_cast<std::size_t>(k)); }
    std::span<const int> kernel_indices() const noexcept { return kernel_; }
    bool in_kernel(int k) const noexcept;

    /// Smallest nonzero eigenvalue. +infinity when every mode is in the kernel.
    double nu() const noexcept { return nu_; }

    std::span<const double> grid_points() const noexcept { return grid_; }
    /// Uniform quadrature weight 1/M of the midpoint rule.
    double grid_weight() const noexcept { return weight_; }

    /// Analytic eigenfunction e_k(x); only meaningful for the 1D/scalar kinds.
    double eigenfunction(int k, double x) const;

    /// u(x_j) for all grid points.
    std::vector<double> to_grid(std::span<const double> a) const;
    /// Quadrature projection of grid values back onto the modes.
    std::vector<double> from_grid(std::span<const double> values) const;

private:
    friend Basis build_basis(BasisKind kind, int n_modes, int n_grid);
    friend Basis custom_basis(std::vector<double> eigenvalues);

    void finalize_spectrum();

    BasisKind kind_ = BasisKind::Scalar;
    std::vector<double> eigenvalues_;
    std::vector<int> kernel_;
    double nu_ = 0.0;
    int n_grid_ = 0;
    double weight_ = 0.0;
    std::vector<double> grid_;
    std::vector<double> phi_;  // n_grid x n_modes, row-major: phi_[j*N + k] = e_k(x_j)
};

/// Preset bases. Neumann1D: mu_k = (k pi)^2, e_0 = 1, e_k = sqrt2 cos(k pi x).
/// DirichletShifted1D: A = -Laplacian - pi^2, mu_k = ((k+1)^2 - 1) pi^2,
/// e_k = sqrt2 sin((k+1) pi x). Scalar: one mode with mu = 0 and a single
/// collocation point, i.e. the ODE v'' + v' + |v|^p v = 0.
/// Requires n_modes >= 1 and n_grid >= 2 n_modes for the 1D kinds.
Basis build_basis(BasisKind kind, int n_modes, int n_grid);

/// Diagonal operator with user-supplied nonnegative spectrum (sorted on
/// construction). Has no grid, so only nonlocal nonlinearities apply.
Basis custom_basis(std::vector<double> eigenvalues);

struct State {
    double t = 0.0;
    std::vector<double> a;  // coefficients of u
    std::vector<double> b;  // coefficients of u'
};

State make_state(const Basis& basis, std::vector<double> a, std::vector<double> b, double t = 0.0);

enum class NonlinearityKind { LocalPower, NonlocalNormPower, NonlocalRankOne };

std::string_view to_string(NonlinearityKind kind);

/// grad F(u) = |u|^p u pointwise (LocalPower), |u|^p u with the H-norm
/// (NonlocalNormPower), or |<u,phi>|^p <u,phi> phi (NonlocalRankOne).
class Nonlinearity {
public:
    static Nonlinearity local_power(double p);
    static Nonlinearity norm_power(double p);
    /// phi is normalized to unit length; it must not be orthogonal to any
    /// kernel mode of `basis`.
    static Nonlinearity rank_one(double p, std::vector<double> phi, const Basis& basis);

    NonlinearityKind kind() const noexcept { return kind_; }
    double p() const noexcept { return p_; }
    std::span<const double> phi() const noexcept { return phi_; }

private:
    Nonlinearity(NonlinearityKind kind, double p, std::vector<double> phi);

    NonlinearityKind kind_;
    double p_;
    std::vector<double> phi_;
};

/// phi_k proportional to 1/(k+1)^2, unit length.
std::vector<double> default_rank_one_profile(const Basis& basis);

double dot(std::span<const double> x, std::span<const double> y);
double norm(std::span<const double> x);

std::vector<double> apply_A(const Basis& basis, std::span<const double> a);
std::vector<double> grad_F(const Basis& basis, const Nonlinearity& nl, std::span<const double> a);
double potential_F(const Basis& basis, const Nonlinearity& nl, std::span<const double> a);

/// Kernel (P) and range (Q) parts of a coefficient vector.
std::vector<double> kernel_part(const Basis& basis, std::span<const double> a);
std::vector<double> range_part(const Basis& basis, std::span<const double> a);

/// |A^{1/2} u|.
double norm_A12(const Basis& basis, std::span<const double> a);
/// |u|_{D(A^{1/2})} = (|u|^2 + |A^{1/2}u|^2)^{1/2}.
double norm_D12(const Basis& basis, std::span<const double> a);

struct Norms {
    double norm_u = 0.0;
    double norm_v = 0.0;
    double norm_A12u = 0.0;
    double norm_Pu = 0.0;
    double norm_Qu = 0.0;
};

Norms norms(const Basis& basis, const State& state);

}  // namespace dqlab
