#pragma once

#include "cosym/curvature.hpp"
#include "cosym/jet_chart.hpp"
#include "cosym/polynomial.hpp"

#include <Eigen/Dense>

#include <array>
#include <span>
#include <string>
#include <vector>

namespace cosym {

// ---------------------------------------------------------------------------
// d = 1 family on I x R x V, chart (t, s, psi^1..psi^{n-2}).

struct D1FamilySpec {
    int n = 4;
    Eigen::MatrixXd gram;
    PiecewisePolynomial f;
    Eigen::MatrixXd A;
    std::vector<Interval> domain;
};

struct OperatorDiagnostics {
    double trace = 0.0;
    /// max |(gram A) - (gram A)^T|.
    double asymmetry = 0.0;
    /// Frobenius norm of A.
    double norm = 0.0;
    bool pass = false;
    std::string reason;
};

/// A must be nonzero, trace-free and self-adjoint for gram.
OperatorDiagnostics validate_operator(const Eigen::MatrixXd& A, const Eigen::MatrixXd& gram);

/// Throws SpecInvariantViolated naming the failed invariant.
void validate(const D1FamilySpec& spec);

/// g_tt = f(t)<psi,psi> + <A psi,psi>, g_ts = 1/2, psi block = gram.
/// `check` = false skips validation (used for degenerate controls).
MetricField build_d1_metric(const D1FamilySpec& spec, bool check = true);

/// kappa at a chart point.
double d1_kappa(const D1FamilySpec& spec, std::span<const double> x);

/// A = gram^-1 S - tr(gram^-1 S)/(n-2) I for a symmetric S; always admissible unless zero.
Eigen::MatrixXd admissible_operator(const Eigen::MatrixXd& gram, const Eigen::MatrixXd& S);

// ---------------------------------------------------------------------------
// Surface data and the d = 2 family on T*Sigma x V, chart (x^1, x^2, p_1, p_2, v...).

using SurfacePolynomial = Polynomial; // in (x^1, x^2)
using SurfaceMatrix = std::array<std::array<SurfacePolynomial, 2>, 2>;

struct SurfaceConnectionSpec {
    /// gamma[k][i][j] = Gamma^k_ij.
    std::array<SurfaceMatrix, 2> gamma;
    SurfaceMatrix alpha;
    /// Contravariant symmetric T^jk.
    SurfaceMatrix T;
    double epsilon = 1.0;
};

struct D2FamilySpec {
    SurfaceConnectionSpec surface;
    int n = 4;
    Eigen::MatrixXd gramV;
    std::vector<Interval> domain;
};

SurfaceMatrix zero_surface_matrix();

/// rho_jl = R_jsl^s of the surface connection, symbolically.
SurfaceMatrix surface_ricci(const SurfaceConnectionSpec& surface);

/// tau_jk = alpha_jl alpha_km T^lm.
SurfaceMatrix tau_from_T(const SurfaceMatrix& T, const SurfaceMatrix& alpha);

/// Connection of the surface at x with derivative_order 0..2.
ConnectionCoefficients surface_connection(const SurfaceConnectionSpec& surface, std::span<const double> x,
                                          int derivative_order);

/// Ricci tensor of the surface from its curvature at x (numeric route).
DenseTensor surface_ricci_at(const SurfaceConnectionSpec& surface, std::span<const double> x);

/// max |nabla alpha| at x, relative to max |alpha|.
double equiaffine_residual(const SurfaceConnectionSpec& surface, std::span<const double> x);

/// div div T + (rho, T) - epsilon at x.
double divergence_residual(const SurfaceConnectionSpec& surface, std::span<const double> x);

/// max |nabla_j rho_kl - nabla_k rho_jl| at x; throws NotEquiaffine when nabla alpha != 0.
double projective_flatness_residual(const SurfaceConnectionSpec& surface, std::span<const double> x);

/// max |nabla rho| at x.
double surface_ricci_parallel_residual(const SurfaceConnectionSpec& surface, std::span<const double> x);

/// Checks symmetry, alpha != 0, equiaffinity, projective flatness and the
/// divergence equation on a grid over the x-box. Throws SpecInvariantViolated.
void validate(const SurfaceConnectionSpec& surface, Interval x1, Interval x2);
void validate(const D2FamilySpec& spec);

/// 2 dx^j dp_j - 2 p_l Gamma^l_jk dx^j dx^k on (x^1, x^2, p_1, p_2).
MetricField riemann_extension(const SurfaceConnectionSpec& surface, std::vector<Interval> domain);

/// h - 2 tau + gramV - <v,v> rho on (x^1, x^2, p_1, p_2, v...).
MetricField build_d2_metric(const D2FamilySpec& spec, bool check = true);

// ---------------------------------------------------------------------------
// Shipped fixtures.

/// gram = identity, A = diag(1, -1, 0, ...), f(t) = t, box [-1,1]^n.
D1FamilySpec d1_example(int n = 4);

/// f = 0 for t <= 0, t^4 for t > 0.
PiecewisePolynomial piecewise_flat_then_quartic();

/// Gamma = 0, epsilon = 1, T^11 = (x^1)^2 / 2.
SurfaceConnectionSpec surface_flat_fixture();

/// Only Gamma^2_11 = x^2: rho = dx^1 dx^1, D-parallel. T^22 = eps (x^2)^2 / 2.
SurfaceConnectionSpec surface_parallel_fixture(double epsilon = 1.0);

/// Only Gamma^2_11 = x^1 x^2: rho = x^1 dx^1 dx^1, not D-parallel. T^22 = eps (x^2)^2 / 2.
SurfaceConnectionSpec surface_nonparallel_fixture(double epsilon = 1.0);

/// Surface data with V = R^{n-4} (identity gram) on [-1,1]^n.
D2FamilySpec d2_example(const SurfaceConnectionSpec& surface, int n = 4);

} // namespace cosym
