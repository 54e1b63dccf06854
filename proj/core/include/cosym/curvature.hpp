#pragma once

#include "cosym/jet_chart.hpp"
#include "cosym/tensor.hpp"

#include <span>
#include <vector>

namespace cosym {

/// Levi-Civita connection and its coordinate derivatives. Derivative slots
/// come last: dGamma(k,i,j,m) = d_m Gamma^k_ij.
struct ConnectionCoefficients {
    int n = 0;
    int derivative_order = 0;
    DenseTensor gamma;
    DenseTensor dgamma;
    DenseTensor d2gamma;
};

/// Requires jet order >= 1; derivative_order (0..2) defaults to jet order - 1.
ConnectionCoefficients christoffel(const MetricJet& jet, int derivative_order = -1);

/// Riemann tensor in mixed layout R_jkl^s = [R(d_j, d_k) d_l]^s with
/// R(u,v) = [nabla_v, nabla_u] + nabla_[u,v], and its lowered form R_jklm = R_jkl^s g_sm.
struct RiemannTensors {
    DenseTensor mixed;
    DenseTensor covariant;
};

RiemannTensors riemann(const ConnectionCoefficients& conn, const DenseTensor& g);

/// Mixed curvature of any torsion-free connection (no metric needed).
DenseTensor affine_riemann(const ConnectionCoefficients& conn);

/// rho_jl = R_jsl^s.
DenseTensor ricci_contraction(const DenseTensor& riemann_mixed);

struct RicciData {
    DenseTensor rho;
    double s = 0.0;
    DenseTensor sigma;
};

/// rho_jl = R_jsl^s, s = tr_g rho, sigma = rho - s g / (2n - 2).
RicciData ricci_scalar_schouten(const DenseTensor& riemann_mixed, const DenseTensor& g, const DenseTensor& g_inverse);

/// W = R - (n-2)^-1 g ^ sigma. Throws DimensionTooSmall for n <= 2.
DenseTensor weyl(const DenseTensor& riemann_covariant, const DenseTensor& g, const DenseTensor& sigma);

/// nabla T with the derivative slot last; dT holds coordinate derivatives of T
/// (derivative slot last, marked covariant).
DenseTensor covariant_derivative(const DenseTensor& t, const ConnectionCoefficients& conn, const DenseTensor& dT);

struct CurvatureBundle {
    int n = 0;
    std::vector<double> point;
    bool has_derivatives = false;
    DenseTensor g;
    DenseTensor g_inverse;
    ConnectionCoefficients conn;
    DenseTensor riemann_mixed;
    DenseTensor riemann;
    DenseTensor rho;
    double s = 0.0;
    DenseTensor sigma;
    /// Empty for n <= 2.
    DenseTensor weyl;
    DenseTensor nabla_riemann;
    DenseTensor nabla_weyl;
    DenseTensor nabla_rho;

    /// max |R|, or 1 when R vanishes; the scale for relative residuals.
    [[nodiscard]] double scale() const;
};

/// Needs jet order >= 2; order 3 adds nabla R, nabla W, nabla rho.
CurvatureBundle compute_curvature(const MetricJet& jet);

/// Curvature (without covariant derivatives) from Christoffel symbols of
/// order-1 jets, differentiated by central differences of width `step`.
CurvatureBundle curvature_by_christoffel_differences(const JetSource& source, std::span<const double> point,
                                                     double step);

/// nabla W from central differences of W (order-2 jets) plus connection terms.
DenseTensor nabla_weyl_by_differences(const JetSource& source, std::span<const double> point, double step);

/// Largest |cyclic sum over the first three slots|.
double first_bianchi_defect(const DenseTensor& t);

/// Largest defect of antisymmetry in (0,1), (2,3) and pair exchange.
double pair_symmetry_defect(const DenseTensor& t);

/// Largest |trace| of a rank-4 tensor over any slot pair.
double trace_defect(const DenseTensor& t, const DenseTensor& g_inverse);

/// (div W)_jkl = g^ip nabla_p W_ijkl.
DenseTensor weyl_divergence(const DenseTensor& nabla_weyl, const DenseTensor& g_inverse);

/// max |nabla_p rho_jl - nabla_j rho_pl|.
double codazzi_defect(const DenseTensor& nabla_rho);

} // namespace cosym
