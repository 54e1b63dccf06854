#pragma once

#include "cosym/curvature.hpp"

#include <Eigen/Dense>

#include <functional>
#include <span>
#include <vector>

namespace cosym {

/// Fiber of the null parallel distribution cut out by the Weyl image at a point.
struct DistributionBasis {
    std::vector<double> point;
    int d = 0;
    /// n x d, columns are contravariant spanning vectors.
    Eigen::MatrixXd basis;
    /// basis^T g basis.
    Eigen::MatrixXd gram;
    RankInfo rank_info;
};

/// Weyl tensors below this multiple of max |R| count as zero.
inline constexpr double kWeylZeroThreshold = 1e-10;

/// Vectors u whose dual 1-form divides every W(e_i, e_j, ., .).
DistributionBasis olszak_fiber(const CurvatureBundle& bundle);

/// Rank of W acting on 2-forms.
int weyl_rank(const CurvatureBundle& bundle);

struct SpanningResult {
    /// Largest distance from W(e_i,e_j)e_k to span(basis), relative to the largest such vector.
    double residual = 0.0;
    int rank = 0;
};

/// Requires d == 2 (PreconditionD2).
SpanningResult spanning_image_check(const CurvatureBundle& bundle, const DistributionBasis& fiber);

struct OmegaForm {
    std::vector<double> point;
    DenseTensor omega;
    /// max |u^l R_jkl^s - Omega_jk u^s| / (max|R| max|u|).
    double residual = 0.0;
    /// max |rho_jl u^l + u^s Omega_sj| / (max|R| max|u|).
    double contraction_residual = 0.0;
};

inline constexpr double kOmegaTolerance = 1e-8;

/// Least-squares Omega in u^l R_jkl^s = Omega_jk u^s; throws IdentityNotSatisfied above tolerance.
OmegaForm curvature_form_omega(const CurvatureBundle& bundle, std::span<const double> u);

/// Basis (columns) of the g-orthogonal complement of the fiber.
Eigen::MatrixXd orthogonal_complement(const DistributionBasis& fiber, const DenseTensor& g);

using FiberFunction = std::function<DistributionBasis(std::span<const double>)>;

/// Fiber computed from the field's own curvature.
FiberFunction fiber_function(const MetricField& field);

/// Sine of the largest principal angle between the column spans.
double principal_angle_sine(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b);

struct ParallelismResult {
    double residual = 0.0;
    std::vector<double> worst_point;
};

/// One explicit Euler transport step of the fiber along each coordinate
/// direction, compared with the fiber at the displaced point.
ParallelismResult parallelism_check(const MetricField& field, const FiberFunction& fiber,
                                    std::span<const std::vector<double>> points, double step);

} // namespace cosym
