#include "cosym/olszak.hpp"

#include "cosym/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace cosym {

namespace {

std::size_t sz(int k)
{
    return static_cast<std::size_t>(k);
}

bool weyl_vanishes(const CurvatureBundle& b)
{
    return b.weyl.max_abs() <= kWeylZeroThreshold * b.scale();
}

Eigen::MatrixXd orthonormal_columns(const Eigen::MatrixXd& m)
{
    if (m.cols() == 0) {
        return m;
    }
    const Eigen::JacobiSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeThinU);
    const auto r = numerical_rank(m).rank;
    return svd.matrixU().leftCols(r);
}

} // namespace

DistributionBasis olszak_fiber(const CurvatureBundle& b)
{
    const int n = b.n;
    if (n < 4) {
        throw Error(Errc::DimensionTooSmall, "the distribution is defined here for n >= 4");
    }
    DistributionBasis out;
    out.point = b.point;
    const Eigen::MatrixXd g = b.g.as_matrix();
    if (weyl_vanishes(b)) {
        out.d = n;
        out.basis = Eigen::MatrixXd::Identity(n, n);
        out.gram = g;
        return out;
    }

    std::vector<DenseTensor> forms;
    for (const auto& [i, j] : two_form_basis(n)) {
        DenseTensor omega = DenseTensor::covariant(n, 2);
        for (int k = 0; k < n; ++k) {
            for (int l = 0; l < n; ++l) {
                omega(k, l) = b.weyl(i, j, k, l);
            }
        }
        forms.push_back(std::move(omega));
    }
    const Eigen::MatrixXd system = wedge_divisibility_system(forms);
    out.rank_info = numerical_rank(system);
    if (out.rank_info.ambiguous) {
        const int strict = n - out.rank_info.rank;
        throw Error(Errc::RankDeficiencyAmbiguous,
                    "kernel dimension undecided between " + std::to_string(std::max(strict - 1, 0)) + " and " +
                        std::to_string(std::min(strict + 1, n)) + " (d = " + std::to_string(strict) +
                        " at the nominal cutoff)");
    }
    const Eigen::MatrixXd xi = null_space(system);
    out.d = static_cast<int>(xi.cols());
    out.basis = g.inverse() * xi;
    out.gram = out.basis.transpose() * g * out.basis;
    return out;
}

int weyl_rank(const CurvatureBundle& b)
{
    if (b.n < 4) {
        throw Error(Errc::DimensionTooSmall, "Weyl rank is computed for n >= 4");
    }
    if (weyl_vanishes(b)) {
        return 0;
    }
    const auto info = numerical_rank(two_form_operator(b.weyl, b.g_inverse));
    if (info.ambiguous) {
        throw Error(Errc::RankDeficiencyAmbiguous,
                    "Weyl operator rank undecided near " + std::to_string(info.rank));
    }
    return info.rank;
}

SpanningResult spanning_image_check(const CurvatureBundle& b, const DistributionBasis& fiber)
{
    if (fiber.d != 2) {
        throw Error(Errc::PreconditionD2, "spanning check needs d = 2, got d = " + std::to_string(fiber.d));
    }
    const int n = b.n;
    Eigen::MatrixXd vectors(n, n * n * n);
    Eigen::Index col = 0;
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            for (int k = 0; k < n; ++k) {
                for (int s = 0; s < n; ++s) {
                    double v = 0.0;
                    for (int m = 0; m < n; ++m) {
                        v += b.weyl(i, j, k, m) * b.g_inverse(m, s);
                    }
                    vectors(s, col) = v;
                }
                ++col;
            }
        }
    }
    const Eigen::MatrixXd q = orthonormal_columns(fiber.basis);
    const Eigen::MatrixXd off = vectors - q * (q.transpose() * vectors);
    const double largest = vectors.colwise().norm().maxCoeff();
    SpanningResult out;
    out.residual = largest > 0.0 ? off.colwise().norm().maxCoeff() / largest : 0.0;
    out.rank = numerical_rank(vectors).rank;
    return out;
}

OmegaForm curvature_form_omega(const CurvatureBundle& b, std::span<const double> u)
{
    const int n = b.n;
    if (static_cast<int>(u.size()) != n) {
        throw Error(Errc::DimensionMismatch, "vector length differs from the dimension");
    }
    double uu = 0.0;
    double umax = 0.0;
    for (double c : u) {
        uu += c * c;
        umax = std::max(umax, std::abs(c));
    }
    if (uu == 0.0) {
        throw Error(Errc::IdentityNotSatisfied, "u = 0 spans no line");
    }
    OmegaForm out;
    out.point = b.point;
    out.omega = DenseTensor::covariant(n, 2);
    std::vector<double> x(sz(n));
    const double scale = b.scale() * umax;
    double worst = 0.0;
    for (int j = 0; j < n; ++j) {
        for (int k = 0; k < n; ++k) {
            double dot = 0.0;
            for (int s = 0; s < n; ++s) {
                double v = 0.0;
                for (int l = 0; l < n; ++l) {
                    v += u[sz(l)] * b.riemann_mixed(j, k, l, s);
                }
                x[sz(s)] = v;
                dot += v * u[sz(s)];
            }
            const double omega = dot / uu;
            out.omega(j, k) = omega;
            for (int s = 0; s < n; ++s) {
                worst = std::max(worst, std::abs(x[sz(s)] - omega * u[sz(s)]));
            }
        }
    }
    for (int j = 0; j < n; ++j) {
        for (int k = j; k < n; ++k) {
            const double a = 0.5 * (out.omega(j, k) - out.omega(k, j));
            out.omega(j, k) = a;
            out.omega(k, j) = -a;
        }
    }
    out.residual = worst / scale;
    if (!(out.residual < kOmegaTolerance)) {
        throw Error(Errc::IdentityNotSatisfied, "u^l R_jkl^s = Omega_jk u^s fails with residual " +
                                                    std::to_string(out.residual));
    }
    double contraction = 0.0;
    for (int j = 0; j < n; ++j) {
        double v = 0.0;
        for (int l = 0; l < n; ++l) {
            v += b.rho(j, l) * u[sz(l)] + u[sz(l)] * out.omega(l, j);
        }
        contraction = std::max(contraction, std::abs(v));
    }
    out.contraction_residual = contraction / scale;
    return out;
}

Eigen::MatrixXd orthogonal_complement(const DistributionBasis& fiber, const DenseTensor& g)
{
    const Eigen::MatrixXd pairing = fiber.basis.transpose() * g.as_matrix();
    return null_space(pairing);
}

FiberFunction fiber_function(const MetricField& field)
{
    return [field](std::span<const double> x) { return olszak_fiber(compute_curvature(evaluate_jet(field, x, 2))); };
}

double principal_angle_sine(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b)
{
    const Eigen::MatrixXd qa = orthonormal_columns(a);
    const Eigen::MatrixXd qb = orthonormal_columns(b);
    if (qa.cols() == 0) {
        return 0.0;
    }
    const Eigen::MatrixXd off = qa - qb * (qb.transpose() * qa);
    const Eigen::JacobiSVD<Eigen::MatrixXd> svd(off);
    return svd.singularValues()(0);
}

ParallelismResult parallelism_check(const MetricField& field, const FiberFunction& fiber,
                                    std::span<const std::vector<double>> points, double step)
{
    ParallelismResult out;
    const int n = field.dim();
    for (const auto& x : points) {
        const DistributionBasis here = fiber(x);
        if (here.d == n) {
            continue;
        }
        const auto conn = christoffel(evaluate_jet(field, x, 1), 0);
        for (int m = 0; m < n; ++m) {
            std::vector<double> moved = x;
            moved[sz(m)] += step;
            const DistributionBasis there = fiber(moved);
            if (there.d != here.d) {
                throw Error(Errc::FiberDimensionJump, "d changes from " + std::to_string(here.d) + " to " +
                                                          std::to_string(there.d) + " along coordinate " +
                                                          std::to_string(m));
            }
            Eigen::MatrixXd transported = here.basis;
            for (Eigen::Index c = 0; c < here.basis.cols(); ++c) {
                for (int k = 0; k < n; ++k) {
                    double v = 0.0;
                    for (int j = 0; j < n; ++j) {
                        v += conn.gamma(k, m, j) * here.basis(j, c);
                    }
                    transported(k, c) -= step * v;
                }
            }
            const double angle = principal_angle_sine(transported, there.basis);
            if (angle > out.residual || out.worst_point.empty()) {
                out.residual = std::max(out.residual, angle);
                out.worst_point = x;
            }
        }
    }
    return out;
}

} // namespace cosym
