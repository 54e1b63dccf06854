#include "cosym/errors.hpp"
#include "cosym/families.hpp"
#include "cosym/olszak.hpp"
#include "support/generators.hpp"

#include <gtest/gtest.h>

using namespace cosym;
using cosym::testing::Gen;

namespace {

template <class F>
Errc code_of(F&& fn)
{
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    ADD_FAILURE() << "no cosym::Error thrown";
    return Errc::IoFailure;
}

CurvatureBundle at(const MetricField& g, const std::vector<double>& x) { return compute_curvature(evaluate_jet(g, x, 3)); }

std::vector<MetricField> d2_metrics(int n)
{
    return {build_d2_metric(d2_example(surface_flat_fixture(), n)),
            build_d2_metric(d2_example(surface_parallel_fixture(1.0), n)),
            build_d2_metric(d2_example(surface_nonparallel_fixture(-1.0), n))};
}

} // namespace

TEST(OlszakFiber, FlatMetricIsWholeSpace)
{
    const auto g = cosym::testing::flat_metric({-1, 1, 1, 1, 1});
    const auto b = at(g, std::vector<double>(5, 0.0));
    const auto f = olszak_fiber(b);
    EXPECT_EQ(f.d, 5);
    EXPECT_EQ(weyl_rank(b), 0);
    EXPECT_EQ(code_of([&] { spanning_image_check(b, f); }), Errc::PreconditionD2);
    const std::vector<double> u{0, 1, 0, 0, 0};
    const auto om = curvature_form_omega(b, u);
    EXPECT_EQ(om.omega.max_abs(), 0.0);
}

TEST(OlszakFiber, NeedsDimensionFour)
{
    const auto g = cosym::testing::flat_metric({1, 1, 1});
    EXPECT_EQ(code_of([&] { olszak_fiber(at(g, std::vector<double>(3, 0.0))); }), Errc::DimensionTooSmall);
}

TEST(OlszakFiber, D1FamilyFiberIsSpannedByDs)
{
    Gen gen(2);
    for (int n = 4; n <= 6; ++n) {
        const auto g = build_d1_metric(d1_example(n));
        for (int k = 0; k < 10; ++k) {
            const auto b = at(g, gen.point(cosym::testing::cube(n, 0.9)));
            const auto f = olszak_fiber(b);
            ASSERT_EQ(f.d, 1);
            Eigen::MatrixXd ds = Eigen::MatrixXd::Zero(n, 1);
            ds(1, 0) = 1.0;
            EXPECT_LT(principal_angle_sine(f.basis, ds), 1e-9);
            EXPECT_GE(weyl_rank(b), 2);
            EXPECT_EQ(code_of([&] { spanning_image_check(b, f); }), Errc::PreconditionD2);
        }
    }
}

TEST(OlszakFiber, D2FamilyHasDimensionTwoAndRankOne)
{
    Gen gen(3);
    for (int n = 4; n <= 6; ++n) {
        for (const auto& g : d2_metrics(n)) {
            for (int k = 0; k < 5; ++k) {
                const auto b = at(g, gen.point(cosym::testing::cube(n, 0.9)));
                const auto f = olszak_fiber(b);
                ASSERT_EQ(f.d, 2);
                EXPECT_EQ(weyl_rank(b), 1);
                const auto span = spanning_image_check(b, f);
                EXPECT_LT(span.residual, 1e-9);
                EXPECT_EQ(span.rank, 2);
                // The fiber is totally null.
                EXPECT_LT(f.gram.cwiseAbs().maxCoeff(), 1e-12);
            }
        }
    }
}

TEST(OlszakFiber, ComplementIsOrthogonal)
{
    const auto g = build_d2_metric(d2_example(surface_nonparallel_fixture(), 5));
    const auto b = at(g, {0.3, -0.2, 0.5, 0.1, -0.6});
    const auto f = olszak_fiber(b);
    const Eigen::MatrixXd perp = orthogonal_complement(f, b.g);
    EXPECT_EQ(perp.cols(), 3);
    const Eigen::MatrixXd cross = f.basis.transpose() * b.g.as_matrix() * perp;
    EXPECT_LT(cross.cwiseAbs().maxCoeff(), 1e-12);
}

TEST(CurvatureForm, D1FamilyOmegaVanishesAndContractionHolds)
{
    Gen gen(4);
    const auto g = build_d1_metric(d1_example(5));
    for (int k = 0; k < 20; ++k) {
        const auto b = at(g, gen.point(cosym::testing::cube(5, 0.9)));
        const std::vector<double> u{0, 2, 0, 0, 0};
        const auto om = curvature_form_omega(b, u);
        EXPECT_LT(om.residual, 1e-8);
        EXPECT_LT(om.omega.max_abs() / b.scale(), 1e-8);
        EXPECT_LT(om.contraction_residual, 1e-9);
    }
}

TEST(CurvatureForm, RejectsVectorsThatSpanNoInvariantLine)
{
    const auto g = build_d1_metric(d1_example(4));
    const auto b = at(g, {0.5, 0.1, 0.4, -0.3});
    const std::vector<double> u{0, 0, 1, 0};
    EXPECT_EQ(code_of([&] { curvature_form_omega(b, u); }), Errc::IdentityNotSatisfied);
    const std::vector<double> zero(4, 0.0);
    EXPECT_EQ(code_of([&] { curvature_form_omega(b, zero); }), Errc::IdentityNotSatisfied);
}

TEST(Parallelism, FlatMetricIsExactlyZero)
{
    const auto g = cosym::testing::flat_metric({-1, 1, 1, 1});
    const std::vector<std::vector<double>> pts{{0.1, 0.2, 0.3, 0.4}};
    EXPECT_EQ(parallelism_check(g, fiber_function(g), pts, 1e-4).residual, 0.0);
}

TEST(Parallelism, FamiliesBelowOneMicro)
{
    Gen gen(5);
    std::vector<MetricField> fields{build_d1_metric(d1_example(5))};
    for (auto& g : d2_metrics(5)) {
        fields.push_back(g);
    }
    for (const auto& g : fields) {
        std::vector<std::vector<double>> pts;
        for (int k = 0; k < 10; ++k) {
            pts.push_back(gen.point(cosym::testing::cube(5, 0.9)));
        }
        EXPECT_LT(parallelism_check(g, fiber_function(g), pts, 1e-4).residual, 1e-6);
    }
}

// A fiber that is not parallel is detected, and the residual shrinks with the step.
TEST(Parallelism, DetectsNonParallelFiberField)
{
    const auto g = cosym::testing::flat_metric({-1, 1, 1, 1});
    const FiberFunction rotating = [](std::span<const double> x) {
        DistributionBasis f;
        f.point.assign(x.begin(), x.end());
        f.d = 1;
        f.basis = Eigen::MatrixXd::Zero(4, 1);
        f.basis(1, 0) = std::cos(x[0]);
        f.basis(2, 0) = std::sin(x[0]);
        return f;
    };
    const std::vector<std::vector<double>> pts{{0.1, 0.0, 0.0, 0.0}};
    const double r = parallelism_check(g, rotating, pts, 1e-4).residual;
    EXPECT_NEAR(r, 1e-4, 1e-8);
    const FiberFunction jumping = [](std::span<const double> x) {
        DistributionBasis f;
        f.point.assign(x.begin(), x.end());
        f.d = x[0] > 0.1 ? 2 : 1;
        f.basis = Eigen::MatrixXd::Identity(4, f.d);
        return f;
    };
    EXPECT_EQ(code_of([&] { parallelism_check(g, jumping, pts, 1e-3); }), Errc::FiberDimensionJump);
}
