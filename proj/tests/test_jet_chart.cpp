#include "cosym/errors.hpp"
#include "cosym/families.hpp"
#include "cosym/jet_chart.hpp"
#include "support/generators.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>

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

double max_abs(const std::vector<double>& v)
{
    double m = 0.0;
    for (double x : v) {
        m = std::max(m, std::abs(x));
    }
    return m;
}

} // namespace

TEST(Polynomial, EvaluatesAndDifferentiates)
{
    // 3 x^2 y - y + 2
    Polynomial p(2);
    p.add_term(3.0, {2, 1});
    p.add_term(-1.0, {0, 1});
    p.add_term(2.0, {0, 0});
    const double x[2] = {1.5, -2.0};
    EXPECT_DOUBLE_EQ(p.evaluate(x), 3 * 2.25 * -2.0 + 2.0 + 2.0);
    EXPECT_DOUBLE_EQ(p.derivative(0).evaluate(x), 6 * 1.5 * -2.0);
    EXPECT_DOUBLE_EQ(p.derivative(1).evaluate(x), 3 * 2.25 - 1.0);
    EXPECT_EQ(p.degree(), 3);
    EXPECT_TRUE((p - p).is_zero());
}

TEST(PiecewisePolynomial, ValueAndThreeDerivatives)
{
    const auto f = piecewise_flat_then_quartic();
    const auto left = f.evaluate(-0.5);
    EXPECT_EQ(left[0], 0.0);
    EXPECT_EQ(left[3], 0.0);
    const auto right = f.evaluate(0.5);
    EXPECT_DOUBLE_EQ(right[0], 0.0625);
    EXPECT_DOUBLE_EQ(right[1], 0.5);
    EXPECT_DOUBLE_EQ(right[2], 3.0);
    EXPECT_DOUBLE_EQ(right[3], 12.0);
    EXPECT_TRUE(f.locally_constant_at(-0.1));
    EXPECT_FALSE(f.locally_constant_at(0.1));
}

TEST(PiecewisePolynomial, RejectsJoinsThatAreNotC3)
{
    const double inf = std::numeric_limits<double>::infinity();
    // t^3 glued to 0 has a jump in the third derivative.
    EXPECT_EQ(code_of([&] { PiecewisePolynomial({{-inf, 0.0, {0.0}}, {0.0, inf, {0.0, 0.0, 0.0, 1.0}}}); }),
              Errc::InvalidExpression);
    // Gap between pieces.
    EXPECT_EQ(code_of([&] { PiecewisePolynomial({{-inf, 0.0, {0.0}}, {0.5, inf, {0.0}}}); }),
              Errc::InvalidExpression);
}

TEST(EvaluateJet, FlatMetricHasZeroDerivatives)
{
    const auto g = cosym::testing::flat_metric({-1, 1, 1, 1});
    const double x[4] = {0.1, -0.2, 0.3, 0.4};
    const auto jet = evaluate_jet(g, x, 3);
    EXPECT_EQ(jet.G(0, 0), -1.0);
    EXPECT_EQ(max_abs(jet.dg), 0.0);
    EXPECT_EQ(max_abs(jet.d2g), 0.0);
    EXPECT_EQ(max_abs(jet.d3g), 0.0);
}

TEST(EvaluateJet, PolarMetricAtRadiusTwo)
{
    const auto g = cosym::testing::polar_metric();
    const double x[2] = {2.0, 0.3};
    const auto jet = evaluate_jet(g, x, 3);
    EXPECT_EQ(jet.G(0, 0), 1.0);
    EXPECT_EQ(jet.G(1, 1), 4.0);
    EXPECT_EQ(jet.dG(1, 1, 0), 4.0);
    EXPECT_EQ(jet.d2G(1, 1, 0, 0), 2.0);
    EXPECT_EQ(jet.d3G(1, 1, 0, 0, 0), 0.0);
    EXPECT_EQ(jet.dG(1, 1, 1), 0.0);
    EXPECT_EQ(jet.dG(0, 0, 0), 0.0);
}

TEST(EvaluateJet, D1FamilyComponentsMatchKappa)
{
    const auto spec = d1_example(4);
    const auto g = build_d1_metric(spec);
    const double x[4] = {0.9, 0.0, 0.9, 0.0};
    const auto jet = evaluate_jet(g, x, 3);
    // kappa = t |psi|^2 + (psi1^2 - psi2^2), d_t kappa = |psi|^2.
    EXPECT_DOUBLE_EQ(jet.G(0, 0), 0.9 * 0.81 + 0.81);
    EXPECT_DOUBLE_EQ(jet.dG(0, 0, 0), 0.81);
    EXPECT_EQ(jet.G(0, 1), 0.5);
    EXPECT_EQ(jet.G(2, 3), 0.0);
    EXPECT_EQ(jet.G(2, 2), 1.0);
    EXPECT_DOUBLE_EQ(d1_kappa(spec, x), jet.G(0, 0));
}

TEST(EvaluateJet, SymmetricScatterIsExact)
{
    Gen gen(11);
    const auto g = gen.polynomial_metric(4, 3, 0.2, cosym::testing::cube(4, 1.0));
    const auto x = gen.point(cosym::testing::cube(4, 0.8));
    const auto jet = evaluate_jet(g, x, 3);
    for (int i = 0; i < 4; ++i) {
        for (int j = 0; j < 4; ++j) {
            EXPECT_EQ(jet.G(i, j), jet.G(j, i));
            for (int k = 0; k < 4; ++k) {
                EXPECT_EQ(jet.dG(i, j, k), jet.dG(j, i, k));
                for (int l = 0; l < 4; ++l) {
                    EXPECT_EQ(jet.d2G(i, j, k, l), jet.d2G(i, j, l, k));
                    for (int m = 0; m < 4; ++m) {
                        EXPECT_EQ(jet.d3G(i, j, k, l, m), jet.d3G(i, j, m, k, l));
                    }
                }
            }
        }
    }
}

TEST(EvaluateJet, Errors)
{
    const auto g = cosym::testing::flat_metric({1, 1, 1});
    const double outside[3] = {1.5, 0.0, 0.0};
    const double inside[3] = {0.0, 0.0, 0.0};
    const double short_point[2] = {0.0, 0.0};
    EXPECT_EQ(code_of([&] { evaluate_jet(g, outside, 1); }), Errc::PointOutsideDomain);
    EXPECT_EQ(code_of([&] { evaluate_jet(g, inside, 4); }), Errc::JetOrderUnsupported);
    EXPECT_EQ(code_of([&] { evaluate_jet(g, short_point, 1); }), Errc::DimensionMismatch);
    const auto degenerate = cosym::testing::flat_metric({1, 0, 1});
    EXPECT_EQ(code_of([&] { evaluate_jet(degenerate, inside, 1); }), Errc::DegenerateMetric);
    const double edge[3] = {0.9995, 0.0, 0.0};
    EXPECT_EQ(code_of([&] { finite_difference_jet(g, edge, 3, 1e-3); }), Errc::StencilOutsideDomain);
}

TEST(FiniteDifferenceJet, FlatMetricDerivativesBelowStepSquared)
{
    const auto g = cosym::testing::flat_metric({-1, 1, 1, 1});
    const double x[4] = {0.1, -0.2, 0.3, 0.4};
    const double h = 1e-3;
    const auto fd = finite_difference_jet(g, x, 3, h);
    EXPECT_LT(max_abs(fd.dg), h * h);
    EXPECT_LT(max_abs(fd.d2g), h * h);
    EXPECT_LT(max_abs(fd.d3g), h * h);
}

TEST(FiniteDifferenceJet, PolarMetricWithinOneMicro)
{
    const auto g = cosym::testing::polar_metric();
    const double x[2] = {2.0, 0.1};
    const auto ad = evaluate_jet(g, x, 3);
    const auto fd = finite_difference_jet(g, x, 3, 1e-3);
    for (std::size_t i = 0; i < ad.dg.size(); ++i) {
        EXPECT_NEAR(ad.dg[i], fd.dg[i], 1e-6);
    }
    for (std::size_t i = 0; i < ad.d2g.size(); ++i) {
        EXPECT_NEAR(ad.d2g[i], fd.d2g[i], 1e-6);
    }
    for (std::size_t i = 0; i < ad.d3g.size(); ++i) {
        EXPECT_NEAR(ad.d3g[i], fd.d3g[i], 1e-6);
    }
}

// Property: on random polynomial metrics the exact jet and the difference
// jet agree blockwise to 1e-5 relative.
TEST(FiniteDifferenceJet, AgreesWithExactJetOnRandomMetrics)
{
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        Gen gen(seed);
        const int n = gen.integer(2, 5);
        const auto g = gen.polynomial_metric(n, 4, 0.15, cosym::testing::cube(n, 1.0), seed % 2 == 0);
        const auto x = gen.point(cosym::testing::cube(n, 0.8));
        const auto ad = evaluate_jet(g, x, 3);
        const auto fd = finite_difference_jet(g, x, 3, 1e-3);
        const double floor = max_abs(ad.g);
        const auto check = [&](const std::vector<double>& a, const std::vector<double>& b) {
            const double scale = std::max(floor, max_abs(a));
            for (std::size_t i = 0; i < a.size(); ++i) {
                ASSERT_LT(std::abs(a[i] - b[i]) / scale, 1e-5) << "seed " << seed;
            }
        };
        check(ad.dg, fd.dg);
        check(ad.d2g, fd.d2g);
        check(ad.d3g, fd.d3g);
    }
}

TEST(MetricField, DegeneracyRatio)
{
    const double g[4] = {2.0, 0.0, 0.0, 2.0};
    EXPECT_DOUBLE_EQ(degeneracy_ratio(g, 2), 1.0);
    const double h[4] = {1.0, 1.0, 1.0, 1.0};
    EXPECT_EQ(degeneracy_ratio(h, 2), 0.0);
}

TEST(MetricField, ComponentAddedIsSymmetric)
{
    const auto g = cosym::testing::flat_metric({1, 1, 1});
    const auto h = g.with_component_added(2, 0, Expr::coordinate(1));
    const double x[3] = {0.0, 0.5, 0.0};
    const auto c = h.components_at(x);
    EXPECT_EQ(c[0 * 3 + 2], 0.5);
    EXPECT_EQ(c[2 * 3 + 0], 0.5);
}
