#include "cosym/errors.hpp"
#include "cosym/families.hpp"
#include "cosym/geodesic.hpp"
#include "support/generators.hpp"

#include <gtest/gtest.h>

#include <cmath>

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

double pair(const MetricField& g, const std::vector<double>& x, const std::vector<double>& a,
            const std::vector<double>& b)
{
    const auto c = g.components_at(x);
    const std::size_t n = x.size();
    double v = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            v += a[i] * c[i * n + j] * b[j];
        }
    }
    return v;
}

double max_diff(const std::vector<double>& a, const std::vector<double>& b)
{
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        m = std::max(m, std::abs(a[i] - b[i]));
    }
    return m;
}

struct D1Setup {
    D1FamilySpec family = d1_example(4);
    MetricField field = build_d1_metric(family);
    std::vector<double> psi0{0.2, 0.1};
    std::vector<double> w{0.3, -0.2};
    FMapSpec spec = make_f_map_spec(family, psi0, w, 0.6);
};

} // namespace

TEST(Geodesic, FlatMetricIsAStraightLine)
{
    const auto g = cosym::testing::flat_metric({-1, 1, 1}, 2.0);
    const GeodesicState s0{{0.1, -0.2, 0.3}, {0.5, 0.25, -0.4}};
    const auto end = integrate_geodesic(g, s0, 1.5, 1e-10);
    for (int i = 0; i < 3; ++i) {
        EXPECT_NEAR(end.position[static_cast<std::size_t>(i)],
                    s0.position[static_cast<std::size_t>(i)] + 1.5 * s0.velocity[static_cast<std::size_t>(i)], 1e-10);
        EXPECT_NEAR(end.velocity[static_cast<std::size_t>(i)], s0.velocity[static_cast<std::size_t>(i)], 1e-10);
    }
    const std::vector<double> x{0.1, 0.2, 0.3};
    const std::vector<double> v{0.3, -0.1, 0.2};
    EXPECT_LT(max_diff(exponential_map(g, x, v, 1e-10), {0.4, 0.1, 0.5}), 1e-10);
    EXPECT_EQ(exponential_map(g, x, std::vector<double>(3, 0.0), 1e-10), x);
}

// Straight line x = 1, y = tau written in polar coordinates.
TEST(Geodesic, PolarClosedFormImprovesWithTolerance)
{
    const auto g = cosym::testing::polar_metric();
    const GeodesicState s0{{1.0, 0.0}, {0.0, 1.0}};
    double previous = 1.0;
    for (double tol : {1e-6, 1e-8, 1e-10}) {
        const auto end = integrate_geodesic(g, s0, 1.0, tol);
        const double err = std::max(std::abs(end.position[0] - std::sqrt(2.0)), std::abs(end.position[1] - M_PI / 4));
        EXPECT_LT(err, 10 * tol);
        EXPECT_LE(err, previous);
        previous = err;
    }
}

TEST(Geodesic, LeavingTheChartIsReported)
{
    const auto g = cosym::testing::flat_metric({1, 1});
    const GeodesicState s0{{0.0, 0.0}, {3.0, 0.0}};
    EXPECT_EQ(code_of([&] { integrate_geodesic(g, s0, 1.0, 1e-8); }), Errc::LeftDomain);
}

// Property: g(xdot, xdot) is conserved and transport preserves inner products.
TEST(Geodesic, ConservesSpeedAndTransportIsIsometric)
{
    for (std::uint64_t seed = 1; seed <= 6; ++seed) {
        Gen gen(seed);
        const int n = gen.integer(3, 5);
        const auto g = gen.polynomial_metric(n, 3, 0.2, cosym::testing::cube(n, 1.5), seed % 2 == 0);
        GeodesicState s0{gen.point(cosym::testing::cube(n, 0.2)), {}};
        for (int i = 0; i < n; ++i) {
            s0.velocity.push_back(gen.uniform(-0.5, 0.5));
        }
        std::vector<std::vector<double>> frame;
        for (int k = 0; k < 2; ++k) {
            frame.push_back(gen.point(cosym::testing::cube(n, 1.0)));
        }
        const double tol = 1e-9;
        const auto traj = integrate_trajectory(g, s0, frame, 1.0, tol);
        const double e0 = pair(g, s0.position, s0.velocity, s0.velocity);
        const double p0 = pair(g, s0.position, frame[0], frame[1]);
        for (double tau : {0.25, 0.5, 1.0}) {
            const auto st = traj.state_at(tau);
            EXPECT_NEAR(pair(g, st.position, st.velocity, st.velocity), e0, 10 * tol) << seed;
            EXPECT_NEAR(pair(g, st.position, traj.transported_at(tau, 0), traj.transported_at(tau, 1)), p0, 10 * tol)
                << seed;
        }
        // Re-integrated transport agrees with the coupled one.
        const auto again = parallel_transport(g, traj, frame, tol);
        EXPECT_LT(max_diff(again.final_transported(0), traj.final_transported(0)), 10 * tol) << seed;
    }
}

TEST(Geodesic, FlatTransportIsConstant)
{
    const auto g = cosym::testing::flat_metric({1, -1, 1});
    const GeodesicState s0{{0.0, 0.0, 0.0}, {0.3, 0.2, 0.1}};
    const std::vector<std::vector<double>> w{{1.0, 2.0, 3.0}};
    const auto traj = integrate_trajectory(g, s0, w, 1.0, 1e-10);
    EXPECT_LT(max_diff(traj.final_transported(0), w[0]), 1e-12);
    EXPECT_EQ(code_of([&] { (void)traj.transported_at(0.5, 1); }), Errc::SlotOutOfRange);
}

TEST(D1Geodesics, DsLinesAndParameterT)
{
    const D1Setup d;
    const std::vector<double> x{0.1, -0.2, 0.3, 0.2};
    const std::vector<double> v{0.0, 0.4, 0.0, 0.0};
    EXPECT_LT(max_diff(exponential_map(d.field, x, v, 1e-10), {0.1, 0.2, 0.3, 0.2}), 1e-10);

    // Along the base geodesic t equals the affine parameter; transported D-perp vectors keep dt = 0.
    const double tol = 1e-9;
    const GeodesicState s0{d.spec.base_point, d.spec.velocity};
    std::vector<std::vector<double>> perp;
    for (Eigen::Index a = 0; a < d.spec.identification.cols(); ++a) {
        const Eigen::VectorXd col = d.spec.identification.col(a);
        perp.emplace_back(col.data(), col.data() + col.size());
    }
    const auto traj = integrate_trajectory(d.field, s0, perp, 0.5, tol);
    for (double tau : {0.1, 0.3, 0.5}) {
        EXPECT_NEAR(traj.state_at(tau).position[0], tau, 10 * tol);
        EXPECT_NEAR(traj.transported_at(tau, 0)[0], 0.0, 10 * tol);
        EXPECT_NEAR(traj.transported_at(tau, 1)[0], 0.0, 10 * tol);
    }
}

TEST(FMap, SpecValidation)
{
    D1Setup d;
    EXPECT_NO_THROW(validate(d.spec, d.field));
    auto bad = d.spec;
    bad.velocity[1] += 0.1;
    EXPECT_EQ(code_of([&] { validate(bad, d.field); }), Errc::SpecInvariantViolated);
    bad = d.spec;
    bad.u[1] = 1.0;
    EXPECT_EQ(code_of([&] { validate(bad, d.field); }), Errc::SpecInvariantViolated);
    bad = d.spec;
    bad.base_point[0] = 0.1;
    EXPECT_EQ(code_of([&] { validate(bad, d.field); }), Errc::SpecInvariantViolated);
}

TEST(FMap, BasePointsAndSTranslation)
{
    const D1Setup d;
    const double tol = 1e-10;
    const std::vector<double> zero(2, 0.0);
    EXPECT_LT(max_diff(f_map(d.spec, d.field, 0.0, 0.0, zero, tol), d.spec.base_point), 1e-12);

    const GeodesicState s0{d.spec.base_point, d.spec.velocity};
    const auto xt = integrate_geodesic(d.field, s0, 0.3, tol);
    const auto ft = f_map(d.spec, d.field, 0.3, 0.0, zero, tol);
    EXPECT_LT(max_diff(ft, xt.position), 10 * tol);
    EXPECT_NEAR(ft[0], 0.3, 10 * tol);

    // u/2 = d_s, so F(0, s, 0) moves y by s along d_s.
    auto shifted = d.spec.base_point;
    shifted[1] += 0.25;
    EXPECT_LT(max_diff(f_map(d.spec, d.field, 0.0, 0.25, zero, tol), shifted), 10 * tol);
}

TEST(Pullback, ModelAtOriginAndSmallGrid)
{
    const D1Setup d;
    const std::vector<std::vector<double>> origin{{0.0, 0.0, 0.0, 0.0}};
    const auto r0 = pullback_residual(d.spec, d.field, d.family, origin, 1e-4, 1e-8);
    const auto& p = r0.points.at(0);
    EXPECT_NEAR(p.pullback(0, 1), 0.5, 1e-6);
    EXPECT_NEAR(p.pullback(0, 0), 0.0, 1e-6);
    EXPECT_NEAR(p.pullback(2, 2), 1.0, 1e-6);
    EXPECT_NEAR(p.pullback(3, 3), 1.0, 1e-6);
    EXPECT_NEAR(p.pullback(2, 3), 0.0, 1e-6);
    EXPECT_EQ(p.model(0, 0), 0.0);

    const std::vector<double> dir{1.0, 0.5};
    const auto grid = pullback_grid(4, 0.3, 3, dir);
    EXPECT_EQ(grid.size(), 27u);
    EXPECT_LT(pullback_residual(d.spec, d.field, d.family, grid, 1e-4, 1e-8).max_residual, 1e-5);
}

TEST(Pullback, FlatBypassFixtureIsExact)
{
    auto family = d1_example(4);
    family.A = Eigen::MatrixXd::Zero(2, 2);
    family.f = PiecewisePolynomial::polynomial({0.0});
    const auto field = build_d1_metric(family, false);
    const std::vector<double> psi0{0.2, 0.1};
    const std::vector<double> w{0.3, -0.2};
    const auto spec = make_f_map_spec(family, psi0, w, 0.6);
    const std::vector<double> dir{1.0, 0.5};
    const auto grid = pullback_grid(4, 0.3, 3, dir);
    EXPECT_LT(pullback_residual(spec, field, family, grid, 1e-4, 1e-10).max_residual, 1e-10);
}

TEST(Pullback, StencilMustStayInTheParameterBox)
{
    const D1Setup d;
    const std::vector<std::vector<double>> edge{{0.6, 0.0, 0.0, 0.0}};
    EXPECT_EQ(code_of([&] { pullback_residual(d.spec, d.field, d.family, edge, 1e-4, 1e-8); }),
              Errc::StencilOutsideBox);
}

// Residual decays with the difference step and the ODE tolerance together.
TEST(Pullback, DecaysAcrossThreeSettings)
{
    const D1Setup d;
    const std::vector<double> dir{1.0, 0.5};
    const auto grid = pullback_grid(4, 0.3, 2, dir);
    const std::array<std::pair<double, double>, 3> settings{{{2e-4, 1e-8}, {1e-4, 1e-9}, {5e-5, 1e-10}}};
    double previous = 1.0;
    for (const auto& [h, tol] : settings) {
        const double r = pullback_residual(d.spec, d.field, d.family, grid, h, tol).max_residual;
        EXPECT_LT(r, previous / 3.0) << "fd_step " << h << " tol " << tol;
        previous = r;
    }
}
