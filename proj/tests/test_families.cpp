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

template <class F>
std::string message_of(F&& fn)
{
    try {
        fn();
    } catch (const Error& e) {
        return e.what();
    }
    return {};
}

Polynomial sp(double c, int a, int b) { return Polynomial::monomial(c, {a, b}); }

} // namespace

TEST(ValidateOperator, Examples)
{
    const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(2, 2);
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(2, 2);
    a(0, 0) = 1.0;
    a(1, 1) = -1.0;
    EXPECT_TRUE(validate_operator(a, id).pass);

    const auto tr = validate_operator(id, id);
    EXPECT_FALSE(tr.pass);
    EXPECT_DOUBLE_EQ(tr.trace, 2.0);
    EXPECT_NE(tr.reason.find("trace A ≠ 0"), std::string::npos);

    const auto zero = validate_operator(Eigen::MatrixXd::Zero(2, 2), id);
    EXPECT_FALSE(zero.pass);
    EXPECT_NE(zero.reason.find("nonzero"), std::string::npos);

    Eigen::MatrixXd skew = Eigen::MatrixXd::Zero(2, 2);
    skew(0, 1) = 1.0;
    skew(1, 0) = -1.0;
    const auto sk = validate_operator(skew, id);
    EXPECT_FALSE(sk.pass);
    EXPECT_GT(sk.asymmetry, 1.0);
}

TEST(BuildD1, RejectsInvalidSpecs)
{
    auto spec = d1_example(4);
    spec.A = Eigen::MatrixXd::Identity(2, 2);
    EXPECT_NE(message_of([&] { build_d1_metric(spec); }).find("trace A ≠ 0"), std::string::npos);
    EXPECT_EQ(code_of([&] { build_d1_metric(spec); }), Errc::SpecInvariantViolated);
    spec = d1_example(4);
    spec.gram = Eigen::MatrixXd::Zero(2, 2);
    EXPECT_EQ(code_of([&] { build_d1_metric(spec); }), Errc::SpecInvariantViolated);
    spec = d1_example(4);
    spec.A = Eigen::MatrixXd::Zero(3, 3);
    EXPECT_EQ(code_of([&] { build_d1_metric(spec); }), Errc::SpecInvariantViolated);
}

TEST(BuildD1, ComponentsAndSignature)
{
    const auto spec = d1_example(5);
    const auto g = build_d1_metric(spec);
    const std::vector<double> x{0.5, 0.3, 0.2, -0.4, 0.1};
    const auto c = g.components_at(x);
    EXPECT_DOUBLE_EQ(c[0], d1_kappa(spec, x));
    EXPECT_EQ(c[1], 0.5);
    EXPECT_EQ(c[1 * 5 + 1], 0.0);
    EXPECT_EQ(c[2 * 5 + 2], 1.0);
    const auto s = signature(compute_curvature(evaluate_jet(g, x, 2)).g);
    EXPECT_EQ(s.negative, 1);
    EXPECT_EQ(s.positive, 4);
}

// Property: every admissible (gram, A, f) gives a conformally symmetric
// metric with d = 1 and rho = (2 - n) f dt dt.
TEST(BuildD1, RandomAdmissibleSpecsAreConformallySymmetric)
{
    for (std::uint64_t seed = 1; seed <= 12; ++seed) {
        Gen gen(seed);
        D1FamilySpec spec;
        spec.n = gen.integer(4, 6);
        const int m = spec.n - 2;
        spec.gram = gen.gram(m, seed % 2 == 0);
        spec.A = gen.admissible(spec.gram);
        spec.f = PiecewisePolynomial::polynomial({gen.uniform(-1, 1), gen.uniform(-1, 1), gen.uniform(-1, 1)});
        spec.domain = cosym::testing::cube(spec.n, 1.0);
        const auto g = build_d1_metric(spec);
        for (int k = 0; k < 5; ++k) {
            const auto x = gen.point(cosym::testing::cube(spec.n, 0.9));
            const auto b = compute_curvature(evaluate_jet(g, x, 3));
            EXPECT_LT(b.nabla_weyl.max_abs() / b.scale(), 1e-8) << "seed " << seed;
            EXPECT_EQ(olszak_fiber(b).d, 1) << "seed " << seed;
            const double f = spec.f.evaluate(x[0])[0];
            EXPECT_NEAR(b.rho(0, 0), (2.0 - spec.n) * f, 1e-9 * b.scale()) << "seed " << seed;
        }
    }
}

TEST(BuildD1, PiecewiseProfileStaysConformallySymmetric)
{
    auto spec = d1_example(4);
    spec.f = piecewise_flat_then_quartic();
    const auto g = build_d1_metric(spec);
    for (double t : {-0.8, -0.2, 0.3, 0.8}) {
        const auto b = compute_curvature(evaluate_jet(g, std::vector<double>{t, 0.1, 0.6, -0.5}, 3));
        EXPECT_LT(b.nabla_weyl.max_abs() / b.scale(), 1e-8);
        const double nr = b.nabla_riemann.max_abs() / b.scale();
        if (t < 0) {
            EXPECT_LT(nr, 1e-12);
        } else {
            EXPECT_GT(nr, 1e-4);
        }
    }
}

TEST(Surface, TauFromT)
{
    const SurfaceMatrix zero = zero_surface_matrix();
    SurfaceMatrix alpha = zero;
    alpha[0][1] = Polynomial::constant(2, 1.0);
    alpha[1][0] = Polynomial::constant(2, -1.0);
    const auto t0 = tau_from_T(zero, alpha);
    for (const auto& row : t0) {
        for (const auto& p : row) {
            EXPECT_TRUE(p.is_zero());
        }
    }
    SurfaceMatrix e11 = zero;
    e11[0][0] = Polynomial::constant(2, 1.0);
    const auto tau = tau_from_T(e11, alpha);
    const double x[2] = {0.3, 0.4};
    EXPECT_EQ(tau[1][1].evaluate(x), 1.0);
    EXPECT_EQ(tau[0][0].evaluate(x), 0.0);
    EXPECT_EQ(tau[0][1].evaluate(x), 0.0);
}

TEST(Surface, DivergenceResidual)
{
    const double x[2] = {0.3, -0.7};
    EXPECT_EQ(divergence_residual(surface_flat_fixture(), x), 0.0);
    auto s = surface_flat_fixture();
    s.T = zero_surface_matrix();
    EXPECT_EQ(divergence_residual(s, x), -1.0);
    EXPECT_LT(std::abs(divergence_residual(surface_parallel_fixture(-1.0), x)), 1e-12);
    EXPECT_LT(std::abs(divergence_residual(surface_nonparallel_fixture(1.0), x)), 1e-12);
}

TEST(Surface, ProjectiveFlatnessAndEquiaffinity)
{
    const double x[2] = {0.4, 0.6};
    EXPECT_EQ(projective_flatness_residual(surface_flat_fixture(), x), 0.0);
    EXPECT_LT(projective_flatness_residual(surface_parallel_fixture(), x), 1e-12);
    EXPECT_LT(projective_flatness_residual(surface_nonparallel_fixture(), x), 1e-12);
    EXPECT_LT(surface_ricci_parallel_residual(surface_parallel_fixture(), x), 1e-12);
    EXPECT_GT(surface_ricci_parallel_residual(surface_nonparallel_fixture(), x), 0.5);

    // Gamma^1_11 = x^2 has trace Gamma^m_1m = x^2, so no constant area form is parallel.
    auto bad = surface_flat_fixture();
    bad.gamma[0][0][0] = sp(1.0, 0, 1);
    EXPECT_GT(equiaffine_residual(bad, x), 0.1);
    EXPECT_EQ(code_of([&] { projective_flatness_residual(bad, x); }), Errc::NotEquiaffine);
    EXPECT_EQ(code_of([&] { validate(bad, {-1, 1}, {-1, 1}); }), Errc::SpecInvariantViolated);
}

TEST(Surface, ValidateRejectsBrokenData)
{
    auto s = surface_flat_fixture();
    s.alpha = zero_surface_matrix();
    EXPECT_EQ(code_of([&] { validate(s, {-1, 1}, {-1, 1}); }), Errc::SpecInvariantViolated);
    s = surface_flat_fixture();
    s.epsilon = 0.5;
    EXPECT_EQ(code_of([&] { validate(s, {-1, 1}, {-1, 1}); }), Errc::SpecInvariantViolated);
    s = surface_flat_fixture();
    s.T[0][1] = sp(1.0, 1, 0);
    EXPECT_EQ(code_of([&] { validate(s, {-1, 1}, {-1, 1}); }), Errc::SpecInvariantViolated);
    s = surface_nonparallel_fixture();
    s.T = surface_flat_fixture().T;
    EXPECT_EQ(code_of([&] { validate(s, {-1, 1}, {-1, 1}); }), Errc::SpecInvariantViolated);
}

TEST(RiemannExtension, VerticalAndHorizontalVectorsAreNull)
{
    const auto s = surface_nonparallel_fixture();
    const auto h = riemann_extension(s, cosym::testing::cube(4, 1.0));
    const std::vector<double> x{0.4, -0.3, 0.7, 0.2};
    const auto c = h.components_at(x);
    const auto gm = [&](int i, int j) { return c[static_cast<std::size_t>(i * 4 + j)]; };
    // Vertical d_p: null and mutually orthogonal.
    EXPECT_EQ(gm(2, 2), 0.0);
    EXPECT_EQ(gm(2, 3), 0.0);
    EXPECT_EQ(gm(3, 3), 0.0);
    // Pairing g(d_x^j, d_p_k) = delta.
    EXPECT_EQ(gm(0, 2), 1.0);
    EXPECT_EQ(gm(0, 3), 0.0);
    EXPECT_EQ(gm(1, 3), 1.0);
    // Horizontal lifts H_j = d_x^j + p_l Gamma^l_jk d_p_k are null.
    const auto conn = surface_connection(s, std::span(x).first(2), 0);
    for (int j = 0; j < 2; ++j) {
        for (int k = 0; k < 2; ++k) {
            std::array<double, 4> hj{}, hk{};
            hj[static_cast<std::size_t>(j)] = 1.0;
            hk[static_cast<std::size_t>(k)] = 1.0;
            for (int m = 0; m < 2; ++m) {
                for (int l = 0; l < 2; ++l) {
                    hj[static_cast<std::size_t>(2 + m)] += x[static_cast<std::size_t>(2 + l)] * conn.gamma(l, j, m);
                    hk[static_cast<std::size_t>(2 + m)] += x[static_cast<std::size_t>(2 + l)] * conn.gamma(l, k, m);
                }
            }
            double v = 0.0;
            for (int a = 0; a < 4; ++a) {
                for (int b = 0; b < 4; ++b) {
                    v += hj[static_cast<std::size_t>(a)] * gm(a, b) * hk[static_cast<std::size_t>(b)];
                }
            }
            EXPECT_NEAR(v, 0.0, 1e-14);
        }
    }
}

TEST(BuildD2, AllFixturesAreConformallySymmetricWithDTwo)
{
    Gen gen(6);
    const std::vector<SurfaceConnectionSpec> surfaces{surface_flat_fixture(), surface_parallel_fixture(1.0),
                                                      surface_parallel_fixture(-1.0), surface_nonparallel_fixture(1.0),
                                                      surface_nonparallel_fixture(-1.0)};
    for (int n = 4; n <= 6; ++n) {
        for (const auto& s : surfaces) {
            const auto g = build_d2_metric(d2_example(s, n));
            for (int k = 0; k < 4; ++k) {
                const auto b = compute_curvature(evaluate_jet(g, gen.point(cosym::testing::cube(n, 0.9)), 3));
                EXPECT_LT(b.nabla_weyl.max_abs() / b.scale(), 1e-8);
                EXPECT_EQ(olszak_fiber(b).d, 2);
                const auto sig = signature(b.g);
                EXPECT_EQ(sig.negative, 2);
                EXPECT_EQ(sig.positive, n - 2);
            }
        }
    }
}

TEST(BuildD2, FlatDataGivesFlatNeutralMetric)
{
    auto spec = d2_example(surface_flat_fixture(), 4);
    spec.surface.T = zero_surface_matrix();
    EXPECT_EQ(code_of([&] { build_d2_metric(spec); }), Errc::SpecInvariantViolated);
    const auto g = build_d2_metric(spec, false);
    const auto b = compute_curvature(evaluate_jet(g, std::vector<double>{0.1, 0.2, 0.3, 0.4}, 3));
    EXPECT_EQ(b.riemann.max_abs(), 0.0);
    EXPECT_EQ(olszak_fiber(b).d, 4);
}

TEST(BuildD2, ShapeErrors)
{
    auto spec = d2_example(surface_flat_fixture(), 5);
    spec.gramV = Eigen::MatrixXd::Identity(2, 2);
    EXPECT_THROW(build_d2_metric(spec), Error);
    spec = d2_example(surface_flat_fixture(), 4);
    spec.n = 3;
    EXPECT_THROW(build_d2_metric(spec), Error);
}
