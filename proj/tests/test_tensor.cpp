#include "cosym/curvature.hpp"
#include "cosym/errors.hpp"
#include "cosym/families.hpp"
#include "cosym/tensor.hpp"
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

DenseTensor sym2(Gen& gen, int n, bool nondegenerate = false)
{
    const Eigen::MatrixXd m = nondegenerate ? gen.gram(n, true) : gen.symmetric(n);
    std::vector<double> v(m.data(), m.data() + m.size());
    return DenseTensor::matrix(n, v, Variance::Covariant, Variance::Covariant);
}

DenseTensor two_form(int n, int a, int b)
{
    DenseTensor t = DenseTensor::covariant(n, 2);
    t(a, b) = 1.0;
    t(b, a) = -1.0;
    return t;
}

} // namespace

TEST(Contract, TraceOfIdentityIsDimension)
{
    for (int n = 2; n <= 6; ++n) {
        DenseTensor id(n, {Variance::Contravariant, Variance::Covariant});
        for (int i = 0; i < n; ++i) {
            id(i, i) = 1.0;
        }
        const auto tr = contract(id, 0, 1);
        EXPECT_EQ(tr.rank(), 0);
        EXPECT_EQ(tr.data()[0], n);
    }
}

TEST(Contract, MetricWithInverseIsIdentity)
{
    Gen gen(3);
    const auto g = sym2(gen, 5, true);
    const auto ginv = inverse_metric(g);
    DenseTensor prod(5, {Variance::Covariant, Variance::Covariant, Variance::Contravariant, Variance::Contravariant});
    for (int i = 0; i < 5; ++i) {
        for (int j = 0; j < 5; ++j) {
            for (int k = 0; k < 5; ++k) {
                for (int l = 0; l < 5; ++l) {
                    prod(i, j, k, l) = g(i, j) * ginv(k, l);
                }
            }
        }
    }
    const auto id = contract(prod, 1, 2);
    for (int i = 0; i < 5; ++i) {
        for (int l = 0; l < 5; ++l) {
            EXPECT_NEAR(id(i, l), i == l ? 1.0 : 0.0, 1e-12);
        }
    }
}

TEST(Contract, Errors)
{
    const auto t = DenseTensor::covariant(3, 2);
    EXPECT_EQ(code_of([&] { contract(t, 0, 2); }), Errc::SlotOutOfRange);
    EXPECT_EQ(code_of([&] { contract(t, 1, 1); }), Errc::SlotOutOfRange);
    EXPECT_EQ(code_of([&] { contract(t, 0, 1); }), Errc::VarianceMismatchWithoutMetric);
    EXPECT_EQ(code_of([&] { DenseTensor::covariant(3, 6); }), Errc::SlotOutOfRange);
}

TEST(Contract, D1RicciHasZeroTrace)
{
    const auto g = build_d1_metric(d1_example(5));
    const double x[5] = {0.3, 0.1, 0.5, -0.4, 0.2};
    const auto b = compute_curvature(evaluate_jet(g, x, 2));
    const auto s = contract(b.rho, 0, 1, &b.g_inverse);
    EXPECT_LT(std::abs(s.data()[0]), 1e-12);
}

TEST(LowerRaise, RoundTrip)
{
    Gen gen(5);
    const auto g = sym2(gen, 4, true);
    const auto ginv = inverse_metric(g);
    auto t = DenseTensor::covariant(4, 3);
    for (auto& v : t.data()) {
        v = gen.uniform(-1, 1);
    }
    const auto back = lower(raise(t, 1, ginv), 1, g);
    EXPECT_LT((back - t).max_abs(), 1e-12);
    EXPECT_EQ(code_of([&] { lower(t, 1, g); }), Errc::VarianceMaskMismatch);
}

TEST(ValuedWedge, ZeroAndComponentFormula)
{
    const auto zero = DenseTensor::covariant(4, 2);
    EXPECT_EQ(valued_wedge(zero, zero).max_abs(), 0.0);

    Gen gen(7);
    const auto a = sym2(gen, 4);
    const auto b = sym2(gen, 4);
    const auto w = valued_wedge(a, b);
    for (int i = 0; i < 4; ++i) {
        for (int j = 0; j < 4; ++j) {
            for (int k = 0; k < 4; ++k) {
                for (int l = 0; l < 4; ++l) {
                    const double want = a(i, k) * b(j, l) - a(j, k) * b(i, l) - a(i, l) * b(j, k) + a(j, l) * b(i, k);
                    EXPECT_EQ(w(i, j, k, l), want);
                }
            }
        }
    }
    EXPECT_EQ(code_of([&] { valued_wedge(a, DenseTensor::covariant(3, 2)); }), Errc::DimensionMismatch);
}

// Property: pair antisymmetry, exchange a<->b with pair swap, and pair
// exchange for a = b on random symmetric inputs. Each side sums the same four
// products in another order, so equality holds to rounding.
TEST(ValuedWedge, SymmetriesOnRandomInputs)
{
    for (std::uint64_t seed = 1; seed <= 30; ++seed) {
        Gen gen(seed);
        const int n = gen.integer(2, 6);
        const auto a = sym2(gen, n);
        const auto b = sym2(gen, n);
        const auto ab = valued_wedge(a, b);
        const auto ba = valued_wedge(b, a);
        const auto aa = valued_wedge(a, a);
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) {
                for (int k = 0; k < n; ++k) {
                    for (int l = 0; l < n; ++l) {
                        ASSERT_NEAR(ab(i, j, k, l), -ab(j, i, k, l), 1e-15);
                        ASSERT_NEAR(ab(i, j, k, l), -ab(i, j, l, k), 1e-15);
                        ASSERT_NEAR(ab(i, j, k, l), ba(k, l, i, j), 1e-15);
                        ASSERT_NEAR(aa(i, j, k, l), aa(k, l, i, j), 1e-15);
                    }
                }
            }
        }
    }
}

TEST(ValuedWedge, NormalizationMakesWeylTraceFree)
{
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        Gen gen(seed);
        const auto g = gen.polynomial_metric(4, 3, 0.3, cosym::testing::cube(4, 1.0), true);
        const auto b = compute_curvature(evaluate_jet(g, gen.point(cosym::testing::cube(4, 0.7)), 2));
        EXPECT_LT(trace_defect(b.weyl, b.g_inverse) / b.scale(), 1e-9) << "seed " << seed;
    }
}

TEST(TwoFormOperator, ZeroAndFlat)
{
    const auto g = cosym::testing::flat_metric({-1, 1, 1, 1});
    const double x[4] = {0, 0, 0, 0};
    const auto b = compute_curvature(evaluate_jet(g, x, 2));
    const auto op = two_form_operator(b.weyl, b.g_inverse);
    EXPECT_EQ(op.rows(), 6);
    EXPECT_EQ(op.cwiseAbs().maxCoeff(), 0.0);
    EXPECT_EQ(numerical_rank(op).rank, 0);
}

TEST(TwoFormOperator, RankOneOnD2Family)
{
    const auto g = build_d2_metric(d2_example(surface_nonparallel_fixture(), 5));
    const double x[5] = {0.2, -0.3, 0.4, 0.1, 0.5};
    const auto b = compute_curvature(evaluate_jet(g, x, 2));
    EXPECT_EQ(numerical_rank(two_form_operator(b.weyl, b.g_inverse)).rank, 1);
}

TEST(TwoFormOperator, SelfAdjointForTwoFormInnerProduct)
{
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        Gen gen(seed);
        const auto g = gen.polynomial_metric(4, 3, 0.3, cosym::testing::cube(4, 1.0), seed % 2 == 1);
        const auto b = compute_curvature(evaluate_jet(g, gen.point(cosym::testing::cube(4, 0.7)), 2));
        const Eigen::MatrixXd m = two_form_operator(b.weyl, b.g_inverse);
        const Eigen::MatrixXd q = two_form_gram(b.g_inverse);
        const Eigen::MatrixXd lhs = q * m;
        const double defect = (lhs - lhs.transpose()).cwiseAbs().maxCoeff();
        EXPECT_LT(defect, 1e-10 * std::max(1.0, lhs.cwiseAbs().maxCoeff())) << "seed " << seed;
    }
}

TEST(TwoFormOperator, RejectsNonWeylInput)
{
    auto t = DenseTensor::covariant(4, 4);
    t(0, 1, 2, 3) = 1.0;
    const std::vector<double> id{1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 1};
    const auto ginv = DenseTensor::matrix(4, id, Variance::Contravariant, Variance::Contravariant);
    EXPECT_EQ(code_of([&] { two_form_operator(t, ginv); }), Errc::SymmetryViolation);
}

TEST(WedgeDivisibility, DecomposableFormDividesByItsFactors)
{
    const std::vector<DenseTensor> forms{two_form(4, 0, 1)};
    const Eigen::MatrixXd ker = null_space(wedge_divisibility_system(forms));
    ASSERT_EQ(ker.cols(), 2);
    // Kernel is span{e^1, e^2}: no component along e^3, e^4.
    EXPECT_LT(ker.row(2).norm() + ker.row(3).norm(), 1e-12);
}

TEST(WedgeDivisibility, ZeroFormAndDisjointForms)
{
    const std::vector<DenseTensor> zero{DenseTensor::covariant(4, 2)};
    EXPECT_EQ(null_space(wedge_divisibility_system(zero)).cols(), 4);
    const std::vector<DenseTensor> disjoint{two_form(4, 0, 1), two_form(4, 2, 3)};
    const Eigen::MatrixXd m = wedge_divisibility_system(disjoint);
    EXPECT_EQ(m.rows(), 8);
    EXPECT_EQ(m.cols(), 4);
    EXPECT_EQ(null_space(m).cols(), 0);
    EXPECT_EQ(code_of([] { wedge_divisibility_system(std::vector<DenseTensor>{}); }), Errc::EmptyInput);
}

TEST(NumericalRank, ThresholdAndAmbiguity)
{
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(3, 3);
    m(0, 0) = 1.0;
    m(1, 1) = 1e-12;
    auto r = numerical_rank(m);
    EXPECT_EQ(r.rank, 1);
    EXPECT_FALSE(r.ambiguous);
    m(1, 1) = 1e-8;
    r = numerical_rank(m);
    EXPECT_TRUE(r.ambiguous);
}

TEST(Signature, CountsEigenvalueSigns)
{
    const auto g = DenseTensor::matrix(3, std::vector<double>{0, 1, 0, 1, 0, 0, 0, 0, 2}, Variance::Covariant,
                                       Variance::Covariant);
    const auto s = signature(g);
    EXPECT_EQ(s.negative, 1);
    EXPECT_EQ(s.positive, 2);
    EXPECT_EQ(s.zero, 0);
}

TEST(DenseTensor, DeclaredSymmetryIsChecked)
{
    auto t = DenseTensor::covariant(3, 2);
    t.symmetric_slots = {{0, 1}};
    t(0, 1) = 1.0;
    EXPECT_EQ(code_of([&] { t.check_symmetries(); }), Errc::SymmetryViolation);
    t(1, 0) = 1.0;
    EXPECT_NO_THROW(t.check_symmetries());
}
