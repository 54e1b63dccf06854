#include "cosym/families.hpp"

#include "cosym/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace cosym {

namespace {

std::size_t sz(int k)
{
    return static_cast<std::size_t>(k);
}

std::string num(double v)
{
    std::ostringstream os;
    os.precision(6);
    os << v;
    return os.str();
}

[[noreturn]] void violated(const std::string& what)
{
    throw Error(Errc::SpecInvariantViolated, what);
}

void require_domain(const std::vector<Interval>& domain, int n)
{
    if (static_cast<int>(domain.size()) != n) {
        violated("domain box needs " + std::to_string(n) + " intervals, got " + std::to_string(domain.size()));
    }
    for (const auto& iv : domain) {
        if (!std::isfinite(iv.lo) || !std::isfinite(iv.hi) || !(iv.lo < iv.hi)) {
            violated("domain intervals must be finite and nonempty");
        }
    }
}

void require_gram(const Eigen::MatrixXd& gram, int size, const std::string& name)
{
    if (gram.rows() != size || gram.cols() != size) {
        violated(name + " must be " + std::to_string(size) + "x" + std::to_string(size));
    }
    if (size == 0) {
        return;
    }
    const double asym = (gram - gram.transpose()).cwiseAbs().maxCoeff();
    if (asym > 0.0) {
        violated(name + " is not symmetric (defect " + num(asym) + ")");
    }
    std::vector<double> flat(sz(size) * sz(size));
    for (int i = 0; i < size; ++i) {
        for (int j = 0; j < size; ++j) {
            flat[sz(i) * sz(size) + sz(j)] = gram(i, j);
        }
    }
    if (!(degeneracy_ratio(flat, size) >= kDegeneracyThreshold)) {
        violated(name + " is degenerate");
    }
}

std::vector<std::string> d1_labels(int n)
{
    std::vector<std::string> labels{"t", "s"};
    for (int a = 1; a <= n - 2; ++a) {
        labels.push_back("psi" + std::to_string(a));
    }
    return labels;
}

// Quadratic form sum_ab M_ab y_a y_b with y_a = coordinate `offset + a`.
Polynomial quadratic_form(const Eigen::MatrixXd& m, int vars, int offset)
{
    Polynomial p(vars);
    for (Eigen::Index a = 0; a < m.rows(); ++a) {
        for (Eigen::Index b = 0; b < m.cols(); ++b) {
            const double c = 0.5 * (m(a, b) + m(b, a));
            if (c == 0.0) {
                continue;
            }
            Polynomial::Exponents e(sz(vars), 0);
            e[sz(offset + static_cast<int>(a))] += 1;
            e[sz(offset + static_cast<int>(b))] += 1;
            p.add_term(c, e);
        }
    }
    return p;
}

// Surface polynomial in (x^1, x^2) as a polynomial in `vars` chart coordinates.
Polynomial embed(const SurfacePolynomial& p, int vars)
{
    if (p.vars() != 2) {
        throw Error(Errc::ShapeMismatch, "surface polynomials take two variables");
    }
    Polynomial out(vars);
    for (const auto& [e, c] : p.terms()) {
        Polynomial::Exponents full(sz(vars), 0);
        full[0] = e[0];
        full[1] = e[1];
        out.add_term(c, full);
    }
    return out;
}

double value(const SurfacePolynomial& p, std::span<const double> x)
{
    return p.evaluate(x.first(2));
}

DenseTensor tensor_at(const SurfaceMatrix& m, std::span<const double> x, Variance v)
{
    DenseTensor t(2, {v, v});
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
            t(i, j) = value(m[sz(i)][sz(j)], x);
        }
    }
    return t;
}

DenseTensor derivative_at(const SurfaceMatrix& m, std::span<const double> x, Variance v)
{
    DenseTensor t(2, {v, v, Variance::Covariant});
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
            for (int k = 0; k < 2; ++k) {
                t(i, j, k) = value(m[sz(i)][sz(j)].derivative(k), x);
            }
        }
    }
    return t;
}

std::vector<std::vector<double>> x_grid(Interval x1, Interval x2)
{
    constexpr int steps = 5;
    std::vector<std::vector<double>> points;
    for (int i = 0; i < steps; ++i) {
        for (int j = 0; j < steps; ++j) {
            points.push_back({x1.lo + (i + 0.5) / steps * (x1.hi - x1.lo), x2.lo + (j + 0.5) / steps * (x2.hi - x2.lo)});
        }
    }
    return points;
}

SurfacePolynomial sp_const(double c)
{
    return Polynomial::constant(2, c);
}

SurfacePolynomial sp_monomial(double c, int e1, int e2)
{
    return Polynomial::monomial(c, {e1, e2});
}

} // namespace

OperatorDiagnostics validate_operator(const Eigen::MatrixXd& A, const Eigen::MatrixXd& gram)
{
    OperatorDiagnostics d;
    if (A.rows() != A.cols() || gram.rows() != gram.cols() || A.rows() != gram.rows()) {
        d.reason = "A and gram must be square of equal size";
        return d;
    }
    d.trace = A.trace();
    const Eigen::MatrixXd ga = gram * A;
    d.asymmetry = A.size() == 0 ? 0.0 : (ga - ga.transpose()).cwiseAbs().maxCoeff();
    d.norm = A.norm();
    const double tol = 1e-10 * std::max(1.0, d.norm);
    if (d.norm == 0.0) {
        d.reason = "A must be nonzero";
    } else if (std::abs(d.trace) > tol) {
        d.reason = "trace A ≠ 0 (trace = " + num(d.trace) + ")";
    } else if (d.asymmetry > tol * std::max(1.0, gram.cwiseAbs().maxCoeff())) {
        d.reason = "A is not self-adjoint for gram (asymmetry of gram*A = " + num(d.asymmetry) + ")";
    } else {
        d.pass = true;
    }
    return d;
}

void validate(const D1FamilySpec& spec)
{
    if (spec.n < 4) {
        violated("d=1 family needs n >= 4");
    }
    require_gram(spec.gram, spec.n - 2, "gram");
    const auto diag = validate_operator(spec.A, spec.gram);
    if (!diag.pass) {
        violated(diag.reason);
    }
    require_domain(spec.domain, spec.n);
    if (spec.f.pieces().empty()) {
        violated("f is missing");
    }
    if (spec.f.lower() > spec.domain[0].lo || spec.f.upper() < spec.domain[0].hi) {
        violated("t-interval [" + num(spec.domain[0].lo) + ", " + num(spec.domain[0].hi) +
                 "] is not inside the domain of f");
    }
}

MetricField build_d1_metric(const D1FamilySpec& spec, bool check)
{
    if (check) {
        validate(spec);
    }
    const int n = spec.n;
    const Polynomial theta = quadratic_form(spec.gram, n, 2);
    const Polynomial a_form = quadratic_form(spec.gram * spec.A, n, 2);
    const Expr kappa =
        Expr::product({Expr::piecewise(spec.f, Expr::coordinate(0)), Expr::polynomial(theta)}) + Expr::polynomial(a_form);

    std::vector<Expr> upper;
    for (int i = 0; i < n; ++i) {
        for (int j = i; j < n; ++j) {
            if (i == 0 && j == 0) {
                upper.push_back(kappa);
            } else if (i == 0 && j == 1) {
                upper.push_back(Expr::constant(0.5));
            } else if (i >= 2 && j >= 2) {
                upper.push_back(Expr::constant(spec.gram(i - 2, j - 2)));
            } else {
                upper.push_back(Expr::constant(0.0));
            }
        }
    }
    return MetricField(ChartSpec{n, spec.domain, d1_labels(n)}, std::move(upper));
}

double d1_kappa(const D1FamilySpec& spec, std::span<const double> x)
{
    const int m = spec.n - 2;
    Eigen::VectorXd psi(m);
    for (int a = 0; a < m; ++a) {
        psi(a) = x[sz(a + 2)];
    }
    const double theta = psi.dot(spec.gram * psi);
    return spec.f.evaluate(x[0])[0] * theta + psi.dot(spec.gram * spec.A * psi);
}

Eigen::MatrixXd admissible_operator(const Eigen::MatrixXd& gram, const Eigen::MatrixXd& S)
{
    const Eigen::MatrixXd sym = 0.5 * (S + S.transpose());
    Eigen::MatrixXd a = gram.inverse() * sym;
    const auto m = static_cast<double>(a.rows());
    a -= (a.trace() / m) * Eigen::MatrixXd::Identity(a.rows(), a.cols());
    return a;
}

SurfaceMatrix zero_surface_matrix()
{
    return {{{Polynomial(2), Polynomial(2)}, {Polynomial(2), Polynomial(2)}}};
}

SurfaceMatrix surface_ricci(const SurfaceConnectionSpec& surface)
{
    const auto& G = surface.gamma;
    auto r = [&](int j, int k, int l, int s) {
        Polynomial v = G[sz(s)][sz(j)][sz(l)].derivative(k) - G[sz(s)][sz(k)][sz(l)].derivative(j);
        for (int m = 0; m < 2; ++m) {
            v += G[sz(s)][sz(k)][sz(m)] * G[sz(m)][sz(j)][sz(l)];
            v -= G[sz(s)][sz(j)][sz(m)] * G[sz(m)][sz(k)][sz(l)];
        }
        return v;
    };
    SurfaceMatrix rho = zero_surface_matrix();
    for (int j = 0; j < 2; ++j) {
        for (int l = 0; l < 2; ++l) {
            for (int s = 0; s < 2; ++s) {
                rho[sz(j)][sz(l)] += r(j, s, l, s);
            }
        }
    }
    return rho;
}

SurfaceMatrix tau_from_T(const SurfaceMatrix& T, const SurfaceMatrix& alpha)
{
    SurfaceMatrix tau = zero_surface_matrix();
    for (int j = 0; j < 2; ++j) {
        for (int k = 0; k < 2; ++k) {
            for (int l = 0; l < 2; ++l) {
                for (int m = 0; m < 2; ++m) {
                    tau[sz(j)][sz(k)] += alpha[sz(j)][sz(l)] * alpha[sz(k)][sz(m)] * T[sz(l)][sz(m)];
                }
            }
        }
    }
    if (tau[0][1] != tau[1][0]) {
        throw Error(Errc::ShapeMismatch, "tau came out asymmetric; T must be symmetric");
    }
    return tau;
}

ConnectionCoefficients surface_connection(const SurfaceConnectionSpec& surface, std::span<const double> x,
                                          int derivative_order)
{
    using V = Variance;
    ConnectionCoefficients c;
    c.n = 2;
    c.derivative_order = derivative_order;
    c.gamma = DenseTensor(2, {V::Contravariant, V::Covariant, V::Covariant});
    if (derivative_order >= 1) {
        c.dgamma = DenseTensor(2, {V::Contravariant, V::Covariant, V::Covariant, V::Covariant});
    }
    if (derivative_order >= 2) {
        c.d2gamma = DenseTensor(2, {V::Contravariant, V::Covariant, V::Covariant, V::Covariant, V::Covariant});
    }
    for (int k = 0; k < 2; ++k) {
        for (int i = 0; i < 2; ++i) {
            for (int j = 0; j < 2; ++j) {
                const auto& p = surface.gamma[sz(k)][sz(i)][sz(j)];
                c.gamma(k, i, j) = value(p, x);
                for (int m = 0; m < 2 && derivative_order >= 1; ++m) {
                    const Polynomial dp = p.derivative(m);
                    c.dgamma(k, i, j, m) = value(dp, x);
                    for (int q = 0; q < 2 && derivative_order >= 2; ++q) {
                        c.d2gamma(k, i, j, m, q) = value(dp.derivative(q), x);
                    }
                }
            }
        }
    }
    return c;
}

DenseTensor surface_ricci_at(const SurfaceConnectionSpec& surface, std::span<const double> x)
{
    return ricci_contraction(affine_riemann(surface_connection(surface, x, 1)));
}

double equiaffine_residual(const SurfaceConnectionSpec& surface, std::span<const double> x)
{
    const auto conn = surface_connection(surface, x, 0);
    const DenseTensor alpha = tensor_at(surface.alpha, x, Variance::Covariant);
    const DenseTensor nabla = covariant_derivative(alpha, conn, derivative_at(surface.alpha, x, Variance::Covariant));
    const double scale = alpha.max_abs();
    if (scale == 0.0) {
        return std::numeric_limits<double>::infinity();
    }
    return nabla.max_abs() / scale;
}

double divergence_residual(const SurfaceConnectionSpec& surface, std::span<const double> x)
{
    const auto& G = surface.gamma;
    const auto& T = surface.T;
    // X^k = nabla_j T^jk, then div X = nabla_k X^k, all symbolic.
    std::array<Polynomial, 2> X{Polynomial(2), Polynomial(2)};
    for (int k = 0; k < 2; ++k) {
        for (int j = 0; j < 2; ++j) {
            X[sz(k)] += T[sz(j)][sz(k)].derivative(j);
            for (int m = 0; m < 2; ++m) {
                X[sz(k)] += G[sz(j)][sz(j)][sz(m)] * T[sz(m)][sz(k)];
                X[sz(k)] += G[sz(k)][sz(j)][sz(m)] * T[sz(j)][sz(m)];
            }
        }
    }
    Polynomial div(2);
    for (int k = 0; k < 2; ++k) {
        div += X[sz(k)].derivative(k);
        for (int m = 0; m < 2; ++m) {
            div += G[sz(k)][sz(k)][sz(m)] * X[sz(m)];
        }
    }
    const DenseTensor rho = surface_ricci_at(surface, x);
    double pairing = 0.0;
    for (int j = 0; j < 2; ++j) {
        for (int k = 0; k < 2; ++k) {
            pairing += rho(j, k) * value(T[sz(j)][sz(k)], x);
        }
    }
    return value(div, x) + pairing - surface.epsilon;
}

namespace {

DenseTensor surface_nabla_rho(const SurfaceConnectionSpec& surface, std::span<const double> x)
{
    const SurfaceMatrix rho = surface_ricci(surface);
    const auto conn = surface_connection(surface, x, 0);
    return covariant_derivative(tensor_at(rho, x, Variance::Covariant), conn,
                                derivative_at(rho, x, Variance::Covariant));
}

} // namespace

double projective_flatness_residual(const SurfaceConnectionSpec& surface, std::span<const double> x)
{
    const double eq = equiaffine_residual(surface, x);
    if (!(eq <= 1e-9)) {
        throw Error(Errc::NotEquiaffine, "nabla alpha = " + num(eq) + " relative to |alpha|");
    }
    return codazzi_defect(surface_nabla_rho(surface, x));
}

double surface_ricci_parallel_residual(const SurfaceConnectionSpec& surface, std::span<const double> x)
{
    return surface_nabla_rho(surface, x).max_abs();
}

void validate(const SurfaceConnectionSpec& surface, Interval x1, Interval x2)
{
    for (int k = 0; k < 2; ++k) {
        if (surface.gamma[sz(k)][0][1] != surface.gamma[sz(k)][1][0]) {
            violated("connection has torsion (Gamma^" + std::to_string(k + 1) + "_12 != Gamma^" +
                     std::to_string(k + 1) + "_21)");
        }
    }
    if (surface.T[0][1] != surface.T[1][0]) {
        violated("T is not symmetric");
    }
    if (!surface.alpha[0][0].is_zero() || !surface.alpha[1][1].is_zero() ||
        !(surface.alpha[0][1] + surface.alpha[1][0]).is_zero()) {
        violated("alpha is not antisymmetric");
    }
    if (surface.epsilon != 1.0 && surface.epsilon != -1.0) {
        violated("epsilon must be +1 or -1");
    }
    for (const auto& x : x_grid(x1, x2)) {
        const std::string at = " at (" + num(x[0]) + ", " + num(x[1]) + ")";
        if (!(std::abs(value(surface.alpha[0][1], x)) > 1e-12)) {
            violated("alpha vanishes" + at);
        }
        const double eq = equiaffine_residual(surface, x);
        if (!(eq <= 1e-9)) {
            violated("alpha is not parallel: |nabla alpha| = " + num(eq) + at);
        }
        const double pf = projective_flatness_residual(surface, x);
        if (!(pf < 1e-8)) {
            violated("connection is not projectively flat: residual " + num(pf) + at);
        }
        const double dv = divergence_residual(surface, x);
        if (!(std::abs(dv) < 1e-8)) {
            violated("T fails the divergence equation: residual " + num(dv) + at);
        }
    }
}

void validate(const D2FamilySpec& spec)
{
    if (spec.n < 4) {
        violated("d=2 family needs n >= 4");
    }
    require_gram(spec.gramV, spec.n - 4, "gramV");
    require_domain(spec.domain, spec.n);
    validate(spec.surface, spec.domain[0], spec.domain[1]);
}

MetricField riemann_extension(const SurfaceConnectionSpec& surface, std::vector<Interval> domain)
{
    require_domain(domain, 4);
    std::vector<Expr> upper;
    for (int i = 0; i < 4; ++i) {
        for (int j = i; j < 4; ++j) {
            if (i < 2 && j < 2) {
                Polynomial c(4);
                for (int l = 0; l < 2; ++l) {
                    c -= 2.0 * (Polynomial::variable(4, 2 + l) * embed(surface.gamma[sz(l)][sz(i)][sz(j)], 4));
                }
                upper.push_back(Expr::polynomial(c));
            } else if (i < 2 && j == i + 2) {
                upper.push_back(Expr::constant(1.0));
            } else {
                upper.push_back(Expr::constant(0.0));
            }
        }
    }
    return MetricField(ChartSpec{4, std::move(domain), {"x1", "x2", "p1", "p2"}}, std::move(upper));
}

MetricField build_d2_metric(const D2FamilySpec& spec, bool check)
{
    if (check) {
        validate(spec);
    }
    const int n = spec.n;
    const SurfaceMatrix tau = tau_from_T(spec.surface.T, spec.surface.alpha);
    const SurfaceMatrix rho = surface_ricci(spec.surface);
    const Polynomial theta = quadratic_form(spec.gramV, n, 4);

    std::vector<Expr> upper;
    std::vector<std::string> labels{"x1", "x2", "p1", "p2"};
    for (int a = 1; a <= n - 4; ++a) {
        labels.push_back("v" + std::to_string(a));
    }
    for (int i = 0; i < n; ++i) {
        for (int j = i; j < n; ++j) {
            if (i < 2 && j < 2) {
                Polynomial c(n);
                for (int l = 0; l < 2; ++l) {
                    c -= 2.0 * (Polynomial::variable(n, 2 + l) * embed(spec.surface.gamma[sz(l)][sz(i)][sz(j)], n));
                }
                c -= 2.0 * embed(tau[sz(i)][sz(j)], n);
                const Polynomial rho_sym = 0.5 * (embed(rho[sz(i)][sz(j)], n) + embed(rho[sz(j)][sz(i)], n));
                c -= theta * rho_sym;
                upper.push_back(Expr::polynomial(c));
            } else if (i < 2 && j == i + 2) {
                upper.push_back(Expr::constant(1.0));
            } else if (i >= 4 && j >= 4) {
                upper.push_back(Expr::constant(spec.gramV(i - 4, j - 4)));
            } else {
                upper.push_back(Expr::constant(0.0));
            }
        }
    }
    return MetricField(ChartSpec{n, spec.domain, labels}, std::move(upper));
}

D1FamilySpec d1_example(int n)
{
    D1FamilySpec spec;
    spec.n = n;
    spec.gram = Eigen::MatrixXd::Identity(n - 2, n - 2);
    spec.A = Eigen::MatrixXd::Zero(n - 2, n - 2);
    spec.A(0, 0) = 1.0;
    spec.A(1, 1) = -1.0;
    spec.f = PiecewisePolynomial::polynomial({0.0, 1.0});
    spec.domain.assign(sz(n), Interval{-1.0, 1.0});
    return spec;
}

PiecewisePolynomial piecewise_flat_then_quartic()
{
    const double inf = std::numeric_limits<double>::infinity();
    return PiecewisePolynomial({{-inf, 0.0, {0.0}}, {0.0, inf, {0.0, 0.0, 0.0, 0.0, 1.0}}});
}

// Gamma = 0: div div T = d_1 d_1 (x1)^2/2 = 1 = eps.
SurfaceConnectionSpec surface_flat_fixture()
{
    SurfaceConnectionSpec s;
    s.gamma = {zero_surface_matrix(), zero_surface_matrix()};
    s.alpha = zero_surface_matrix();
    s.alpha[0][1] = sp_const(1.0);
    s.alpha[1][0] = sp_const(-1.0);
    s.T = zero_surface_matrix();
    s.T[0][0] = sp_monomial(0.5, 2, 0);
    s.epsilon = 1.0;
    return s;
}

// Gamma^2_11 = x2 only. Traces Gamma^m_km vanish, so a constant alpha is
// parallel. Gamma*Gamma terms vanish (Gamma^s_k2 = 0), R_121^2 = d_2 Gamma^2_11 = 1,
// rho = dx1 dx1; nabla rho needs Gamma^1 = 0, so nabla rho = 0.
// T^22 = eps (x2)^2/2: X^2 = d_2 T^22 = eps x2, div X = eps, (rho, T) = rho_11 T^11 = 0.
SurfaceConnectionSpec surface_parallel_fixture(double epsilon)
{
    SurfaceConnectionSpec s = surface_flat_fixture();
    s.gamma[1][0][0] = sp_monomial(1.0, 0, 1);
    s.T = zero_surface_matrix();
    s.T[1][1] = sp_monomial(0.5 * epsilon, 0, 2);
    s.epsilon = epsilon;
    return s;
}

// Gamma^2_11 = x1 x2 only: as above with rho = x1 dx1 dx1, nabla rho = dx1 dx1 dx1
// (totally symmetric, nonzero). The same T solves the divergence equation.
SurfaceConnectionSpec surface_nonparallel_fixture(double epsilon)
{
    SurfaceConnectionSpec s = surface_parallel_fixture(epsilon);
    s.gamma[1][0][0] = sp_monomial(1.0, 1, 1);
    return s;
}

D2FamilySpec d2_example(const SurfaceConnectionSpec& surface, int n)
{
    D2FamilySpec spec;
    spec.surface = surface;
    spec.n = n;
    spec.gramV = Eigen::MatrixXd::Identity(n - 4, n - 4);
    spec.domain.assign(sz(n), Interval{-1.0, 1.0});
    return spec;
}

} // namespace cosym
