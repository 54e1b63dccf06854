#include "cosym/curvature.hpp"

#include "cosym/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace cosym {

namespace {

using V = Variance;

constexpr V Co = V::Covariant;
constexpr V Contra = V::Contravariant;

std::size_t sz(int k)
{
    return static_cast<std::size_t>(k);
}

DenseTensor metric_tensor(const MetricJet& jet)
{
    return DenseTensor::matrix(jet.n, jet.g, Co, Co);
}

} // namespace

ConnectionCoefficients christoffel(const MetricJet& jet, int derivative_order)
{
    const int n = jet.n;
    if (jet.order < 1) {
        throw Error(Errc::InsufficientJetOrder, "Christoffel symbols need a jet of order >= 1");
    }
    if (derivative_order < 0) {
        derivative_order = std::min(jet.order - 1, 2);
    }
    if (derivative_order > jet.order - 1 || derivative_order > 2) {
        throw Error(Errc::InsufficientJetOrder, "connection derivatives of order " + std::to_string(derivative_order) +
                                                    " need a jet of order " + std::to_string(derivative_order + 1));
    }
    require_nondegenerate(jet.g, n);

    const DenseTensor ginv = inverse_metric(metric_tensor(jet));
    const int d = derivative_order;

    // Inverse-metric derivatives: d g^-1 = -g^-1 dg g^-1 and its derivative.
    DenseTensor dginv(n, {Contra, Contra, Co});
    DenseTensor d2ginv(n, {Contra, Contra, Co, Co});
    if (d >= 1) {
        for (int m = 0; m < n; ++m) {
            for (int i = 0; i < n; ++i) {
                for (int j = 0; j < n; ++j) {
                    double sum = 0.0;
                    for (int a = 0; a < n; ++a) {
                        for (int b = 0; b < n; ++b) {
                            sum += ginv(i, a) * jet.dG(a, b, m) * ginv(b, j);
                        }
                    }
                    dginv(i, j, m) = -sum;
                }
            }
        }
    }
    if (d >= 2) {
        for (int m = 0; m < n; ++m) {
            for (int p = 0; p < n; ++p) {
                for (int i = 0; i < n; ++i) {
                    for (int j = 0; j < n; ++j) {
                        double sum = 0.0;
                        for (int a = 0; a < n; ++a) {
                            for (int b = 0; b < n; ++b) {
                                sum += dginv(i, a, p) * jet.dG(a, b, m) * ginv(b, j) +
                                       ginv(i, a) * jet.d2G(a, b, m, p) * ginv(b, j) +
                                       ginv(i, a) * jet.dG(a, b, m) * dginv(b, j, p);
                            }
                        }
                        d2ginv(i, j, m, p) = -sum;
                    }
                }
            }
        }
    }

    // Christoffel symbols of the first kind C_lij and their derivatives.
    DenseTensor c = DenseTensor::covariant(n, 3);
    DenseTensor dc = DenseTensor::covariant(n, d >= 1 ? 4 : 0);
    DenseTensor d2c = DenseTensor::covariant(n, d >= 2 ? 5 : 0);
    for (int l = 0; l < n; ++l) {
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) {
                c(l, i, j) = 0.5 * (jet.dG(j, l, i) + jet.dG(i, l, j) - jet.dG(i, j, l));
                for (int m = 0; m < n && d >= 1; ++m) {
                    dc(l, i, j, m) = 0.5 * (jet.d2G(j, l, i, m) + jet.d2G(i, l, j, m) - jet.d2G(i, j, l, m));
                    for (int p = 0; p < n && d >= 2; ++p) {
                        d2c(l, i, j, m, p) =
                            0.5 * (jet.d3G(j, l, i, m, p) + jet.d3G(i, l, j, m, p) - jet.d3G(i, j, l, m, p));
                    }
                }
            }
        }
    }

    ConnectionCoefficients conn;
    conn.n = n;
    conn.derivative_order = d;
    conn.gamma = DenseTensor(n, {Contra, Co, Co});
    conn.gamma.symmetric_slots = {{1, 2}};
    if (d >= 1) {
        conn.dgamma = DenseTensor(n, {Contra, Co, Co, Co});
    }
    if (d >= 2) {
        conn.d2gamma = DenseTensor(n, {Contra, Co, Co, Co, Co});
    }
    for (int k = 0; k < n; ++k) {
        for (int i = 0; i < n; ++i) {
            for (int j = i; j < n; ++j) {
                double g0 = 0.0;
                for (int l = 0; l < n; ++l) {
                    g0 += ginv(k, l) * c(l, i, j);
                }
                conn.gamma(k, i, j) = g0;
                conn.gamma(k, j, i) = g0;
                for (int m = 0; m < n && d >= 1; ++m) {
                    double g1 = 0.0;
                    for (int l = 0; l < n; ++l) {
                        g1 += dginv(k, l, m) * c(l, i, j) + ginv(k, l) * dc(l, i, j, m);
                    }
                    conn.dgamma(k, i, j, m) = g1;
                    conn.dgamma(k, j, i, m) = g1;
                }
                for (int m = 0; m < n && d >= 2; ++m) {
                    for (int p = m; p < n; ++p) {
                        double g2 = 0.0;
                        for (int l = 0; l < n; ++l) {
                            g2 += d2ginv(k, l, m, p) * c(l, i, j) + dginv(k, l, m) * dc(l, i, j, p) +
                                  dginv(k, l, p) * dc(l, i, j, m) + ginv(k, l) * d2c(l, i, j, m, p);
                        }
                        conn.d2gamma(k, i, j, m, p) = g2;
                        conn.d2gamma(k, j, i, m, p) = g2;
                        conn.d2gamma(k, i, j, p, m) = g2;
                        conn.d2gamma(k, j, i, p, m) = g2;
                    }
                }
            }
        }
    }
    return conn;
}

namespace {

// Mixed Riemann from Gamma and its first derivatives.
DenseTensor riemann_mixed_from(const DenseTensor& gamma, const DenseTensor& dgamma, int n)
{
    DenseTensor r(n, {Co, Co, Co, Contra});
    for (int j = 0; j < n; ++j) {
        for (int k = 0; k < n; ++k) {
            for (int l = 0; l < n; ++l) {
                for (int s = 0; s < n; ++s) {
                    double v = dgamma(s, j, l, k) - dgamma(s, k, l, j);
                    for (int m = 0; m < n; ++m) {
                        v += gamma(s, k, m) * gamma(m, j, l) - gamma(s, j, m) * gamma(m, k, l);
                    }
                    r(j, k, l, s) = v;
                }
            }
        }
    }
    return r;
}

DenseTensor lower_last(const DenseTensor& mixed, const DenseTensor& g)
{
    const int n = g.dim();
    DenseTensor r = DenseTensor::covariant(n, 4);
    for (int j = 0; j < n; ++j) {
        for (int k = 0; k < n; ++k) {
            for (int l = 0; l < n; ++l) {
                for (int m = 0; m < n; ++m) {
                    double v = 0.0;
                    for (int s = 0; s < n; ++s) {
                        v += mixed(j, k, l, s) * g(s, m);
                    }
                    r(j, k, l, m) = v;
                }
            }
        }
    }
    return r;
}

} // namespace

RiemannTensors riemann(const ConnectionCoefficients& conn, const DenseTensor& g)
{
    if (conn.derivative_order < 1) {
        throw Error(Errc::InsufficientJetOrder, "Riemann tensor needs first derivatives of the connection");
    }
    RiemannTensors out;
    out.mixed = riemann_mixed_from(conn.gamma, conn.dgamma, conn.n);
    out.covariant = lower_last(out.mixed, g);
    return out;
}

DenseTensor affine_riemann(const ConnectionCoefficients& conn)
{
    if (conn.derivative_order < 1) {
        throw Error(Errc::InsufficientJetOrder, "curvature needs first derivatives of the connection");
    }
    return riemann_mixed_from(conn.gamma, conn.dgamma, conn.n);
}

DenseTensor ricci_contraction(const DenseTensor& riemann_mixed)
{
    const int n = riemann_mixed.dim();
    DenseTensor rho = DenseTensor::covariant(n, 2);
    for (int j = 0; j < n; ++j) {
        for (int l = 0; l < n; ++l) {
            double v = 0.0;
            for (int s = 0; s < n; ++s) {
                v += riemann_mixed(j, s, l, s);
            }
            rho(j, l) = v;
        }
    }
    return rho;
}

RicciData ricci_scalar_schouten(const DenseTensor& riemann_mixed, const DenseTensor& g, const DenseTensor& g_inverse)
{
    const int n = g.dim();
    RicciData out;
    out.rho = ricci_contraction(riemann_mixed);
    double s = 0.0;
    for (int j = 0; j < n; ++j) {
        for (int l = 0; l < n; ++l) {
            s += g_inverse(j, l) * out.rho(j, l);
        }
    }
    out.s = s;
    out.sigma = out.rho - (s / (2.0 * n - 2.0)) * g;
    return out;
}

DenseTensor weyl(const DenseTensor& riemann_covariant, const DenseTensor& g, const DenseTensor& sigma)
{
    const int n = g.dim();
    if (n <= 2) {
        throw Error(Errc::DimensionTooSmall, "Weyl tensor needs n >= 3");
    }
    return riemann_covariant - (1.0 / (n - 2.0)) * valued_wedge(g, sigma);
}

DenseTensor covariant_derivative(const DenseTensor& t, const ConnectionCoefficients& conn, const DenseTensor& dT)
{
    const int n = conn.n;
    const int r = t.rank();
    auto expected = t.mask();
    expected.push_back(Co);
    if (dT.dim() != n || t.dim() != n || dT.mask() != expected) {
        throw Error(Errc::VarianceMaskMismatch, "derivative tensor does not match the tensor's variance mask");
    }
    DenseTensor out(n, expected);
    std::vector<int> idx(sz(r + 1));
    std::vector<int> src(sz(r));
    const std::size_t total = out.size();
    for (std::size_t flat = 0; flat < total; ++flat) {
        // Decode flat offset into idx (last slot = derivative direction).
        std::size_t rest = flat;
        for (int s = r; s >= 0; --s) {
            idx[sz(s)] = static_cast<int>(rest % sz(n));
            rest /= sz(n);
        }
        const int p = idx[sz(r)];
        double v = dT.data()[flat];
        for (int s = 0; s < r; ++s) {
            std::copy(idx.begin(), idx.begin() + r, src.begin());
            const int own = idx[sz(s)];
            for (int a = 0; a < n; ++a) {
                src[sz(s)] = a;
                if (t.mask()[sz(s)] == Co) {
                    v -= conn.gamma(a, p, own) * t.at(src);
                } else {
                    v += conn.gamma(own, p, a) * t.at(src);
                }
            }
        }
        out.data()[flat] = v;
    }
    return out;
}

double CurvatureBundle::scale() const
{
    const double m = riemann.max_abs();
    return m > 0.0 ? m : 1.0;
}

namespace {

// Coordinate derivative of a tensor given per-direction slices.
DenseTensor stack_derivative(const std::vector<DenseTensor>& slices, const std::vector<V>& mask, int n)
{
    auto full = mask;
    full.push_back(Co);
    DenseTensor out(n, full);
    const std::size_t inner = slices.front().size();
    for (std::size_t q = 0; q < inner; ++q) {
        for (int p = 0; p < n; ++p) {
            out.data()[q * sz(n) + sz(p)] = slices[sz(p)].data()[q];
        }
    }
    return out;
}

void fill_algebraic(CurvatureBundle& b, const DenseTensor& mixed)
{
    b.riemann_mixed = mixed;
    b.riemann = lower_last(mixed, b.g);
    b.riemann.antisymmetric_slots = {{0, 1}, {2, 3}};
    auto ricci = ricci_scalar_schouten(mixed, b.g, b.g_inverse);
    b.rho = std::move(ricci.rho);
    b.s = ricci.s;
    b.sigma = std::move(ricci.sigma);
    if (b.n >= 3) {
        b.weyl = weyl(b.riemann, b.g, b.sigma);
        b.weyl.antisymmetric_slots = {{0, 1}, {2, 3}};
    }
}

} // namespace

CurvatureBundle compute_curvature(const MetricJet& jet)
{
    if (jet.order < 2) {
        throw Error(Errc::InsufficientJetOrder, "curvature needs a jet of order >= 2");
    }
    const int n = jet.n;
    CurvatureBundle b;
    b.n = n;
    b.point = jet.point;
    b.g = metric_tensor(jet);
    b.conn = christoffel(jet);
    b.g_inverse = inverse_metric(b.g);
    fill_algebraic(b, riemann_mixed_from(b.conn.gamma, b.conn.dgamma, n));
    if (jet.order < 3) {
        return b;
    }
    b.has_derivatives = true;

    const auto& G = b.conn.gamma;
    const auto& dG = b.conn.dgamma;
    const auto& d2G = b.conn.d2gamma;

    // d_p R_jkl^s, then d_p R_jklm = d_p R_jkl^s g_sm + R_jkl^s d_p g_sm.
    std::vector<DenseTensor> dmixed(sz(n), DenseTensor(n, {Co, Co, Co, Contra}));
    std::vector<DenseTensor> dcov(sz(n), DenseTensor::covariant(n, 4));
    std::vector<DenseTensor> dg(sz(n), DenseTensor::covariant(n, 2));
    for (int p = 0; p < n; ++p) {
        auto& dm = dmixed[sz(p)];
        for (int j = 0; j < n; ++j) {
            for (int k = 0; k < n; ++k) {
                for (int l = 0; l < n; ++l) {
                    for (int s = 0; s < n; ++s) {
                        double v = d2G(s, j, l, k, p) - d2G(s, k, l, j, p);
                        for (int m = 0; m < n; ++m) {
                            v += dG(s, k, m, p) * G(m, j, l) + G(s, k, m) * dG(m, j, l, p) -
                                 dG(s, j, m, p) * G(m, k, l) - G(s, j, m) * dG(m, k, l, p);
                        }
                        dm(j, k, l, s) = v;
                    }
                }
            }
        }
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) {
                dg[sz(p)](i, j) = jet.dG(i, j, p);
            }
        }
        auto& dc = dcov[sz(p)];
        for (int j = 0; j < n; ++j) {
            for (int k = 0; k < n; ++k) {
                for (int l = 0; l < n; ++l) {
                    for (int m = 0; m < n; ++m) {
                        double v = 0.0;
                        for (int s = 0; s < n; ++s) {
                            v += dm(j, k, l, s) * b.g(s, m) + b.riemann_mixed(j, k, l, s) * jet.dG(s, m, p);
                        }
                        dc(j, k, l, m) = v;
                    }
                }
            }
        }
    }

    // d rho, d s, d sigma, d W.
    std::vector<DenseTensor> drho(sz(n), DenseTensor::covariant(n, 2));
    std::vector<DenseTensor> dweyl;
    for (int p = 0; p < n; ++p) {
        for (int j = 0; j < n; ++j) {
            for (int l = 0; l < n; ++l) {
                double v = 0.0;
                for (int s = 0; s < n; ++s) {
                    v += dmixed[sz(p)](j, s, l, s);
                }
                drho[sz(p)](j, l) = v;
            }
        }
        if (n >= 3) {
            double ds = 0.0;
            for (int j = 0; j < n; ++j) {
                for (int l = 0; l < n; ++l) {
                    double dginv = 0.0;
                    for (int a = 0; a < n; ++a) {
                        for (int c = 0; c < n; ++c) {
                            dginv -= b.g_inverse(j, a) * jet.dG(a, c, p) * b.g_inverse(c, l);
                        }
                    }
                    ds += dginv * b.rho(j, l) + b.g_inverse(j, l) * drho[sz(p)](j, l);
                }
            }
            const double k = 1.0 / (2.0 * n - 2.0);
            const DenseTensor dsigma = drho[sz(p)] - (k * ds) * b.g - (k * b.s) * dg[sz(p)];
            const double w = 1.0 / (n - 2.0);
            dweyl.push_back(dcov[sz(p)] - w * (valued_wedge(dg[sz(p)], b.sigma) + valued_wedge(b.g, dsigma)));
        }
    }

    const std::vector<V> cov4(4, Co);
    b.nabla_riemann = covariant_derivative(b.riemann, b.conn, stack_derivative(dcov, cov4, n));
    b.nabla_rho = covariant_derivative(b.rho, b.conn, stack_derivative(drho, {Co, Co}, n));
    if (n >= 3) {
        b.nabla_weyl = covariant_derivative(b.weyl, b.conn, stack_derivative(dweyl, cov4, n));
    }
    return b;
}

CurvatureBundle curvature_by_christoffel_differences(const JetSource& source, std::span<const double> point,
                                                     double step)
{
    const MetricJet center = source(point, 1);
    const int n = center.n;
    const ConnectionCoefficients c0 = christoffel(center, 0);
    DenseTensor dgamma(n, {Contra, Co, Co, Co});
    std::vector<double> x(point.begin(), point.end());
    for (int m = 0; m < n; ++m) {
        const double x0 = x[sz(m)];
        const double h = (x0 + step) - x0;
        x[sz(m)] = x0 + h;
        const auto plus = christoffel(source(x, 1), 0);
        x[sz(m)] = x0 - h;
        const auto minus = christoffel(source(x, 1), 0);
        x[sz(m)] = x0;
        for (int k = 0; k < n; ++k) {
            for (int i = 0; i < n; ++i) {
                for (int j = 0; j < n; ++j) {
                    dgamma(k, i, j, m) = (plus.gamma(k, i, j) - minus.gamma(k, i, j)) / (2.0 * h);
                }
            }
        }
    }
    CurvatureBundle b;
    b.n = n;
    b.point = center.point;
    b.g = metric_tensor(center);
    b.g_inverse = inverse_metric(b.g);
    b.conn = c0;
    b.conn.dgamma = dgamma;
    b.conn.derivative_order = 1;
    fill_algebraic(b, riemann_mixed_from(c0.gamma, dgamma, n));
    return b;
}

DenseTensor nabla_weyl_by_differences(const JetSource& source, std::span<const double> point, double step)
{
    const CurvatureBundle center = compute_curvature(source(point, 2));
    const int n = center.n;
    std::vector<DenseTensor> slices;
    std::vector<double> x(point.begin(), point.end());
    for (int m = 0; m < n; ++m) {
        const double x0 = x[sz(m)];
        const double h = (x0 + step) - x0;
        x[sz(m)] = x0 + h;
        const auto plus = compute_curvature(source(x, 2));
        x[sz(m)] = x0 - h;
        const auto minus = compute_curvature(source(x, 2));
        x[sz(m)] = x0;
        slices.push_back((1.0 / (2.0 * h)) * (plus.weyl - minus.weyl));
    }
    return covariant_derivative(center.weyl, center.conn, stack_derivative(slices, std::vector<V>(4, Co), n));
}

double first_bianchi_defect(const DenseTensor& t)
{
    const int n = t.dim();
    double worst = 0.0;
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            for (int k = 0; k < n; ++k) {
                for (int l = 0; l < n; ++l) {
                    worst = std::max(worst, std::abs(t(i, j, k, l) + t(j, k, i, l) + t(k, i, j, l)));
                }
            }
        }
    }
    return worst;
}

double pair_symmetry_defect(const DenseTensor& t)
{
    const int n = t.dim();
    double worst = 0.0;
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            for (int k = 0; k < n; ++k) {
                for (int l = 0; l < n; ++l) {
                    const double v = t(i, j, k, l);
                    worst = std::max({worst, std::abs(v + t(j, i, k, l)), std::abs(v + t(i, j, l, k)),
                                      std::abs(v - t(k, l, i, j))});
                }
            }
        }
    }
    return worst;
}

double trace_defect(const DenseTensor& t, const DenseTensor& g_inverse)
{
    double worst = 0.0;
    for (int a = 0; a < 4; ++a) {
        for (int b = a + 1; b < 4; ++b) {
            worst = std::max(worst, contract(t, a, b, &g_inverse).max_abs());
        }
    }
    return worst;
}

DenseTensor weyl_divergence(const DenseTensor& nabla_weyl, const DenseTensor& g_inverse)
{
    // Slot 0 of W against the derivative slot 4.
    return contract(nabla_weyl, 0, 4, &g_inverse);
}

double codazzi_defect(const DenseTensor& nabla_rho)
{
    const int n = nabla_rho.dim();
    double worst = 0.0;
    for (int j = 0; j < n; ++j) {
        for (int l = 0; l < n; ++l) {
            for (int p = 0; p < n; ++p) {
                worst = std::max(worst, std::abs(nabla_rho(j, l, p) - nabla_rho(p, l, j)));
            }
        }
    }
    return worst;
}

} // namespace cosym
