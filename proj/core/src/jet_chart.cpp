#include "cosym/jet_chart.hpp"

#include "cosym/errors.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <map>

namespace cosym {

namespace {

std::size_t sz(int k)
{
    return static_cast<std::size_t>(k);
}

std::string format_point(std::span<const double> x)
{
    std::string out = "(";
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (i != 0) {
            out += ", ";
        }
        out += std::to_string(x[i]);
    }
    return out + ")";
}

void require_point(const ChartSpec& chart, std::span<const double> point)
{
    if (static_cast<int>(point.size()) != chart.n) {
        throw Error(Errc::DimensionMismatch, "point has " + std::to_string(point.size()) + " coordinates, chart has " +
                                                 std::to_string(chart.n));
    }
    if (!chart.strictly_inside(point)) {
        throw Error(Errc::PointOutsideDomain, "point " + format_point(point) + " is not strictly inside the chart");
    }
}

void require_order(int order)
{
    if (order < 0 || order > kMaxJetOrder) {
        throw Error(Errc::JetOrderUnsupported, "jet order " + std::to_string(order) + " outside 0..3");
    }
}

// Writes one value into every slot of a block that is a permutation of the
// derivative multiset, so the symmetries hold bit-exactly.
void scatter(MetricJet& jet, int i, int j, const std::vector<int>& d, double value)
{
    const auto n = sz(jet.n);
    std::vector<int> perm = d;
    std::sort(perm.begin(), perm.end());
    do {
        for (int pass = 0; pass < 2; ++pass) {
            const int a = pass == 0 ? i : j;
            const int b = pass == 0 ? j : i;
            std::size_t off = sz(a) * n + sz(b);
            for (int k : perm) {
                off = off * n + sz(k);
            }
            switch (perm.size()) {
            case 0: jet.g[off] = value; break;
            case 1: jet.dg[off] = value; break;
            case 2: jet.d2g[off] = value; break;
            default: jet.d3g[off] = value; break;
            }
        }
    } while (std::next_permutation(perm.begin(), perm.end()));
}

std::vector<std::vector<int>> multisets(int n, int order)
{
    std::vector<std::vector<int>> out;
    for (int a = 0; a < n && order >= 1; ++a) {
        out.push_back({a});
    }
    for (int a = 0; a < n && order >= 2; ++a) {
        for (int b = a; b < n; ++b) {
            out.push_back({a, b});
        }
    }
    for (int a = 0; a < n && order >= 3; ++a) {
        for (int b = a; b < n; ++b) {
            for (int c = b; c < n; ++c) {
                out.push_back({a, b, c});
            }
        }
    }
    return out;
}

struct StencilTap {
    int offset;
    double weight;
};

// Central stencils for derivatives of multiplicity 1..3 along one axis (unit step).
std::vector<StencilTap> stencil(int multiplicity)
{
    switch (multiplicity) {
    case 1: return {{-1, -0.5}, {1, 0.5}};
    case 2: return {{-1, 1.0}, {0, -2.0}, {1, 1.0}};
    default: return {{-2, -0.5}, {-1, 1.0}, {1, -1.0}, {2, 0.5}};
    }
}

} // namespace

void ChartSpec::validate() const
{
    if (n < 2) {
        throw Error(Errc::DimensionTooSmall, "chart dimension must be at least 2");
    }
    if (static_cast<int>(domain.size()) != n) {
        throw Error(Errc::ShapeMismatch, "chart domain needs one interval per coordinate");
    }
    for (const auto& iv : domain) {
        if (!std::isfinite(iv.lo) || !std::isfinite(iv.hi) || !(iv.lo < iv.hi)) {
            throw Error(Errc::ShapeMismatch, "chart interval must be finite and nonempty");
        }
    }
    if (!labels.empty() && static_cast<int>(labels.size()) != n) {
        throw Error(Errc::ShapeMismatch, "chart labels must match the dimension");
    }
}

bool ChartSpec::strictly_inside(std::span<const double> x) const
{
    for (std::size_t i = 0; i < domain.size(); ++i) {
        if (!(x[i] > domain[i].lo && x[i] < domain[i].hi)) {
            return false;
        }
    }
    return true;
}

bool ChartSpec::inside(std::span<const double> x) const
{
    for (std::size_t i = 0; i < domain.size(); ++i) {
        if (!(x[i] >= domain[i].lo && x[i] <= domain[i].hi)) {
            return false;
        }
    }
    return true;
}

MetricJet::MetricJet(int dim, int jet_order) : n(dim), order(jet_order)
{
    const auto u = sz(dim);
    point.assign(u, 0.0);
    g.assign(u * u, 0.0);
    if (jet_order >= 1) {
        dg.assign(u * u * u, 0.0);
    }
    if (jet_order >= 2) {
        d2g.assign(u * u * u * u, 0.0);
    }
    if (jet_order >= 3) {
        d3g.assign(u * u * u * u * u, 0.0);
    }
}

MetricField::MetricField(ChartSpec chart, std::vector<Expr> upper) : chart_(std::move(chart)), upper_(std::move(upper))
{
    chart_.validate();
    const auto n = sz(chart_.n);
    if (upper_.size() != n * (n + 1) / 2) {
        throw Error(Errc::ShapeMismatch, "metric field needs n(n+1)/2 components");
    }
    for (const auto& e : upper_) {
        if (e.max_coordinate() >= chart_.n) {
            throw Error(Errc::InvalidExpression, "component references a coordinate beyond the chart dimension");
        }
    }
}

const Expr& MetricField::component(int i, int j) const
{
    if (i > j) {
        std::swap(i, j);
    }
    const auto n = sz(chart_.n);
    const auto row = sz(i);
    // Offset of row i in the packed upper triangle.
    const std::size_t start = row * (2 * n - row + 1) / 2;
    return upper_.at(start + sz(j) - row);
}

std::vector<double> MetricField::components_at(std::span<const double> x) const
{
    const int n = chart_.n;
    std::vector<double> g(sz(n) * sz(n));
    for (int i = 0; i < n; ++i) {
        for (int j = i; j < n; ++j) {
            const double v = component(i, j).evaluate(x);
            g[sz(i) * sz(n) + sz(j)] = v;
            g[sz(j) * sz(n) + sz(i)] = v;
        }
    }
    return g;
}

MetricField MetricField::with_domain(std::vector<Interval> domain) const
{
    ChartSpec chart = chart_;
    chart.domain = std::move(domain);
    return MetricField(std::move(chart), upper_);
}

MetricField MetricField::with_component_added(int i, int j, const Expr& extra) const
{
    if (i > j) {
        std::swap(i, j);
    }
    auto upper = upper_;
    const auto row = sz(i);
    const std::size_t slot = row * (2 * sz(chart_.n) - row + 1) / 2 + sz(j) - row;
    upper.at(slot) = upper.at(slot) + extra;
    return MetricField(chart_, std::move(upper));
}

double degeneracy_ratio(std::span<const double> g, int n)
{
    Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> m(g.data(), n, n);
    const double scale = m.cwiseAbs().maxCoeff();
    if (scale == 0.0) {
        return 0.0;
    }
    const Eigen::MatrixXd normalized = m / scale;
    return std::abs(normalized.partialPivLu().determinant());
}

void require_nondegenerate(std::span<const double> g, int n)
{
    const double ratio = degeneracy_ratio(g, n);
    if (!(ratio >= kDegeneracyThreshold)) {
        throw Error(Errc::DegenerateMetric, "scaled |det g| = " + std::to_string(ratio));
    }
}

MetricJet evaluate_jet(const MetricField& field, std::span<const double> point, int order)
{
    require_order(order);
    require_point(field.chart(), point);
    const int n = field.dim();
    const auto basis = TaylorBasis::get(n);
    std::vector<Taylor> coords;
    coords.reserve(sz(n));
    for (int k = 0; k < n; ++k) {
        coords.push_back(Taylor::variable(basis, order, k, point[sz(k)]));
    }

    MetricJet jet(n, order);
    std::copy(point.begin(), point.end(), jet.point.begin());
    const auto derivs = multisets(n, order);
    for (int i = 0; i < n; ++i) {
        for (int j = i; j < n; ++j) {
            const Taylor t = field.component(i, j).evaluate(coords);
            scatter(jet, i, j, {}, t.value());
            for (const auto& d : derivs) {
                scatter(jet, i, j, d, t.derivative(d));
            }
        }
    }
    require_nondegenerate(jet.g, n);
    return jet;
}

MetricJet finite_difference_jet(const MetricField& field, std::span<const double> point, int order, double step)
{
    require_order(order);
    require_point(field.chart(), point);
    if (!(step > 0.0)) {
        throw Error(Errc::StencilOutsideDomain, "finite-difference step must be positive");
    }
    const int n = field.dim();

    // Representable steps: x + h is exact, so offsets k*h are too.
    std::vector<double> h(sz(n));
    for (int k = 0; k < n; ++k) {
        const double x = point[sz(k)];
        h[sz(k)] = (x + step) - x;
    }

    std::map<std::vector<int>, std::vector<double>> cache;
    auto sample = [&](const std::vector<int>& offsets) -> const std::vector<double>& {
        auto it = cache.find(offsets);
        if (it != cache.end()) {
            return it->second;
        }
        std::vector<double> x(point.begin(), point.end());
        for (int k = 0; k < n; ++k) {
            x[sz(k)] += offsets[sz(k)] * h[sz(k)];
        }
        if (!field.chart().inside(x)) {
            throw Error(Errc::StencilOutsideDomain, "stencil point " + format_point(x) + " leaves the chart");
        }
        return cache.emplace(offsets, field.components_at(x)).first->second;
    };

    MetricJet jet(n, order);
    std::copy(point.begin(), point.end(), jet.point.begin());
    const auto& center = sample(std::vector<int>(sz(n), 0));
    for (int i = 0; i < n; ++i) {
        for (int j = i; j < n; ++j) {
            scatter(jet, i, j, {}, center[sz(i) * sz(n) + sz(j)]);
        }
    }

    for (const auto& d : multisets(n, order)) {
        std::map<int, int> mult;
        for (int k : d) {
            ++mult[k];
        }
        // Tensor-product stencil over the axes present in d.
        std::vector<std::pair<std::vector<int>, double>> taps{{std::vector<int>(sz(n), 0), 1.0}};
        for (const auto& [axis, m] : mult) {
            std::vector<std::pair<std::vector<int>, double>> next;
            double scale = 1.0;
            for (int p = 0; p < m; ++p) {
                scale /= h[sz(axis)];
            }
            for (const auto& [off, w] : taps) {
                for (const auto& tap : stencil(m)) {
                    auto o = off;
                    o[sz(axis)] += tap.offset;
                    next.emplace_back(std::move(o), w * tap.weight * scale);
                }
            }
            taps = std::move(next);
        }
        std::vector<double> acc(sz(n) * sz(n), 0.0);
        for (const auto& [off, w] : taps) {
            const auto& values = sample(off);
            for (std::size_t q = 0; q < acc.size(); ++q) {
                acc[q] += w * values[q];
            }
        }
        for (int i = 0; i < n; ++i) {
            for (int j = i; j < n; ++j) {
                scatter(jet, i, j, d, acc[sz(i) * sz(n) + sz(j)]);
            }
        }
    }
    require_nondegenerate(jet.g, n);
    return jet;
}

JetSource jet_source(const MetricField& field)
{
    return [field](std::span<const double> x, int order) { return evaluate_jet(field, x, order); };
}

} // namespace cosym
