#pragma once

#include "cosym/expression.hpp"

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace cosym {

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
};

struct ChartSpec {
    int n = 0;
    std::vector<Interval> domain;
    std::vector<std::string> labels;

    /// Throws InvalidExpression (shape) or DimensionTooSmall.
    void validate() const;
    [[nodiscard]] bool strictly_inside(std::span<const double> x) const;
    [[nodiscard]] bool inside(std::span<const double> x) const;
};

/// Metric components and partial derivatives at a point. Derivative indices
/// come last: dg(i,j,k) = d_k g_ij.
struct MetricJet {
    int n = 0;
    int order = 0;
    std::vector<double> point;
    std::vector<double> g;
    std::vector<double> dg;
    std::vector<double> d2g;
    std::vector<double> d3g;

    MetricJet() = default;
    MetricJet(int dim, int jet_order);

    [[nodiscard]] double G(int i, int j) const { return g[idx(i, j)]; }
    [[nodiscard]] double dG(int i, int j, int k) const { return dg[idx(i, j) * un() + uz(k)]; }
    [[nodiscard]] double d2G(int i, int j, int k, int l) const
    {
        return d2g[(idx(i, j) * un() + uz(k)) * un() + uz(l)];
    }
    [[nodiscard]] double d3G(int i, int j, int k, int l, int m) const
    {
        return d3g[((idx(i, j) * un() + uz(k)) * un() + uz(l)) * un() + uz(m)];
    }

private:
    [[nodiscard]] std::size_t un() const { return static_cast<std::size_t>(n); }
    static std::size_t uz(int k) { return static_cast<std::size_t>(k); }
    [[nodiscard]] std::size_t idx(int i, int j) const { return uz(i) * un() + uz(j); }
};

/// Metric on one chart with closed-form components.
class MetricField {
public:
    MetricField() = default;

    /// `upper` holds the n(n+1)/2 components g_ij, i <= j, row by row.
    MetricField(ChartSpec chart, std::vector<Expr> upper);

    [[nodiscard]] const ChartSpec& chart() const noexcept { return chart_; }
    [[nodiscard]] int dim() const noexcept { return chart_.n; }
    [[nodiscard]] const Expr& component(int i, int j) const;

    /// Full n x n component matrix at x, no domain or degeneracy checks.
    [[nodiscard]] std::vector<double> components_at(std::span<const double> x) const;

    /// Same field on a different box.
    [[nodiscard]] MetricField with_domain(std::vector<Interval> domain) const;

    /// Copy with `extra` added to g_ij (and g_ji).
    [[nodiscard]] MetricField with_component_added(int i, int j, const Expr& extra) const;

private:
    ChartSpec chart_;
    std::vector<Expr> upper_;
};

/// Supplies a metric jet at a point; lets oracles work on fields and on hand-built jets alike.
using JetSource = std::function<MetricJet(std::span<const double>, int)>;

inline constexpr double kDegeneracyThreshold = 1e-12;

/// |det g| / (max |g_ij|)^n.
double degeneracy_ratio(std::span<const double> g, int n);

/// Throws DegenerateMetric below the threshold.
void require_nondegenerate(std::span<const double> g, int n);

MetricJet evaluate_jet(const MetricField& field, std::span<const double> point, int order);

MetricJet finite_difference_jet(const MetricField& field, std::span<const double> point, int order, double step);

JetSource jet_source(const MetricField& field);

} // namespace cosym
