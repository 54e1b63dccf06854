#include "cosym/suite.hpp"

#include "cosym/curvature.hpp"
#include "cosym/errors.hpp"
#include "cosym/olszak.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <sstream>

namespace cosym {

namespace {

using nlohmann::json;

std::size_t sz(int i) { return static_cast<std::size_t>(i); }

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kJetOracleStep = 1e-3;
constexpr double kCurvatureOracleStep = 1e-4;
constexpr double kParallelismStep = 1e-4;
// |nabla R| / max|R| above this counts as "not locally symmetric" at a point.
constexpr double kSymmetryDetection = 1e-4;
// Surface |nabla rho| at or below this counts as D-parallel.
constexpr double kSurfaceParallel = 1e-9;

// Lazily computed data shared by all checks at one sample point. Every
// entry is a pure function of the point, so which checks ran first never
// changes what another check sees.
class PointData {
public:
    PointData(const VerificationConfig& cfg, std::vector<double> x) : cfg_(cfg), x_(std::move(x)) {}

    [[nodiscard]] const std::vector<double>& x() const { return x_; }

    const MetricJet& jet()
    {
        if (!jet_) {
            jet_ = evaluate_jet(cfg_.field, x_, 3);
        }
        return *jet_;
    }

    const CurvatureBundle& bundle()
    {
        if (!bundle_) {
            bundle_ = compute_curvature(jet());
        }
        return *bundle_;
    }

    const DistributionBasis& fiber()
    {
        if (!fiber_) {
            fiber_ = olszak_fiber(bundle());
        }
        return *fiber_;
    }

    int rank()
    {
        if (!rank_) {
            rank_ = weyl_rank(bundle());
        }
        return *rank_;
    }

private:
    const VerificationConfig& cfg_;
    std::vector<double> x_;
    std::optional<MetricJet> jet_;
    std::optional<CurvatureBundle> bundle_;
    std::optional<DistributionBasis> fiber_;
    std::optional<int> rank_;
};

// Running max-reduction for one check.
struct Accumulator {
    int points = 0;
    int skipped = 0;
    double max_residual = 0.0;
    std::vector<double> worst_point;
    std::string first_error;
    std::map<std::string, int> tally;

    void add(double r, const std::vector<double>& x)
    {
        ++points;
        if (worst_point.empty() || r > max_residual || (std::isnan(r) && !std::isnan(max_residual))) {
            max_residual = r;
            worst_point = x;
        }
    }
};

using PointCheck = std::function<std::optional<double>(PointData&, Accumulator&)>;

double relative(double value, double scale) { return value / scale; }

Eigen::MatrixXd orthonormal(const Eigen::MatrixXd& m)
{
    if (m.cols() == 0) {
        return m;
    }
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(m);
    return qr.householderQ() * Eigen::MatrixXd::Identity(m.rows(), m.cols());
}

// Finite breakpoints of the d=1 profile, so that difference oracles skip
// points whose stencils straddle a point where f is only C^3.
std::vector<double> breakpoints(const VerificationConfig& cfg)
{
    std::vector<double> out;
    if (!cfg.d1) {
        return out;
    }
    for (const auto& p : cfg.d1->f.pieces()) {
        if (std::isfinite(p.lo)) {
            out.push_back(p.lo);
        }
        if (std::isfinite(p.hi)) {
            out.push_back(p.hi);
        }
    }
    return out;
}

bool near_breakpoint(const std::vector<double>& bps, double t, double reach)
{
    return std::any_of(bps.begin(), bps.end(), [&](double b) { return std::abs(t - b) < reach; });
}

std::pair<int, int> expected_signature(const VerificationConfig& cfg)
{
    const auto count = [](const Eigen::MatrixXd& m) {
        std::pair<int, int> np{0, 0};
        if (m.rows() == 0) {
            return np;
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (m + m.transpose()));
        for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
            (es.eigenvalues()(i) < 0.0 ? np.first : np.second)++;
        }
        return np;
    };
    if (cfg.d1) {
        auto np = count(cfg.d1->gram);
        return {np.first + 1, np.second + 1};
    }
    if (cfg.d2) {
        auto np = count(cfg.d2->gramV);
        return {np.first + 2, np.second + 2};
    }
    return {-1, -1};
}

double block_deviation(std::span<const double> ad, std::span<const double> fd, double floor)
{
    double scale = floor;
    double worst = 0.0;
    for (std::size_t i = 0; i < ad.size(); ++i) {
        scale = std::max(scale, std::abs(ad[i]));
        worst = std::max(worst, std::abs(ad[i] - fd[i]));
    }
    return scale > 0.0 ? worst / scale : worst;
}

double max_abs(std::span<const double> v)
{
    double m = 0.0;
    for (double x : v) {
        m = std::max(m, std::abs(x));
    }
    return m;
}

std::string tally_text(const std::string& label, const std::map<std::string, int>& tally)
{
    std::ostringstream os;
    os << label;
    bool first = true;
    for (const auto& [key, count] : tally) {
        os << (first ? " " : ", ") << key << " at " << count << " points";
        first = false;
    }
    return os.str();
}

std::string sci(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3e", v);
    return buf;
}

const CheckInfo& info(const std::string& name)
{
    for (const auto& c : check_catalog()) {
        if (c.name == name) {
            return c;
        }
    }
    throw Error(Errc::ConfigInvalid, "checks: unknown check \"" + name + "\"");
}

bool applies(const CheckInfo& c, FamilyKind family)
{
    switch (family) {
    case FamilyKind::D1:
        return c.d1;
    case FamilyKind::D2:
        return c.d2;
    case FamilyKind::Custom:
        return c.custom;
    }
    return false;
}

std::vector<std::string> resolved_checks(const VerificationConfig& cfg)
{
    if (!cfg.checks) {
        return default_checks(cfg.family);
    }
    std::vector<std::string> out;
    std::set<std::string> seen;
    for (std::size_t i = 0; i < cfg.checks->size(); ++i) {
        const auto& name = (*cfg.checks)[i];
        const CheckInfo& c = info(name);
        if (!applies(c, cfg.family)) {
            throw Error(Errc::ConfigInvalid, "checks[" + std::to_string(i) + "]: \"" + name +
                                                 "\" does not apply to family " + to_string(cfg.family));
        }
        if (seen.insert(name).second) {
            out.push_back(name);
        }
    }
    return out;
}

double resolved_tolerance(const VerificationConfig& cfg, const std::string& name)
{
    auto it = cfg.tolerances.find(name);
    return it != cfg.tolerances.end() ? it->second : info(name).default_tolerance;
}

// ---------------------------------------------------------------------------
// Per-point checks. Returning nullopt skips the point (counted separately).

std::map<std::string, PointCheck> point_checks(const VerificationConfig& cfg)
{
    std::map<std::string, PointCheck> c;
    const int n = cfg.field.dim();
    const auto bps = breakpoints(cfg);
    const auto sig = expected_signature(cfg);

    c["nondegeneracy"] = [&cfg, n](PointData& p, Accumulator&) -> std::optional<double> {
        const double ratio = degeneracy_ratio(cfg.field.components_at(p.x()), n);
        return ratio > 0.0 ? kDegeneracyThreshold / ratio : kInf;
    };
    c["signature"] = [sig](PointData& p, Accumulator& acc) -> std::optional<double> {
        const auto d = signature(p.bundle().g);
        acc.tally["(" + std::to_string(d.negative) + "-, " + std::to_string(d.positive) + "+, " +
                  std::to_string(d.zero) + "0)"]++;
        if (sig.first < 0) {
            return d.zero;
        }
        return std::abs(d.negative - sig.first) + std::abs(d.positive - sig.second) + d.zero;
    };
    c["riemann_symmetries"] = [](PointData& p, Accumulator&) -> std::optional<double> {
        const auto& b = p.bundle();
        return relative(std::max(pair_symmetry_defect(b.riemann), first_bianchi_defect(b.riemann)), b.scale());
    };
    c["weyl_trace_free"] = [](PointData& p, Accumulator&) -> std::optional<double> {
        const auto& b = p.bundle();
        const double d = std::max({trace_defect(b.weyl, b.g_inverse), pair_symmetry_defect(b.weyl),
                                   first_bianchi_defect(b.weyl)});
        return relative(d, b.scale());
    };
    c["weyl_parallel"] = [](PointData& p, Accumulator&) -> std::optional<double> {
        const auto& b = p.bundle();
        return relative(b.nabla_weyl.max_abs(), b.scale());
    };
    c["weyl_divergence"] = [](PointData& p, Accumulator&) -> std::optional<double> {
        const auto& b = p.bundle();
        return relative(weyl_divergence(b.nabla_weyl, b.g_inverse).max_abs(), b.scale());
    };
    c["ricci_codazzi"] = [](PointData& p, Accumulator&) -> std::optional<double> {
        const auto& b = p.bundle();
        return relative(codazzi_defect(b.nabla_rho), b.scale());
    };
    c["scalar_curvature"] = [](PointData& p, Accumulator&) -> std::optional<double> {
        const auto& b = p.bundle();
        return relative(std::abs(b.s), b.scale());
    };
    c["curvature_decomposition"] = [n](PointData& p, Accumulator&) -> std::optional<double> {
        const auto& b = p.bundle();
        const DenseTensor rest = b.riemann - b.weyl - (1.0 / (n - 2)) * valued_wedge(b.g, b.rho);
        return relative(rest.max_abs(), b.scale());
    };
    c["olszak_dimension"] = [&cfg, n](PointData& p, Accumulator& acc) -> std::optional<double> {
        const int d = p.fiber().d;
        acc.tally["d=" + std::to_string(d)]++;
        if (cfg.d1) {
            return std::abs(d - 1);
        }
        if (cfg.d2) {
            return std::abs(d - 2);
        }
        return (d == 0 || d == 1 || d == 2 || d == n) ? 0.0 : 1.0;
    };
    c["weyl_rank_consistency"] = [](PointData& p, Accumulator& acc) -> std::optional<double> {
        const int d = p.fiber().d;
        const int r = p.rank();
        acc.tally["rank=" + std::to_string(r)]++;
        return ((d == 2) != (r == 1)) ? 1.0 : 0.0;
    };
    c["fiber_nullity"] = [](PointData& p, Accumulator&) -> std::optional<double> {
        const auto& f = p.fiber();
        if (f.d != 1 && f.d != 2) {
            return std::nullopt;
        }
        const auto& b = p.bundle();
        const double u = f.basis.cwiseAbs().maxCoeff();
        return f.gram.cwiseAbs().maxCoeff() / (b.g.max_abs() * u * u);
    };
    c["ricci_image_in_fiber"] = [](PointData& p, Accumulator&) -> std::optional<double> {
        const auto& f = p.fiber();
        if (f.d != 1 && f.d != 2) {
            return std::nullopt;
        }
        const auto& b = p.bundle();
        const Eigen::MatrixXd image = b.g_inverse.as_matrix() * b.rho.as_matrix();
        const Eigen::MatrixXd q = orthonormal(f.basis);
        const Eigen::MatrixXd off = image - q * (q.transpose() * image);
        return relative(off.colwise().norm().maxCoeff(), b.scale());
    };
    c["weyl_annihilation"] = [n](PointData& p, Accumulator&) -> std::optional<double> {
        const auto& f = p.fiber();
        if (f.d != 1 && f.d != 2) {
            return std::nullopt;
        }
        const auto& b = p.bundle();
        double worst = 0.0;
        for (Eigen::Index col = 0; col < f.basis.cols(); ++col) {
            const double umax = f.basis.col(col).cwiseAbs().maxCoeff();
            for (int j = 0; j < n; ++j) {
                for (int k = 0; k < n; ++k) {
                    for (int l = 0; l < n; ++l) {
                        double v = 0.0;
                        for (int i = 0; i < n; ++i) {
                            v += f.basis(i, col) * b.weyl(i, j, k, l);
                        }
                        worst = std::max(worst, std::abs(v) / umax);
                    }
                }
            }
        }
        return relative(worst, b.scale());
    };
    c["curvature_on_complement"] = [n](PointData& p, Accumulator&) -> std::optional<double> {
        const auto& f = p.fiber();
        if (f.d != 1 && f.d != 2) {
            return std::nullopt;
        }
        const auto& b = p.bundle();
        const Eigen::MatrixXd perp = orthogonal_complement(f, b.g);
        double worst = 0.0;
        for (Eigen::Index a = 0; a < perp.cols(); ++a) {
            for (Eigen::Index c2 = 0; c2 < perp.cols(); ++c2) {
                const double norm = perp.col(a).cwiseAbs().maxCoeff() * perp.col(c2).cwiseAbs().maxCoeff();
                for (int k = 0; k < n; ++k) {
                    for (int l = 0; l < n; ++l) {
                        double v = 0.0;
                        for (int i = 0; i < n; ++i) {
                            for (int j = 0; j < n; ++j) {
                                v += perp(i, a) * perp(j, c2) * b.riemann(i, j, k, l);
                            }
                        }
                        worst = std::max(worst, std::abs(v) / norm);
                    }
                }
            }
        }
        return relative(worst, b.scale());
    };
    c["spanning_image"] = [](PointData& p, Accumulator& acc) -> std::optional<double> {
        const auto r = spanning_image_check(p.bundle(), p.fiber());
        acc.tally["image rank=" + std::to_string(r.rank)]++;
        return r.rank == 2 ? r.residual : kInf;
    };
    c["fiber_parallelism"] = [&cfg](PointData& p, Accumulator&) -> std::optional<double> {
        const auto fibers = fiber_function(cfg.field);
        const std::vector<std::vector<double>> pts{p.x()};
        return parallelism_check(cfg.field, fibers, pts, kParallelismStep).residual;
    };
    c["jet_oracle"] = [&cfg, bps](PointData& p, Accumulator&) -> std::optional<double> {
        if (near_breakpoint(bps, p.x()[0], 4.0 * kJetOracleStep)) {
            return std::nullopt;
        }
        const auto& ad = p.jet();
        const MetricJet fd = finite_difference_jet(cfg.field, p.x(), 3, kJetOracleStep);
        const double floor = max_abs(ad.g);
        return std::max({block_deviation(ad.g, fd.g, floor), block_deviation(ad.dg, fd.dg, floor),
                         block_deviation(ad.d2g, fd.d2g, floor), block_deviation(ad.d3g, fd.d3g, floor)});
    };
    c["curvature_oracle"] = [&cfg, bps](PointData& p, Accumulator&) -> std::optional<double> {
        if (near_breakpoint(bps, p.x()[0], 4.0 * kCurvatureOracleStep)) {
            return std::nullopt;
        }
        const auto& b = p.bundle();
        const auto fd = curvature_by_christoffel_differences(jet_source(cfg.field), p.x(), kCurvatureOracleStep);
        return relative((fd.riemann - b.riemann).max_abs(), b.scale());
    };
    c["nabla_weyl_oracle"] = [&cfg, bps](PointData& p, Accumulator&) -> std::optional<double> {
        if (near_breakpoint(bps, p.x()[0], 4.0 * kCurvatureOracleStep)) {
            return std::nullopt;
        }
        const auto& b = p.bundle();
        const auto fd = nabla_weyl_by_differences(jet_source(cfg.field), p.x(), kCurvatureOracleStep);
        return relative((fd - b.nabla_weyl).max_abs(), b.scale());
    };

    // d = 1 family.
    c["ricci_form"] = [&cfg, n](PointData& p, Accumulator&) -> std::optional<double> {
        const auto& b = p.bundle();
        const double f = cfg.d1->f.evaluate(p.x()[0])[0];
        DenseTensor model = DenseTensor::covariant(n, 2);
        model(0, 0) = (2.0 - n) * f;
        return relative((b.rho - model).max_abs(), b.scale());
    };
    c["ruv_identity"] = [&cfg, n](PointData& p, Accumulator&) -> std::optional<double> {
        // u = 2 d_s, so g(u', u) = dt(u'); v, v' range over d_s and d_psi, which span P-perp.
        const auto& b = p.bundle();
        const auto& spec = *cfg.d1;
        const double f = spec.f.evaluate(p.x()[0])[0];
        const Eigen::MatrixXd ga = spec.gram * spec.A;
        double worst = 0.0;
        for (int j = 0; j < n; ++j) {
            for (int k = 1; k < n; ++k) {
                for (int l = 1; l < n; ++l) {
                    double coefficient = 0.0;
                    if (j == 0 && k >= 2 && l >= 2) {
                        coefficient = f * spec.gram(k - 2, l - 2) + ga(l - 2, k - 2);
                    }
                    for (int s = 0; s < n; ++s) {
                        const double model = s == 1 ? 2.0 * coefficient : 0.0;
                        worst = std::max(worst, std::abs(b.riemann_mixed(j, k, l, s) - model));
                    }
                }
            }
        }
        return relative(worst, b.scale());
    };
    c["line_curvature_form"] = [n](PointData& p, Accumulator&) -> std::optional<double> {
        std::vector<double> u(sz(n), 0.0);
        u[1] = 2.0;
        const auto& b = p.bundle();
        const OmegaForm om = curvature_form_omega(b, u);
        return std::max({om.residual, relative(om.omega.max_abs(), b.scale()), om.contraction_residual});
    };
    c["fiber_direction"] = [n](PointData& p, Accumulator&) -> std::optional<double> {
        const auto& f = p.fiber();
        if (f.d != 1) {
            return kInf;
        }
        Eigen::MatrixXd ds = Eigen::MatrixXd::Zero(n, 1);
        ds(1, 0) = 1.0;
        return principal_angle_sine(f.basis, ds);
    };

    // d = 2 family, surface conditions at the (x^1, x^2) part of the point.
    c["surface_divergence"] = [&cfg](PointData& p, Accumulator&) -> std::optional<double> {
        return std::abs(divergence_residual(cfg.d2->surface, std::span(p.x()).first(2)));
    };
    c["surface_projective_flatness"] = [&cfg](PointData& p, Accumulator&) -> std::optional<double> {
        return projective_flatness_residual(cfg.d2->surface, std::span(p.x()).first(2));
    };
    c["surface_equiaffine"] = [&cfg](PointData& p, Accumulator&) -> std::optional<double> {
        return equiaffine_residual(cfg.d2->surface, std::span(p.x()).first(2));
    };
    return c;
}

// Local symmetry: where the family predicts nabla R = 0 the residual must be
// below tolerance; where it predicts nabla R != 0 it must be detected somewhere.
struct SymmetryScan {
    int predicted_symmetric = 0;
    int predicted_not = 0;
    double max_symmetric = 0.0;
    double max_not = 0.0;
    std::vector<double> worst_symmetric;
    std::vector<double> worst_not;
};

bool predicted_symmetric(const VerificationConfig& cfg, std::span<const double> x)
{
    if (cfg.d1) {
        return cfg.d1->f.locally_constant_at(x[0]);
    }
    return surface_ricci_parallel_residual(cfg.d2->surface, x.first(2)) <= kSurfaceParallel;
}

CheckResult finish(const std::string& name, const VerificationConfig& cfg, const Accumulator& acc,
                   std::string detail)
{
    CheckResult r;
    r.name = name;
    r.anchor = info(name).anchor;
    r.points = acc.points;
    r.max_residual = acc.max_residual;
    r.tolerance = resolved_tolerance(cfg, name);
    r.pass = acc.max_residual <= r.tolerance;
    r.worst_point = acc.worst_point;
    if (!acc.first_error.empty()) {
        detail = "error: " + acc.first_error + (detail.empty() ? "" : "; " + detail);
    }
    if (acc.skipped > 0) {
        detail += (detail.empty() ? "" : "; ") + std::to_string(acc.skipped) + " points skipped";
    }
    r.detail = detail;
    return r;
}

} // namespace

const std::vector<CheckInfo>& check_catalog()
{
    // name, anchor, tolerance, d1, d2, custom, default
    static const std::vector<CheckInfo> catalog{
        {"nondegeneracy", "metric.nondegenerate", 1.0, true, true, true, true},
        {"signature", "metric.signature", 0.0, true, true, true, true},
        {"riemann_symmetries", "curvature.algebraic-symmetries", 1e-9, true, true, true, true},
        {"weyl_trace_free", "weyl.trace-free", 1e-9, true, true, true, true},
        {"weyl_parallel", "conformally-symmetric.weyl-parallel", 1e-8, true, true, true, true},
        {"weyl_divergence", "conformally-symmetric.weyl-divergence-free", 1e-8, true, true, true, true},
        {"ricci_codazzi", "conformally-symmetric.ricci-codazzi", 1e-8, true, true, true, true},
        {"scalar_curvature", "olszak.scalar-curvature-zero", 1e-9, true, true, true, false},
        {"curvature_decomposition", "olszak.riemann-from-weyl-and-ricci", 1e-9, true, true, true, false},
        {"olszak_dimension", "olszak.dimension", 0.0, true, true, true, true},
        {"weyl_rank_consistency", "olszak.d2-iff-weyl-rank-one", 0.0, true, true, true, true},
        {"fiber_nullity", "olszak.fiber-null", 1e-9, true, true, true, false},
        {"ricci_image_in_fiber", "olszak.ricci-image-in-fiber", 1e-8, true, true, true, false},
        {"weyl_annihilation", "olszak.weyl-kills-fiber", 1e-9, true, true, true, false},
        {"curvature_on_complement", "olszak.curvature-vanishes-on-complement", 1e-9, true, true, true, false},
        {"fiber_parallelism", "olszak.fiber-parallel", 1e-6, true, true, true, false},
        {"spanning_image", "olszak.weyl-image-spans-fiber", 1e-9, false, true, false, true},
        {"jet_oracle", "engine.jet-oracle", 1e-5, true, true, true, true},
        {"curvature_oracle", "engine.curvature-oracle", 1e-5, true, true, true, true},
        {"nabla_weyl_oracle", "engine.nabla-weyl-oracle", 1e-5, true, true, true, true},
        {"ricci_form", "d1.ricci-form", 1e-9, true, false, false, true},
        {"ruv_identity", "d1.curvature-on-line-complement", 1e-9, true, false, false, true},
        {"line_curvature_form", "d1.line-curvature-form", 1e-9, true, false, false, true},
        {"fiber_direction", "d1.fiber-spanned-by-ds", 1e-9, true, false, false, true},
        {"local_symmetry", "local-symmetry.dichotomy", 1e-8, true, true, false, true},
        {"surface_divergence", "d2.surface-divergence-equation", 1e-8, false, true, false, true},
        {"surface_projective_flatness", "d2.surface-projectively-flat", 1e-8, false, true, false, true},
        {"surface_equiaffine", "d2.surface-equiaffine", 1e-9, false, true, false, true},
        {"pullback", "d1.pullback-model-metric", 1e-5, true, false, false, false},
    };
    return catalog;
}

std::vector<std::string> default_checks(FamilyKind family)
{
    std::vector<std::string> out;
    for (const auto& c : check_catalog()) {
        if (!applies(c, family)) {
            continue;
        }
        // The olszak identities hold on the two families; on custom metrics they are opt-in.
        if (c.default_enabled || family != FamilyKind::Custom) {
            if (c.name != "pullback") {
                out.push_back(c.name);
            }
        }
    }
    return out;
}

std::vector<std::vector<double>> sample_points(const std::vector<Interval>& box, int count, std::uint64_t seed)
{
    if (count < 1) {
        throw Error(Errc::EmptyInput, "sample count must be at least 1");
    }
    std::mt19937_64 engine(seed);
    std::vector<std::vector<double>> out(sz(count));
    for (auto& x : out) {
        x.resize(box.size());
        for (std::size_t i = 0; i < box.size(); ++i) {
            const double u = static_cast<double>(engine() >> 11) * 0x1.0p-53;
            x[i] = box[i].lo + (box[i].hi - box[i].lo) * u;
        }
    }
    return out;
}

json calibration_metadata()
{
    // Round sphere in (theta, phi) at theta = 1: g = diag(1, sin^2 theta).
    MetricJet sphere(2, 3);
    const double th = 1.0;
    sphere.point = {th, 0.0};
    sphere.g = {1.0, 0.0, 0.0, std::sin(th) * std::sin(th)};
    // Only d_theta of g_22 survives: sin 2th, 2 cos 2th, -4 sin 2th.
    sphere.dg[3 * 2 + 0] = std::sin(2 * th);
    sphere.d2g[(3 * 2 + 0) * 2 + 0] = 2 * std::cos(2 * th);
    sphere.d3g[((3 * 2 + 0) * 2 + 0) * 2 + 0] = -4 * std::sin(2 * th);
    const double s = compute_curvature(sphere).s;

    return {{"riemann", "R_jkl^s = d_k G^s_jl - d_j G^s_kl + G^s_km G^m_jl - G^s_jm G^m_kl"},
            {"riemann_lowered", "R_jklm = R_jkl^s g_sm"},
            {"ricci", "rho_jl = R_jsl^s"},
            {"schouten", "sigma = rho - s g / (2n - 2)"},
            {"weyl", "W = R - (n - 2)^-1 g ^ sigma"},
            {"valued_wedge", "(a ^ b)_ijkl = a_ik b_jl - a_jk b_il - a_il b_jk + a_jl b_ik"},
            {"derivative_slot", "last"},
            {"unit_sphere_scalar_curvature", s},
            {"thresholds",
             {{"degeneracy", kDegeneracyThreshold},
              {"rank", kRankThreshold},
              {"rank_ambiguous_band", {1e-10, 1e-6}},
              {"weyl_zero", kWeylZeroThreshold},
              {"omega", kOmegaTolerance},
              {"symmetry_detection", kSymmetryDetection},
              {"surface_parallel", kSurfaceParallel}}},
            {"oracle_steps",
             {{"jet", kJetOracleStep}, {"curvature", kCurvatureOracleStep}, {"parallelism", kParallelismStep}}},
            {"sampler",
             {{"name", kSamplerName},
              {"version", kSamplerVersion},
              {"uniform", "lo + (hi - lo) * (x >> 11) * 2^-53"}}}};
}

json resolved_config(const VerificationConfig& cfg)
{
    const auto box_json = [](const std::vector<Interval>& box) {
        json out = json::array();
        for (const auto& iv : box) {
            out.push_back(json::array({iv.lo, iv.hi}));
        }
        return out;
    };
    const auto checks = resolved_checks(cfg);
    json tolerances = json::object();
    for (const auto& name : checks) {
        tolerances[name] = resolved_tolerance(cfg, name);
    }
    json out = {{"family", to_string(cfg.family)},
                {"params", cfg.params},
                {"samples", cfg.samples},
                {"box", box_json(cfg.box)},
                {"domain", box_json(cfg.domain)},
                {"seed", cfg.seed},
                {"tolerances", tolerances},
                {"checks", checks},
                {"report_path", cfg.report_path}};
    if (cfg.family == FamilyKind::D1) {
        const auto& pb = cfg.pullback;
        out["pullback"] = {{"psi0", pb.psi0},
                           {"velocity_psi", pb.velocity_psi},
                           {"direction", pb.direction},
                           {"half_width", pb.half_width},
                           {"per_axis", pb.per_axis},
                           {"fd_step", pb.fd_step},
                           {"ode_tol", pb.ode_tol},
                           {"box_half_width", pb.box_half_width}};
    }
    return out;
}

PullbackResult run_pullback(const VerificationConfig& cfg)
{
    if (!cfg.d1) {
        throw Error(Errc::ConfigInvalid, "family: the pullback grid needs family d1");
    }
    const auto& pb = cfg.pullback;
    const FMapSpec spec = make_f_map_spec(*cfg.d1, pb.psi0, pb.velocity_psi, pb.box_half_width);
    validate(spec, cfg.field);
    const auto grid = pullback_grid(cfg.field.dim(), pb.half_width, pb.per_axis, pb.direction);
    return pullback_residual(spec, cfg.field, *cfg.d1, grid, pb.fd_step, pb.ode_tol);
}

Report run_suite(const VerificationConfig& cfg)
{
    for (const auto& [name, value] : cfg.tolerances) {
        const CheckInfo& c = info(name);
        if (!applies(c, cfg.family)) {
            throw Error(Errc::ConfigInvalid, "tolerances." + name + ": check does not apply to family " +
                                                 to_string(cfg.family));
        }
    }
    const auto checks = resolved_checks(cfg);

    Report report;
    report.config = resolved_config(cfg);
    report.calibration = calibration_metadata();

    const auto points = sample_points(cfg.box, cfg.samples, cfg.seed);
    const auto table = point_checks(cfg);

    std::map<std::string, Accumulator> acc;
    std::map<std::string, double> seconds;
    SymmetryScan scan;
    std::string scan_error;
    std::vector<double> scan_error_point;
    const bool want_symmetry = std::find(checks.begin(), checks.end(), "local_symmetry") != checks.end();

    using clock = std::chrono::steady_clock;
    for (const auto& x : points) {
        PointData data(cfg, x);
        for (const auto& name : checks) {
            auto it = table.find(name);
            if (it == table.end()) {
                continue;
            }
            Accumulator& a = acc[name];
            const auto start = clock::now();
            try {
                const auto r = it->second(data, a);
                if (r) {
                    a.add(*r, x);
                } else {
                    ++a.skipped;
                }
            } catch (const std::exception& e) {
                if (a.first_error.empty()) {
                    a.first_error = e.what();
                }
                a.add(kInf, x);
            }
            seconds[name] += std::chrono::duration<double>(clock::now() - start).count();
        }
        if (want_symmetry) {
            const auto start = clock::now();
            try {
                const auto& b = data.bundle();
                const double r = b.nabla_riemann.max_abs() / b.scale();
                if (predicted_symmetric(cfg, x)) {
                    if (++scan.predicted_symmetric == 1 || r > scan.max_symmetric) {
                        scan.max_symmetric = r;
                        scan.worst_symmetric = x;
                    }
                } else if (++scan.predicted_not == 1 || r > scan.max_not) {
                    scan.max_not = r;
                    scan.worst_not = x;
                }
            } catch (const std::exception& e) {
                if (scan_error.empty()) {
                    scan_error = e.what();
                    scan_error_point = x;
                }
            }
            seconds["local_symmetry"] += std::chrono::duration<double>(clock::now() - start).count();
        }
    }

    for (const auto& name : checks) {
        const auto start = clock::now();
        if (name == "local_symmetry") {
            Accumulator a;
            a.points = scan.predicted_symmetric + scan.predicted_not;
            a.max_residual = scan.max_symmetric;
            a.worst_point = scan.predicted_symmetric > 0 ? scan.worst_symmetric : scan.worst_not;
            std::string verdict = scan.predicted_not == 0 ? "yes" : (scan.predicted_symmetric == 0 ? "no" : "mixed");
            std::string detail = "predicted symmetric at " + std::to_string(scan.predicted_symmetric) +
                                 " points (max |nabla R|/|R| = " + sci(scan.max_symmetric) + "), not at " +
                                 std::to_string(scan.predicted_not) + " points (max |nabla R|/|R| = " +
                                 sci(scan.max_not) + ")";
            if (scan.predicted_not > 0 && !(scan.max_not > kSymmetryDetection)) {
                a.max_residual = kInf;
                a.worst_point = scan.worst_not;
                detail += "; nabla R not detected where the family predicts it";
            }
            if (!scan_error.empty()) {
                a.first_error = scan_error;
                a.max_residual = kInf;
                a.worst_point = scan_error_point;
            }
            CheckResult r = finish(name, cfg, a, detail);
            r.verdict = verdict;
            report.results.push_back(std::move(r));
        } else if (name == "pullback") {
            Accumulator a;
            std::string detail;
            try {
                const auto res = run_pullback(cfg);
                a.points = static_cast<int>(res.points.size());
                a.max_residual = res.max_residual;
                a.worst_point = res.worst_point;
                detail = "grid in (t, s, psi) parameters; worst point is a parameter triple";
            } catch (const std::exception& e) {
                a.first_error = e.what();
                a.max_residual = kInf;
            }
            report.results.push_back(finish(name, cfg, a, detail));
        } else {
            const Accumulator& a = acc[name];
            report.results.push_back(finish(name, cfg, a, a.tally.empty() ? "" : tally_text("observed", a.tally)));
        }
        seconds[name] += std::chrono::duration<double>(clock::now() - start).count();
    }

    report.overall_pass = std::all_of(report.results.begin(), report.results.end(),
                                      [](const CheckResult& r) { return r.pass; });
    report.timings = std::move(seconds);
    return report;
}

} // namespace cosym
