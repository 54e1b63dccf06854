#include "cosym/geodesic.hpp"

#include "cosym/curvature.hpp"
#include "cosym/errors.hpp"

#include <boost/numeric/odeint.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace cosym {

namespace {

namespace odeint = boost::numeric::odeint;
using State = std::vector<double>;

std::size_t sz(int k)
{
    return static_cast<std::size_t>(k);
}

constexpr std::size_t kMaxSteps = 200000;

// Geodesic plus transport equations in sigma, with velocity already scaled.
struct GeodesicSystem {
    const MetricField* field;
    int n;
    int transported;
    double* last_sigma;
    double scale;

    void operator()(const State& y, State& dy, double /*sigma*/) const
    {
        const std::span<const double> x(y.data(), sz(n));
        ConnectionCoefficients conn;
        try {
            conn = christoffel(evaluate_jet(*field, x, 1), 0);
        } catch (const Error& e) {
            if (e.code() == Errc::PointOutsideDomain) {
                throw Error(Errc::LeftDomain, "geodesic left the chart near parameter " +
                                                  std::to_string(*last_sigma * scale));
            }
            throw;
        }
        const double* v = y.data() + n;
        for (int k = 0; k < n; ++k) {
            dy[sz(k)] = v[k];
            double acc = 0.0;
            for (int i = 0; i < n; ++i) {
                for (int j = 0; j < n; ++j) {
                    acc += conn.gamma(k, i, j) * v[i] * v[j];
                }
            }
            dy[sz(n + k)] = -acc;
        }
        for (int t = 0; t < transported; ++t) {
            const double* w = y.data() + (2 + t) * n;
            for (int k = 0; k < n; ++k) {
                double acc = 0.0;
                for (int i = 0; i < n; ++i) {
                    for (int j = 0; j < n; ++j) {
                        acc += conn.gamma(k, i, j) * v[i] * w[j];
                    }
                }
                dy[sz((2 + t) * n + k)] = -acc;
            }
        }
    }
};

State initial_state(const GeodesicState& start, std::span<const std::vector<double>> vectors, double param, int n)
{
    if (static_cast<int>(start.position.size()) != n || static_cast<int>(start.velocity.size()) != n) {
        throw Error(Errc::DimensionMismatch, "geodesic state has the wrong length");
    }
    State y(sz(n) * (2 + vectors.size()));
    std::copy(start.position.begin(), start.position.end(), y.begin());
    for (int k = 0; k < n; ++k) {
        y[sz(n + k)] = param * start.velocity[sz(k)];
    }
    for (std::size_t t = 0; t < vectors.size(); ++t) {
        if (static_cast<int>(vectors[t].size()) != n) {
            throw Error(Errc::DimensionMismatch, "transported vector has the wrong length");
        }
        std::copy(vectors[t].begin(), vectors[t].end(), y.begin() + static_cast<std::ptrdiff_t>((2 + t) * sz(n)));
    }
    return y;
}

Trajectory empty_trajectory(const MetricField& field, int n, int transported, double param)
{
    Trajectory tr;
    tr.field = field;
    tr.n = n;
    tr.transported = transported;
    tr.scale = param;
    return tr;
}

void record(Trajectory& tr, const State& y, double sigma)
{
    tr.mesh.push_back(sigma);
    tr.states.push_back(y);
}

} // namespace

std::vector<double> Trajectory::interpolate(double sigma) const
{
    if (mesh.empty()) {
        throw Error(Errc::EmptyInput, "empty trajectory");
    }
    if (mesh.size() == 1 || sigma <= mesh.front()) {
        return states.front();
    }
    if (sigma >= mesh.back()) {
        return states.back();
    }
    const auto it = std::upper_bound(mesh.begin(), mesh.end(), sigma);
    const auto i = static_cast<std::size_t>(it - mesh.begin()) - 1;
    State y = states[i];
    if (sigma == mesh[i]) {
        return y;
    }
    double last = mesh[i];
    const GeodesicSystem sys{&field, n, transported, &last, scale};
    odeint::runge_kutta_fehlberg78<State> stepper;
    stepper.do_step(sys, y, mesh[i], sigma - mesh[i]);
    return y;
}

GeodesicState Trajectory::state_at(double tau) const
{
    const double sigma = scale == 0.0 ? 0.0 : tau / scale;
    const auto y = interpolate(sigma);
    GeodesicState st;
    st.position.assign(y.begin(), y.begin() + n);
    st.velocity.assign(y.begin() + n, y.begin() + 2 * n);
    if (scale == 0.0) {
        st.velocity = initial_velocity;
    } else {
        for (auto& v : st.velocity) {
            v /= scale;
        }
    }
    return st;
}

std::vector<double> Trajectory::transported_at(double tau, int k) const
{
    if (k < 0 || k >= transported) {
        throw Error(Errc::SlotOutOfRange, "no transported vector " + std::to_string(k));
    }
    const double sigma = scale == 0.0 ? 0.0 : tau / scale;
    const auto y = interpolate(sigma);
    return {y.begin() + (2 + k) * n, y.begin() + (3 + k) * n};
}

GeodesicState Trajectory::final_state() const
{
    return state_at(scale);
}

std::vector<double> Trajectory::final_transported(int k) const
{
    return transported_at(scale, k);
}

Trajectory integrate_trajectory(const MetricField& field, const GeodesicState& start,
                                std::span<const std::vector<double>> vectors, double param, double tol)
{
    const int n = field.dim();
    if (!(tol > 0.0)) {
        throw Error(Errc::StepSizeUnderflow, "tolerance must be positive");
    }
    Trajectory tr = empty_trajectory(field, n, static_cast<int>(vectors.size()), param);
    State y = initial_state(start, vectors, param, n);
    double last = 0.0;
    const GeodesicSystem sys{&field, n, tr.transported, &last, param};
    tr.initial_velocity = start.velocity;
    // Error norm on the state only (no dt*|dy| loosening), abs and rel both tol.
    using Rk78 = odeint::runge_kutta_fehlberg78<State>;
    using Checker = odeint::default_error_checker<double, Rk78::algebra_type, Rk78::operations_type>;
    odeint::controlled_runge_kutta<Rk78> stepper(Checker(tol, tol, 1.0, 0.0));
    try {
        odeint::integrate_adaptive(stepper, sys, y, 0.0, 1.0, 1e-2, [&](const State& s, double sigma) {
            if (tr.mesh.size() >= kMaxSteps) {
                throw Error(Errc::StepSizeUnderflow, "step budget exhausted at parameter " +
                                                         std::to_string(sigma * param));
            }
            if (!tr.mesh.empty() && sigma - tr.mesh.back() < 1e-14) {
                throw Error(Errc::StepSizeUnderflow, "step size underflow at parameter " +
                                                         std::to_string(sigma * param));
            }
            last = sigma;
            record(tr, s, sigma);
        });
    } catch (const Error&) {
        throw;
    } catch (const std::exception& e) {
        throw Error(Errc::StepSizeUnderflow, std::string("step control failed: ") + e.what());
    }
    return tr;
}

Trajectory replay_trajectory(const MetricField& field, const GeodesicState& start,
                             std::span<const std::vector<double>> vectors, double param,
                             std::span<const double> mesh)
{
    const int n = field.dim();
    Trajectory tr = empty_trajectory(field, n, static_cast<int>(vectors.size()), param);
    State y = initial_state(start, vectors, param, n);
    double last = 0.0;
    const GeodesicSystem sys{&field, n, tr.transported, &last, param};
    tr.initial_velocity = start.velocity;
    if (mesh.empty()) {
        throw Error(Errc::EmptyInput, "empty replay mesh");
    }
    odeint::runge_kutta_fehlberg78<State> stepper;
    record(tr, y, mesh.front());
    for (std::size_t i = 1; i < mesh.size(); ++i) {
        last = mesh[i - 1];
        stepper.do_step(sys, y, mesh[i - 1], mesh[i] - mesh[i - 1]);
        record(tr, y, mesh[i]);
    }
    return tr;
}

GeodesicState integrate_geodesic(const MetricField& field, const GeodesicState& start, double param, double tol)
{
    return integrate_trajectory(field, start, {}, param, tol).final_state();
}

Trajectory parallel_transport(const MetricField& field, const Trajectory& curve,
                              std::span<const std::vector<double>> vectors, double tol)
{
    const GeodesicState start = curve.state_at(0.0);
    return integrate_trajectory(field, start, vectors, curve.scale, tol);
}

std::vector<double> exponential_map(const MetricField& field, std::span<const double> x, std::span<const double> v,
                                    double tol)
{
    GeodesicState start{{x.begin(), x.end()}, {v.begin(), v.end()}};
    return integrate_geodesic(field, start, 1.0, tol).position;
}

FMapSpec make_f_map_spec(const D1FamilySpec& family, std::span<const double> psi0,
                         std::span<const double> velocity_psi, double box_half_width)
{
    const int n = family.n;
    const int m = n - 2;
    if (static_cast<int>(psi0.size()) != m || static_cast<int>(velocity_psi.size()) != m) {
        throw Error(Errc::DimensionMismatch, "psi0 and velocity_psi need n-2 components");
    }
    FMapSpec spec;
    spec.base_point.assign(sz(n), 0.0);
    std::copy(psi0.begin(), psi0.end(), spec.base_point.begin() + 2);
    const double kappa = d1_kappa(family, spec.base_point);
    Eigen::VectorXd w(m);
    for (int a = 0; a < m; ++a) {
        w(a) = velocity_psi[sz(a)];
    }
    spec.velocity.assign(sz(n), 0.0);
    spec.velocity[0] = 1.0;
    spec.velocity[1] = -kappa - w.dot(family.gram * w);
    for (int a = 0; a < m; ++a) {
        spec.velocity[sz(a + 2)] = w(a);
    }
    spec.u.assign(sz(n), 0.0);
    spec.u[1] = 2.0;

    // Metric at y in chart components.
    Eigen::MatrixXd g = Eigen::MatrixXd::Zero(n, n);
    g(0, 0) = kappa;
    g(0, 1) = g(1, 0) = 0.5;
    g.bottomRightCorner(m, m) = family.gram;
    const Eigen::Map<const Eigen::VectorXd> xd(spec.velocity.data(), n);
    const Eigen::Map<const Eigen::VectorXd> u(spec.u.data(), n);
    spec.identification.resize(n, m);
    for (int a = 0; a < m; ++a) {
        Eigen::VectorXd e = Eigen::VectorXd::Zero(n);
        e(a + 2) = 1.0;
        spec.identification.col(a) = e - e.dot(g * u) * xd - e.dot(g * xd) * u;
    }
    spec.parameter_box.assign(sz(n), Interval{-box_half_width, box_half_width});
    return spec;
}

void validate(const FMapSpec& spec, const MetricField& field)
{
    const int n = field.dim();
    if (static_cast<int>(spec.base_point.size()) != n || static_cast<int>(spec.velocity.size()) != n ||
        static_cast<int>(spec.u.size()) != n || spec.identification.rows() != n ||
        spec.identification.cols() != n - 2 || static_cast<int>(spec.parameter_box.size()) != n) {
        throw Error(Errc::SpecInvariantViolated, "F-map data has inconsistent sizes");
    }
    if (spec.base_point[0] != 0.0) {
        throw Error(Errc::SpecInvariantViolated, "base point must have t = 0");
    }
    const auto gv = field.components_at(spec.base_point);
    const Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> g(gv.data(), n, n);
    const Eigen::Map<const Eigen::VectorXd> xd(spec.velocity.data(), n);
    const Eigen::Map<const Eigen::VectorXd> u(spec.u.data(), n);
    const double null = xd.dot(g * xd);
    const double pairing = xd.dot(g * u);
    if (std::abs(null) > 1e-10) {
        throw Error(Errc::SpecInvariantViolated, "initial velocity is not null (" + std::to_string(null) + ")");
    }
    if (std::abs(pairing - 1.0) > 1e-10) {
        throw Error(Errc::SpecInvariantViolated, "g(velocity, u) != 1 (" + std::to_string(pairing) + ")");
    }
    Eigen::Matrix2d plane;
    plane << null, pairing, pairing, u.dot(g * u);
    if (std::abs(plane.determinant()) < 1e-10) {
        throw Error(Errc::SpecInvariantViolated, "plane spanned by velocity and u is degenerate");
    }
}

std::vector<double> f_map(const FMapSpec& spec, const MetricField& field, double t, double s,
                          std::span<const double> psi, double tol, const FMapMeshes* frozen, FMapMeshes* record)
{
    const int n = field.dim();
    const int m = n - 2;
    if (static_cast<int>(psi.size()) != m) {
        throw Error(Errc::DimensionMismatch, "psi needs n-2 components");
    }
    std::vector<std::vector<double>> carried;
    carried.push_back(spec.u);
    for (int a = 0; a < m; ++a) {
        const Eigen::VectorXd col = spec.identification.col(a);
        carried.emplace_back(col.data(), col.data() + n);
    }
    const GeodesicState base{spec.base_point, spec.velocity};
    const Trajectory first = frozen != nullptr ? replay_trajectory(field, base, carried, t, frozen->base)
                                               : integrate_trajectory(field, base, carried, t, tol);

    const GeodesicState at = first.final_state();
    std::vector<double> direction(sz(n), 0.0);
    const auto u_t = first.final_transported(0);
    for (int k = 0; k < n; ++k) {
        direction[sz(k)] = 0.5 * s * u_t[sz(k)];
    }
    for (int a = 0; a < m; ++a) {
        const auto e = first.final_transported(1 + a);
        for (int k = 0; k < n; ++k) {
            direction[sz(k)] += psi[sz(a)] * e[sz(k)];
        }
    }
    const GeodesicState fiber_start{at.position, direction};
    const Trajectory second = frozen != nullptr ? replay_trajectory(field, fiber_start, {}, 1.0, frozen->fiber)
                                                : integrate_trajectory(field, fiber_start, {}, 1.0, tol);
    if (record != nullptr) {
        record->base = first.mesh;
        record->fiber = second.mesh;
    }
    return second.final_state().position;
}

PullbackResult pullback_residual(const FMapSpec& spec, const MetricField& field, const D1FamilySpec& family,
                                 std::span<const std::vector<double>> grid, double fd_step, double tol)
{
    const int n = field.dim();
    const int m = n - 2;
    PullbackResult result;
    for (const auto& q : grid) {
        if (static_cast<int>(q.size()) != n) {
            throw Error(Errc::DimensionMismatch, "grid points need n parameters");
        }
        for (int a = 0; a < n; ++a) {
            const auto& box = spec.parameter_box[sz(a)];
            if (q[sz(a)] - fd_step < box.lo || q[sz(a)] + fd_step > box.hi) {
                throw Error(Errc::StencilOutsideBox, "stencil around parameter " + std::to_string(a) +
                                                         " leaves the F-map box");
            }
        }
        auto eval = [&](const std::vector<double>& p, const FMapMeshes* frozen, FMapMeshes* rec) {
            return f_map(spec, field, p[0], p[1], std::span<const double>(p).subspan(2), tol, frozen, rec);
        };
        FMapMeshes meshes;
        const auto center = eval(q, nullptr, &meshes);
        Eigen::MatrixXd J(n, n);
        for (int a = 0; a < n; ++a) {
            auto plus = q;
            auto minus = q;
            plus[sz(a)] += fd_step;
            minus[sz(a)] -= fd_step;
            const auto fp = eval(plus, &meshes, nullptr);
            const auto fm = eval(minus, &meshes, nullptr);
            for (int k = 0; k < n; ++k) {
                J(k, a) = (fp[sz(k)] - fm[sz(k)]) / (2.0 * fd_step);
            }
        }
        const auto gv = field.components_at(center);
        const Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> g(gv.data(), n,
                                                                                                          n);
        PullbackPoint pt;
        pt.params = q;
        pt.pullback = J.transpose() * g * J;

        // kappa dt^2 + dt ds + gram in (t, s, psi), with psi the abstract V vector.
        Eigen::VectorXd psi(m);
        for (int a = 0; a < m; ++a) {
            psi(a) = q[sz(a + 2)];
        }
        pt.model = Eigen::MatrixXd::Zero(n, n);
        pt.model(0, 0) = family.f.evaluate(q[0])[0] * psi.dot(family.gram * psi) + psi.dot(family.gram * family.A * psi);
        pt.model(0, 1) = pt.model(1, 0) = 0.5;
        pt.model.bottomRightCorner(m, m) = family.gram;
        const double scale = std::max(1.0, pt.model.cwiseAbs().maxCoeff());
        pt.residual = (pt.pullback - pt.model).cwiseAbs().maxCoeff() / scale;
        if (pt.residual > result.max_residual || result.worst_point.empty()) {
            result.max_residual = std::max(result.max_residual, pt.residual);
            result.worst_point = q;
        }
        result.points.push_back(std::move(pt));
    }
    return result;
}

std::vector<std::vector<double>> pullback_grid(int n, double half_width, int per_axis,
                                               std::span<const double> direction)
{
    if (per_axis < 1 || static_cast<int>(direction.size()) != n - 2) {
        throw Error(Errc::ShapeMismatch, "grid needs per_axis >= 1 and an (n-2)-component direction");
    }
    std::vector<double> ticks;
    for (int i = 0; i < per_axis; ++i) {
        ticks.push_back(per_axis == 1 ? 0.0 : -half_width + 2.0 * half_width * i / (per_axis - 1));
    }
    std::vector<std::vector<double>> grid;
    for (double t : ticks) {
        for (double s : ticks) {
            for (double r : ticks) {
                std::vector<double> p{t, s};
                for (double d : direction) {
                    p.push_back(r * d);
                }
                grid.push_back(std::move(p));
            }
        }
    }
    return grid;
}

} // namespace cosym
