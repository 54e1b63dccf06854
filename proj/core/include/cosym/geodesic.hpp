#pragma once

#include "cosym/families.hpp"
#include "cosym/jet_chart.hpp"

#include <Eigen/Dense>

#include <span>
#include <vector>

namespace cosym {

struct GeodesicState {
    std::vector<double> position;
    std::vector<double> velocity;
};

/// Solution of the geodesic equation, optionally carrying parallel vector
/// fields along it. Internally parameterized by sigma in [0, 1] with
/// tau = scale * sigma. Between nodes the state comes from one Fehlberg 7(8)
/// step taken from the preceding node.
struct Trajectory {
    MetricField field;
    int n = 0;
    int transported = 0;
    double scale = 0.0;
    /// Velocity in tau at the start (kept for scale == 0).
    std::vector<double> initial_velocity;
    std::vector<double> mesh;
    std::vector<std::vector<double>> states;

    [[nodiscard]] GeodesicState state_at(double tau) const;
    [[nodiscard]] std::vector<double> transported_at(double tau, int k) const;
    [[nodiscard]] GeodesicState final_state() const;
    [[nodiscard]] std::vector<double> final_transported(int k) const;

private:
    [[nodiscard]] std::vector<double> interpolate(double sigma) const;
};

/// Adaptive Fehlberg 7(8) solve of the geodesic (and transport) equations to parameter `param`.
/// Throws LeftDomain or StepSizeUnderflow.
Trajectory integrate_trajectory(const MetricField& field, const GeodesicState& start,
                                std::span<const std::vector<double>> vectors, double param, double tol);

/// Same equations stepped on a given sigma mesh without error control, so the
/// result depends smoothly on the initial data.
Trajectory replay_trajectory(const MetricField& field, const GeodesicState& start,
                             std::span<const std::vector<double>> vectors, double param,
                             std::span<const double> mesh);

GeodesicState integrate_geodesic(const MetricField& field, const GeodesicState& start, double param, double tol);

/// Transports `vectors` along the geodesic that `curve` follows.
Trajectory parallel_transport(const MetricField& field, const Trajectory& curve,
                              std::span<const std::vector<double>> vectors, double tol);

std::vector<double> exponential_map(const MetricField& field, std::span<const double> x, std::span<const double> v,
                                    double tol);

/// Data for F(t, s, psi) = exp_{x(t)}(psi~(t) + s u_{x(t)} / 2) on the d=1 family.
struct FMapSpec {
    std::vector<double> base_point;
    /// Null initial velocity of the base geodesic, g(velocity, u) = 1.
    std::vector<double> velocity;
    /// Null vector with g(u, .) = dt.
    std::vector<double> u;
    /// n x (n-2); column a is the image of the a-th basis vector of V in P-perp.
    Eigen::MatrixXd identification;
    /// Allowed (t, s, psi) region.
    std::vector<Interval> parameter_box;
};

/// Base point (0, 0, psi0), velocity d_t + w^a d_psi_a + c d_s made null,
/// u = 2 d_s, identification = projection of d_psi_a onto P-perp.
FMapSpec make_f_map_spec(const D1FamilySpec& family, std::span<const double> psi0,
                         std::span<const double> velocity_psi, double box_half_width = 0.5);

/// Throws SpecInvariantViolated when the null/normalization/nondegeneracy conditions fail.
void validate(const FMapSpec& spec, const MetricField& field);

struct FMapMeshes {
    std::vector<double> base;
    std::vector<double> fiber;
};

/// F(t, s, psi). With `frozen`, both solves replay the given meshes; with
/// `record`, the adaptive meshes are stored.
std::vector<double> f_map(const FMapSpec& spec, const MetricField& field, double t, double s,
                          std::span<const double> psi, double tol, const FMapMeshes* frozen = nullptr,
                          FMapMeshes* record = nullptr);

struct PullbackPoint {
    std::vector<double> params;
    Eigen::MatrixXd pullback;
    Eigen::MatrixXd model;
    double residual = 0.0;
};

struct PullbackResult {
    double max_residual = 0.0;
    std::vector<double> worst_point;
    std::vector<PullbackPoint> points;
};

/// Central-difference Jacobian of F at each grid point (frozen meshes from
/// the center), pulled-back metric compared with kappa dt^2 + dt ds + gram.
/// Residuals are relative to max(1, max |model|).
PullbackResult pullback_residual(const FMapSpec& spec, const MetricField& field, const D1FamilySpec& family,
                                 std::span<const std::vector<double>> grid, double fd_step, double tol);

/// 3^3-style grid: t, s in {-h, 0, h}, psi = r * direction with r in {-h, 0, h}.
std::vector<std::vector<double>> pullback_grid(int n, double half_width, int per_axis,
                                               std::span<const double> direction);

} // namespace cosym
