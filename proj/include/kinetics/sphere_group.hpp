#pragma once

// Velocities on the unit 3-sphere. A velocity v with |v| < λ is lifted to
// θ = (v/λ, ±sqrt(1 - |v/λ|²)) and mapped to ℝ³ by stereographic projection
// from p = (0,0,0,1):
//
//   φ(θ) = (θ1, θ2, θ3) / (1 - θ4).
//
// The group law is the quaternion product with the scalar part stored first,
// so the identity e = (1,0,0,0) lies inside the chart (φ(e) = (1,0,0)).

#include <functional>
#include <vector>

#include "kinetics/types.hpp"

namespace kinetics::sphere {

enum class Hemisphere { Lower, Upper };

class SpherePoint {
 public:
  /// Throws InvalidInput unless |theta| = 1 within 1e-12.
  explicit SpherePoint(const Vec4& theta);

  static SpherePoint identity() { return SpherePoint(Vec4(1.0, 0.0, 0.0, 0.0)); }

  const Vec4& theta() const { return theta_; }
  double scalar() const { return theta_[0]; }
  Vec3 vector() const { return theta_.tail<3>(); }

 private:
  Vec4 theta_;
};

struct ChartCoords {
  Vec3 vstar;
};

struct PureQuaternion {
  Vec3 xi;
};

/// Throws InvalidInput unless lambda > 0, SpeedExceedsLambda if |v| >= lambda.
SpherePoint embed(const Vec3& v, double lambda, Hemisphere hemisphere = Hemisphere::Lower);

/// Throws ChartSingularity within 1e-9 of the projection pole.
ChartCoords project_chart(const SpherePoint& point);

/// θ = (2 v*, |v*|² - 1) / (|v*|² + 1).
SpherePoint unproject_chart(const ChartCoords& coords);

struct ChartJacobian {
  Mat3 matrix;  // (i, j) = ∂v*_i / ∂v_j
  double determinant;
};

/// Derivative of v -> φ(embed(v, λ, hemisphere)).
ChartJacobian chart_jacobian(const Vec3& v, double lambda, Hemisphere hemisphere = Hemisphere::Lower);

SpherePoint quaternion_multiply(const SpherePoint& a, const SpherePoint& b);
SpherePoint conjugate(const SpherePoint& a);

/// G(τ) = (cos(|u| τ), sin(|u| τ) u/|u|); constant e when u = 0.
SpherePoint exp_subgroup(const PureQuaternion& u, double tau);

/// d/dτ φ(G(τ)) at τ = 0, in closed form.
Vec3 orbit_chart_velocity(const PureQuaternion& u);

/// Generator whose orbit through e leaves the chart image φ(e) with velocity
/// J F / m, J being the chart Jacobian determinant at rest velocity (v = 0)
/// on the given hemisphere. The upper hemisphere puts v = 0 at the pole and
/// throws ChartSingularity.
PureQuaternion match_generator(const Vec3& force, double mass, double lambda,
                               Hemisphere hemisphere = Hemisphere::Lower);

using ChartField = std::function<double(const Vec3&)>;
using TimeChartField = std::function<double(const Vec3&, double)>;

/// Central difference of τ -> g(φ(G(τ))) at τ = 0.
double pushforward_derivative(const ChartField& g, const PureQuaternion& u, double step = 1e-5);

struct TransportResidual {
  std::vector<double> times;
  std::vector<double> residuals;
  std::vector<Vec3> orbit;  // φ(G(θ(t))) per time
  double max_residual = 0.0;
};

/// |f(probe, t) + θ'(t) f(φ(G(θ(t))), t) - C(probe)| at each sample time, with
/// θ' from central differences (step 1e-6 max(1, |t|)). Throws
/// ChartSingularity if the orbit reaches the pole.
TransportResidual transport_relation_residual(const TimeChartField& f, const PureQuaternion& generator,
                                              const std::function<double(double)>& theta_of_t,
                                              const ChartField& c_of_v,
                                              const std::vector<double>& times,
                                              const ChartCoords& probe);

}  // namespace kinetics::sphere
