#include "kinetics/sphere_group.hpp"

#include <cmath>

#include <fmt/format.h>

#include "kinetics/errors.hpp"

namespace kinetics::sphere {

namespace {

constexpr double kOnSphereTolerance = 1e-12;
constexpr double kPoleDistance = 1e-9;

const Vec4 kPole(0.0, 0.0, 0.0, 1.0);

double hemisphere_sign(Hemisphere h) { return h == Hemisphere::Lower ? -1.0 : 1.0; }

SpherePoint normalized(const Vec4& q) { return SpherePoint(q / q.norm()); }

}  // namespace

SpherePoint::SpherePoint(const Vec4& theta) : theta_(theta) {
  if (!(std::abs(theta.squaredNorm() - 1.0) <= kOnSphereTolerance)) {
    throw InvalidInput(
        fmt::format("sphere point off the unit sphere: |theta|^2 = {:.17g}", theta.squaredNorm()));
  }
}

SpherePoint embed(const Vec3& v, double lambda, Hemisphere hemisphere) {
  if (!(lambda > 0.0)) throw InvalidInput(fmt::format("embed: lambda must be > 0, got {}", lambda));
  const Vec3 a = v / lambda;
  const double r2 = a.squaredNorm();
  if (!(r2 < 1.0)) {
    throw SpeedExceedsLambda(
        fmt::format("embed: |v| = {:.6g} is not below lambda = {:.6g}", v.norm(), lambda));
  }
  Vec4 theta;
  theta << a, hemisphere_sign(hemisphere) * std::sqrt(1.0 - r2);
  return SpherePoint(theta);
}

ChartCoords project_chart(const SpherePoint& point) {
  const Vec4& t = point.theta();
  if ((t - kPole).norm() < kPoleDistance) {
    throw ChartSingularity("stereographic chart is singular at the pole (0,0,0,1)");
  }
  return {t.head<3>() / (1.0 - t[3])};
}

SpherePoint unproject_chart(const ChartCoords& coords) {
  const double s = coords.vstar.squaredNorm();
  Vec4 theta;
  theta << 2.0 * coords.vstar, s - 1.0;
  return normalized(theta / (s + 1.0));
}

ChartJacobian chart_jacobian(const Vec3& v, double lambda, Hemisphere hemisphere) {
  const SpherePoint point = embed(v, lambda, hemisphere);
  project_chart(point);  // pole check

  // v* = a / (1 - σ s), a = v/λ, s = sqrt(1 - |a|²), σ = hemisphere sign:
  //   ∂v*_i/∂v_j = (1/λ) [δ_ij / (1 - σ s) - σ a_i a_j / (s (1 - σ s)²)]
  const double sigma = hemisphere_sign(hemisphere);
  const Vec3 a = v / lambda;
  const double s = std::sqrt(1.0 - a.squaredNorm());
  if (!(s > 0.0)) throw ChartSingularity("chart Jacobian undefined on the equator |v| = lambda");
  const double denom = 1.0 - sigma * s;
  const double alpha = 1.0 / (lambda * denom);
  const double beta = -sigma / (lambda * s * denom * denom);
  ChartJacobian out;
  out.matrix = alpha * Mat3::Identity() + beta * (a * a.transpose());
  // det(αI + β a aᵀ) = α² (α + β |a|²)
  out.determinant = alpha * alpha * (alpha + beta * a.squaredNorm());
  return out;
}

SpherePoint quaternion_multiply(const SpherePoint& a, const SpherePoint& b) {
  const double a0 = a.scalar();
  const double b0 = b.scalar();
  const Vec3 av = a.vector();
  const Vec3 bv = b.vector();
  Vec4 q;
  q << a0 * b0 - av.dot(bv), a0 * bv + b0 * av + av.cross(bv);
  return normalized(q);
}

SpherePoint conjugate(const SpherePoint& a) {
  Vec4 q;
  q << a.scalar(), -a.vector();
  return SpherePoint(q);
}

SpherePoint exp_subgroup(const PureQuaternion& u, double tau) {
  const double rate = u.xi.norm();
  if (rate == 0.0) return SpherePoint::identity();
  const double angle = rate * tau;
  Vec4 q;
  q << std::cos(angle), std::sin(angle) * (u.xi / rate);
  return normalized(q);
}

Vec3 orbit_chart_velocity(const PureQuaternion& u) {
  // dθ/dτ(0) = (0, u); at e = (1,0,0,0), dφ = (dθ1, dθ2, dθ3) + (1,0,0) dθ4.
  return {u.xi.z(), u.xi.x(), u.xi.y()};
}

PureQuaternion match_generator(const Vec3& force, double mass, double lambda,
                               Hemisphere hemisphere) {
  if (!(mass > 0.0)) throw InvalidInput(fmt::format("match_generator: mass must be > 0, got {}", mass));
  const double j = chart_jacobian(Vec3::Zero(), lambda, hemisphere).determinant;
  const Vec3 target = j * force / mass;
  // Invert orbit_chart_velocity: c = (u3, u1, u2).
  return {Vec3(target.y(), target.z(), target.x())};
}

double pushforward_derivative(const ChartField& g, const PureQuaternion& u, double step) {
  if (!(step > 0.0)) throw InvalidInput("pushforward_derivative: step must be > 0");
  const double forward = g(project_chart(exp_subgroup(u, step)).vstar);
  const double backward = g(project_chart(exp_subgroup(u, -step)).vstar);
  return (forward - backward) / (2.0 * step);
}

TransportResidual transport_relation_residual(const TimeChartField& f, const PureQuaternion& generator,
                                              const std::function<double(double)>& theta_of_t,
                                              const ChartField& c_of_v,
                                              const std::vector<double>& times,
                                              const ChartCoords& probe) {
  TransportResidual out;
  const double c_probe = c_of_v(probe.vstar);
  for (const double t : times) {
    const double h = 1e-6 * std::max(1.0, std::abs(t));
    const double theta_rate = (theta_of_t(t + h) - theta_of_t(t - h)) / (2.0 * h);
    const Vec3 orbit = project_chart(exp_subgroup(generator, theta_of_t(t))).vstar;
    const double residual = std::abs(f(probe.vstar, t) + theta_rate * f(orbit, t) - c_probe);
    out.times.push_back(t);
    out.residuals.push_back(residual);
    out.orbit.push_back(orbit);
    out.max_residual = std::max(out.max_residual, residual);
  }
  return out;
}

}  // namespace kinetics::sphere
