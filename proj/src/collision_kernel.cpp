#include "kinetics/collision_kernel.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <fmt/format.h>

#include "kinetics/errors.hpp"

namespace kinetics {

namespace {

constexpr double kNormalTolerance = 1e-9;

void check_normal(const Vec3& n) {
  const double norm = n.norm();
  if (!(std::abs(norm - 1.0) <= kNormalTolerance)) {
    throw NonUnitNormal(fmt::format("collision normal has |n| = {:.17g}, expected 1", norm));
  }
}

void check_restitution(double epsilon) {
  if (!(epsilon > 0.0 && epsilon <= 1.0)) {
    throw InvalidRestitution(
        fmt::format("restitution coefficient {} outside (0, 1]", epsilon));
  }
}

struct Impulse {
  Vec3 w1, w2;
  double lambda1, lambda2;
};

// factor is (1 + e) for Reflective, (1 - e) for Passing, with e the
// restitution actually applied (epsilon forward, 1/epsilon inverse).
Impulse apply_rule(const Vec3& v1, const Vec3& v2, const Vec3& n, double factor, double m1,
                   double m2) {
  const double total = m1 + m2;
  const double gn = (v2 - v1).dot(n);
  const double lambda1 = factor * (m2 / total) * gn;
  const double lambda2 = -factor * (m1 / total) * gn;
  return {v1 + lambda1 * n, v2 + lambda2 * n, lambda1, lambda2};
}

double branch_factor(CollisionBranch branch, double restitution) {
  return branch == CollisionBranch::Reflective ? 1.0 + restitution : 1.0 - restitution;
}

double reduced_mass(const Species& s1, const Species& s2) {
  return s1.mass * s2.mass / (s1.mass + s2.mass);
}

}  // namespace

void Species::validate() const {
  if (!(mass > 0.0) || !std::isfinite(mass)) {
    throw InvalidInput(fmt::format("species mass must be positive, got {}", mass));
  }
  if (!(diameter > 0.0) || !std::isfinite(diameter)) {
    throw InvalidInput(fmt::format("species diameter must be positive, got {}", diameter));
  }
}

double kinetic_energy(const Vec3& v1, const Vec3& v2, const Species& s1, const Species& s2) {
  return 0.5 * s1.mass * v1.squaredNorm() + 0.5 * s2.mass * v2.squaredNorm();
}

CollisionEvent collide(const Vec3& v1, const Vec3& v2, const Vec3& n, double epsilon,
                       CollisionBranch branch, const Species& s1, const Species& s2) {
  check_normal(n);
  check_restitution(epsilon);
  s1.validate();
  s2.validate();

  const Impulse out = apply_rule(v1, v2, n, branch_factor(branch, epsilon), s1.mass, s2.mass);
  CollisionEvent event{v1,     v2,     n,          epsilon,    branch,
                       s1,     s2,     out.w1,     out.w2,     out.lambda1,
                       out.lambda2, 0.0};
  event.delta_e = kinetic_energy(v1, v2, s1, s2) - kinetic_energy(out.w1, out.w2, s1, s2);
  return event;
}

std::pair<Vec3, Vec3> inverse_collide(const Vec3& w1, const Vec3& w2, const Vec3& n,
                                      double epsilon, CollisionBranch branch, const Species& s1,
                                      const Species& s2) {
  if (!(epsilon > 0.0)) {
    throw SingularRestitution(
        fmt::format("inverse collision undefined for restitution {}", epsilon));
  }
  check_normal(n);
  const Impulse out =
      apply_rule(w1, w2, n, branch_factor(branch, 1.0 / epsilon), s1.mass, s2.mass);
  return {out.w1, out.w2};
}

double energy_loss_formula(const Vec3& v1, const Vec3& v2, double epsilon, const Species& s1,
                           const Species& s2) {
  check_restitution(epsilon);
  return 0.5 * (1.0 - epsilon * epsilon) * reduced_mass(s1, s2) * (v1 - v2).squaredNorm();
}

double energy_loss_normal(const Vec3& v1, const Vec3& v2, const Vec3& n, double epsilon,
                          const Species& s1, const Species& s2) {
  check_restitution(epsilon);
  const double gn = (v2 - v1).dot(n);
  return 0.5 * (1.0 - epsilon * epsilon) * reduced_mass(s1, s2) * gn * gn;
}

JacobianValue jacobian_analytic(double epsilon, CollisionBranch branch) {
  check_restitution(epsilon);
  // Only the normal relative velocity is rescaled (by -eps or +eps); the
  // centre-of-mass and tangential directions map with unit determinant.
  return {epsilon, branch == CollisionBranch::Reflective ? -epsilon : epsilon};
}

double jacobian_numeric(const Vec3& v1, const Vec3& v2, const Vec3& n, double epsilon,
                        CollisionBranch branch, const Species& s1, const Species& s2,
                        std::optional<double> step) {
  const double scale = std::max({1.0, v1.cwiseAbs().maxCoeff(), v2.cwiseAbs().maxCoeff()});
  const double h = step.value_or(1e-5 * scale);
  if (!(h > 0.0)) throw InvalidInput(fmt::format("finite-difference step must be > 0, got {}", h));

  using Vec6 = Eigen::Matrix<double, 6, 1>;
  Vec6 x;
  x << v1, v2;
  auto forward = [&](const Vec6& state) {
    const CollisionEvent e =
        collide(state.head<3>(), state.tail<3>(), n, epsilon, branch, s1, s2);
    Vec6 y;
    y << e.w1, e.w2;
    return y;
  };

  Eigen::Matrix<double, 6, 6> jac;
  for (int j = 0; j < 6; ++j) {
    Vec6 plus = x;
    Vec6 minus = x;
    plus[j] += h;
    minus[j] -= h;
    jac.col(j) = (forward(plus) - forward(minus)) / (2.0 * h);
  }
  return std::abs(jac.determinant());
}

const char* to_string(CollisionBranch branch) {
  return branch == CollisionBranch::Reflective ? "reflective" : "passing";
}

CollisionBranch parse_branch(const std::string& text) {
  if (text == "reflective") return CollisionBranch::Reflective;
  if (text == "passing") return CollisionBranch::Passing;
  throw InvalidInput(fmt::format("unknown collision branch '{}'", text));
}

}  // namespace kinetics
