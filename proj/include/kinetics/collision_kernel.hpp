#pragma once

// Binary inelastic hard-sphere collisions.
//
// Conventions: n is the unit vector along the line of centres, pointing from
// body 1 to body 2. Both collision rules keep the centre-of-mass velocity and
// the tangential relative velocity; they differ in what happens to the normal
// relative velocity g_n = (v2 - v1) . n:
//
//   Reflective:  g_n -> -eps * g_n   (w1 = v1 + (1+eps) m2/M g_n n, ...)
//   Passing:     g_n -> +eps * g_n   (w1 = v1 + (1-eps) m2/M g_n n, ...)

#include <optional>
#include <string>
#include <utility>

#include "kinetics/types.hpp"

namespace kinetics {

struct Species {
  double mass;
  double diameter;

  /// Throws InvalidInput unless mass > 0 and diameter > 0.
  void validate() const;
};

enum class CollisionBranch { Reflective, Passing };

struct CollisionEvent {
  Vec3 v1, v2;
  Vec3 n;
  double epsilon;
  CollisionBranch branch;
  Species species1, species2;
  Vec3 w1, w2;
  double lambda1;  // w1 - v1 = lambda1 * n
  double lambda2;  // w2 - v2 = lambda2 * n
  double delta_e;  // KE(pre) - KE(post)
};

/// Post-collision state for the selected branch.
/// Throws NonUnitNormal if ||n| - 1| > 1e-9 and InvalidRestitution unless
/// 0 < epsilon <= 1.
CollisionEvent collide(const Vec3& v1, const Vec3& v2, const Vec3& n, double epsilon,
                       CollisionBranch branch, const Species& s1, const Species& s2);

/// Pre-collision pair that `collide` maps onto (w1, w2). This is the same
/// rule evaluated with restitution 1/epsilon. Throws SingularRestitution if
/// epsilon <= 0.
std::pair<Vec3, Vec3> inverse_collide(const Vec3& w1, const Vec3& w2, const Vec3& n,
                                      double epsilon, CollisionBranch branch, const Species& s1,
                                      const Species& s2);

/// ½(1-eps²) μ |v1 - v2|², μ = m1 m2 / (m1 + m2).
double energy_loss_formula(const Vec3& v1, const Vec3& v2, double epsilon, const Species& s1,
                           const Species& s2);

/// Energy actually removed by either branch: ½(1-eps²) μ ((v2 - v1) . n)².
double energy_loss_normal(const Vec3& v1, const Vec3& v2, const Vec3& n, double epsilon,
                          const Species& s1, const Species& s2);

struct JacobianValue {
  double magnitude;     // |det d(w1,w2)/d(v1,v2)|
  double signed_value;  // -eps (Reflective) or +eps (Passing)
};

JacobianValue jacobian_analytic(double epsilon, CollisionBranch branch);

/// Central finite-difference determinant of (v1, v2) -> (w1, w2) at fixed n.
/// Default step: 1e-5 * max(1, max_i |v_i|).
double jacobian_numeric(const Vec3& v1, const Vec3& v2, const Vec3& n, double epsilon,
                        CollisionBranch branch, const Species& s1, const Species& s2,
                        std::optional<double> step = std::nullopt);

double kinetic_energy(const Vec3& v1, const Vec3& v2, const Species& s1, const Species& s2);

const char* to_string(CollisionBranch branch);

/// Accepts "reflective" / "passing"; throws InvalidInput otherwise.
CollisionBranch parse_branch(const std::string& text);

}  // namespace kinetics
