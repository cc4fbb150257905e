#pragma once

// Monte Carlo evaluation of the hard-sphere collision term
//
//   df/dt|coll (v) = ∬ (G f(v'') f(v1'') - f(v) f(v1)) ¼ d² |(v - v1) . n| dv1 dn
//
// with n over the full unit sphere and (v'', v1'') the pre-collision pair
// returned by inverse_collide. G is ε (PaperForm) or 1/ε² (StandardGranular);
// only the latter conserves particle number for ε < 1.

#include <array>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "kinetics/collision_kernel.hpp"
#include "kinetics/distribution.hpp"

namespace kinetics {

enum class GainNormalization { PaperForm, StandardGranular };

/// How f is evaluated off the grid inside the quadrature. Trilinear
/// interpolation carries an O(h²) bias that survives the exact gain/loss
/// cancellation of an elastic Maxwellian and dominates the Monte Carlo error
/// at every resolution; the log-quadratic form represents a Maxwellian
/// exactly.
enum class Reconstruction { LogQuadratic, Trilinear };

struct QuadratureSpec {
  std::uint64_t samples = 100000;
  std::uint64_t seed = 0;
  double diameter = 0.0;
  double mass = 0.0;
  double epsilon = 1.0;
  CollisionBranch branch = CollisionBranch::Reflective;
  GainNormalization normalization = GainNormalization::PaperForm;
  Reconstruction reconstruction = Reconstruction::LogQuadratic;

  void validate() const;
  Species species() const { return {mass, diameter}; }
};

struct RateEstimate {
  double value = 0.0;
  double std_error = 0.0;

  /// |value| / std_error, with 0/0 read as 0 and x/0 (x != 0) as +inf.
  double sigma_ratio() const;

  bool operator==(const RateEstimate&) const = default;
};

/// Gain-term weight G for the given normalization.
double gain_weight(GainNormalization normalization, double epsilon);

/// Estimate at one velocity. Draws v1 uniformly over the grid hull and n
/// uniformly on the sphere from a counter-based stream keyed by
/// (spec.seed, bits of v); bit-identical for any thread count. std_error
/// combines the standard error of the mean with the double-precision
/// resolution of gain - loss (4 ulps of gain + loss), which only matters when
/// the two cancel to rounding. Samples whose pre-collision pair leaves the
/// hull contribute zero to gain and loss.
RateEstimate evaluate_at(const DiscreteDistribution& f, const Vec3& v, const QuadratureSpec& spec);

/// evaluate_at for every node, in parallel over nodes.
std::vector<RateEstimate> evaluate_field(const DiscreteDistribution& f, std::span<const Vec3> nodes,
                                         const QuadratureSpec& spec);

struct MomentRates {
  RateEstimate density;                 // 1/(m³ s)
  std::array<RateEstimate, 3> momentum;  // kg/(m² s²)
  RateEstimate energy;                  // W/m³
};

/// Rates of the collision invariants 1, m v, ½ m |v|² from the symmetrised
/// weak form, sampling (v, v1) from the node weights of f and n uniformly.
MomentRates moment_rates(const DiscreteDistribution& f, const QuadratureSpec& spec);

/// CSV with header vx,vy,vz,rate,std_error.
void write_rate_table(std::ostream& out, std::span<const Vec3> nodes,
                      std::span<const RateEstimate> rates);

const char* to_string(GainNormalization normalization);
GainNormalization parse_normalization(const std::string& text);
const char* to_string(Reconstruction reconstruction);
Reconstruction parse_reconstruction(const std::string& text);

}  // namespace kinetics
