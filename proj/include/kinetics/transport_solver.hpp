#pragma once

// Collisionless transport with a constant external force,
//
//   ∂f/∂t + v . ∇f + (F/m) . ∇_v f = 0,
//
// whose solution is constant along the characteristics
// r(t) = r0 + v0 t + a t²/2, v(t) = v0 + a t with a = F/m.

#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

#include "kinetics/collision_operator.hpp"
#include "kinetics/types.hpp"

namespace kinetics::transport {

struct ForceField {
  Vec3 force;   // N
  double mass;  // kg

  Vec3 acceleration() const { return force / mass; }
  void validate() const;
};

struct PhasePoint {
  Vec3 r;
  Vec3 v;
  double t;
};

using PhaseFunction = std::function<double(const Vec3& r, const Vec3& v)>;

/// Foot of the characteristic through p at time 0.
PhasePoint trace_back(const ForceField& field, const PhasePoint& p);

/// Point reached from p after an extra time `dt` along its characteristic.
PhasePoint advance(const ForceField& field, const PhasePoint& p, double dt);

/// f0(r - v t + a t²/2, v - a t).
double exact_solution(const PhaseFunction& f0, const ForceField& field, const PhasePoint& p);

/// Uniform 1D-1V phase grid; nodes include both end points of each axis.
struct PhaseGrid {
  double xmin, xmax;
  int nx;
  double vmin, vmax;
  int nv;

  void validate() const;
  double dx() const { return (xmax - xmin) / (nx - 1); }
  double dv() const { return (vmax - vmin) / (nv - 1); }
  double x(int i) const { return xmin + i * dx(); }
  double v(int j) const { return vmin + j * dv(); }
  std::size_t size() const { return static_cast<std::size_t>(nx) * static_cast<std::size_t>(nv); }
  /// Row-major, v fastest.
  std::size_t index(int i, int j) const {
    return static_cast<std::size_t>(i) * static_cast<std::size_t>(nv) + static_cast<std::size_t>(j);
  }
  bool operator==(const PhaseGrid&) const = default;
};

struct PhaseGridFunction {
  PhaseGrid grid;
  std::vector<double> values;

  double mass() const;  // Σ f dx dv
  double max_abs() const;
};

PhaseGridFunction sample_on_grid(const PhaseGrid& grid, const std::function<double(double, double)>& fn);

enum class Interpolation { Linear, Cubic };

struct SemiLagrangianResult {
  PhaseGridFunction f;
  double initial_mass;
  double final_mass;
  double relative_mass_drift;
};

/// Strang-split semi-Lagrangian solver for ∂f/∂t + v ∂f/∂x + a ∂f/∂v = 0
/// (half shift in v, full shift in x, half shift in v). With constant a the
/// splitting is exact in time, so all error comes from interpolation.
/// Back-traced points outside the grid read f = 0.
SemiLagrangianResult semi_lagrangian_run(const PhaseGridFunction& f0, double acceleration, double dt,
                                         int n_steps, Interpolation interpolation = Interpolation::Cubic);

/// Max-norm error against a reference function evaluated at the nodes.
double max_error(const PhaseGridFunction& numeric, const std::function<double(double, double)>& exact);

struct CollisionalCheckRow {
  Vec3 probe;
  RateEstimate rate;
  bool within_three_sigma;
};

/// Homogeneous case of the kinetic equation: ∂f/∂t equals the collision term.
/// Forwards to evaluate_field and tags each probe against a 3σ band.
std::vector<CollisionalCheckRow> collisional_rhs_check(const DiscreteDistribution& f,
                                                       const QuadratureSpec& spec,
                                                       std::span<const Vec3> probes);

/// Snapshot with a 1D-1V header ("variant": "phase-1d1v").
void write_phase_snapshot(std::ostream& out, const PhaseGridFunction& f);
PhaseGridFunction read_phase_snapshot(std::istream& in);

/// CSV with header x,v,f,exact.
void write_phase_table(std::ostream& out, const PhaseGridFunction& f,
                       const std::function<double(double, double)>& exact);

}  // namespace kinetics::transport
