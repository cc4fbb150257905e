#pragma once

// Spatially homogeneous one-particle distribution f(v) sampled on a uniform
// Cartesian velocity grid [-vmax, vmax]^3.

#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

#include "kinetics/types.hpp"

namespace kinetics {

class VelocityGrid {
 public:
  /// Throws InvalidInput unless vmax > 0 and nodes_per_axis >= 4.
  VelocityGrid(double vmax, int nodes_per_axis);

  double vmax() const { return vmax_; }
  int nodes_per_axis() const { return nodes_; }
  double spacing() const { return spacing_; }
  double cell_volume() const { return spacing_ * spacing_ * spacing_; }
  std::size_t size() const {
    const auto n = static_cast<std::size_t>(nodes_);
    return n * n * n;
  }

  /// Antisymmetric to the last bit: coordinate(N-1-i) == -coordinate(i).
  double coordinate(int i) const { return vmax_ * (2 * i - (nodes_ - 1)) / (nodes_ - 1); }

  /// Row-major, z fastest: flat = (i * N + j) * N + k.
  std::size_t flat_index(int i, int j, int k) const {
    const auto n = static_cast<std::size_t>(nodes_);
    return (static_cast<std::size_t>(i) * n + static_cast<std::size_t>(j)) * n +
           static_cast<std::size_t>(k);
  }

  Vec3 node(std::size_t flat) const;

  bool operator==(const VelocityGrid&) const = default;

 private:
  double vmax_;
  int nodes_;
  double spacing_;
};

/// Immutable after construction; values are nonnegative and finite.
class DiscreteDistribution {
 public:
  DiscreteDistribution(VelocityGrid grid, std::vector<double> values);

  static DiscreteDistribution zeros(const VelocityGrid& grid);

  const VelocityGrid& grid() const { return grid_; }
  std::span<const double> values() const { return values_; }
  double operator[](std::size_t flat) const { return values_[flat]; }

  DiscreteDistribution scaled(double factor) const;

  bool operator==(const DiscreteDistribution&) const = default;

 private:
  VelocityGrid grid_;
  std::vector<double> values_;
};

struct Moments {
  double density;
  Vec3 momentum;
  double kinetic_energy;
};

struct MaxwellianMode {
  double density;
  Vec3 bulk_velocity;
  double temperature;  // K
};

/// n (m / 2πkT)^{3/2} exp(-m |v-u|² / 2kT) at the grid nodes. Throws
/// UnderResolved unless sqrt(kT/m) spans >= 3 grid spacings and
/// vmax >= |u| + 4 sqrt(kT/m).
DiscreteDistribution maxwellian(const VelocityGrid& grid, double density, const Vec3& bulk_velocity,
                                double temperature, double mass);

/// Sum of two Maxwellians; a mode may have zero density.
DiscreteDistribution bimodal(const VelocityGrid& grid, const MaxwellianMode& first,
                             const MaxwellianMode& second, double mass);

/// Node-weighted sums: Σ f h³, Σ m v f h³, Σ ½ m |v|² f h³.
Moments moments(const DiscreteDistribution& f, double mass);

/// Trilinear interpolation inside the node hull, exactly 0 outside.
double interpolate(const DiscreteDistribution& f, const Vec3& v);

/// exp of the triquadratic Lagrange interpolant of ln f over the 3x3x3
/// stencil around the nearest node. Reproduces any single Maxwellian to
/// rounding, returns node values bit-exactly and 0 outside the hull. Where
/// the stencil holds a zero it falls back to trilinear interpolation.
class LogQuadraticInterpolant {
 public:
  explicit LogQuadraticInterpolant(const DiscreteDistribution& f);
  double operator()(const Vec3& v) const;

 private:
  const DiscreteDistribution* f_;
  std::vector<long double> log_values_;  // -inf where f == 0; extended precision since |ln f| >> 1
};

/// Snapshot: one-line JSON header then N³ little-endian float64 values.
void write_snapshot(std::ostream& out, const DiscreteDistribution& f);
DiscreteDistribution read_distribution_snapshot(std::istream& in);

}  // namespace kinetics
