#include "kinetics/distribution.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <istream>
#include <ostream>

#include <fmt/format.h>

#include "kinetics/errors.hpp"
#include "kinetics/snapshot.hpp"

namespace kinetics {

VelocityGrid::VelocityGrid(double vmax, int nodes_per_axis)
    : vmax_(vmax), nodes_(nodes_per_axis), spacing_(0.0) {
  if (!(vmax > 0.0) || !std::isfinite(vmax)) {
    throw InvalidInput(fmt::format("velocity grid: vmax must be positive, got {}", vmax));
  }
  if (nodes_per_axis < 4) {
    throw InvalidInput(
        fmt::format("velocity grid: need at least 4 nodes per axis, got {}", nodes_per_axis));
  }
  spacing_ = 2.0 * vmax / (nodes_per_axis - 1);
}

Vec3 VelocityGrid::node(std::size_t flat) const {
  const auto n = static_cast<std::size_t>(nodes_);
  const auto k = static_cast<int>(flat % n);
  const auto j = static_cast<int>((flat / n) % n);
  const auto i = static_cast<int>(flat / (n * n));
  return {coordinate(i), coordinate(j), coordinate(k)};
}

DiscreteDistribution::DiscreteDistribution(VelocityGrid grid, std::vector<double> values)
    : grid_(grid), values_(std::move(values)) {
  if (values_.size() != grid_.size()) {
    throw InvalidInput(fmt::format("distribution: {} values for a grid of {} nodes",
                                   values_.size(), grid_.size()));
  }
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!(values_[i] >= 0.0) || !std::isfinite(values_[i])) {
      throw InvalidInput(fmt::format("distribution: value {} at node {} is not a finite "
                                     "nonnegative number",
                                     values_[i], i));
    }
  }
}

DiscreteDistribution DiscreteDistribution::zeros(const VelocityGrid& grid) {
  return {grid, std::vector<double>(grid.size(), 0.0)};
}

DiscreteDistribution DiscreteDistribution::scaled(double factor) const {
  std::vector<double> out(values_);
  for (double& v : out) v *= factor;
  return {grid_, std::move(out)};
}

namespace {

void check_mode_resolution(const VelocityGrid& grid, const Vec3& bulk_velocity,
                           double temperature, double mass) {
  const double thermal_speed = std::sqrt(kBoltzmann * temperature / mass);
  if (thermal_speed < 3.0 * grid.spacing()) {
    throw UnderResolved(fmt::format(
        "thermal speed {:.6g} m/s spans fewer than 3 grid spacings ({:.6g} m/s each)",
        thermal_speed, grid.spacing()));
  }
  const double needed = bulk_velocity.norm() + 4.0 * thermal_speed;
  if (grid.vmax() < needed * (1.0 - 1e-12)) {  // slack absorbs rounding at exactly 4σ
    throw UnderResolved(fmt::format(
        "vmax {:.6g} m/s below |u| + 4 thermal speeds = {:.6g} m/s", grid.vmax(), needed));
  }
}

void add_maxwellian(std::vector<double>& values, const VelocityGrid& grid, double density,
                    const Vec3& u, double temperature, double mass) {
  const double kt = kBoltzmann * temperature;
  const double norm = density * std::pow(mass / (2.0 * kPi * kt), 1.5);
  const double rate = mass / (2.0 * kt);
  for (std::size_t flat = 0; flat < values.size(); ++flat) {
    values[flat] += norm * std::exp(-rate * (grid.node(flat) - u).squaredNorm());
  }
}

void check_mode_parameters(double density, double temperature, double mass, bool allow_empty) {
  if (!(mass > 0.0)) throw InvalidInput(fmt::format("maxwellian: mass must be > 0, got {}", mass));
  if (!(temperature > 0.0)) {
    throw InvalidInput(fmt::format("maxwellian: temperature must be > 0, got {}", temperature));
  }
  if (allow_empty ? !(density >= 0.0) : !(density > 0.0)) {
    throw InvalidInput(fmt::format("maxwellian: invalid density {}", density));
  }
}

}  // namespace

DiscreteDistribution maxwellian(const VelocityGrid& grid, double density, const Vec3& bulk_velocity,
                                double temperature, double mass) {
  check_mode_parameters(density, temperature, mass, false);
  check_mode_resolution(grid, bulk_velocity, temperature, mass);
  std::vector<double> values(grid.size(), 0.0);
  add_maxwellian(values, grid, density, bulk_velocity, temperature, mass);
  return {grid, std::move(values)};
}

DiscreteDistribution bimodal(const VelocityGrid& grid, const MaxwellianMode& first,
                             const MaxwellianMode& second, double mass) {
  std::vector<double> values(grid.size(), 0.0);
  for (const MaxwellianMode* mode : {&first, &second}) {
    check_mode_parameters(mode->density, mode->temperature, mass, true);
    check_mode_resolution(grid, mode->bulk_velocity, mode->temperature, mass);
    if (mode->density > 0.0) {
      add_maxwellian(values, grid, mode->density, mode->bulk_velocity, mode->temperature, mass);
    }
  }
  return {grid, std::move(values)};
}

Moments moments(const DiscreteDistribution& f, double mass) {
  const VelocityGrid& grid = f.grid();
  double density = 0.0;
  Vec3 momentum = Vec3::Zero();
  double energy = 0.0;
  for (std::size_t flat = 0; flat < grid.size(); ++flat) {
    const double value = f[flat];
    if (value == 0.0) continue;
    const Vec3 v = grid.node(flat);
    density += value;
    momentum += value * v;
    energy += value * v.squaredNorm();
  }
  const double h3 = grid.cell_volume();
  return {density * h3, mass * h3 * momentum, 0.5 * mass * h3 * energy};
}

namespace {

struct AxisStencil {
  int lower;
  int upper;
  double weight_upper;
};

// Locates v between two nodes. A query that equals a node coordinate gets
// weight_upper == 0 so node values are reproduced bit-exactly.
bool locate(const VelocityGrid& grid, double v, AxisStencil& out) {
  const int last = grid.nodes_per_axis() - 1;
  if (!(v >= grid.coordinate(0) && v <= grid.coordinate(last))) return false;
  int i = static_cast<int>(std::floor((v + grid.vmax()) / grid.spacing()));
  i = std::clamp(i, 0, last);
  while (i > 0 && grid.coordinate(i) > v) --i;
  while (i < last && grid.coordinate(i + 1) <= v) ++i;
  if (i == last) {
    out = {last, last, 0.0};
  } else {
    out = {i, i + 1, (v - grid.coordinate(i)) / grid.spacing()};
  }
  return true;
}

}  // namespace

double interpolate(const DiscreteDistribution& f, const Vec3& v) {
  const VelocityGrid& grid = f.grid();
  std::array<AxisStencil, 3> axis;
  for (int d = 0; d < 3; ++d) {
    if (!locate(grid, v[d], axis[static_cast<std::size_t>(d)])) return 0.0;
  }
  const auto& [x, y, z] = axis;
  double result = 0.0;
  for (int a = 0; a < 2; ++a) {
    const double wx = a ? x.weight_upper : 1.0 - x.weight_upper;
    if (wx == 0.0) continue;
    const int i = a ? x.upper : x.lower;
    for (int b = 0; b < 2; ++b) {
      const double wy = b ? y.weight_upper : 1.0 - y.weight_upper;
      if (wy == 0.0) continue;
      const int j = b ? y.upper : y.lower;
      for (int c = 0; c < 2; ++c) {
        const double wz = c ? z.weight_upper : 1.0 - z.weight_upper;
        if (wz == 0.0) continue;
        const int k = c ? z.upper : z.lower;
        result += wx * wy * wz * f[grid.flat_index(i, j, k)];
      }
    }
  }
  return result;
}

LogQuadraticInterpolant::LogQuadraticInterpolant(const DiscreteDistribution& f)
    : f_(&f), log_values_(f.values().size()) {
  std::transform(f.values().begin(), f.values().end(), log_values_.begin(),
                 [](double x) { return std::log(static_cast<long double>(x)); });
}

double LogQuadraticInterpolant::operator()(const Vec3& v) const {
  const VelocityGrid& grid = f_->grid();
  const int last = grid.nodes_per_axis() - 1;
  std::array<int, 3> centre;
  std::array<std::array<long double, 3>, 3> weight;
  bool at_node = true;
  for (int d = 0; d < 3; ++d) {
    if (!(v[d] >= grid.coordinate(0) && v[d] <= grid.coordinate(last))) return 0.0;
    const double s = (v[d] + grid.vmax()) / grid.spacing();
    const int c = std::clamp(static_cast<int>(std::lround(s)), 1, last - 1);
    const long double t =
        (static_cast<long double>(v[d]) - grid.coordinate(c)) / grid.spacing();
    centre[static_cast<std::size_t>(d)] = c;
    weight[static_cast<std::size_t>(d)] = {0.5L * t * (t - 1.0L), (1.0L - t) * (1.0L + t),
                                           0.5L * t * (t + 1.0L)};
    at_node = at_node && (v[d] == grid.coordinate(c - 1) || v[d] == grid.coordinate(c) ||
                          v[d] == grid.coordinate(c + 1));
  }
  if (at_node) return interpolate(*f_, v);

  long double log_f = 0.0L;
  for (int a = 0; a < 3; ++a) {
    const int i = centre[0] + a - 1;
    for (int b = 0; b < 3; ++b) {
      const int j = centre[1] + b - 1;
      const long double wxy =
          weight[0][static_cast<std::size_t>(a)] * weight[1][static_cast<std::size_t>(b)];
      for (int c = 0; c < 3; ++c) {
        const int k = centre[2] + c - 1;
        const long double lf = log_values_[grid.flat_index(i, j, k)];
        if (std::isinf(lf)) return interpolate(*f_, v);
        log_f += wxy * weight[2][static_cast<std::size_t>(c)] * lf;
      }
    }
  }
  return static_cast<double>(std::exp(log_f));
}

void write_snapshot(std::ostream& out, const DiscreteDistribution& f) {
  const nlohmann::json header = {{"nodes_per_axis", f.grid().nodes_per_axis()},
                                 {"vmax", f.grid().vmax()},
                                 {"order", "row-major-z-fastest"}};
  write_snapshot_payload(out, header, f.values());
}

DiscreteDistribution read_distribution_snapshot(std::istream& in) {
  auto [header, values] = read_snapshot_payload(in, [](const nlohmann::json& h) {
    if (!h.contains("nodes_per_axis") || !h.contains("vmax") ||
        h.value("order", std::string{}) != "row-major-z-fastest") {
      throw InvalidInput("snapshot: header lacks nodes_per_axis/vmax or has an unknown order");
    }
    const auto n = h.at("nodes_per_axis").get<long long>();
    if (n < 4 || n > 4096) throw InvalidInput(fmt::format("snapshot: bad nodes_per_axis {}", n));
    const auto side = static_cast<std::size_t>(n);
    return side * side * side;
  });
  const VelocityGrid grid(header.at("vmax").get<double>(), header.at("nodes_per_axis").get<int>());
  return {grid, std::move(values)};
}

}  // namespace kinetics
