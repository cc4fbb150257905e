#include "kinetics/transport_solver.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <istream>
#include <ostream>

#include <fmt/format.h>

#include "kinetics/errors.hpp"
#include "kinetics/parallel.hpp"
#include "kinetics/snapshot.hpp"

namespace kinetics::transport {

void ForceField::validate() const {
  if (!force.allFinite()) throw InvalidInput("force field: force is not finite");
  if (!(mass > 0.0) || !std::isfinite(mass)) {
    throw InvalidInput(fmt::format("force field: mass must be > 0, got {}", mass));
  }
}

PhasePoint trace_back(const ForceField& field, const PhasePoint& p) {
  const Vec3 a = field.acceleration();
  const double t = p.t;
  return {p.r - p.v * t + 0.5 * a * t * t, p.v - a * t, 0.0};
}

PhasePoint advance(const ForceField& field, const PhasePoint& p, double dt) {
  const Vec3 a = field.acceleration();
  return {p.r + p.v * dt + 0.5 * a * dt * dt, p.v + a * dt, p.t + dt};
}

double exact_solution(const PhaseFunction& f0, const ForceField& field, const PhasePoint& p) {
  const PhasePoint foot = trace_back(field, p);
  return f0(foot.r, foot.v);
}

void PhaseGrid::validate() const {
  if (nx < 4 || nv < 4) throw InvalidInput("phase grid: need at least 4 nodes per axis");
  if (!(xmax > xmin) || !(vmax > vmin)) throw InvalidInput("phase grid: empty extent");
}

double PhaseGridFunction::mass() const {
  double sum = 0.0;
  for (const double v : values) sum += v;
  return sum * grid.dx() * grid.dv();
}

double PhaseGridFunction::max_abs() const {
  double m = 0.0;
  for (const double v : values) m = std::max(m, std::abs(v));
  return m;
}

PhaseGridFunction sample_on_grid(const PhaseGrid& grid, const std::function<double(double, double)>& fn) {
  grid.validate();
  PhaseGridFunction out{grid, std::vector<double>(grid.size())};
  for (int i = 0; i < grid.nx; ++i) {
    for (int j = 0; j < grid.nv; ++j) out.values[grid.index(i, j)] = fn(grid.x(i), grid.v(j));
  }
  return out;
}

namespace {

// Value at fractional node position `offset` of a line of samples that is
// zero outside [0, n-1].
double interpolate_line(std::span<const double> line, double offset, Interpolation kind) {
  const auto n = static_cast<long>(line.size());
  if (!(offset >= 0.0 && offset <= static_cast<double>(n - 1))) return 0.0;
  const long i = std::min(static_cast<long>(std::floor(offset)), n - 1);
  const double t = offset - static_cast<double>(i);
  auto at = [&](long k) { return (k >= 0 && k < n) ? line[static_cast<std::size_t>(k)] : 0.0; };
  if (t == 0.0) return at(i);
  if (kind == Interpolation::Linear) return (1.0 - t) * at(i) + t * at(i + 1);
  const std::array<double, 4> w{-t * (t - 1.0) * (t - 2.0) / 6.0,
                                (t + 1.0) * (t - 1.0) * (t - 2.0) / 2.0,
                                -(t + 1.0) * t * (t - 2.0) / 2.0,
                                (t + 1.0) * t * (t - 1.0) / 6.0};
  return w[0] * at(i - 1) + w[1] * at(i) + w[2] * at(i + 1) + w[3] * at(i + 2);
}

// f(x, v) <- f(x, v - a dt) for every x row.
void shift_velocity(const PhaseGrid& g, std::vector<double>& f, double a_dt, Interpolation kind) {
  std::vector<double> out(f.size());
  const double cells = a_dt / g.dv();
  parallel_for(static_cast<std::size_t>(g.nx), [&](std::size_t row) {
    const auto i = static_cast<int>(row);
    const std::span<const double> line(&f[g.index(i, 0)], static_cast<std::size_t>(g.nv));
    for (int j = 0; j < g.nv; ++j) {
      out[g.index(i, j)] = interpolate_line(line, j - cells, kind);
    }
  });
  f.swap(out);
}

// f(x, v) <- f(x - v dt, v) for every v column.
void shift_space(const PhaseGrid& g, std::vector<double>& f, double dt, Interpolation kind) {
  std::vector<double> out(f.size());
  parallel_for(static_cast<std::size_t>(g.nv), [&](std::size_t col) {
    const auto j = static_cast<int>(col);
    std::vector<double> line(static_cast<std::size_t>(g.nx));
    for (int i = 0; i < g.nx; ++i) line[static_cast<std::size_t>(i)] = f[g.index(i, j)];
    const double cells = g.v(j) * dt / g.dx();
    for (int i = 0; i < g.nx; ++i) out[g.index(i, j)] = interpolate_line(line, i - cells, kind);
  });
  f.swap(out);
}

}  // namespace

SemiLagrangianResult semi_lagrangian_run(const PhaseGridFunction& f0, double acceleration, double dt,
                                         int n_steps, Interpolation interpolation) {
  f0.grid.validate();
  if (f0.values.size() != f0.grid.size()) throw InvalidInput("semi-Lagrangian: size mismatch");
  if (!(dt > 0.0)) throw InvalidInput(fmt::format("semi-Lagrangian: dt must be > 0, got {}", dt));
  if (n_steps < 0) throw InvalidInput("semi-Lagrangian: n_steps must be >= 0");
  if (!std::isfinite(acceleration)) throw InvalidInput("semi-Lagrangian: acceleration not finite");

  const PhaseGrid& g = f0.grid;
  std::vector<double> f = f0.values;
  for (int s = 0; s < n_steps; ++s) {
    shift_velocity(g, f, 0.5 * acceleration * dt, interpolation);
    shift_space(g, f, dt, interpolation);
    shift_velocity(g, f, 0.5 * acceleration * dt, interpolation);
  }
  SemiLagrangianResult result{{g, std::move(f)}, f0.mass(), 0.0, 0.0};
  result.final_mass = result.f.mass();
  result.relative_mass_drift = result.initial_mass != 0.0
                                   ? (result.final_mass - result.initial_mass) / result.initial_mass
                                   : result.final_mass;
  return result;
}

double max_error(const PhaseGridFunction& numeric, const std::function<double(double, double)>& exact) {
  const PhaseGrid& g = numeric.grid;
  double err = 0.0;
  for (int i = 0; i < g.nx; ++i) {
    for (int j = 0; j < g.nv; ++j) {
      err = std::max(err, std::abs(numeric.values[g.index(i, j)] - exact(g.x(i), g.v(j))));
    }
  }
  return err;
}

std::vector<CollisionalCheckRow> collisional_rhs_check(const DiscreteDistribution& f,
                                                       const QuadratureSpec& spec,
                                                       std::span<const Vec3> probes) {
  const std::vector<RateEstimate> rates = evaluate_field(f, probes, spec);
  std::vector<CollisionalCheckRow> rows;
  rows.reserve(probes.size());
  for (std::size_t i = 0; i < probes.size(); ++i) {
    rows.push_back({probes[i], rates[i], rates[i].sigma_ratio() <= 3.0});
  }
  return rows;
}

void write_phase_snapshot(std::ostream& out, const PhaseGridFunction& f) {
  const PhaseGrid& g = f.grid;
  const nlohmann::json header = {{"variant", "phase-1d1v"}, {"nx", g.nx},     {"nv", g.nv},
                                 {"xmin", g.xmin},          {"xmax", g.xmax}, {"vmin", g.vmin},
                                 {"vmax", g.vmax},          {"order", "row-major-v-fastest"}};
  write_snapshot_payload(out, header, f.values);
}

PhaseGridFunction read_phase_snapshot(std::istream& in) {
  PhaseGrid grid{};
  auto [header, values] = read_snapshot_payload(in, [&grid](const nlohmann::json& h) {
    if (h.value("variant", std::string{}) != "phase-1d1v" ||
        h.value("order", std::string{}) != "row-major-v-fastest") {
      throw InvalidInput("snapshot: not a phase-1d1v snapshot");
    }
    try {
      grid = {h.at("xmin").get<double>(), h.at("xmax").get<double>(), h.at("nx").get<int>(),
              h.at("vmin").get<double>(), h.at("vmax").get<double>(), h.at("nv").get<int>()};
    } catch (const nlohmann::json::exception& e) {
      throw InvalidInput(fmt::format("snapshot: bad phase header: {}", e.what()));
    }
    grid.validate();
    return grid.size();
  });
  return {grid, std::move(values)};
}

void write_phase_table(std::ostream& out, const PhaseGridFunction& f,
                       const std::function<double(double, double)>& exact) {
  const PhaseGrid& g = f.grid;
  out << "x,v,f,exact\n";
  for (int i = 0; i < g.nx; ++i) {
    for (int j = 0; j < g.nv; ++j) {
      out << fmt::format("{},{},{},{}\n", g.x(i), g.v(j), f.values[g.index(i, j)],
                         exact(g.x(i), g.v(j)));
    }
  }
}

}  // namespace kinetics::transport
