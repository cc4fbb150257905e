#include "kinetics/cli.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include <fmt/format.h>

#include "kinetics/claim_audit.hpp"
#include "kinetics/collision_kernel.hpp"
#include "kinetics/collision_operator.hpp"
#include "kinetics/csv.hpp"
#include "kinetics/distribution.hpp"
#include "kinetics/dsmc.hpp"
#include "kinetics/errors.hpp"
#include "kinetics/rng.hpp"
#include "kinetics/transport_solver.hpp"

namespace kinetics::cli {

using nlohmann::json;

namespace {

json gas_defaults() {
  const audit::GasParameters gas;
  return {{"mass", gas.mass},
          {"diameter", gas.diameter},
          {"temperature", gas.temperature},
          {"number_density", gas.number_density}};
}

json collide_defaults() {
  return {{"species1", {{"mass", 1.0}, {"diameter", 1.0}}},
          {"species2", {{"mass", 1.0}, {"diameter", 1.0}}},
          {"epsilon", 0.8},
          {"branch", "reflective"},
          {"events", json::array({{{"v1", {1.0, 0.0, 0.0}},
                                   {"v2", {-1.0, 0.0, 0.0}},
                                   {"n", {1.0, 0.0, 0.0}}}})},
          {"random_events", 0}};
}

json operator_defaults() {
  return {{"gas", gas_defaults()},
          {"grid_nodes", 41},
          {"vmax_thermal", 6.0},
          {"distribution", "maxwellian"},
          {"separation_thermal", 2.0},
          {"epsilon", 1.0},
          {"branch", "reflective"},
          {"normalization", "paper"},
          {"reconstruction", "log-quadratic"},
          {"samples", 100000},
          {"moment_samples", 1000000}};
}

json dsmc_defaults() {
  return {{"gas", gas_defaults()},
          {"particles", 20000},
          {"dt", 1e-5},
          {"steps", 200},
          {"sample_every", 10},
          {"epsilon", 0.9},
          {"branch", "reflective"},
          {"bulk_velocity", {0.0, 0.0, 0.0}},
          {"majorant_relative_speed", 0.0},
          {"max_retries", 16}};
}

json transport_defaults() {
  return {{"grid", {{"xmin", -8.0}, {"xmax", 8.0}, {"nx", 128}, {"vmin", -8.0}, {"vmax", 8.0},
                    {"nv", 128}}},
          {"force", 1.0},
          {"mass", 1.0},
          {"dt", 0.05},
          {"steps", 40},
          {"interpolation", "cubic"},
          {"initial", {{"x0", 0.0}, {"v0", 0.0}, {"sigma_x", 1.0}, {"sigma_v", 1.0}}}};
}

json audit_defaults() {
  const audit::AuditSettings s;
  return {{"gas", gas_defaults()},
          {"grid_nodes", s.grid_nodes},
          {"vmax_thermal", s.vmax_thermal},
          {"probe_samples", s.probe_samples},
          {"moment_samples", s.moment_samples},
          {"epsilons", s.epsilons},
          {"chain_rule_points", s.chain_rule_points},
          {"lambda", s.lambda}};
}

std::string join(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

std::string type_name(const json& j) {
  if (j.is_number_unsigned()) return "non-negative integer";
  if (j.is_number_integer()) return "integer";
  return j.type_name();
}

// Overlays `given` on `schema` (a default value), enforcing the schema's
// shape. Length-3 numeric arrays are vectors and keep their length; other
// arrays are lists whose elements follow the first default element.
json resolve(const json& schema, const json& given, const std::string& path) {
  auto mismatch = [&]() {
    return ValidationError(fmt::format("'{}' must be a {}, got {}", path, type_name(schema),
                                       given.type_name()),
                           path);
  };
  if (schema.is_object()) {
    if (!given.is_object()) throw mismatch();
    json out = schema;
    for (const auto& [key, value] : given.items()) {
      const std::string sub = join(path, key);
      if (!schema.contains(key)) throw ValidationError(fmt::format("unknown key '{}'", sub), sub);
      out[key] = resolve(schema[key], value, sub);
    }
    return out;
  }
  if (schema.is_array()) {
    if (!given.is_array()) throw mismatch();
    const bool vector = schema.size() == 3 && schema[0].is_number();
    if (vector && given.size() != 3) {
      throw ValidationError(fmt::format("'{}' must have 3 components", path), path);
    }
    json out = json::array();
    for (std::size_t i = 0; i < given.size(); ++i) {
      out.push_back(resolve(schema.at(vector ? i : 0), given[i], fmt::format("{}[{}]", path, i)));
    }
    return out;
  }
  if (schema.is_number_unsigned()) {
    if (!given.is_number_unsigned()) throw mismatch();
    return given;
  }
  if (schema.is_number_integer()) {
    if (!given.is_number_integer()) throw mismatch();
    return given;
  }
  if (schema.is_number_float()) {
    if (!given.is_number()) throw mismatch();
    const double value = given.get<double>();
    if (!std::isfinite(value)) throw ValidationError(fmt::format("'{}' must be finite", path), path);
    return value;
  }
  if (schema.is_string()) {
    if (!given.is_string()) throw mismatch();
    return given;
  }
  if (schema.is_boolean()) {
    if (!given.is_boolean()) throw mismatch();
    return given;
  }
  throw mismatch();
}

// Maps InvalidInput raised while interpreting a key to a ValidationError
// naming that key.
template <class Fn>
auto keyed(const std::string& key, Fn&& fn) {
  try {
    return fn();
  } catch (const ValidationError&) {
    throw;
  } catch (const InvalidInput& e) {
    throw ValidationError(fmt::format("'{}': {}", key, e.what()), key);
  }
}

void require(bool ok, const std::string& key, std::string_view message) {
  if (!ok) throw ValidationError(fmt::format("'{}' {}", key, message), key);
}

double positive(const json& p, const std::string& key, const std::string& path) {
  const double v = p.at(key).get<double>();
  require(v > 0.0, join(path, key), "must be > 0");
  return v;
}

Vec3 vec(const json& j) { return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()}; }

Species species_of(const json& p, const std::string& path) {
  return {positive(p, "mass", path), positive(p, "diameter", path)};
}

audit::GasParameters gas_of(const json& p) {
  audit::GasParameters gas;
  gas.mass = positive(p, "mass", "parameters.gas");
  gas.diameter = positive(p, "diameter", "parameters.gas");
  gas.temperature = positive(p, "temperature", "parameters.gas");
  gas.number_density = positive(p, "number_density", "parameters.gas");
  return gas;
}

double restitution(const json& p) {
  const double e = p.at("epsilon").get<double>();
  require(e > 0.0 && e <= 1.0, "parameters.epsilon", "must lie in (0, 1]");
  return e;
}

CollisionBranch branch_of(const json& p) {
  return keyed("parameters.branch", [&] { return parse_branch(p.at("branch").get<std::string>()); });
}

// --- collide ----------------------------------------------------------------

RunOutput run_collide(const json& p, std::uint64_t seed) {
  const Species s1 = species_of(p.at("species1"), "parameters.species1");
  const Species s2 = species_of(p.at("species2"), "parameters.species2");
  const double epsilon = restitution(p);
  const CollisionBranch branch = branch_of(p);

  struct Input {
    Vec3 v1, v2, n;
  };
  std::vector<Input> inputs;
  for (const json& e : p.at("events")) inputs.push_back({vec(e.at("v1")), vec(e.at("v2")), vec(e.at("n"))});
  RandomStream rng(seed, 0x636F6C6C696465ull);
  const auto random_events = p.at("random_events").get<std::uint64_t>();
  for (std::uint64_t i = 0; i < random_events; ++i) {
    const Vec3 v1(rng.normal(), rng.normal(), rng.normal());
    const Vec3 v2(rng.normal(), rng.normal(), rng.normal());
    inputs.push_back({v1, v2, rng.unit_vector()});
  }

  std::ostringstream out;
  out << "index,v1x,v1y,v1z,v2x,v2y,v2z,nx,ny,nz,w1x,w1y,w1z,w2x,w2y,w2z,"
         "lambda1,lambda2,delta_e,delta_e_formula,jacobian_numeric,jacobian_analytic\n";
  const double analytic = jacobian_analytic(epsilon, branch).magnitude;
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    const Input& in = inputs[i];
    const std::string key = fmt::format("parameters.events[{}]", i);
    const CollisionEvent e =
        keyed(key, [&] { return collide(in.v1, in.v2, in.n, epsilon, branch, s1, s2); });
    const double numeric = jacobian_numeric(in.v1, in.v2, in.n, epsilon, branch, s1, s2);
    out << fmt::format("{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n", i,
                       in.v1.x(), in.v1.y(), in.v1.z(), in.v2.x(), in.v2.y(), in.v2.z(), in.n.x(),
                       in.n.y(), in.n.z(), e.w1.x(), e.w1.y(), e.w1.z(), e.w2.x(), e.w2.y(),
                       e.w2.z(), e.lambda1, e.lambda2, e.delta_e,
                       energy_loss_formula(in.v1, in.v2, epsilon, s1, s2), numeric, analytic);
  }
  return {{{"collisions.csv", out.str()}}};
}

// --- operator ---------------------------------------------------------------

RunOutput run_operator(const json& p, std::uint64_t seed) {
  const audit::GasParameters gas = gas_of(p.at("gas"));
  audit::AuditSettings settings;
  settings.gas = gas;
  settings.grid_nodes = p.at("grid_nodes").get<int>();
  settings.vmax_thermal = positive(p, "vmax_thermal", "parameters");
  const VelocityGrid grid =
      keyed("parameters.grid_nodes", [&] { return audit::audit_grid(settings); });

  const double thermal = std::sqrt(kBoltzmann * gas.temperature / gas.mass);
  const std::string kind = p.at("distribution").get<std::string>();
  const double separation = p.at("separation_thermal").get<double>() * thermal;
  const DiscreteDistribution f = keyed("parameters.distribution", [&] {
    if (kind == "maxwellian") {
      return maxwellian(grid, gas.number_density, Vec3::Zero(), gas.temperature, gas.mass);
    }
    if (kind == "bimodal") {
      const Vec3 shift(separation, 0.0, 0.0);
      return bimodal(grid, {0.5 * gas.number_density, shift, gas.temperature},
                     {0.5 * gas.number_density, -shift, gas.temperature}, gas.mass);
    }
    throw InvalidInput(fmt::format("unknown distribution '{}' (maxwellian, bimodal)", kind));
  });

  QuadratureSpec spec;
  spec.samples = p.at("samples").get<std::uint64_t>();
  spec.seed = seed;
  spec.diameter = gas.diameter;
  spec.mass = gas.mass;
  spec.epsilon = restitution(p);
  spec.branch = branch_of(p);
  spec.normalization = keyed("parameters.normalization", [&] {
    return parse_normalization(p.at("normalization").get<std::string>());
  });
  spec.reconstruction = keyed("parameters.reconstruction", [&] {
    return parse_reconstruction(p.at("reconstruction").get<std::string>());
  });
  keyed("parameters.samples", [&] {
    spec.validate();
    return 0;
  });

  const std::vector<Vec3> probes = audit::default_probes(thermal);
  const std::vector<RateEstimate> rates = evaluate_field(f, probes, spec);
  std::ostringstream table;
  write_rate_table(table, probes, rates);

  QuadratureSpec moment_spec = spec;
  moment_spec.samples = p.at("moment_samples").get<std::uint64_t>();
  const MomentRates m = moment_rates(f, moment_spec);
  std::ostringstream moments_csv;
  moments_csv << "quantity,rate,std_error\n";
  auto row = [&](std::string_view name, const RateEstimate& r) {
    moments_csv << fmt::format("{},{},{}\n", name, r.value, r.std_error);
  };
  row("density", m.density);
  row("momentum_x", m.momentum[0]);
  row("momentum_y", m.momentum[1]);
  row("momentum_z", m.momentum[2]);
  row("energy", m.energy);

  std::ostringstream snapshot;
  write_snapshot(snapshot, f);
  return {{{"rates.csv", table.str()},
           {"moment_rates.csv", moments_csv.str()},
           {"distribution.snap", snapshot.str()}}};
}

// --- dsmc -------------------------------------------------------------------

RunOutput run_dsmc(const json& p, std::uint64_t seed) {
  const audit::GasParameters gas = gas_of(p.at("gas"));
  const auto particles = p.at("particles").get<std::uint64_t>();
  require(particles >= 2, "parameters.particles", "must be >= 2");
  dsmc::DsmcConfig config;
  config.dt = positive(p, "dt", "parameters");
  config.number_density = gas.number_density;
  config.epsilon = restitution(p);
  config.branch = branch_of(p);
  config.seed = seed;
  config.majorant_relative_speed = p.at("majorant_relative_speed").get<double>();
  require(config.majorant_relative_speed >= 0.0, "parameters.majorant_relative_speed",
          "must be >= 0 (0 derives it from the ensemble)");
  config.max_retries = p.at("max_retries").get<int>();
  require(config.max_retries >= 0, "parameters.max_retries", "must be >= 0");
  const auto steps = p.at("steps").get<std::uint64_t>();
  const auto sample_every = p.at("sample_every").get<std::uint64_t>();
  require(sample_every >= 1, "parameters.sample_every", "must be >= 1");
  keyed("parameters", [&] {
    config.validate();
    return 0;
  });

  const Species species{gas.mass, gas.diameter};
  dsmc::Simulator sim(dsmc::sample_maxwellian_ensemble(particles, species, gas.number_density,
                                                       vec(p.at("bulk_velocity")), gas.temperature,
                                                       seed),
                      config);
  const std::vector<dsmc::Sample> series = sim.run(steps, sample_every);
  std::ostringstream out;
  dsmc::write_time_series(out, series);
  return {{{"timeseries.csv", out.str()}}};
}

// --- transport --------------------------------------------------------------

RunOutput run_transport(const json& p) {
  const json& g = p.at("grid");
  transport::PhaseGrid grid{g.at("xmin").get<double>(), g.at("xmax").get<double>(),
                            g.at("nx").get<int>(),      g.at("vmin").get<double>(),
                            g.at("vmax").get<double>(), g.at("nv").get<int>()};
  keyed("parameters.grid", [&] {
    grid.validate();
    return 0;
  });
  const transport::ForceField field{Vec3(p.at("force").get<double>(), 0.0, 0.0),
                                    positive(p, "mass", "parameters")};
  const double dt = positive(p, "dt", "parameters");
  const int steps = p.at("steps").get<int>();
  require(steps >= 0, "parameters.steps", "must be >= 0");
  const std::string interp = p.at("interpolation").get<std::string>();
  require(interp == "cubic" || interp == "linear", "parameters.interpolation",
          "must be 'cubic' or 'linear'");

  const json& init = p.at("initial");
  const double x0 = init.at("x0").get<double>();
  const double v0 = init.at("v0").get<double>();
  const double sx = positive(init, "sigma_x", "parameters.initial");
  const double sv = positive(init, "sigma_v", "parameters.initial");
  const transport::PhaseFunction f0 = [=](const Vec3& r, const Vec3& v) {
    const double a = (r.x() - x0) / sx;
    const double b = (v.x() - v0) / sv;
    return std::exp(-0.5 * (a * a + b * b));
  };

  const transport::PhaseGridFunction initial =
      transport::sample_on_grid(grid, [&](double x, double v) { return f0(Vec3(x, 0, 0), Vec3(v, 0, 0)); });
  const transport::SemiLagrangianResult result = transport::semi_lagrangian_run(
      initial, field.acceleration().x(), dt, steps,
      interp == "cubic" ? transport::Interpolation::Cubic : transport::Interpolation::Linear);
  const double t_end = dt * steps;
  const auto exact = [&](double x, double v) {
    return transport::exact_solution(f0, field, {Vec3(x, 0, 0), Vec3(v, 0, 0), t_end});
  };

  std::ostringstream table;
  transport::write_phase_table(table, result.f, exact);
  std::ostringstream summary;
  summary << "t,initial_mass,final_mass,relative_mass_drift,max_error\n"
          << fmt::format("{},{},{},{},{}\n", t_end, result.initial_mass, result.final_mass,
                         result.relative_mass_drift, transport::max_error(result.f, exact));
  std::ostringstream snapshot;
  transport::write_phase_snapshot(snapshot, result.f);
  return {{{"phase.csv", table.str()},
           {"transport_summary.csv", summary.str()},
           {"phase.snap", snapshot.str()}}};
}

// --- audit ------------------------------------------------------------------

RunOutput run_audit(const json& p, std::uint64_t seed) {
  audit::AuditSettings s;
  s.seed = seed;
  s.gas = gas_of(p.at("gas"));
  s.grid_nodes = p.at("grid_nodes").get<int>();
  s.vmax_thermal = positive(p, "vmax_thermal", "parameters");
  s.probe_samples = p.at("probe_samples").get<std::uint64_t>();
  s.moment_samples = p.at("moment_samples").get<std::uint64_t>();
  require(s.probe_samples >= 2 && s.moment_samples >= 2, "parameters",
          "sample counts must be >= 2");
  s.epsilons = p.at("epsilons").get<std::vector<double>>();
  for (std::size_t i = 0; i < s.epsilons.size(); ++i) {
    require(s.epsilons[i] > 0.0 && s.epsilons[i] <= 1.0, fmt::format("parameters.epsilons[{}]", i),
            "must lie in (0, 1]");
  }
  s.chain_rule_points = p.at("chain_rule_points").get<int>();
  require(s.chain_rule_points >= 1, "parameters.chain_rule_points", "must be >= 1");
  s.lambda = positive(p, "lambda", "parameters");
  keyed("parameters.grid_nodes", [&] { return audit::audit_distributions(s); });

  const std::vector<audit::AuditReport> rows = audit::run_full_audit(s);
  std::ostringstream csv;
  audit::write_audit_csv(csv, rows);
  return {{{"audit.csv", csv.str()}, {"audit_summary.txt", audit::audit_summary(rows)}}};
}

}  // namespace

const std::vector<std::string>& subcommands() {
  static const std::vector<std::string> names = {"collide", "operator", "dsmc", "transport", "audit"};
  return names;
}

json default_parameters(const std::string& subcommand) {
  if (subcommand == "collide") return collide_defaults();
  if (subcommand == "operator") return operator_defaults();
  if (subcommand == "dsmc") return dsmc_defaults();
  if (subcommand == "transport") return transport_defaults();
  if (subcommand == "audit") return audit_defaults();
  throw ValidationError(fmt::format("unknown subcommand '{}'", subcommand), "subcommand");
}

RunConfig parse_config(std::string_view text, std::optional<std::string> subcommand) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    const std::size_t end = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
    const auto line = 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + end, '\n'));
    throw ParseError(fmt::format("config line {}: {}", line, e.what()), line, "");
  }
  if (!doc.is_object()) throw ParseError("config must be a JSON object", 1, "");

  for (const auto& [key, value] : doc.items()) {
    if (key != "subcommand" && key != "seed" && key != "output_dir" && key != "parameters") {
      throw ValidationError(fmt::format("unknown key '{}'", key), key);
    }
  }

  RunConfig config;
  if (doc.contains("subcommand")) {
    if (!doc["subcommand"].is_string()) {
      throw ValidationError("'subcommand' must be a string", "subcommand");
    }
    config.subcommand = doc["subcommand"].get<std::string>();
    if (subcommand && *subcommand != config.subcommand) {
      throw ValidationError(fmt::format("config is for '{}' but '{}' was requested",
                                        config.subcommand, *subcommand),
                            "subcommand");
    }
  } else if (subcommand) {
    config.subcommand = *subcommand;
  } else {
    throw ValidationError("no subcommand given", "subcommand");
  }
  const json defaults = default_parameters(config.subcommand);

  if (doc.contains("seed")) {
    if (!doc["seed"].is_number_unsigned()) {
      throw ValidationError("'seed' must be a non-negative integer", "seed");
    }
    config.seed = doc["seed"].get<std::uint64_t>();
  }
  if (doc.contains("output_dir")) {
    if (!doc["output_dir"].is_string()) throw ValidationError("'output_dir' must be a string", "output_dir");
    config.output_dir = doc["output_dir"].get<std::string>();
  }
  config.parameters =
      doc.contains("parameters") ? resolve(defaults, doc["parameters"], "parameters") : defaults;
  return config;
}

json to_json(const RunConfig& config) {
  return {{"subcommand", config.subcommand},
          {"seed", config.seed},
          {"output_dir", config.output_dir.generic_string()},
          {"parameters", config.parameters}};
}

std::string echo_text(const RunConfig& config) { return to_json(config).dump(2) + "\n"; }

RunOutput execute(const RunConfig& config) {
  const json& p = config.parameters;
  if (config.subcommand == "collide") return run_collide(p, config.seed);
  if (config.subcommand == "operator") return run_operator(p, config.seed);
  if (config.subcommand == "dsmc") return run_dsmc(p, config.seed);
  if (config.subcommand == "transport") return run_transport(p);
  if (config.subcommand == "audit") return run_audit(p, config.seed);
  throw ValidationError(fmt::format("unknown subcommand '{}'", config.subcommand), "subcommand");
}

int run(const RunConfig& config) {
  try {
    RunOutput output = execute(config);
    output.files.emplace_back(kEchoFile, echo_text(config));
    std::filesystem::create_directories(config.output_dir);
    for (const auto& [name, content] : output.files) {
      write_file_atomic(config.output_dir / name, content);
    }
    return 0;
  } catch (const InvalidInput& e) {
    std::cerr << "kinetics: invalid input: " << e.what() << '\n';
    return 1;
  } catch (const NumericalFailure& e) {
    std::cerr << "kinetics: numerical failure: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "kinetics: " << e.what() << '\n';
    return 2;
  }
}

}  // namespace kinetics::cli
