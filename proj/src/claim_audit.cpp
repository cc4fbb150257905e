#include "kinetics/claim_audit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <sstream>

#include <fmt/format.h>

#include "kinetics/collision_kernel.hpp"
#include "kinetics/csv.hpp"
#include "kinetics/errors.hpp"
#include "kinetics/rng.hpp"

namespace kinetics::audit {

namespace {

constexpr double kJacobianTolerance = 1e-6;
constexpr double kEnergyTolerance = 1e-12;
constexpr double kSigmaThreshold = 3.0;

constexpr std::uint64_t kJacobianStream = 0x6A61636F6269616Eull;
constexpr std::uint64_t kEnergyStream = 0x656E65726779ull;
constexpr std::uint64_t kChainStream = 0x636861696Eull;

Vec3 normal_vec(RandomStream& rng) { return {rng.normal(), rng.normal(), rng.normal()}; }

double log_uniform(RandomStream& rng, double lo, double hi) {
  return lo * std::pow(hi / lo, rng.uniform());
}

// Unit vector orthogonal to g (g nonzero).
Vec3 orthogonal_unit(const Vec3& g, RandomStream& rng) {
  Vec3 n;
  do {
    n = g.cross(normal_vec(rng));
  } while (n.norm() < 1e-3 * g.norm());
  return n.normalized();
}

nlohmann::json to_json(const Vec3& v) { return {v.x(), v.y(), v.z()}; }

double median(std::vector<double> values) {
  if (values.empty()) return 0.0;
  const auto mid = values.begin() + static_cast<std::ptrdiff_t>(values.size() / 2);
  std::nth_element(values.begin(), mid, values.end());
  return *mid;
}

nlohmann::json spec_metadata(const QuadratureSpec& spec) {
  return {{"seed", spec.seed},
          {"samples", spec.samples},
          {"epsilon", spec.epsilon},
          {"branch", to_string(spec.branch)},
          {"normalization", to_string(spec.normalization)},
          {"reconstruction", to_string(spec.reconstruction)},
          {"diameter", spec.diameter},
          {"mass", spec.mass}};
}

}  // namespace

Verdict grade(double residual, double threshold) {
  return residual <= threshold ? Verdict::Consistent : Verdict::Inconsistent;
}

AuditReport graded(std::string claim_id, std::string statement, double residual, double threshold,
                   nlohmann::json metadata) {
  return {std::move(claim_id), std::move(statement), residual, threshold,
          grade(residual, threshold), std::move(metadata)};
}

AuditReport diagnostic(std::string claim_id, std::string statement, double residual,
                       nlohmann::json metadata) {
  return {std::move(claim_id), std::move(statement), residual, std::nullopt,
          Verdict::DiagnosticOnly, std::move(metadata)};
}

const char* to_string(Verdict verdict) {
  switch (verdict) {
    case Verdict::Consistent:
      return "consistent";
    case Verdict::Inconsistent:
      return "inconsistent";
    case Verdict::DiagnosticOnly:
      return "diagnostic-only";
  }
  return "unknown";
}

AuditReport audit_jacobian(std::uint64_t seed, int configs_per_branch) {
  RandomStream rng(seed, kJacobianStream);
  double worst = 0.0;
  double worst_epsilon = 0.0;
  for (const CollisionBranch branch : {CollisionBranch::Reflective, CollisionBranch::Passing}) {
    for (int c = 0; c < configs_per_branch; ++c) {
      const Species s1{log_uniform(rng, 0.1, 10.0), 1.0};
      const Species s2{log_uniform(rng, 0.1, 10.0), 1.0};
      // Every third config is elastic so the ε = 1 corner is always covered.
      const double epsilon = c % 3 == 2 ? 1.0 : 0.05 + 0.95 * rng.uniform();
      const Vec3 n = rng.unit_vector();
      const Vec3 v1 = 10.0 * normal_vec(rng);
      const Vec3 v2 = 10.0 * normal_vec(rng);
      const double numeric = jacobian_numeric(v1, v2, n, epsilon, branch, s1, s2);
      const double err = std::abs(numeric - jacobian_analytic(epsilon, branch).magnitude);
      if (err > worst) {
        worst = err;
        worst_epsilon = epsilon;
      }
    }
  }
  return graded("collision_jacobian", "|det d(w1,w2)/d(v1,v2)| = eps", worst, kJacobianTolerance,
                {{"seed", seed},
                 {"configs_per_branch", configs_per_branch},
                 {"branches", {"reflective", "passing"}},
                 {"worst_epsilon", worst_epsilon}});
}

std::vector<AuditReport> audit_energy_formula(std::uint64_t seed, int configs) {
  RandomStream rng(seed, kEnergyStream);
  const std::string statement = "dE = 1/2 (1-eps^2) m1 m2/(m1+m2) |v1-v2|^2";

  enum class Geometry { HeadOn, Oblique, Grazing, Elastic };
  auto sweep = [&](Geometry geometry) {
    double worst_gap = 0.0;        // |formula - actual| / KE
    double worst_prediction = 0.0; // |gap - ½(1-ε²) μ (|g|² - (g.n)²)| / KE
    for (int c = 0; c < configs; ++c) {
      const Species s1{log_uniform(rng, 0.1, 10.0), 1.0};
      const Species s2{log_uniform(rng, 0.1, 10.0), 1.0};
      const double epsilon = geometry == Geometry::Elastic ? 1.0 : 0.05 + 0.9 * rng.uniform();
      const CollisionBranch branch =
          c % 2 == 0 ? CollisionBranch::Reflective : CollisionBranch::Passing;
      const Vec3 v1 = normal_vec(rng);
      const Vec3 v2 = normal_vec(rng);
      const Vec3 g = v2 - v1;
      Vec3 n;
      switch (geometry) {
        case Geometry::HeadOn:
          n = g.normalized();
          break;
        case Geometry::Grazing:
          n = orthogonal_unit(g, rng);
          break;
        case Geometry::Oblique:
        case Geometry::Elastic:
          n = rng.unit_vector();
          break;
      }
      const CollisionEvent event = collide(v1, v2, n, epsilon, branch, s1, s2);
      const double formula = energy_loss_formula(v1, v2, epsilon, s1, s2);
      const double ke = kinetic_energy(v1, v2, s1, s2);
      const double mu = s1.mass * s2.mass / (s1.mass + s2.mass);
      const double gn = g.dot(n);
      const double predicted_gap = 0.5 * (1.0 - epsilon * epsilon) * mu * (g.squaredNorm() - gn * gn);
      const double gap = formula - event.delta_e;
      worst_gap = std::max(worst_gap, std::abs(gap) / ke);
      worst_prediction = std::max(worst_prediction, std::abs(gap - predicted_gap) / ke);
    }
    return std::pair{worst_gap, worst_prediction};
  };

  std::vector<AuditReport> rows;
  const auto [head_on, head_on_pred] = sweep(Geometry::HeadOn);
  rows.push_back(graded("energy_formula/head_on", statement, head_on, kEnergyTolerance,
                        {{"seed", seed}, {"configs", configs}, {"normalised_by", "pre-collision KE"},
                         {"prediction_error", head_on_pred}}));
  const auto [oblique, oblique_pred] = sweep(Geometry::Oblique);
  rows.push_back(graded("energy_formula/oblique", statement, oblique, kEnergyTolerance,
                        {{"seed", seed}, {"configs", configs}, {"normalised_by", "pre-collision KE"},
                         {"predicted_gap", "1/2 (1-eps^2) mu (|g|^2 - (g.n)^2)"},
                         {"prediction_error", oblique_pred}}));
  const auto [grazing, grazing_pred] = sweep(Geometry::Grazing);
  rows.push_back(graded("energy_formula/grazing", statement, grazing, kEnergyTolerance,
                        {{"seed", seed}, {"configs", configs}, {"normalised_by", "pre-collision KE"},
                         {"predicted_gap", "1/2 (1-eps^2) mu |g|^2"},
                         {"prediction_error", grazing_pred}}));
  const auto [elastic, elastic_pred] = sweep(Geometry::Elastic);
  rows.push_back(graded("energy_formula/elastic", statement, elastic, kEnergyTolerance,
                        {{"seed", seed}, {"configs", configs}, {"normalised_by", "pre-collision KE"},
                         {"prediction_error", elastic_pred}}));
  return rows;
}

std::vector<AuditReport> audit_stokes_claim(std::span<const NamedDistribution> distributions,
                                            const QuadratureSpec& spec) {
  std::vector<AuditReport> rows;
  for (const NamedDistribution& d : distributions) {
    if (d.probes.size() < 20) {
      throw InvalidInput(fmt::format("stokes audit: '{}' has {} probes, need at least 20", d.name,
                                     d.probes.size()));
    }
    const std::vector<RateEstimate> rates = evaluate_field(d.f, d.probes, spec);
    double worst = 0.0;
    nlohmann::json probes = nlohmann::json::array();
    for (std::size_t i = 0; i < rates.size(); ++i) {
      worst = std::max(worst, rates[i].sigma_ratio());
      probes.push_back({d.probes[i].x(), d.probes[i].y(), d.probes[i].z(), rates[i].value,
                        rates[i].std_error});
    }
    nlohmann::json meta = spec_metadata(spec);
    meta["distribution"] = d.name;
    meta["grid_nodes"] = d.f.grid().nodes_per_axis();
    meta["vmax"] = d.f.grid().vmax();
    meta["residual_definition"] = "max |rate| / std_error over probes";
    meta["probes"] = std::move(probes);
    rows.push_back(graded("collision_term_vanishes/" + d.name, "df/dt|coll = 0", worst,
                          kSigmaThreshold, std::move(meta)));
  }
  return rows;
}

AuditReport audit_chain_rule(std::span<const Vec3> points, double lambda, std::uint64_t seed) {
  RandomStream rng(seed, kChainStream);
  const double mass = 1.0;
  std::vector<double> diffs;
  double aligned_worst = 0.0;
  nlohmann::json per_point = nlohmann::json::array();
  for (const Vec3& v : points) {
    const sphere::ChartJacobian jac = sphere::chart_jacobian(v, lambda);
    const Vec3 vstar = sphere::project_chart(sphere::embed(v, lambda)).vstar;
    // f(v*) = exp(-|v*|²): depends on |v*|² only.
    const Vec3 grad_star = -2.0 * vstar * std::exp(-vstar.squaredNorm());
    const Vec3 grad_v = jac.matrix.transpose() * grad_star;

    const Vec3 force = normal_vec(rng);
    const double scalar_form = jac.determinant * (force / mass).dot(grad_star);
    const double matrix_form = (force / mass).dot(grad_v);
    const double diff = std::abs(scalar_form - matrix_form);
    diffs.push_back(diff);

    if (v.norm() > 0.0) {
      const Vec3 aligned = v.normalized();
      aligned_worst = std::max(aligned_worst, std::abs(jac.determinant * aligned.dot(grad_star) -
                                                       aligned.dot(grad_v)));
    }
    per_point.push_back({{"v", to_json(v)},
                         {"force", to_json(force)},
                         {"scalar_form", scalar_form},
                         {"matrix_form", matrix_form}});
  }
  const double worst = diffs.empty() ? 0.0 : *std::max_element(diffs.begin(), diffs.end());
  return diagnostic("chain_rule/scalar_jacobian",
                    "df/dv . F/m = J (F/m) . grad_{v*} f, J = det(dv*/dv)", worst,
                    {{"seed", seed},
                     {"lambda", lambda},
                     {"field", "exp(-|v*|^2)"},
                     {"max_discrepancy", worst},
                     {"median_discrepancy", median(diffs)},
                     {"aligned_force_max_discrepancy", aligned_worst},
                     {"points", std::move(per_point)}});
}

std::vector<AuditReport> audit_mass_conservation(std::span<const double> epsilons,
                                                 const DiscreteDistribution& f,
                                                 const QuadratureSpec& spec) {
  std::vector<AuditReport> rows;
  for (const double epsilon : epsilons) {
    for (const GainNormalization form :
         {GainNormalization::PaperForm, GainNormalization::StandardGranular}) {
      QuadratureSpec s = spec;
      s.epsilon = epsilon;
      s.normalization = form;
      const MomentRates rates = moment_rates(f, s);
      const std::string suffix = fmt::format("{}/eps={}", to_string(form), epsilon);
      nlohmann::json meta = spec_metadata(s);
      meta["grid_nodes"] = f.grid().nodes_per_axis();
      meta["vmax"] = f.grid().vmax();

      nlohmann::json density_meta = meta;
      density_meta["rate"] = rates.density.value;
      density_meta["std_error"] = rates.density.std_error;
      rows.push_back(graded("particle_number/" + suffix, "int df/dt|coll dv = 0",
                            rates.density.sigma_ratio(), kSigmaThreshold, std::move(density_meta)));

      double momentum_ratio = 0.0;
      nlohmann::json momentum_meta = meta;
      momentum_meta["rate"] = nlohmann::json::array();
      momentum_meta["std_error"] = nlohmann::json::array();
      for (const RateEstimate& r : rates.momentum) {
        momentum_ratio = std::max(momentum_ratio, r.sigma_ratio());
        momentum_meta["rate"].push_back(r.value);
        momentum_meta["std_error"].push_back(r.std_error);
      }
      rows.push_back(graded("momentum/" + suffix, "int m v df/dt|coll dv = 0", momentum_ratio,
                            kSigmaThreshold, std::move(momentum_meta)));

      nlohmann::json energy_meta = meta;
      energy_meta["rate"] = rates.energy.value;
      energy_meta["std_error"] = rates.energy.std_error;
      if (epsilon == 1.0) {
        rows.push_back(graded("energy/" + suffix, "int 1/2 m v^2 df/dt|coll dv = 0",
                              rates.energy.sigma_ratio(), kSigmaThreshold, std::move(energy_meta)));
      } else if (form == GainNormalization::StandardGranular) {
        // Signed: consistent only when the rate is below -3σ.
        const double signed_ratio =
            rates.energy.std_error > 0.0 ? rates.energy.value / rates.energy.std_error : 0.0;
        energy_meta["residual_definition"] = "rate / std_error (signed)";
        rows.push_back(graded("energy_dissipation/" + suffix, "int 1/2 m v^2 df/dt|coll dv < 0",
                              signed_ratio, -kSigmaThreshold, std::move(energy_meta)));
      }
    }
  }
  return rows;
}

std::vector<AuditReport> audit_transport_relation(std::span<const TransportScenario> scenarios) {
  std::vector<AuditReport> rows;
  for (const TransportScenario& s : scenarios) {
    const sphere::TransportResidual r =
        transport_relation_residual(s.f, s.generator, s.theta, s.c_of_v, s.times, s.probe);
    nlohmann::json meta = s.metadata;
    meta["generator"] = to_json(s.generator.xi);
    meta["probe"] = to_json(s.probe.vstar);
    meta["times"] = r.times;
    meta["residuals"] = r.residuals;
    nlohmann::json orbit = nlohmann::json::array();
    for (const Vec3& p : r.orbit) orbit.push_back(to_json(p));
    meta["orbit"] = std::move(orbit);
    rows.push_back(diagnostic("transport_relation/" + s.name,
                              "f(v,t) + theta'(t) f(G(theta(t))) = C(v)", r.max_residual,
                              std::move(meta)));
  }
  return rows;
}

std::vector<TransportScenario> default_transport_scenarios(double lambda) {
  std::vector<double> times;
  for (int i = 0; i <= 20; ++i) times.push_back(0.1 * i);
  auto identity_time = [](double t) { return t; };
  std::vector<TransportScenario> out;

  const Vec3 force(0.0, 0.0, 1.0);
  const double mass = 1.0;

  out.push_back({"zero_field",
                 [](const Vec3&, double) { return 0.0; },
                 sphere::match_generator(force, mass, lambda),
                 identity_time,
                 [](const Vec3&) { return 0.0; },
                 times,
                 {Vec3(0.2, 0.1, 0.0)},
                 {{"lambda", lambda}, {"force", to_json(force)}, {"theta", "t"}}});

  // C is fixed by the relation at t = 0 in both remaining scenarios.
  auto gaussian = [](const Vec3& x) { return std::exp(-x.squaredNorm()); };
  const sphere::PureQuaternion still = sphere::match_generator(Vec3::Zero(), mass, lambda);
  const Vec3 rest_image = sphere::project_chart(sphere::exp_subgroup(still, 0.0)).vstar;
  out.push_back({"free_streaming",
                 [gaussian](const Vec3& x, double) { return gaussian(x); },
                 still,
                 identity_time,
                 [gaussian, rest_image](const Vec3& x) { return gaussian(x) + gaussian(rest_image); },
                 times,
                 {Vec3(0.3, 0.0, 0.0)},
                 {{"lambda", lambda}, {"force", to_json(Vec3::Zero())}, {"theta", "t"},
                  {"f", "exp(-|v*|^2)"}}});

  const sphere::PureQuaternion drive = sphere::match_generator(force, mass, lambda);
  const Vec3 drift = sphere::orbit_chart_velocity(drive);
  auto drifting = [gaussian, drift](const Vec3& x, double t) { return gaussian(x - t * drift); };
  const Vec3 start_image = sphere::project_chart(sphere::exp_subgroup(drive, 0.0)).vstar;
  out.push_back({"constant_force",
                 drifting,
                 drive,
                 identity_time,
                 [drifting, start_image](const Vec3& x) {
                   return drifting(x, 0.0) + drifting(start_image, 0.0);
                 },
                 times,
                 {Vec3(0.3, 0.0, 0.0)},
                 {{"lambda", lambda}, {"force", to_json(force)}, {"mass", mass}, {"theta", "t"},
                  {"f", "exp(-|v* - t J F/m|^2)"}}});
  return out;
}

VelocityGrid audit_grid(const AuditSettings& settings) {
  const double thermal = std::sqrt(kBoltzmann * settings.gas.temperature / settings.gas.mass);
  return VelocityGrid(settings.vmax_thermal * thermal, settings.grid_nodes);
}

std::vector<Vec3> default_probes(double thermal_speed) {
  const double s = thermal_speed;
  std::vector<Vec3> probes = {Vec3(2 * s, 0, 0), Vec3(-2 * s, 0, 0), Vec3::Zero()};
  // Fixed directions on shells of radius σ and 2σ; deterministic, no RNG.
  const std::vector<Vec3> directions = {
      Vec3(0, 1, 0),   Vec3(0, 0, 1),   Vec3(1, 1, 0),   Vec3(1, 0, 1),  Vec3(0, 1, 1),
      Vec3(1, 1, 1),   Vec3(-1, 1, 0),  Vec3(1, -1, 1),  Vec3(0, -1, 0)};
  for (const Vec3& d : directions) probes.push_back(s * d.normalized());
  for (std::size_t i = 0; probes.size() < 20; ++i) probes.push_back(2.0 * s * directions[i].normalized());
  return probes;
}

std::vector<NamedDistribution> audit_distributions(const AuditSettings& settings) {
  const GasParameters& gas = settings.gas;
  const VelocityGrid grid = audit_grid(settings);
  const double thermal = std::sqrt(kBoltzmann * gas.temperature / gas.mass);
  const std::vector<Vec3> probes = default_probes(thermal);
  const double n = gas.number_density;
  const Vec3 shift(2.0 * thermal, 0.0, 0.0);
  return {
      {"maxwellian", maxwellian(grid, n, Vec3::Zero(), gas.temperature, gas.mass), probes},
      {"bimodal",
       bimodal(grid, {0.5 * n, shift, gas.temperature}, {0.5 * n, -shift, gas.temperature},
               gas.mass),
       probes},
      {"zero", DiscreteDistribution::zeros(grid), probes},
  };
}

std::vector<AuditReport> run_full_audit(const AuditSettings& settings) {
  std::vector<AuditReport> rows;
  rows.push_back(audit_jacobian(settings.seed));
  for (auto& r : audit_energy_formula(settings.seed)) rows.push_back(std::move(r));

  QuadratureSpec spec;
  spec.samples = settings.probe_samples;
  spec.seed = settings.seed;
  spec.diameter = settings.gas.diameter;
  spec.mass = settings.gas.mass;
  spec.epsilon = 1.0;
  spec.branch = CollisionBranch::Reflective;
  spec.normalization = GainNormalization::PaperForm;
  const std::vector<NamedDistribution> dists = audit_distributions(settings);
  for (auto& r : audit_stokes_claim(dists, spec)) rows.push_back(std::move(r));

  RandomStream rng(settings.seed, kChainStream + 1);
  std::vector<Vec3> points;
  for (int i = 0; i < settings.chain_rule_points; ++i) {
    points.push_back(0.9 * settings.lambda * std::cbrt(rng.uniform()) * rng.unit_vector());
  }
  rows.push_back(audit_chain_rule(points, settings.lambda, settings.seed));

  QuadratureSpec moment_spec = spec;
  moment_spec.samples = settings.moment_samples;
  for (auto& r : audit_mass_conservation(settings.epsilons, dists.front().f, moment_spec)) {
    rows.push_back(std::move(r));
  }

  const std::vector<TransportScenario> scenarios = default_transport_scenarios(settings.lambda);
  for (auto& r : audit_transport_relation(scenarios)) rows.push_back(std::move(r));
  return rows;
}

void write_audit_csv(std::ostream& out, std::span<const AuditReport> reports) {
  out << "claim_id,paper_ref,residual,threshold,verdict,metadata_json\n";
  for (const AuditReport& r : reports) {
    out << csv_field(r.claim_id) << ',' << csv_field(r.paper_ref) << ','
        << fmt::format("{}", r.residual) << ','
        << (r.threshold ? fmt::format("{}", *r.threshold) : std::string{}) << ','
        << to_string(r.verdict) << ',' << csv_field(r.metadata.dump()) << '\n';
  }
}

std::string audit_summary(std::span<const AuditReport> reports) {
  std::ostringstream out;
  int consistent = 0, inconsistent = 0, diagnostics = 0;
  out << fmt::format("{:<44} {:<16} {:>14} {:>10}\n", "claim", "verdict", "residual", "threshold");
  for (const AuditReport& r : reports) {
    out << fmt::format("{:<44} {:<16} {:>14.6g} {:>10}\n", r.claim_id, to_string(r.verdict),
                       r.residual, r.threshold ? fmt::format("{:.3g}", *r.threshold) : "-");
    switch (r.verdict) {
      case Verdict::Consistent:
        ++consistent;
        break;
      case Verdict::Inconsistent:
        ++inconsistent;
        break;
      case Verdict::DiagnosticOnly:
        ++diagnostics;
        break;
    }
  }
  out << fmt::format("\n{} rows: {} consistent, {} inconsistent, {} diagnostic-only\n",
                     reports.size(), consistent, inconsistent, diagnostics);
  return out.str();
}

}  // namespace kinetics::audit
