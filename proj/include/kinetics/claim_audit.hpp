#pragma once

// Numerical audit of the claims made about the inelastic collision model,
// the collision term and its S³ reformulation. Each audit yields rows with a
// residual, a threshold and a verdict that depends on nothing else:
//
//   consistent    residual <= threshold
//   inconsistent  residual >  threshold
//   diagnostic    no threshold; the residual is recorded, never graded

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "kinetics/collision_operator.hpp"
#include "kinetics/distribution.hpp"
#include "kinetics/sphere_group.hpp"

namespace kinetics::audit {

enum class Verdict { Consistent, Inconsistent, DiagnosticOnly };

struct AuditReport {
  std::string claim_id;
  std::string paper_ref;  // the statement under test, as a formula
  double residual;
  std::optional<double> threshold;
  Verdict verdict;
  nlohmann::json metadata;
};

Verdict grade(double residual, double threshold);
AuditReport graded(std::string claim_id, std::string statement, double residual, double threshold,
                   nlohmann::json metadata);
AuditReport diagnostic(std::string claim_id, std::string statement, double residual,
                       nlohmann::json metadata);

const char* to_string(Verdict verdict);

/// |J| = ε for the collision map, by finite differences over random
/// (m1, m2, ε, n, v1, v2) for both branches. Tolerance 1e-6.
AuditReport audit_jacobian(std::uint64_t seed, int configs_per_branch = 100);

/// The quoted energy loss ½(1-ε²) μ |v1 - v2|² against the loss the collision
/// rules actually produce, ½(1-ε²) μ (g . n)². Rows: head-on (consistent),
/// oblique and grazing (inconsistent, with the predicted gap in metadata),
/// elastic (consistent).
std::vector<AuditReport> audit_energy_formula(std::uint64_t seed, int configs = 100);

struct NamedDistribution {
  std::string name;
  DiscreteDistribution f;
  std::vector<Vec3> probes;
};

/// Claim: the collision term vanishes identically. One row per distribution;
/// residual = max |value| / σ over the probes, threshold 3.
std::vector<AuditReport> audit_stokes_claim(std::span<const NamedDistribution> distributions,
                                            const QuadratureSpec& spec);

/// Scalar-determinant form J (F/m) . ∇* f versus the matrix chain rule
/// (F/m) . (Mᵀ ∇* f). Diagnostic only.
AuditReport audit_chain_rule(std::span<const Vec3> points, double lambda, std::uint64_t seed);

/// Particle-number, momentum and energy rates of the collision term under both
/// gain normalizations, for each restitution in `epsilons`.
std::vector<AuditReport> audit_mass_conservation(std::span<const double> epsilons,
                                                 const DiscreteDistribution& f,
                                                 const QuadratureSpec& spec);

struct TransportScenario {
  std::string name;
  sphere::TimeChartField f;
  sphere::PureQuaternion generator;
  std::function<double(double)> theta;
  sphere::ChartField c_of_v;
  std::vector<double> times;
  sphere::ChartCoords probe;
  nlohmann::json metadata;
};

/// Residual of f(v,t) + θ'(t) f(G(θ(t))) = C(v) per scenario. Diagnostic only.
std::vector<AuditReport> audit_transport_relation(std::span<const TransportScenario> scenarios);

/// Zero field, free streaming (F = 0) and constant force scenarios.
std::vector<TransportScenario> default_transport_scenarios(double lambda);

struct GasParameters {
  double mass = 6.63e-26;       // kg (argon)
  double diameter = 3.6e-10;    // m
  double temperature = 300.0;   // K
  double number_density = 1e20; // 1/m³
};

struct AuditSettings {
  std::uint64_t seed = 20240521;
  GasParameters gas;
  int grid_nodes = 41;
  double vmax_thermal = 6.0;       // grid half-width in thermal speeds
  std::uint64_t probe_samples = 100000;
  std::uint64_t moment_samples = 2000000;
  std::vector<double> epsilons = {1.0, 0.8};
  int chain_rule_points = 64;
  double lambda = 1.0;
};

/// Velocity grid and the Maxwellian / bimodal test distributions used by the
/// collision-term audits.
VelocityGrid audit_grid(const AuditSettings& settings);
std::vector<NamedDistribution> audit_distributions(const AuditSettings& settings);

/// 20 probes: mode centres (±2 σ, 0, 0), the origin and 17 fixed directions.
std::vector<Vec3> default_probes(double thermal_speed);

std::vector<AuditReport> run_full_audit(const AuditSettings& settings);

/// CSV with header claim_id,paper_ref,residual,threshold,verdict,metadata_json.
void write_audit_csv(std::ostream& out, std::span<const AuditReport> reports);
std::string audit_summary(std::span<const AuditReport> reports);

}  // namespace kinetics::audit
