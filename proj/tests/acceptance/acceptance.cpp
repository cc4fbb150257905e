// End-to-end acceptance checks. One PASS/FAIL line per criterion; the exit
// status is nonzero if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <fmt/format.h>

#include "kinetics/claim_audit.hpp"
#include "kinetics/cli.hpp"
#include "kinetics/collision_kernel.hpp"
#include "kinetics/collision_operator.hpp"
#include "kinetics/distribution.hpp"
#include "kinetics/dsmc.hpp"
#include "kinetics/parallel.hpp"
#include "kinetics/rng.hpp"
#include "kinetics/sphere_group.hpp"
#include "kinetics/stats.hpp"
#include "kinetics/transport_solver.hpp"
#include "oracles.hpp"

using namespace kinetics;

namespace {

constexpr std::uint64_t kSeed = 20240521;

struct Outcome {
  bool pass;
  std::string detail;
};

// Unit gas: m = d = n = 1 and kT = m, so the thermal speed is 1 m/s.
const Species kUnit{1.0, 1.0};
const double kUnitT = 1.0 / kBoltzmann;

Vec3 normal_vec(RandomStream& rng) { return {rng.normal(), rng.normal(), rng.normal()}; }

double log_uniform(RandomStream& rng, double lo, double hi) {
  return lo * std::exp(std::log(hi / lo) * rng.uniform());
}

// Per-particle collision frequency n π d² <g> of a Maxwellian.
double collision_frequency(double density, double diameter, double temperature, double mass) {
  return density * kPi * diameter * diameter * oracle::mean_relative_speed(temperature, mass);
}

Outcome jacobian() {
  RandomStream rng(kSeed, 1);
  double worst = 0.0;
  for (int c = 0; c < 100; ++c) {
    const Species s1{log_uniform(rng, 0.1, 10.0), 1.0}, s2{log_uniform(rng, 0.1, 10.0), 1.0};
    const double eps = 0.05 + 0.95 * rng.uniform();
    const auto branch = c % 2 ? CollisionBranch::Passing : CollisionBranch::Reflective;
    const double numeric =
        jacobian_numeric(10.0 * normal_vec(rng), 10.0 * normal_vec(rng), rng.unit_vector(), eps, branch, s1, s2);
    worst = std::max(worst, std::abs(numeric - eps));
  }
  return {worst < 1e-6, fmt::format("max | |J| - eps | = {:.3e} over 100 configs (tol 1e-6)", worst)};
}

Outcome conservation() {
  RandomStream rng(kSeed, 2);
  double worst_p = 0.0;
  for (int c = 0; c < 1000000; ++c) {
    const Species s1{log_uniform(rng, 0.1, 10.0), 1.0}, s2{log_uniform(rng, 0.1, 10.0), 1.0};
    const double eps = 0.05 + 0.95 * rng.uniform();
    const auto branch = c % 2 ? CollisionBranch::Passing : CollisionBranch::Reflective;
    const Vec3 v1 = normal_vec(rng), v2 = normal_vec(rng);
    const auto e = collide(v1, v2, rng.unit_vector(), eps, branch, s1, s2);
    const Vec3 residual = s1.mass * (e.w1 - v1) + s2.mass * (e.w2 - v2);
    worst_p = std::max(worst_p, residual.norm() / (s1.mass * v1.norm() + s2.mass * v2.norm()));
  }

  const auto ensemble = dsmc::sample_maxwellian_ensemble(100000, kUnit, 1.0, Vec3::Zero(), kUnitT, kSeed);
  dsmc::DsmcConfig config;
  config.dt = 1e-3;
  config.number_density = 1.0;
  config.epsilon = 1.0;
  config.seed = kSeed;
  dsmc::Simulator sim(ensemble, config);
  const double e0 = dsmc::total_kinetic_energy(ensemble);
  for (int s = 0; s < 10000; ++s) sim.step();
  const double drift = std::abs(dsmc::total_kinetic_energy(sim.ensemble()) - e0) / e0;
  return {worst_p < 1e-12 && drift < 1e-9 && sim.total_collisions() > 0,
          fmt::format("momentum residual {:.3e} over 1e6 collisions (tol 1e-12); elastic DSMC energy drift "
                      "{:.3e} after 1e4 steps, N=1e5, {} collisions (tol 1e-9)",
                      worst_p, drift, sim.total_collisions())};
}

Outcome energy_audit() {
  const auto rows = audit::audit_energy_formula(kSeed, 1000);
  std::ostringstream csv;
  audit::write_audit_csv(csv, rows);
  auto find = [&](const std::string& id) {
    return *std::find_if(rows.begin(), rows.end(), [&](const auto& r) { return r.claim_id == id; });
  };
  const auto& head_on = find("energy_formula/head_on");
  const auto& grazing = find("energy_formula/grazing");
  const double prediction = grazing.metadata.at("prediction_error").get<double>();
  bool csv_records = false;
  std::istringstream lines(csv.str());
  for (std::string line; std::getline(lines, line);) {
    if (line.rfind("energy_formula/grazing,", 0) == 0 && line.find(",inconsistent,") != std::string::npos) {
      csv_records = true;
    }
  }
  return {head_on.residual < 1e-12 && prediction < 1e-12 && csv_records,
          fmt::format("head-on residual {:.3e}; grazing gap {:.3f} KE, differs from 1/2(1-eps^2) mu |g|^2 by "
                      "{:.3e} KE; CSV row inconsistent: {}",
                      head_on.residual, grazing.residual, prediction, csv_records ? "yes" : "no")};
}

QuadratureSpec probe_spec(const audit::AuditSettings& s, double epsilon) {
  QuadratureSpec spec;
  spec.samples = 100000;
  spec.seed = kSeed;
  spec.diameter = s.gas.diameter;
  spec.mass = s.gas.mass;
  spec.epsilon = epsilon;
  return spec;
}

Outcome elastic_fixed_point() {
  const audit::AuditSettings settings;
  const auto dists = audit::audit_distributions(settings);
  const auto& maxwell = dists.front();
  const auto rates = evaluate_field(maxwell.f, maxwell.probes, probe_spec(settings, 1.0));
  double worst = 0.0;
  for (const auto& r : rates) worst = std::max(worst, r.sigma_ratio());
  return {rates.size() == 20 && worst <= 3.0,
          fmt::format("{} probes x 1e5 samples, max |value|/sigma = {:.2f} (limit 3)", rates.size(), worst)};
}

Outcome stokes_claim() {
  const audit::AuditSettings settings;
  const auto dists = audit::audit_distributions(settings);
  const auto& bimodal = dists[1];
  const auto spec = probe_spec(settings, 1.0);
  const double m = settings.gas.mass, t = settings.gas.temperature, n = settings.gas.number_density;
  const double sigma = std::sqrt(kBoltzmann * t / m);
  auto analytic = [&](const Vec3& v) {
    return oracle::maxwellian(v, 0.5 * n, Vec3(2 * sigma, 0, 0), t, m) +
           oracle::maxwellian(v, 0.5 * n, Vec3(-2 * sigma, 0, 0), t, m);
  };
  bool ok = true;
  std::string detail;
  for (const double side : {1.0, -1.0}) {
    const Vec3 centre(2 * side * sigma, 0, 0);
    const auto mc = evaluate_at(bimodal.f, centre, spec);
    const double brute = oracle::collision_term(analytic, centre, 1.0, 1.0, settings.gas.diameter, m,
                                                CollisionBranch::Reflective, std::sqrt(5.0) * sigma,
                                                Vec3::Zero(), 8);
    const bool sign_match = std::signbit(brute) == std::signbit(mc.value) && brute != 0.0;
    ok = ok && mc.sigma_ratio() > 3.0 && sign_match;
    detail += fmt::format("mode {:+.0f}: {:.2f} sigma, MC {:.4e} vs product grid {:.4e}; ", side,
                          mc.sigma_ratio(), mc.value, brute);
  }
  const auto rows = audit::audit_stokes_claim(std::span(&bimodal, 1), spec);
  const bool verdict = rows.size() == 1 && rows[0].verdict == audit::Verdict::Inconsistent;
  detail += fmt::format("verdict {}", to_string(rows[0].verdict));
  return {ok && verdict, detail};
}

// dT/dt / T at t = 0 from DSMC replicas (quadratic fit of T(t) per replica)
// against 2/(3 n k T) dE/dt from the weak-form moment rates.
Outcome cross_oracle() {
  constexpr double kEpsilon = 0.8;
  constexpr int kReplicas = 64;
  constexpr std::size_t kParticles = 20000;
  constexpr int kSteps = 40;
  const double nu0 = collision_frequency(1.0, 1.0, kUnitT, 1.0);
  const double dt = 0.2 / nu0 / kSteps;

  RunningStats slopes;
  for (int r = 0; r < kReplicas; ++r) {
    const auto ensemble =
        dsmc::sample_maxwellian_ensemble(kParticles, kUnit, 1.0, Vec3::Zero(), kUnitT, kSeed + 1000 + r);
    dsmc::DsmcConfig config;
    config.dt = dt;
    config.number_density = 1.0;
    config.epsilon = kEpsilon;
    config.seed = kSeed + r;
    dsmc::Simulator sim(ensemble, config);
    const auto series = sim.run(kSteps, 1);
    Eigen::MatrixXd a(series.size(), 3);
    Eigen::VectorXd b(series.size());
    for (std::size_t i = 0; i < series.size(); ++i) {
      const double t = series[i].t;
      a.row(static_cast<Eigen::Index>(i)) << 1.0, t, t * t;
      b[static_cast<Eigen::Index>(i)] = series[i].temperature / series[0].temperature;
    }
    const Eigen::Vector3d coeff = a.colPivHouseholderQr().solve(b);
    slopes.add(coeff[1]);
  }

  const VelocityGrid grid(6.0, 41);
  QuadratureSpec spec;
  spec.samples = 2000000;
  spec.seed = kSeed;
  spec.diameter = 1.0;
  spec.mass = 1.0;
  spec.epsilon = kEpsilon;
  spec.normalization = GainNormalization::StandardGranular;
  const auto rates = moment_rates(maxwellian(grid, 1.0, Vec3::Zero(), kUnitT, 1.0), spec);
  const double scale = 2.0 / (3.0 * 1.0 * kBoltzmann * kUnitT);
  const double operator_rate = scale * rates.energy.value;
  const double operator_error = scale * rates.energy.std_error;
  const double combined = std::hypot(slopes.std_error(), operator_error);
  const double gap = std::abs(slopes.mean - operator_rate);
  return {gap <= 3.0 * combined,
          fmt::format("DSMC (dT/dt)/T = {:.5f} +- {:.5f} ({} replicas, N={}); moment rates {:.5f} +- {:.5f}; "
                      "gap {:.2f} combined sigma",
                      slopes.mean, slopes.std_error(), kReplicas, kParticles, operator_rate, operator_error,
                      gap / combined)};
}

Outcome paper_form_mass() {
  const audit::AuditSettings settings;
  const auto dists = audit::audit_distributions(settings);
  QuadratureSpec spec = probe_spec(settings, 1.0);
  spec.samples = settings.moment_samples;
  const std::vector<double> epsilons{1.0, 0.8};
  const auto rows = audit::audit_mass_conservation(epsilons, dists.front().f, spec);
  auto find = [&](const std::string& id) -> const audit::AuditReport* {
    const auto it = std::find_if(rows.begin(), rows.end(), [&](const auto& r) { return r.claim_id == id; });
    return it == rows.end() ? nullptr : &*it;
  };
  const auto* paper = find("particle_number/paper/eps=0.8");
  const auto* standard = find("particle_number/standard/eps=0.8");
  if (!paper || !standard) return {false, "particle_number rows missing"};
  return {paper->verdict == audit::Verdict::Inconsistent && standard->verdict == audit::Verdict::Consistent,
          fmt::format("paper-form density rate {:.1f} sigma ({}); standard {:.2f} sigma ({})", paper->residual,
                      to_string(paper->verdict), standard->residual, to_string(standard->verdict))};
}

Outcome geometry() {
  using namespace sphere;
  RandomStream rng(kSeed, 3);
  double round_trip = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const Vec3 c = 3.0 * normal_vec(rng);
    round_trip = std::max(round_trip, (project_chart(unproject_chart({c})).vstar - c).norm() / std::max(1.0, c.norm()));
  }
  double jac = 0.0;
  for (int i = 0; i < 100; ++i) {
    const double lambda = 0.5 + 3.0 * rng.uniform();
    const Vec3 v = 0.9 * lambda * std::cbrt(rng.uniform()) * rng.unit_vector();
    const Mat3 fd = oracle::fd_jacobian([&](const Vec3& x) { return project_chart(embed(x, lambda)).vstar; }, v,
                                        1e-6 * lambda);
    jac = std::max(jac, (chart_jacobian(v, lambda).matrix - fd).cwiseAbs().maxCoeff());
  }
  double homomorphism = 0.0, pushforward = 0.0;
  for (int i = 0; i < 100; ++i) {
    const PureQuaternion u{normal_vec(rng)};
    const double tau = 4.0 * rng.uniform() - 2.0, sig = 4.0 * rng.uniform() - 2.0;
    homomorphism = std::max(homomorphism, (exp_subgroup(u, tau + sig).theta() -
                                           quaternion_multiply(exp_subgroup(u, tau), exp_subgroup(u, sig)).theta())
                                              .norm());
    const Vec3 a = normal_vec(rng);
    const double numeric = pushforward_derivative([&](const Vec3& x) { return a.dot(x); }, u);
    pushforward = std::max(pushforward, std::abs(numeric - a.dot(orbit_chart_velocity(u))));
  }
  return {round_trip < 1e-12 && jac < 1e-6 && homomorphism < 1e-12 && pushforward < 1e-8,
          fmt::format("round trip {:.2e} (1e-12), Jacobian vs FD {:.2e} (1e-6), homomorphism {:.2e} (1e-12), "
                      "pushforward {:.2e} (1e-8)",
                      round_trip, jac, homomorphism, pushforward)};
}

Outcome transport_convergence() {
  using namespace kinetics::transport;
  auto gaussian = [](double x, double v) { return std::exp(-0.5 * ((x + 2.0) * (x + 2.0) + v * v)); };
  constexpr double kAccel = 1.0, kTime = 2.0;
  constexpr int kSteps = 40;
  auto exact = [&](double x, double v) {
    return gaussian(x - v * kTime + 0.5 * kAccel * kTime * kTime, v - kAccel * kTime);
  };
  std::vector<double> errors;
  for (int nodes : {33, 65, 129, 257}) {
    const PhaseGrid grid{-8.0, 8.0, nodes, -8.0, 8.0, nodes};
    const auto result = semi_lagrangian_run(sample_on_grid(grid, gaussian), kAccel, kTime / kSteps, kSteps);
    errors.push_back(max_error(result.f, exact));
  }
  double worst_order = INFINITY;
  std::string orders;
  for (std::size_t k = 1; k < errors.size(); ++k) {
    const double order = std::log2(errors[k - 1] / errors[k]);
    worst_order = std::min(worst_order, order);
    orders += fmt::format("{:.2f} ", order);
  }

  const ForceField field{Vec3(0.5, -1.0, 2.0), 2.0};
  auto f0 = [](const Vec3& r, const Vec3& v) {
    return std::exp(-0.5 * (r - Vec3(1, -0.5, 0.25)).squaredNorm() - 0.125 * (v - Vec3(0.5, 0, -1)).squaredNorm());
  };
  RandomStream rng(kSeed, 4);
  double invariance = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const PhasePoint p{2.0 * normal_vec(rng), 2.0 * normal_vec(rng), 2.0 * rng.uniform()};
    const double s = 2.0 * rng.uniform() - 1.0;
    invariance = std::max(invariance, std::abs(exact_solution(f0, field, advance(field, p, s)) -
                                               exact_solution(f0, field, p)));
  }
  return {worst_order >= 1.9 && invariance < 1e-12,
          fmt::format("observed orders {}(min 1.9); characteristic invariance {:.2e} (1e-12)", orders, invariance)};
}

Outcome cooling() {
  const double nu0 = collision_frequency(1.0, 1.0, kUnitT, 1.0);
  const auto ensemble = dsmc::sample_maxwellian_ensemble(100000, kUnit, 1.0, Vec3::Zero(), kUnitT, kSeed + 7);
  dsmc::DsmcConfig config;
  config.dt = 0.5 / nu0;
  config.number_density = 1.0;
  config.epsilon = 0.9;
  config.seed = kSeed + 7;
  dsmc::Simulator sim(ensemble, config);
  const auto series = sim.run(6000, 20);
  const double t_end = series.back().t;
  const auto fit = dsmc::fit_cooling_law(series, 0.1 * t_end);
  return {fit.exponent >= -2.3 && fit.exponent <= -1.7,
          fmt::format("p = {:.3f}, t0 = {:.3f}, T falls by {:.0f}x over t = {:.0f} ({} collisions)", fit.exponent,
                      fit.t0, series.front().temperature / series.back().temperature, t_end,
                      sim.total_collisions())};
}

Outcome determinism() {
  const int saved = thread_cap();
  bool ok = true;
  std::string detail;
  for (const std::string& sub : cli::subcommands()) {
    const cli::RunConfig config = cli::parse_config("{}", sub);
    set_thread_cap(1);
    const auto serial = cli::execute(config);
    set_thread_cap(8);
    const auto threaded = cli::execute(config);
    const bool same = serial.files == threaded.files && !serial.files.empty();
    ok = ok && same;
    detail += fmt::format("{} {} ", sub, same ? "identical" : "DIFFERS");
  }
  set_thread_cap(saved);
  return {ok, detail + "(threads 1 vs 8)"};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"jacobian", jacobian},
      {"conservation", conservation},
      {"energy_formula_audit", energy_audit},
      {"elastic_fixed_point", elastic_fixed_point},
      {"stokes_claim_audit", stokes_claim},
      {"cross_oracle_moment_rates", cross_oracle},
      {"paper_form_mass_audit", paper_form_mass},
      {"geometry", geometry},
      {"transport", transport_convergence},
      {"dsmc_cooling", cooling},
      {"determinism", determinism},
  };
  int failures = 0;
  for (const auto& [name, check] : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome outcome{false, ""};
    try {
      outcome = check();
    } catch (const std::exception& e) {
      outcome = {false, fmt::format("exception: {}", e.what())};
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (!outcome.pass) ++failures;
    std::cout << fmt::format("{} {}: {} [{:.1f} s]", outcome.pass ? "PASS" : "FAIL", name, outcome.detail, seconds)
              << std::endl;
  }
  std::cout << fmt::format("{} of {} criteria passed", criteria.size() - failures, criteria.size()) << std::endl;
  return failures == 0 ? 0 : 1;
}
