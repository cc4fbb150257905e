#pragma once

// Spatially homogeneous DSMC for a single-species granular gas. A single
// cell of volume V = N w / n holds N simulator particles of statistical
// weight w. Candidate pairs follow the no-time-counter scheme with a global
// relative-speed majorant; a candidate with impact direction n (uniform on
// the sphere) is accepted with probability |g . n| / g_max, which reproduces
// the kernel ¼ d² |g . n| dn of the collision operator.

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "kinetics/collision_kernel.hpp"
#include "kinetics/rng.hpp"

namespace kinetics::dsmc {

struct ParticleEnsemble {
  std::vector<Vec3> velocities;
  Species species;
  double statistical_weight;  // real molecules per simulator particle
};

struct DsmcConfig {
  double dt = 0.0;
  double number_density = 0.0;
  double epsilon = 1.0;
  CollisionBranch branch = CollisionBranch::Reflective;
  std::uint64_t seed = 0;
  double majorant_relative_speed = 0.0;  // m/s; 0 uses the ensemble bound alone
  int max_retries = 16;

  void validate() const;
};

struct Sample {
  double t;
  double density;     // 1/m³
  Vec3 momentum;      // momentum density, kg/(m² s)
  double temperature; // K, from <m |v - u|²> / 3k
};

struct StepStats {
  std::uint64_t candidates = 0;
  std::uint64_t collisions = 0;
  int retries = 0;
  double majorant = 0.0;
};

class Simulator {
 public:
  /// Throws InvalidInput if the ensemble has fewer than two particles,
  /// non-finite velocities or an invalid config.
  Simulator(ParticleEnsemble ensemble, DsmcConfig config);

  /// Advances by config.dt. If a candidate pair exceeds the majorant the
  /// step is rolled back, the majorant doubled and the step retried; after
  /// config.max_retries failed attempts MajorantExceeded is thrown.
  void step();

  /// n_steps steps, sampling the initial state and every `sample_every`
  /// steps thereafter (plus the final state).
  std::vector<Sample> run(std::uint64_t n_steps, std::uint64_t sample_every);

  Sample sample() const;

  const ParticleEnsemble& ensemble() const { return ensemble_; }
  const DsmcConfig& config() const { return config_; }
  double time() const { return time_; }
  double volume() const;
  const StepStats& last_step() const { return last_step_; }
  std::uint64_t total_collisions() const { return total_collisions_; }

 private:
  bool try_step(double majorant, StepStats& stats);
  double majorant_bound() const;

  ParticleEnsemble ensemble_;
  DsmcConfig config_;
  RandomStream rng_;
  Vec3 mean_velocity_;
  double time_ = 0.0;
  double candidate_remainder_ = 0.0;
  std::uint64_t total_collisions_ = 0;
  StepStats last_step_;
};

/// count velocities drawn i.i.d. from a Maxwellian (T = 0 gives u exactly).
/// The weight is density / count, i.e. the ensemble represents 1 m³ at the
/// requested number density.
ParticleEnsemble sample_maxwellian_ensemble(std::size_t count, const Species& species,
                                            double density, const Vec3& bulk_velocity,
                                            double temperature, std::uint64_t seed);

double total_kinetic_energy(const ParticleEnsemble& ensemble);
Vec3 total_momentum(const ParticleEnsemble& ensemble);

struct CoolingFit {
  double amplitude;  // T(0) of the fitted law
  double t0;
  double exponent;   // p in T = A (1 + t/t0)^p
  double rms_log_residual;
};

/// Least-squares fit of T(t) = A (1 + t/t0)^p to samples with t >= t_min:
/// p and A by linear regression of ln T on ln(1 + t/t0), t0 by a
/// one-dimensional search.
CoolingFit fit_cooling_law(std::span<const Sample> series, double t_min);

/// CSV with header t,density,px,py,pz,temperature.
void write_time_series(std::ostream& out, std::span<const Sample> series);

}  // namespace kinetics::dsmc
