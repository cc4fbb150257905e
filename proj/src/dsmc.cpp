#include "kinetics/dsmc.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <utility>

#include <fmt/format.h>

#include "kinetics/errors.hpp"

namespace kinetics::dsmc {

namespace {

constexpr std::uint64_t kStepStream = 0x64736D6373746570ull;
constexpr std::uint64_t kEnsembleStream = 0x656E73656D626C65ull;

Vec3 mean_of(const std::vector<Vec3>& velocities) {
  Vec3 sum = Vec3::Zero();
  for (const Vec3& v : velocities) sum += v;
  return sum / static_cast<double>(velocities.size());
}

}  // namespace

void DsmcConfig::validate() const {
  if (!(dt > 0.0) || !std::isfinite(dt)) {
    throw InvalidInput(fmt::format("dsmc: dt must be > 0, got {}", dt));
  }
  if (!(number_density > 0.0)) {
    throw InvalidInput(fmt::format("dsmc: number_density must be > 0, got {}", number_density));
  }
  if (!(epsilon > 0.0 && epsilon <= 1.0)) {
    throw InvalidRestitution(fmt::format("dsmc: restitution {} outside (0, 1]", epsilon));
  }
  if (!(majorant_relative_speed >= 0.0) || !std::isfinite(majorant_relative_speed)) {
    throw InvalidInput(
        fmt::format("dsmc: majorant_relative_speed must be >= 0, got {}", majorant_relative_speed));
  }
  if (max_retries < 0) throw InvalidInput("dsmc: max_retries must be >= 0");
}

Simulator::Simulator(ParticleEnsemble ensemble, DsmcConfig config)
    : ensemble_(std::move(ensemble)),
      config_(config),
      rng_(config.seed, kStepStream),
      mean_velocity_(Vec3::Zero()) {
  config_.validate();
  ensemble_.species.validate();
  if (ensemble_.velocities.size() < 2) {
    throw InvalidInput("dsmc: ensemble needs at least two particles");
  }
  if (!(ensemble_.statistical_weight > 0.0)) {
    throw InvalidInput("dsmc: statistical weight must be > 0");
  }
  for (const Vec3& v : ensemble_.velocities) {
    if (!v.allFinite()) throw InvalidInput("dsmc: non-finite particle velocity");
  }
  mean_velocity_ = mean_of(ensemble_.velocities);
}

double Simulator::volume() const {
  return static_cast<double>(ensemble_.velocities.size()) * ensemble_.statistical_weight /
         config_.number_density;
}

// |v_i - v_j| <= |v_i - c| + |v_j - c| for any c, so twice the largest
// deviation from the mean is a rigorous bound on every relative speed.
double Simulator::majorant_bound() const {
  double largest = 0.0;
  for (const Vec3& v : ensemble_.velocities) {
    largest = std::max(largest, (v - mean_velocity_).squaredNorm());
  }
  return 2.0 * std::sqrt(largest);
}

bool Simulator::try_step(double majorant, StepStats& stats) {
  std::vector<Vec3>& v = ensemble_.velocities;
  const auto count = static_cast<std::uint64_t>(v.size());
  const Species& species = ensemble_.species;
  const double d = species.diameter;

  // ½ N (N-1) w π d² g_max dt / V with V = N w / n.
  const double expected = 0.5 * static_cast<double>(count - 1) * config_.number_density * kPi *
                              d * d * majorant * config_.dt +
                          candidate_remainder_;
  const double whole = std::floor(expected);
  const double remainder = expected - whole;
  const auto candidates = static_cast<std::uint64_t>(whole);

  std::vector<std::pair<std::uint64_t, Vec3>> journal;
  auto rollback = [&] {
    for (auto it = journal.rbegin(); it != journal.rend(); ++it) v[it->first] = it->second;
  };

  stats.candidates = candidates;
  stats.collisions = 0;
  for (std::uint64_t c = 0; c < candidates; ++c) {
    const std::uint64_t i = rng_.below(count);
    std::uint64_t j = rng_.below(count - 1);
    if (j >= i) ++j;
    const Vec3 n = rng_.unit_vector();
    const double accept = rng_.uniform();

    const Vec3 g = v[j] - v[i];
    if (g.norm() > majorant) {
      rollback();
      return false;
    }
    if (accept * majorant >= std::abs(g.dot(n))) continue;

    const CollisionEvent event =
        collide(v[i], v[j], n, config_.epsilon, config_.branch, species, species);
    journal.emplace_back(i, v[i]);
    journal.emplace_back(j, v[j]);
    v[i] = event.w1;
    v[j] = event.w2;
    ++stats.collisions;
  }
  candidate_remainder_ = remainder;
  return true;
}

void Simulator::step() {
  StepStats stats;
  const double bound = majorant_bound();
  double majorant = config_.majorant_relative_speed > 0.0
                        ? std::min(config_.majorant_relative_speed, bound)
                        : bound;
  if (!(majorant > 0.0)) {
    // All particles share one velocity: nothing can collide.
    last_step_ = {};
    time_ += config_.dt;
    return;
  }
  for (int attempt = 0; attempt <= config_.max_retries; ++attempt) {
    if (try_step(majorant, stats)) {
      stats.retries = attempt;
      stats.majorant = majorant;
      last_step_ = stats;
      total_collisions_ += stats.collisions;
      time_ += config_.dt;
      return;
    }
    if (attempt == config_.max_retries) break;
    majorant *= 2.0;
    config_.majorant_relative_speed = std::max(config_.majorant_relative_speed, majorant);
  }
  throw MajorantExceeded(fmt::format(
      "dsmc: relative speed still above the majorant after {} doublings (last tried {:.6g} m/s)",
      config_.max_retries, majorant));
}

std::vector<Sample> Simulator::run(std::uint64_t n_steps, std::uint64_t sample_every) {
  if (n_steps > 0 && sample_every == 0) throw InvalidInput("dsmc: sample_every must be >= 1");
  std::vector<Sample> series{sample()};
  for (std::uint64_t s = 1; s <= n_steps; ++s) {
    step();
    if (s % sample_every == 0 || s == n_steps) series.push_back(sample());
  }
  return series;
}

Sample Simulator::sample() const {
  const std::vector<Vec3>& v = ensemble_.velocities;
  const double n = static_cast<double>(v.size());
  const double m = ensemble_.species.mass;
  const double vol = volume();
  const Vec3 mean = mean_of(v);
  double spread = 0.0;
  for (const Vec3& x : v) spread += (x - mean).squaredNorm();
  return {time_, n * ensemble_.statistical_weight / vol,
          m * ensemble_.statistical_weight * (n * mean) / vol,
          m * spread / (3.0 * n * kBoltzmann)};
}

ParticleEnsemble sample_maxwellian_ensemble(std::size_t count, const Species& species,
                                            double density, const Vec3& bulk_velocity,
                                            double temperature, std::uint64_t seed) {
  species.validate();
  if (count < 2) throw InvalidInput("dsmc: ensemble needs at least two particles");
  if (!(density > 0.0)) throw InvalidInput(fmt::format("dsmc: density must be > 0, got {}", density));
  if (!(temperature >= 0.0)) {
    throw InvalidInput(fmt::format("dsmc: temperature must be >= 0, got {}", temperature));
  }
  const double sigma = std::sqrt(kBoltzmann * temperature / species.mass);
  RandomStream rng(seed, kEnsembleStream);
  ParticleEnsemble ensemble{{}, species, density / static_cast<double>(count)};
  ensemble.velocities.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const double x = rng.normal();
    const double y = rng.normal();
    const double z = rng.normal();
    ensemble.velocities.push_back(bulk_velocity + sigma * Vec3{x, y, z});
  }
  return ensemble;
}

double total_kinetic_energy(const ParticleEnsemble& ensemble) {
  double sum = 0.0;
  for (const Vec3& v : ensemble.velocities) sum += v.squaredNorm();
  return 0.5 * ensemble.species.mass * sum;
}

Vec3 total_momentum(const ParticleEnsemble& ensemble) {
  Vec3 sum = Vec3::Zero();
  for (const Vec3& v : ensemble.velocities) sum += v;
  return ensemble.species.mass * sum;
}

namespace {

struct LineFit {
  double slope, intercept, sse;
};

LineFit regress(std::span<const double> x, std::span<const double> y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
  }
  const double mx = sx / n, my = sy / n;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  const double slope = sxx > 0 ? sxy / sxx : 0.0;
  const double intercept = my - slope * mx;
  double sse = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - (intercept + slope * x[i]);
    sse += r * r;
  }
  return {slope, intercept, sse};
}

}  // namespace

CoolingFit fit_cooling_law(std::span<const Sample> series, double t_min) {
  std::vector<double> times, log_temps;
  for (const Sample& s : series) {
    if (s.t >= t_min && s.temperature > 0.0) {
      times.push_back(s.t);
      log_temps.push_back(std::log(s.temperature));
    }
  }
  if (times.size() < 3) throw InvalidInput("cooling fit: need at least three samples past t_min");
  const double t_max = *std::max_element(times.begin(), times.end());
  if (!(t_max > 0.0)) throw InvalidInput("cooling fit: samples must extend past t = 0");

  std::vector<double> x(times.size());
  auto evaluate = [&](double log_t0) {
    const double t0 = std::exp(log_t0);
    for (std::size_t i = 0; i < times.size(); ++i) x[i] = std::log1p(times[i] / t0);
    return regress(x, log_temps);
  };

  // Coarse scan of log t0 over six decades either side of the sampled span,
  // then golden-section refinement around the best node.
  const double lo = std::log(t_max) - 14.0;
  const double hi = std::log(t_max) + 14.0;
  constexpr int kScan = 281;
  int best = 0;
  double best_sse = std::numeric_limits<double>::infinity();
  for (int k = 0; k < kScan; ++k) {
    const double sse = evaluate(lo + (hi - lo) * k / (kScan - 1)).sse;
    if (sse < best_sse) {
      best_sse = sse;
      best = k;
    }
  }
  const double step = (hi - lo) / (kScan - 1);
  double a = lo + step * std::max(0, best - 1);
  double b = lo + step * std::min(kScan - 1, best + 1);
  const double golden = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = b - golden * (b - a);
  double e = a + golden * (b - a);
  for (int it = 0; it < 100 && b - a > 1e-10; ++it) {
    if (evaluate(c).sse < evaluate(e).sse) {
      b = e;
    } else {
      a = c;
    }
    c = b - golden * (b - a);
    e = a + golden * (b - a);
  }
  const double log_t0 = 0.5 * (a + b);
  const LineFit fit = evaluate(log_t0);
  return {std::exp(fit.intercept), std::exp(log_t0), fit.slope,
          std::sqrt(fit.sse / static_cast<double>(times.size()))};
}

void write_time_series(std::ostream& out, std::span<const Sample> series) {
  out << "t,density,px,py,pz,temperature\n";
  for (const Sample& s : series) {
    out << fmt::format("{},{},{},{},{},{}\n", s.t, s.density, s.momentum.x(), s.momentum.y(),
                       s.momentum.z(), s.temperature);
  }
}

}  // namespace kinetics::dsmc
