#include "kinetics/collision_operator.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <ostream>
#include <string>

#include <fmt/format.h>

#include "kinetics/errors.hpp"
#include "kinetics/parallel.hpp"
#include "kinetics/rng.hpp"
#include "kinetics/stats.hpp"

namespace kinetics {

namespace {

constexpr std::uint64_t kBlockSize = 4096;
constexpr std::uint64_t kMomentStreamTag = 0x6D6F6D656E747321ull;

// Resolution of gain - loss in double precision, in ulps of gain + loss.
// When the two cancel pointwise (elastic equilibrium) the sample spread is
// pure rounding and understates the error of the mean.
constexpr double kRoundingUlps = 4.0;

std::uint64_t block_count(std::uint64_t samples) { return (samples + kBlockSize - 1) / kBlockSize; }

std::uint64_t velocity_stream(const Vec3& v) {
  std::uint64_t h = 0x76656C6F63697479ull;
  for (int d = 0; d < 3; ++d) h = splitmix64(h ^ std::bit_cast<std::uint64_t>(v[d]));
  return h;
}

}  // namespace

void QuadratureSpec::validate() const {
  if (samples < 1) throw InvalidInput("quadrature: samples must be >= 1");
  if (!(diameter > 0.0)) {
    throw InvalidInput(fmt::format("quadrature: diameter must be > 0, got {}", diameter));
  }
  if (!(mass > 0.0)) throw InvalidInput(fmt::format("quadrature: mass must be > 0, got {}", mass));
  if (!(epsilon > 0.0 && epsilon <= 1.0)) {
    throw InvalidRestitution(fmt::format("quadrature: restitution {} outside (0, 1]", epsilon));
  }
}

double RateEstimate::sigma_ratio() const {
  if (value == 0.0) return 0.0;
  if (std_error == 0.0) return std::numeric_limits<double>::infinity();
  return std::abs(value) / std_error;
}

double gain_weight(GainNormalization normalization, double epsilon) {
  return normalization == GainNormalization::PaperForm ? epsilon : 1.0 / (epsilon * epsilon);
}

RateEstimate evaluate_at(const DiscreteDistribution& f, const Vec3& v, const QuadratureSpec& spec) {
  spec.validate();
  if (!v.allFinite()) throw InvalidInput("evaluate_at: probe velocity is not finite");

  const VelocityGrid& grid = f.grid();
  const Species species = spec.species();
  const double vmax = grid.vmax();
  const double gain = gain_weight(spec.normalization, spec.epsilon);
  const LogQuadraticInterpolant smooth(f);
  const auto value_at = [&](const Vec3& x) {
    return spec.reconstruction == Reconstruction::LogQuadratic ? smooth(x) : interpolate(f, x);
  };
  const double f_probe = value_at(v);
  const CounterRng rng(spec.seed, velocity_stream(v));

  struct Partial {
    RunningStats integrand;
    RunningStats magnitude;  // (|gain| + |loss|) * kernel
  };
  const std::uint64_t blocks = block_count(spec.samples);
  std::vector<Partial> partial(blocks);
  parallel_for(blocks, [&](std::size_t b) {
    Partial acc;
    const std::uint64_t begin = b * kBlockSize;
    const std::uint64_t end = std::min(spec.samples, begin + kBlockSize);
    for (std::uint64_t i = begin; i < end; ++i) {
      const auto [ux, uy] = rng.uniforms(i, 0);
      const auto [uz, u_cos] = rng.uniforms(i, 1);
      const double u_phi = rng.uniforms(i, 2)[0];
      const Vec3 v1{-vmax + 2.0 * vmax * ux, -vmax + 2.0 * vmax * uy, -vmax + 2.0 * vmax * uz};
      const Vec3 n = unit_vector_from(u_cos, u_phi);

      // Pairs whose pre-collision partners leave the hull are outside the
      // truncated domain for gain and loss alike.
      const auto [pre, pre1] = inverse_collide(v, v1, n, spec.epsilon, spec.branch, species, species);
      if (pre.cwiseAbs().maxCoeff() > vmax || pre1.cwiseAbs().maxCoeff() > vmax) {
        acc.integrand.add(0.0);
        acc.magnitude.add(0.0);
        continue;
      }
      const double kernel = std::abs((v - v1).dot(n));
      const double loss = f_probe * value_at(v1);
      const double gain_term = gain * value_at(pre) * value_at(pre1);
      acc.integrand.add((gain_term - loss) * kernel);
      acc.magnitude.add((gain_term + loss) * kernel);
    }
    partial[b] = acc;
  });

  Partial total;
  for (const Partial& p : partial) {
    total.integrand.merge(p.integrand);
    total.magnitude.merge(p.magnitude);
  }

  // Power-of-two changes in d leave the scale factor, and hence the value,
  // exactly rescaled.
  const double hull = 2.0 * vmax;
  const double scale = 0.25 * spec.diameter * spec.diameter * (hull * hull * hull) * (4.0 * kPi);
  const double statistical = total.integrand.std_error();
  const double rounding = kRoundingUlps * std::numeric_limits<double>::epsilon() * total.magnitude.mean;
  return {scale * total.integrand.mean, scale * std::hypot(statistical, rounding)};
}

std::vector<RateEstimate> evaluate_field(const DiscreteDistribution& f, std::span<const Vec3> nodes,
                                         const QuadratureSpec& spec) {
  spec.validate();
  std::vector<RateEstimate> out(nodes.size());
  parallel_for(nodes.size(), [&](std::size_t i) { out[i] = evaluate_at(f, nodes[i], spec); });
  return out;
}

MomentRates moment_rates(const DiscreteDistribution& f, const QuadratureSpec& spec) {
  spec.validate();
  const VelocityGrid& grid = f.grid();
  const Species species = spec.species();

  std::vector<double> cumulative(grid.size());
  double running = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    running += f[i];
    cumulative[i] = running;
  }
  const double total_weight = running;
  if (total_weight == 0.0) return {};

  auto pick = [&](double u) {
    const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u * total_weight);
    const auto idx = static_cast<std::size_t>(std::distance(cumulative.begin(), it));
    return grid.node(std::min(idx, grid.size() - 1));
  };

  // Gain-to-loss weight after mapping the gain integral onto pre-collision
  // variables: the inverse map contributes 1/ε² (Jacobian times kernel).
  const double gamma =
      spec.normalization == GainNormalization::PaperForm ? spec.epsilon * spec.epsilon * spec.epsilon
                                                         : 1.0;
  const double m = spec.mass;
  const CounterRng rng(spec.seed, kMomentStreamTag);

  struct Partial {
    RunningStats density, px, py, pz, energy;
  };
  const std::uint64_t blocks = block_count(spec.samples);
  std::vector<Partial> partial(blocks);
  parallel_for(blocks, [&](std::size_t b) {
    Partial acc;
    const std::uint64_t begin = b * kBlockSize;
    const std::uint64_t end = std::min(spec.samples, begin + kBlockSize);
    for (std::uint64_t i = begin; i < end; ++i) {
      const auto [ua, ub] = rng.uniforms(i, 0);
      const auto [u_cos, u_phi] = rng.uniforms(i, 1);
      const Vec3 v = pick(ua);
      const Vec3 v1 = pick(ub);
      const Vec3 n = unit_vector_from(u_cos, u_phi);
      const double kernel = std::abs((v1 - v).dot(n));

      const CollisionEvent e = collide(v, v1, n, spec.epsilon, spec.branch, species, species);
      const double loss = energy_loss_normal(v, v1, n, spec.epsilon, species, species);
      const Vec3 dp = 0.5 * m * ((gamma - 1.0) * (v + v1) + gamma * (e.lambda1 + e.lambda2) * n);
      const double ke = 0.5 * m * (v.squaredNorm() + v1.squaredNorm());

      acc.density.add((gamma - 1.0) * kernel);
      acc.px.add(dp.x() * kernel);
      acc.py.add(dp.y() * kernel);
      acc.pz.add(dp.z() * kernel);
      acc.energy.add(0.5 * ((gamma - 1.0) * ke - gamma * loss) * kernel);
    }
    partial[b] = acc;
  });

  Partial total;
  for (const Partial& p : partial) {
    total.density.merge(p.density);
    total.px.merge(p.px);
    total.py.merge(p.py);
    total.pz.merge(p.pz);
    total.energy.merge(p.energy);
  }

  const double number_density = total_weight * grid.cell_volume();
  const double scale =
      number_density * number_density * 0.25 * spec.diameter * spec.diameter * (4.0 * kPi);
  auto finish = [scale](const RunningStats& s) {
    return RateEstimate{scale * s.mean, scale * s.std_error()};
  };
  return {finish(total.density),
          {finish(total.px), finish(total.py), finish(total.pz)},
          finish(total.energy)};
}

void write_rate_table(std::ostream& out, std::span<const Vec3> nodes,
                      std::span<const RateEstimate> rates) {
  if (nodes.size() != rates.size()) throw InvalidInput("rate table: size mismatch");
  out << "vx,vy,vz,rate,std_error\n";
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    out << fmt::format("{},{},{},{},{}\n", nodes[i].x(), nodes[i].y(), nodes[i].z(),
                       rates[i].value, rates[i].std_error);
  }
}

const char* to_string(GainNormalization normalization) {
  return normalization == GainNormalization::PaperForm ? "paper" : "standard";
}

GainNormalization parse_normalization(const std::string& text) {
  if (text == "paper") return GainNormalization::PaperForm;
  if (text == "standard") return GainNormalization::StandardGranular;
  throw InvalidInput(fmt::format("unknown gain normalization '{}'", text));
}

const char* to_string(Reconstruction reconstruction) {
  return reconstruction == Reconstruction::LogQuadratic ? "log-quadratic" : "trilinear";
}

Reconstruction parse_reconstruction(const std::string& text) {
  if (text == "log-quadratic") return Reconstruction::LogQuadratic;
  if (text == "trilinear") return Reconstruction::Trilinear;
  throw InvalidInput(fmt::format("unknown reconstruction '{}' (log-quadratic, trilinear)", text));
}

}  // namespace kinetics
