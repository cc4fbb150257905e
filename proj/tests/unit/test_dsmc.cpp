#include <doctest.h>

#include <cmath>
#include <sstream>

#include "kinetics/dsmc.hpp"
#include "kinetics/errors.hpp"

using namespace kinetics;
using namespace kinetics::dsmc;

namespace {

const Species kUnit{1.0, 1.0};
const double kUnitT = 1.0 / kBoltzmann;  // thermal speed 1 m/s

DsmcConfig config(double epsilon, std::uint64_t seed = 5) {
  DsmcConfig c;
  c.dt = 0.01;
  c.number_density = 1.0;
  c.epsilon = epsilon;
  c.seed = seed;
  return c;
}

}  // namespace

TEST_CASE("maxwellian ensemble sampling") {
  SUBCASE("zero temperature gives the bulk velocity exactly") {
    const auto e = sample_maxwellian_ensemble(100, kUnit, 1.0, Vec3(1, 2, 3), 0.0, 1);
    for (const Vec3& v : e.velocities) CHECK(v == Vec3(1, 2, 3));
  }
  SUBCASE("sample mean within 5 sigma / sqrt(N)") {
    constexpr std::size_t kCount = 20000;
    const auto e = sample_maxwellian_ensemble(kCount, kUnit, 1.0, Vec3(5, 0, 0), kUnitT, 2);
    const Vec3 mean = total_momentum(e) / (kUnit.mass * kCount);
    CHECK((mean - Vec3(5, 0, 0)).cwiseAbs().maxCoeff() < 5.0 / std::sqrt(double(kCount)));
    CHECK(e.statistical_weight == 1.0 / kCount);
  }
  SUBCASE("fixed seed reproduces the ensemble bit for bit") {
    const auto a = sample_maxwellian_ensemble(1000, kUnit, 1.0, Vec3::Zero(), kUnitT, 3);
    const auto b = sample_maxwellian_ensemble(1000, kUnit, 1.0, Vec3::Zero(), kUnitT, 3);
    const auto c = sample_maxwellian_ensemble(1000, kUnit, 1.0, Vec3::Zero(), kUnitT, 4);
    CHECK(a.velocities == b.velocities);
    CHECK(a.velocities != c.velocities);
  }
  CHECK_THROWS_AS(sample_maxwellian_ensemble(1, kUnit, 1.0, Vec3::Zero(), kUnitT, 1), InvalidInput);
  CHECK_THROWS_AS(sample_maxwellian_ensemble(10, kUnit, 1.0, Vec3::Zero(), -1.0, 1), InvalidInput);
}

TEST_CASE("run with zero steps samples the initial state only") {
  const auto e = sample_maxwellian_ensemble(1000, kUnit, 2.0, Vec3(1, 0, 0), kUnitT, 1);
  auto c = config(0.9);
  c.number_density = 2.0;
  Simulator sim(e, c);
  const auto series = sim.run(0, 1);
  REQUIRE(series.size() == 1);
  CHECK(series[0].t == 0.0);
  CHECK(series[0].density == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(series[0].momentum.x() == doctest::Approx(total_momentum(e).x() * e.statistical_weight).epsilon(1e-14));
  CHECK(series[0].temperature == doctest::Approx(kUnitT).epsilon(0.1));
}

TEST_CASE("momentum is conserved and elastic energy too") {
  const auto e = sample_maxwellian_ensemble(5000, kUnit, 1.0, Vec3(0.3, -0.2, 0.1), kUnitT, 8);
  const Vec3 p0 = total_momentum(e);
  const double e0 = total_kinetic_energy(e);
  const double p_scale = kUnit.mass * std::sqrt(2.0 * e0 / kUnit.mass * e.velocities.size());

  Simulator inelastic(e, config(0.7));
  inelastic.run(500, 50);
  CHECK(inelastic.total_collisions() > 10000);
  CHECK((total_momentum(inelastic.ensemble()) - p0).norm() < 1e-12 * p_scale);
  CHECK(total_kinetic_energy(inelastic.ensemble()) < e0);

  Simulator elastic(e, config(1.0));
  elastic.run(500, 50);
  CHECK((total_momentum(elastic.ensemble()) - p0).norm() < 1e-12 * p_scale);
  CHECK(std::abs(total_kinetic_energy(elastic.ensemble()) - e0) < 1e-12 * e0);
}

TEST_CASE("identical seeds give identical trajectories") {
  const auto e = sample_maxwellian_ensemble(2000, kUnit, 1.0, Vec3::Zero(), kUnitT, 8);
  Simulator a(e, config(0.9, 11)), b(e, config(0.9, 11)), c(e, config(0.9, 12));
  a.run(50, 10);
  b.run(50, 10);
  c.run(50, 10);
  CHECK(a.ensemble().velocities == b.ensemble().velocities);
  CHECK(a.ensemble().velocities != c.ensemble().velocities);
}

TEST_CASE("inelastic cooling is monotone after the transient") {
  const auto e = sample_maxwellian_ensemble(20000, kUnit, 1.0, Vec3::Zero(), kUnitT, 21);
  Simulator sim(e, config(0.9));
  const auto series = sim.run(400, 20);
  for (std::size_t i = 1; i < series.size(); ++i) CHECK(series[i].temperature < series[i - 1].temperature);
  CHECK(series.back().temperature < 0.5 * series.front().temperature);
  CHECK(series.back().t == doctest::Approx(4.0));
}

TEST_CASE("majorant doubling and retry budget") {
  const auto e = sample_maxwellian_ensemble(2000, kUnit, 1.0, Vec3::Zero(), kUnitT, 4);
  auto c = config(0.9);
  c.majorant_relative_speed = 0.05;  // far below typical relative speeds
  Simulator sim(e, c);
  sim.step();
  CHECK(sim.last_step().retries > 0);
  CHECK(sim.config().majorant_relative_speed > 0.05);

  c.max_retries = 0;
  Simulator strict(e, c);
  CHECK_THROWS_AS(strict.step(), MajorantExceeded);
  CHECK(strict.ensemble().velocities == e.velocities);  // failed step rolled back
}

TEST_CASE("cold ensemble never collides") {
  const auto e = sample_maxwellian_ensemble(100, kUnit, 1.0, Vec3(1, 1, 1), 0.0, 1);
  Simulator sim(e, config(0.5));
  sim.run(10, 5);
  CHECK(sim.total_collisions() == 0);
  CHECK(sim.time() == doctest::Approx(0.1));
}

TEST_CASE("configuration validation") {
  const auto e = sample_maxwellian_ensemble(10, kUnit, 1.0, Vec3::Zero(), kUnitT, 1);
  auto c = config(0.9);
  c.dt = 0.0;
  CHECK_THROWS_AS(Simulator(e, c), InvalidInput);
  c = config(1.5);
  CHECK_THROWS_AS(Simulator(e, c), InvalidRestitution);
  c = config(0.9);
  c.majorant_relative_speed = -1.0;
  CHECK_THROWS_AS(Simulator(e, c), InvalidInput);
  auto broken = e;
  broken.velocities[3].x() = INFINITY;
  CHECK_THROWS_AS(Simulator(broken, config(0.9)), InvalidInput);
  Simulator sim(e, config(0.9));
  CHECK_THROWS_AS(sim.run(5, 0), InvalidInput);
}

TEST_CASE("cooling-law fit recovers synthetic parameters") {
  std::vector<Sample> series;
  for (int i = 0; i <= 200; ++i) {
    const double t = 0.5 * i;
    series.push_back({t, 1.0, Vec3::Zero(), 300.0 * std::pow(1.0 + t / 7.0, -2.0)});
  }
  const auto fit = fit_cooling_law(series, 0.0);
  CHECK(fit.exponent == doctest::Approx(-2.0).epsilon(1e-6));
  CHECK(fit.t0 == doctest::Approx(7.0).epsilon(1e-5));
  CHECK(fit.amplitude == doctest::Approx(300.0).epsilon(1e-6));
  CHECK(fit.rms_log_residual < 1e-8);
  CHECK_THROWS_AS(fit_cooling_law(series, 1e9), InvalidInput);
}

TEST_CASE("time series CSV") {
  std::ostringstream out;
  const std::vector<Sample> series{{0.5, 2.0, Vec3(1, 0, -1), 300.0}};
  write_time_series(out, series);
  CHECK(out.str() == "t,density,px,py,pz,temperature\n0.5,2,1,0,-1,300\n");
}
