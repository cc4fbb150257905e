#pragma once

// Reference values computed without the library's quadrature code: closed
// forms for Maxwellian collision moments and deterministic product-grid
// (Gauss-Hermite x Gauss-Legendre x uniform azimuth) quadrature.

#include <cmath>
#include <functional>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "kinetics/collision_kernel.hpp"
#include "kinetics/types.hpp"

namespace oracle {

using kinetics::Vec3;
using kinetics::kPi;
using kinetics::kBoltzmann;

struct Rule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

// Golub-Welsch: eigenvalues of the Jacobi matrix are the nodes, first
// eigenvector components squared (times mu0) the weights.
inline Rule golub_welsch(int n, const std::function<double(int)>& offdiag, double mu0) {
  Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(n, n);
  for (int k = 1; k < n; ++k) jacobi(k, k - 1) = jacobi(k - 1, k) = offdiag(k);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(jacobi);
  Rule rule;
  for (int k = 0; k < n; ++k) {
    rule.nodes.push_back(solver.eigenvalues()(k));
    const double v0 = solver.eigenvectors()(0, k);
    rule.weights.push_back(mu0 * v0 * v0);
  }
  return rule;
}

/// ∫ g(x) e^{-x²} dx ≈ Σ w g(x).
inline Rule gauss_hermite(int n) {
  return golub_welsch(n, [](int k) { return std::sqrt(0.5 * k); }, std::sqrt(kPi));
}

/// ∫_{-1}^{1} g(x) dx ≈ Σ w g(x).
inline Rule gauss_legendre(int n) {
  return golub_welsch(n, [](int k) { return k / std::sqrt(4.0 * k * k - 1.0); }, 2.0);
}

inline double maxwellian(const Vec3& v, double density, const Vec3& u, double temperature,
                         double mass) {
  const double s2 = kBoltzmann * temperature / mass;
  return density * std::pow(2.0 * kPi * s2, -1.5) * std::exp(-(v - u).squaredNorm() / (2.0 * s2));
}

/// Mean relative speed and mean cubed relative speed of two independent
/// Maxwellians at temperature T.
inline double mean_relative_speed(double temperature, double mass) {
  return 4.0 * std::sqrt(kBoltzmann * temperature / (kPi * mass));
}
inline double mean_cubed_relative_speed(double temperature, double mass) {
  const double a = std::sqrt(2.0 * kBoltzmann * temperature / mass);
  return 8.0 * a * a * a * std::sqrt(2.0 / kPi);
}

/// dn/dt of a Maxwellian when the gain term carries an extra factor gamma
/// relative to the loss term in the weak form: (gamma - 1) n² (π/2) d² <g>.
inline double density_rate(double gamma, double density, double diameter, double temperature,
                           double mass) {
  return (gamma - 1.0) * density * density * 0.5 * kPi * diameter * diameter *
         mean_relative_speed(temperature, mass);
}

/// dE/dt of a Maxwellian under mass-conserving inelastic collisions:
/// -(π/32) d² m (1 - ε²) n² <g³>.
inline double energy_rate(double epsilon, double density, double diameter, double temperature,
                          double mass) {
  return -(kPi / 32.0) * diameter * diameter * mass * (1.0 - epsilon * epsilon) * density *
         density * mean_cubed_relative_speed(temperature, mass);
}

/// Brute-force product-grid value of the collision term at v:
///   ∫∫ (G f(v'') f(v1'') - f(v) f(v1)) ¼ d² |(v - v1).n| dv1 dn
/// v1 on an N³ Gauss-Hermite grid of scale `spread` about `centre`,
/// n on N Gauss-Legendre cos(polar) x 2N uniform azimuth nodes.
inline double collision_term(const std::function<double(const Vec3&)>& f, const Vec3& v,
                             double epsilon, double gain_weight, double diameter, double mass,
                             kinetics::CollisionBranch branch, double spread, const Vec3& centre,
                             int n) {
  const Rule gh = gauss_hermite(n);
  const Rule gl = gauss_legendre(n);
  const int n_phi = 2 * n;
  const kinetics::Species species{mass, diameter};
  const double jac = std::pow(std::sqrt(2.0) * spread, 3);
  const double f_v = f(v);
  double total = 0.0;
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      for (int c = 0; c < n; ++c) {
        const Vec3 x(gh.nodes[a], gh.nodes[b], gh.nodes[c]);
        const Vec3 v1 = centre + std::sqrt(2.0) * spread * x;
        const double w1 = gh.weights[a] * gh.weights[b] * gh.weights[c] * jac *
                          std::exp(x.squaredNorm());
        const double f_v1 = f(v1);
        for (int p = 0; p < n; ++p) {
          const double ct = gl.nodes[p];
          const double st = std::sqrt(std::max(0.0, 1.0 - ct * ct));
          for (int q = 0; q < n_phi; ++q) {
            const double phi = 2.0 * kPi * (q + 0.5) / n_phi;
            const Vec3 nn(st * std::cos(phi), st * std::sin(phi), ct);
            const double wn = gl.weights[p] * 2.0 * kPi / n_phi;
            const auto [pre, pre1] =
                kinetics::inverse_collide(v, v1, nn, epsilon, branch, species, species);
            const double integrand =
                (gain_weight * f(pre) * f(pre1) - f_v * f_v1) * 0.25 * diameter * diameter *
                std::abs((v - v1).dot(nn));
            total += w1 * wn * integrand;
          }
        }
      }
    }
  }
  return total;
}

/// Brute-force density rate (γ - 1) ∫∫ f f1 (π/2) d² |v - v1| dv dv1 on an
/// N⁶ Gauss-Hermite product grid matched to a Maxwellian.
inline double density_rate_product_grid(double gamma, double density, double diameter,
                                        double temperature, double mass, int n) {
  const Rule gh = gauss_hermite(n);
  const double s = std::sqrt(kBoltzmann * temperature / mass);
  // With f = n (2π s²)^{-3/2} exp(-|v|²/2s²) and v = √2 s x, f dv = n π^{-3/2} e^{-x²} dx.
  const double norm = density * std::pow(kPi, -1.5);
  double sum = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int p = 0; p < n; ++p)
          for (int q = 0; q < n; ++q)
            for (int r = 0; r < n; ++r) {
              const Vec3 x(gh.nodes[i], gh.nodes[j], gh.nodes[k]);
              const Vec3 y(gh.nodes[p], gh.nodes[q], gh.nodes[r]);
              const double w = gh.weights[i] * gh.weights[j] * gh.weights[k] * gh.weights[p] *
                               gh.weights[q] * gh.weights[r];
              sum += w * std::sqrt(2.0) * s * (x - y).norm();
            }
  return (gamma - 1.0) * norm * norm * sum * 0.5 * kPi * diameter * diameter;
}

/// Central-difference Jacobian of a map R³ -> R³.
inline kinetics::Mat3 fd_jacobian(const std::function<Vec3(const Vec3&)>& map, const Vec3& x,
                                  double h) {
  kinetics::Mat3 jac;
  for (int j = 0; j < 3; ++j) {
    Vec3 up = x, down = x;
    up[j] += h;
    down[j] -= h;
    jac.col(j) = (map(up) - map(down)) / (2.0 * h);
  }
  return jac;
}

}  // namespace oracle
