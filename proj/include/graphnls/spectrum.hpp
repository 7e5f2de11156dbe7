#ifndef GRAPHNLS_SPECTRUM_HPP
#define GRAPHNLS_SPECTRUM_HPP

#include <cmath>
#include <random>
#include <stdexcept>

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include "graphnls/discretization.hpp"

namespace graphnls {

struct EigenOptions {
  double rayleigh_tol = 1e-10;
  int max_iter = 4000;
  bool deflate_constants = false;  // skip the kernel, return smallest nonzero
  std::uint64_t seed = 20240915ull;
};

/// Smallest generalized eigenvalue of (K, M) by shifted inverse iteration.
/// The shift follows the Rayleigh quotient once the estimate settles, so the
/// tail converges fast without deflation.
inline double omega_Z(const DiscreteSpace& s, EigenOptions opts = {}) {
  if (s.num_free() < 1) throw std::invalid_argument("omega_Z: no free DOFs");
  const Eigen::SparseMatrix<double>& K = s.K();
  const Eigen::SparseMatrix<double>& M = s.M();
  const int n = s.num_free();

  double len = s.total_meshed_length();
  const double rho_scale = (M_PI / len) * (M_PI / len);

  Eigen::VectorXd ones = Eigen::VectorXd::Ones(n);
  const double ones_m = ones.dot(M * ones);
  auto deflate = [&](Eigen::VectorXd& x) {
    if (opts.deflate_constants) x -= (ones.dot(M * x) / ones_m) * ones;
  };

  Eigen::VectorXd y(n);
  if (opts.deflate_constants) {
    std::mt19937_64 rng(opts.seed);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    for (int i = 0; i < n; ++i) y[i] = uni(rng);
    deflate(y);
  } else {
    // The ground eigenvector has constant sign, so all-ones overlaps it.
    y = ones;
  }
  y /= std::sqrt(y.dot(M * y));

  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver;
  double shift = -1e-6 * rho_scale;
  auto refactor = [&](double sh) {
    Eigen::SparseMatrix<double> A = K - sh * M;
    solver.compute(A);
    return solver.info() == Eigen::Success;
  };
  for (int attempt = 0; !refactor(shift); ++attempt) {
    if (attempt > 6) throw std::runtime_error("omega_Z: factorization failed");
    shift -= std::max(rho_scale, std::abs(shift) * 4.0);
  }

  double rho = y.dot(K * y);
  double rho_prev = rho + 1.0;
  int since_reshift = 0;
  for (int it = 0; it < opts.max_iter; ++it) {
    Eigen::VectorXd x = solver.solve(M * y);
    deflate(x);
    double mnorm = std::sqrt(x.dot(M * x));
    if (!(mnorm > 0.0) || !std::isfinite(mnorm))
      throw std::runtime_error("omega_Z: iteration broke down");
    x /= mnorm;
    rho_prev = rho;
    rho = x.dot(K * x);
    y.swap(x);
    ++since_reshift;
    double drift = std::abs(rho - rho_prev);
    if (drift <= opts.rayleigh_tol * std::max(std::abs(rho), rho_scale))
      return rho;
    // Chase the Rayleigh quotient once it settles; keeping the shift a bit
    // below rho preserves convergence to the bottom pair.
    if (since_reshift >= 8 && drift <= 0.05 * std::max(std::abs(rho), rho_scale)) {
      double margin = std::max(1e-4 * std::abs(rho), 1e-8 * rho_scale);
      double cand = rho - margin;
      if (cand > shift && refactor(cand)) {
        shift = cand;
        since_reshift = 0;
      } else {
        refactor(shift);
      }
    }
  }
  return rho;
}

}  // namespace graphnls

#endif  // GRAPHNLS_SPECTRUM_HPP
