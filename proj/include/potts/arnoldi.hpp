#pragma once

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <complex>
#include <functional>

#include "potts/common.hpp"

namespace potts {

struct ArnoldiOptions {
  int nev = 4;            // converged largest-modulus eigenvalues wanted
  int krylov_dim = 60;    // restart dimension (escalates on hard spectra)
  int max_matvecs = 500;  // iteration cap
  double tol = 1e-12;     // relative residual tolerance
  std::uint64_t seed = 0x9e3779b97f4a7c15ULL;
};

struct ArnoldiResult {
  std::vector<std::complex<double>> values;  // sorted by modulus, descending
  std::vector<double> residuals;             // relative residual estimates
  int matvecs = 0;
  bool converged = false;
  std::string diagnostic;
};

/// Restarted Arnoldi for the largest-modulus eigenvalues of a nonsymmetric
/// operator given by its action. Deterministic for a fixed seed. Restarts
/// escalate the Krylov dimension, so convergence degrades gracefully into
/// a full (exact) factorization on hard spectra.
inline ArnoldiResult arnoldi_top_eigenvalues(
    int dim, const std::function<void(const std::complex<double>*, std::complex<double>*)>& apply,
    const ArnoldiOptions& opts = {}) {
  using VectorXcd = Eigen::VectorXcd;
  using MatrixXcd = Eigen::MatrixXcd;
  ArnoldiResult res;
  if (dim == 0) {
    res.converged = true;
    return res;
  }
  const int nev = std::min(opts.nev, dim);
  int m = std::min(opts.krylov_dim, dim);

  VectorXcd v0(dim);
  SplitMix64 rng(opts.seed);
  for (int i = 0; i < dim; ++i) {
    double a = (double(rng.next() >> 11) / 9007199254740992.0) - 0.5;
    double b = (double(rng.next() >> 11) / 9007199254740992.0) - 0.5;
    v0[i] = {a, b};
  }
  v0.normalize();

  while (true) {
    MatrixXcd V(dim, m + 1), H = MatrixXcd::Zero(m + 1, m);
    V.col(0) = v0;
    int steps = 0;
    bool breakdown = false;
    for (int j = 0; j < m; ++j) {
      VectorXcd w(dim);
      apply(V.col(j).data(), w.data());
      ++res.matvecs;
      for (int i = 0; i <= j; ++i) {  // MGS with one reorthogonalization pass
        std::complex<double> h = V.col(i).dot(w);
        H(i, j) = h;
        w -= h * V.col(i);
      }
      for (int i = 0; i <= j; ++i) {
        std::complex<double> h = V.col(i).dot(w);
        H(i, j) += h;
        w -= h * V.col(i);
      }
      double nw = w.norm();
      H(j + 1, j) = nw;
      steps = j + 1;
      if (nw < 1e-14) {
        breakdown = true;  // invariant subspace found: Ritz values are exact
        break;
      }
      V.col(j + 1) = w / nw;
    }
    Eigen::ComplexEigenSolver<MatrixXcd> es(H.topLeftCorner(steps, steps));
    std::vector<int> order(steps);
    for (int i = 0; i < steps; ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](int a, int b) {
      return std::abs(es.eigenvalues()[a]) > std::abs(es.eigenvalues()[b]);
    });
    res.values.clear();
    res.residuals.clear();
    int take = std::min(nev, steps);
    bool all_ok = true;
    double hnext = breakdown ? 0.0 : std::abs(H(steps, steps - 1));
    for (int t = 0; t < take; ++t) {
      int i = order[t];
      std::complex<double> lam = es.eigenvalues()[i];
      double resid = hnext * std::abs(es.eigenvectors()(steps - 1, i));
      double rel = resid / std::max(std::abs(lam), 1e-300);
      res.values.push_back(lam);
      res.residuals.push_back(rel);
      if (rel > opts.tol) all_ok = false;
    }
    if (breakdown || all_ok) {
      res.converged = true;
      return res;
    }
    if (res.matvecs >= opts.max_matvecs) {
      res.diagnostic = "Arnoldi reached its iteration cap before converging";
      return res;
    }
    // restart: combine the wanted Ritz vectors and widen the subspace
    VectorXcd restart = VectorXcd::Zero(dim);
    for (int t = 0; t < take; ++t)
      restart += V.leftCols(steps) * es.eigenvectors().col(order[t]);
    double nr = restart.norm();
    if (nr < 1e-30) {
      res.diagnostic = "Arnoldi restart vector vanished";
      return res;
    }
    v0 = restart / nr;
    if (m < dim) m = std::min(2 * m, dim);
  }
}

}  // namespace potts
