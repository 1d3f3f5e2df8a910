// Copyright 2026 The gmpr Authors
//
// Licensed under the Apache License, Version 2.0 (the "License"); you may not use this file except in compliance with
// the License. You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software distributed under the License is distributed on
// an "AS IS" BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied. See the License for the
// specific language governing permissions and limitations under the License.

#include "gmpr/mixing.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <vector>

#include "gmpr/error.hpp"

namespace gmpr {

namespace {

// 1 − Σα². On the simplex it equals Σ_m α_m·Σ_{k≠m} α_k, which has no cancellation when one weight is near 1.
double cannot_norm(const Vector& alpha) {
  const auto M = alpha.size();
  const double s = alpha.sum();
  if (std::abs(s - 1.0) > 4.0 * static_cast<double>(M) * std::numeric_limits<double>::epsilon()) {
    return 1.0 - alpha.squaredNorm();
  }
  std::vector<double> suffix(static_cast<std::size_t>(M) + 1, 0.0);
  for (Eigen::Index m = M - 1; m >= 0; --m) suffix[static_cast<std::size_t>(m)] = suffix[static_cast<std::size_t>(m) + 1] + alpha[m];
  double prefix = 0.0, q = 0.0;
  for (Eigen::Index m = 0; m < M; ++m) {
    q += alpha[m] * (prefix + suffix[static_cast<std::size_t>(m) + 1]);
    prefix += alpha[m];
  }
  return q;
}

void check_inputs(const Vector& counts, double n_cannot) {
  if (counts.size() < 1) throw Error(ErrorCode::InvariantViolation, "mixing counts are empty");
  if (!counts.allFinite() || (counts.array() < 0.0).any()) {
    throw Error(ErrorCode::InvariantViolation, "mixing counts must be finite and non-negative");
  }
  if (!(counts.sum() > 0.0)) throw Error(ErrorCode::InvariantViolation, "mixing counts sum to zero");
  if (!(n_cannot >= 0.0) || !std::isfinite(n_cannot)) {
    throw Error(ErrorCode::InvariantViolation, "cannot-link count must be non-negative");
  }
  if (n_cannot > 0.0 && counts.size() < 2) {
    throw Error(ErrorCode::DegenerateNormalizer, "cannot-links need at least two classes");
  }
}

// Orthonormal basis of {v ∈ R^k : Σv = 0}, k ≥ 2.
Matrix sum_zero_basis(Eigen::Index k) {
  Matrix B = Matrix::Zero(k, k - 1);
  for (Eigen::Index i = 0; i < k - 1; ++i) {
    B(i, i) = 1.0;
    B(k - 1, i) = -1.0;
  }
  Eigen::HouseholderQR<Matrix> qr(B);
  return qr.householderQ() * Matrix::Identity(k, k - 1);
}

struct Lagrange {
  std::vector<int> free;
  double lambda = 0.0;
};

// Free set and multiplier: interior coordinates, plus bound coordinates whose gradient exceeds the multiplier.
Lagrange free_set(const Vector& alpha, const Vector& g, double floor) {
  const auto M = alpha.size();
  const double at_bound = floor * (1.0 + 1e-9);
  Lagrange out;
  for (Eigen::Index m = 0; m < M; ++m)
    if (alpha[m] > at_bound) out.free.push_back(static_cast<int>(m));
  auto mean_g = [&] {
    double s = 0.0;
    for (int m : out.free) s += g[m];
    return s / static_cast<double>(out.free.size());
  };
  out.lambda = mean_g();
  for (Eigen::Index m = 0; m < M; ++m) {
    if (alpha[m] <= at_bound && g[m] > out.lambda) out.free.push_back(static_cast<int>(m));
  }
  std::sort(out.free.begin(), out.free.end());
  out.lambda = mean_g();
  return out;
}

double kkt(const Vector& alpha, const Vector& g, double floor) {
  const double at_bound = floor * (1.0 + 1e-9);
  std::vector<int> interior;
  for (Eigen::Index m = 0; m < alpha.size(); ++m)
    if (alpha[m] > at_bound) interior.push_back(static_cast<int>(m));
  double lambda = 0.0;
  for (int m : interior) lambda += g[m];
  lambda /= static_cast<double>(interior.size());
  double r = 0.0;
  for (Eigen::Index m = 0; m < alpha.size(); ++m) {
    if (alpha[m] > at_bound) {
      r = std::max(r, std::abs(g[m] - lambda));
    } else {
      r = std::max(r, std::max(0.0, g[m] - lambda));
    }
  }
  return r / std::max(1.0, std::abs(lambda));
}

// Newton step on the free coordinates within Σp = 0, with |eigenvalues| of the reduced Hessian.
Vector reduced_newton_direction(const Vector& g, const Matrix& H, const std::vector<int>& free) {
  const auto k = static_cast<Eigen::Index>(free.size());
  Vector gF(k);
  Matrix HF(k, k);
  for (Eigen::Index a = 0; a < k; ++a) {
    gF[a] = g[free[a]];
    for (Eigen::Index b = 0; b < k; ++b) HF(a, b) = H(free[a], free[b]);
  }
  const Matrix Z = sum_zero_basis(k);
  const Vector rg = Z.transpose() * gF;
  const Matrix RH = Z.transpose() * HF * Z;
  Eigen::SelfAdjointEigenSolver<Matrix> eig(RH);
  Vector ev = eig.eigenvalues().cwiseAbs();
  const double delta = 1e-12 * std::max(1.0, ev.maxCoeff());
  for (Eigen::Index i = 0; i < ev.size(); ++i) ev[i] = 1.0 / std::max(ev[i], delta);
  const Matrix& V = eig.eigenvectors();
  const Vector pF = Z * (V * ev.asDiagonal() * (V.transpose() * rg));
  Vector p = Vector::Zero(g.size());
  for (Eigen::Index a = 0; a < k; ++a) p[free[a]] = pF[a];
  return p;
}

struct NewtonRun {
  Vector alpha;
  int steps = 0;
  double residual = 0.0;
  bool converged = false;
};

NewtonRun newton(const Vector& counts, double n_cannot, Vector alpha, int max_total) {
  const double scale = 1.0 / counts.sum();
  auto F = [&](const Vector& a) { return scale * mixing_objective(counts, n_cannot, a); };
  NewtonRun run;
  for (int step = 0;; ++step) {
    const Vector g = scale * mixing_gradient(counts, n_cannot, alpha);
    run.residual = kkt(alpha, g, kMixingFloor);
    if (run.residual <= kMixingKktTol) {
      run.converged = true;
      break;
    }
    if (step >= max_total) break;

    Lagrange lg = free_set(alpha, g, kMixingFloor);
    const Matrix H = scale * mixing_hessian(counts, n_cannot, alpha);
    const double at_bound = kMixingFloor * (1.0 + 1e-9);
    Vector p;
    while (true) {
      const auto k = static_cast<Eigen::Index>(lg.free.size());
      if (k < 2) break;
      p = reduced_newton_direction(g, H, lg.free);
      // a bound coordinate that the step would push further down leaves the free set
      std::vector<int> keep;
      for (int m : lg.free)
        if (!(alpha[m] <= at_bound && p[m] < 0.0)) keep.push_back(m);
      if (keep.size() == lg.free.size()) break;
      lg.free = std::move(keep);
      p.resize(0);
    }
    if (p.size() == 0) break;

    double t_max = std::numeric_limits<double>::infinity();
    int blocking = -1;
    for (Eigen::Index m = 0; m < alpha.size(); ++m) {
      if (p[m] < 0.0) {
        const double t = (alpha[m] - kMixingFloor) / -p[m];
        if (t < t_max) {
          t_max = t;
          blocking = static_cast<int>(m);
        }
      }
    }
    double t = std::min(1.0, t_max);
    const double f0 = F(alpha);
    const double slope = g.dot(p);
    Vector next = alpha;
    bool accepted = false;
    for (int bt = 0; bt < 60; ++bt) {
      next = alpha + t * p;
      if (t == t_max && blocking >= 0) next[blocking] = kMixingFloor;
      for (Eigen::Index m = 0; m < next.size(); ++m) next[m] = std::max(next[m], kMixingFloor);
      next /= next.sum();
      const double f1 = F(next);
      if (!std::isfinite(f1)) {
        t *= 0.5;
        continue;
      }
      if (f1 >= f0 + 1e-4 * t * slope && f1 > f0) {
        accepted = true;
        break;
      }
      // Near the optimum f is flat to rounding; use the residual as merit there.
      if (std::abs(f1 - f0) <= 1e-13 * std::max(1.0, std::abs(f0)) &&
          kkt(next, scale * mixing_gradient(counts, n_cannot, next), kMixingFloor) < run.residual) {
        accepted = true;
        break;
      }
      t *= 0.5;
    }
    run.steps = step + 1;
    if (!accepted) break;
    alpha = next;
  }
  run.alpha = alpha;
  return run;
}

}  // namespace

double mixing_objective(const Vector& counts, double n_cannot, const Vector& alpha) {
  double f = 0.0;
  for (Eigen::Index m = 0; m < alpha.size(); ++m) {
    if (counts[m] > 0.0) f += counts[m] * std::log(alpha[m]);
  }
  if (n_cannot > 0.0) f -= n_cannot * std::log(cannot_norm(alpha));
  return f;
}

Vector mixing_gradient(const Vector& counts, double n_cannot, const Vector& alpha) {
  Vector g(alpha.size());
  const double q = cannot_norm(alpha);
  for (Eigen::Index m = 0; m < alpha.size(); ++m) {
    g[m] = (counts[m] > 0.0 ? counts[m] / alpha[m] : 0.0) + (n_cannot > 0.0 ? 2.0 * n_cannot * alpha[m] / q : 0.0);
  }
  return g;
}

Matrix mixing_hessian(const Vector& counts, double n_cannot, const Vector& alpha) {
  const auto M = alpha.size();
  Matrix H = Matrix::Zero(M, M);
  for (Eigen::Index m = 0; m < M; ++m) {
    if (counts[m] > 0.0) H(m, m) -= counts[m] / (alpha[m] * alpha[m]);
  }
  if (n_cannot > 0.0) {
    const double q = cannot_norm(alpha);
    H.diagonal().array() += 2.0 * n_cannot / q;
    H += (4.0 * n_cannot / (q * q)) * (alpha * alpha.transpose());
  }
  return H;
}

double mixing_kkt_residual(const Vector& counts, double n_cannot, const Vector& alpha, double floor) {
  return kkt(alpha, mixing_gradient(counts, n_cannot, alpha) / counts.sum(), floor);
}

Vector project_capped_simplex(const Vector& v, double floor) {
  const auto M = v.size();
  const double budget = 1.0 - static_cast<double>(M) * floor;
  // Project v − floor onto {x ≥ 0, Σx = budget} by the sort-and-threshold rule.
  std::vector<double> u(v.data(), v.data() + M);
  for (double& x : u) x -= floor;
  std::vector<double> s = u;
  std::sort(s.begin(), s.end(), std::greater<>());
  double cum = 0.0;
  double theta = 0.0;
  for (Eigen::Index j = 0; j < M; ++j) {
    cum += s[j];
    const double t = (cum - budget) / static_cast<double>(j + 1);
    if (s[j] - t > 0.0) theta = t;
  }
  Vector out(M);
  for (Eigen::Index m = 0; m < M; ++m) out[m] = std::max(u[m] - theta, 0.0) + floor;
  return out / out.sum();
}

MixingResult optimize_mixing(const Vector& counts, double n_cannot, const Vector& alpha_init, int max_steps) {
  check_inputs(counts, n_cannot);
  if (alpha_init.size() != counts.size()) throw Error(ErrorCode::DimensionMismatch, "alpha_init length != counts");
  MixingResult out;
  if (n_cannot == 0.0) {
    out.alpha = counts / counts.sum();
    return out;
  }
  const int cap = 10 * std::max(1, max_steps);
  NewtonRun best = newton(counts, n_cannot, project_capped_simplex(counts / counts.sum(), kMixingFloor), cap);
  const Vector start2 = project_capped_simplex(alpha_init, kMixingFloor);
  const double scale = 1.0 / counts.sum();
  if (!best.converged ||
      scale * mixing_objective(counts, n_cannot, start2) > scale * mixing_objective(counts, n_cannot, best.alpha)) {
    NewtonRun second = newton(counts, n_cannot, start2, cap);
    const bool better = scale * mixing_objective(counts, n_cannot, second.alpha) >
                        scale * mixing_objective(counts, n_cannot, best.alpha);
    if (second.converged && (!best.converged || better)) {
      second.steps += best.steps;
      best = second;
    }
  }
  if (!best.converged) {
    throw Error(ErrorCode::NoConvergence, "mixing weight optimization did not reach the KKT tolerance");
  }
  out.alpha = best.alpha;
  out.newton_steps = best.steps;
  out.kkt_residual = best.residual;
  return out;
}

}  // namespace gmpr
