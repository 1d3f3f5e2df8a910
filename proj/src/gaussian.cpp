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

#include "gmpr/gaussian.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "gmpr/error.hpp"
#include "gmpr/kernels.hpp"

namespace gmpr {

namespace {

constexpr double kLog2Pi = 1.8378770664093454835606594728112;

}  // namespace

CholeskyGaussian::CholeskyGaussian(Vector mean, const Matrix& cov) : mean_(std::move(mean)) {
  const auto d = mean_.size();
  if (d < 1 || cov.rows() != d || cov.cols() != d) {
    throw Error(ErrorCode::DimensionMismatch, "covariance shape does not match mean dimension");
  }
  if (!mean_.allFinite() || !cov.allFinite()) throw Error(ErrorCode::NotFinite, "non-finite Gaussian parameters");
  const double scale = std::max(1.0, cov.cwiseAbs().maxCoeff());
  if ((cov - cov.transpose()).cwiseAbs().maxCoeff() > 1e-10 * scale) {
    throw Error(ErrorCode::InvariantViolation, "covariance is not symmetric");
  }
  Eigen::LLT<Matrix> llt(cov);
  if (llt.info() != Eigen::Success) throw Error(ErrorCode::InvariantViolation, "covariance is not positive definite");
  chol_ = llt.matrixL();
  double ld = 0.0;
  for (Eigen::Index k = 0; k < d; ++k) {
    const double p = chol_(k, k);
    if (!(p > 0.0) || !std::isfinite(p)) {
      throw Error(ErrorCode::InvariantViolation, "covariance has a non-positive Cholesky pivot");
    }
    ld += std::log(p);
  }
  log_det_ = 2.0 * ld;
}

double log_density(const CholeskyGaussian& g, const Eigen::Ref<const Vector>& x) {
  if (x.size() != g.dim()) throw Error(ErrorCode::DimensionMismatch, "point dimension does not match Gaussian");
  const Vector y = g.chol().triangularView<Eigen::Lower>().solve(x - g.mean());
  return -0.5 * (g.dim() * kLog2Pi + g.log_det() + y.squaredNorm());
}

double log_sum_exp(std::span<const double> v) {
  if (v.empty()) throw Error(ErrorCode::EmptyInput, "log_sum_exp of an empty vector");
  const double hi = *std::max_element(v.begin(), v.end());
  if (hi == -std::numeric_limits<double>::infinity()) return hi;
  double s = 0.0;
  for (double x : v) s += std::exp(x - hi);
  return hi + std::log(s);
}

double normalize_log_weights(std::span<double> v) {
  const double z = log_sum_exp(v);
  if (!std::isfinite(z)) throw Error(ErrorCode::NotFinite, "posterior normalizer is not finite");
  for (double& x : v) x = std::exp(x - z);
  return z;
}

double default_ridge_floor(const Matrix& S) {
  const double t = S.trace() / static_cast<double>(S.rows());
  return (t > 0.0 && std::isfinite(t)) ? 1e-6 * t : 1e-6;
}

Matrix regularize_covariance(const Matrix& S, double floor) {
  if (!S.allFinite()) throw Error(ErrorCode::NotFinite, "covariance has non-finite entries");
  Matrix sym = 0.5 * (S + S.transpose());
  const auto d = sym.rows();
  const Matrix eye = Matrix::Identity(d, d);
  double eps = 0.0;
  while (true) {
    Matrix candidate = sym + eps * eye;
    Eigen::LLT<Matrix> llt(candidate);
    if (llt.info() == Eigen::Success) {
      const Matrix L = llt.matrixL();
      // pivots far below the floor are rounding noise, not scale
      if (L.allFinite() && (L.diagonal().array().square() >= 0.5 * floor).all() && (L.diagonal().array() > 0.0).all())
        return candidate;
    }
    eps = (eps == 0.0) ? floor : eps * 10.0;
    if (!(eps < 1e300) || !(floor > 0.0)) throw Error(ErrorCode::NotFinite, "no ridge makes the covariance SPD");
  }
}

void log_density_batch(const CholeskyGaussian& g, const Matrix& columns, std::span<double> out) {
  const auto n = static_cast<std::size_t>(columns.rows());
  if (columns.cols() != g.dim()) throw Error(ErrorCode::DimensionMismatch, "point dimension does not match Gaussian");
  if (out.size() != n) throw Error(ErrorCode::LengthMismatch, "output span length differs from point count");
  kernels::active().mahalanobis_sq(g.chol().data(), g.mean().data(), g.dim(), columns.data(), n, n, out.data());
  const double c = -0.5 * (g.dim() * kLog2Pi + g.log_det());
  for (double& v : out) v = c - 0.5 * v;
}

}  // namespace gmpr
