//
// Copyright 2026 The ldp-bandit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#ifndef LDPB_PRIVACY_HPP_
#define LDPB_PRIVACY_HPP_

#include <cmath>
#include <sstream>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

#include "ldpb/rng.hpp"

namespace ldpb {

// Local (epsilon, delta) privacy budget. Composition is exact addition in
// both components.
struct PrivacyBudget {
  double epsilon = 0.0;
  double delta = 0.0;

  static PrivacyBudget make(double epsilon, double delta) {
    if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
      throw std::invalid_argument("PrivacyBudget: epsilon must be positive");
    }
    if (!(delta >= 0.0) || !(delta < 1.0)) {
      throw std::invalid_argument("PrivacyBudget: delta must lie in [0, 1)");
    }
    return PrivacyBudget{epsilon, delta};
  }

  // Half budget, used by the multi-parameter algorithm which spends
  // (epsilon/2, delta/2) per mechanism invocation.
  PrivacyBudget halved() const {
    return PrivacyBudget::make(epsilon / 2.0, delta / 2.0);
  }
};

inline PrivacyBudget compose(const PrivacyBudget& a, const PrivacyBudget& b) {
  return PrivacyBudget::make(a.epsilon + b.epsilon, a.delta + b.delta);
}

// Gaussian-mechanism noise scale for a statistic with the given worst-case
// l2 sensitivity: sensitivity * sqrt(2 ln(1.25/delta)) / epsilon. Requires
// delta > 0; callers needing a pure epsilon guarantee must use the
// l2-ball mechanism instead.
inline double gaussian_sigma(const PrivacyBudget& budget, double sensitivity) {
  if (!(budget.epsilon > 0.0)) {
    throw std::invalid_argument("gaussian_sigma: epsilon must be positive");
  }
  if (!(sensitivity >= 0.0) || !std::isfinite(sensitivity)) {
    throw std::invalid_argument("gaussian_sigma: sensitivity must be >= 0");
  }
  if (sensitivity == 0.0) return 0.0;
  if (!(budget.delta > 0.0)) {
    throw std::invalid_argument(
        "gaussian_sigma: Gaussian mechanism requires delta > 0; use the "
        "l2-ball mechanism for pure-epsilon release");
  }
  return sensitivity * std::sqrt(2.0 * std::log(1.25 / budget.delta)) /
         budget.epsilon;
}

// Noise scale paired with the sensitivity it was calibrated for.
struct NoiseCalibration {
  double sigma = 0.0;
  double sensitivity = 0.0;

  static NoiseCalibration make(const PrivacyBudget& budget,
                               double sensitivity) {
    return NoiseCalibration{gaussian_sigma(budget, sensitivity), sensitivity};
  }
};

// Adds i.i.d. zero-mean Gaussian noise of std `sigma` to each coordinate.
inline Eigen::VectorXd perturb_vector(const Eigen::VectorXd& v, double sigma,
                                      Rng& rng) {
  if (!(sigma >= 0.0)) {
    throw std::invalid_argument("perturb_vector: sigma must be >= 0");
  }
  if (!v.allFinite()) {
    throw std::invalid_argument("perturb_vector: input must be finite");
  }
  Eigen::VectorXd out = v;
  if (sigma == 0.0) return out;
  for (Eigen::Index i = 0; i < out.size(); ++i) {
    out[i] += rng.normal(0.0, sigma);
  }
  return out;
}

// Adds a symmetric Gaussian noise matrix: entries W(i,j) for i <= j are
// i.i.d. N(0, sigma^2) and W(j,i) = W(i,j). The output is exactly
// symmetric bitwise.
inline Eigen::MatrixXd perturb_symmetric_matrix(const Eigen::MatrixXd& m,
                                                double sigma, Rng& rng) {
  if (!(sigma >= 0.0)) {
    throw std::invalid_argument("perturb_symmetric_matrix: sigma must be >= 0");
  }
  if (m.rows() != m.cols()) {
    throw std::invalid_argument("perturb_symmetric_matrix: matrix not square");
  }
  if (!m.allFinite()) {
    throw std::invalid_argument("perturb_symmetric_matrix: input not finite");
  }
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = i + 1; j < m.cols(); ++j) {
      const double scale = std::max({1.0, std::abs(m(i, j)), std::abs(m(j, i))});
      if (std::abs(m(i, j) - m(j, i)) > 1e-12 * scale) {
        throw std::invalid_argument(
            "perturb_symmetric_matrix: input not symmetric");
      }
    }
  }
  Eigen::MatrixXd out = m;
  if (sigma == 0.0) return out;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = i; j < m.cols(); ++j) {
      const double w = rng.normal(0.0, sigma);
      out(i, j) += w;
      if (j != i) out(j, i) = out(i, j);
    }
  }
  return out;
}

// Output sphere radius of the l2-ball mechanism:
//   r = R * (sqrt(pi)/2) * (e^eps+1)/(e^eps-1) * d*Gamma((d+1)/2)/Gamma(d/2+1).
// The Gamma ratio goes through lgamma and (e^eps+1)/(e^eps-1) through
// 1/tanh(eps/2), so the value stays finite for large d and eps.
inline double ball_radius(double epsilon, int d, double R) {
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
    throw std::invalid_argument("ball_radius: epsilon must be positive");
  }
  if (d < 1) {
    throw std::invalid_argument("ball_radius: dimension must be >= 1");
  }
  if (!(R > 0.0) || !std::isfinite(R)) {
    throw std::invalid_argument("ball_radius: R must be positive");
  }
  const double eps_factor = 1.0 / std::tanh(epsilon / 2.0);
  const double gamma_ratio =
      std::exp(std::lgamma((d + 1.0) / 2.0) - std::lgamma(d / 2.0 + 1.0));
  return R * (std::sqrt(3.14159265358979323846) / 2.0) * eps_factor * d *
         gamma_ratio;
}

// Parameters of one l2-ball mechanism instance: inputs bounded by R in l2
// norm, dimension d, outputs on the sphere of radius `radius`.
struct BallMechanismParams {
  double epsilon = 0.0;
  double R = 0.0;
  int d = 0;
  double radius = 0.0;

  static BallMechanismParams make(double epsilon, int d, double R) {
    return BallMechanismParams{epsilon, R, d, ball_radius(epsilon, d, R)};
  }
};

// Per-draw internals of the ball mechanism, exposed for statistical tests.
struct BallSampleTrace {
  bool sign_flipped = false;      // Bernoulli step chose -x
  bool aligned_halfspace = false; // sampled from {z : z^T x_tilde > 0}
};

// The l2-ball mechanism: maps x with |x| <= R to a uniformly distributed
// point on the sphere of radius params.radius, biased toward the halfspace
// aligned with x so that the output is unbiased for x. Steps:
//   (i)   x_tilde = (2b-1) x with b ~ Bernoulli(1/2 + |x|/(2R));
//   (ii)  with probability e^eps/(1+e^eps) sample uniformly from the open
//         halfspace {z^T x_tilde > 0} of the sphere, otherwise from the
//         complementary closed halfspace;
//   (iii) scale to norm params.radius.
// Inputs with |x| in (R, R(1+1e-9)] are renormalized to norm R; larger
// violations are rejected so that callers cannot silently exceed the
// sensitivity bound. x = 0 makes both halfspaces the full sphere.
inline Eigen::VectorXd l2_ball_privatize(const Eigen::VectorXd& x,
                                         const BallMechanismParams& params,
                                         Rng& rng,
                                         BallSampleTrace* trace = nullptr) {
  if (x.size() != params.d) {
    throw std::invalid_argument("l2_ball_privatize: dimension mismatch");
  }
  if (!x.allFinite()) {
    throw std::invalid_argument("l2_ball_privatize: input must be finite");
  }
  Eigen::VectorXd input = x;
  const double norm = input.norm();
  if (norm > params.R) {
    if (norm > params.R * (1.0 + 1e-9)) {
      std::ostringstream msg;
      msg << "l2_ball_privatize: |x| = " << norm << " exceeds R = " << params.R
          << "; clip or rescale before privatizing";
      throw std::invalid_argument(msg.str());
    }
    input *= params.R / norm;
  }

  const double p_keep = 0.5 + input.norm() / (2.0 * params.R);
  const bool flipped = !rng.bernoulli(p_keep);
  const Eigen::VectorXd x_tilde = flipped ? Eigen::VectorXd(-input) : input;

  const double p_aligned = 1.0 / (1.0 + std::exp(-params.epsilon));
  const bool aligned = rng.bernoulli(p_aligned);

  // Uniform direction on the unit sphere.
  Eigen::VectorXd z(params.d);
  double z_norm = 0.0;
  do {
    for (int i = 0; i < params.d; ++i) z[i] = rng.normal();
    z_norm = z.norm();
  } while (z_norm == 0.0);
  z /= z_norm;

  // Reflect into the requested halfspace. Points exactly on the equator
  // belong to the "<= 0" branch.
  const double dot = z.dot(x_tilde);
  if (aligned) {
    if (!(dot > 0.0)) z = -z;
  } else {
    if (dot > 0.0) z = -z;
  }

  if (trace != nullptr) {
    trace->sign_flipped = flipped;
    trace->aligned_halfspace = aligned;
  }
  return z * params.radius;
}

}  // namespace ldpb

#endif  // LDPB_PRIVACY_HPP_
