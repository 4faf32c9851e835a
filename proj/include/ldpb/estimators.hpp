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

#ifndef LDPB_ESTIMATORS_HPP_
#define LDPB_ESTIMATORS_HPP_

#include <cmath>
#include <cstdint>
#include <sstream>
#include <stdexcept>

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include "ldpb/link.hpp"
#include "ldpb/privacy.hpp"
#include "ldpb/rng.hpp"

namespace ldpb {

// Base noise scale of the private OLS release. The released pair (M, u)
// changes by at most 2 in the scaled l2 sense between any two bounded
// inputs, so the per-release scale is gaussian_sigma with sensitivity 2;
// the matrix and vector entries are then inflated by 2*C_B and C_B*c_r.
inline double ols_sigma_base(const PrivacyBudget& budget) {
  return gaussian_sigma(budget, 2.0);
}

// One private OLS release: M = x x^T + W, u = r x + xi.
struct OlsObservation {
  Eigen::MatrixXd m;
  Eigen::VectorXd u;
};

// Server-side OLS accumulator for one parameter vector:
// A = sum of M_i, b = sum of u_i, t = number of releases ingested.
struct OlsState {
  Eigen::MatrixXd a;
  Eigen::VectorXd b;
  std::int64_t t = 0;
  double c_tilde = 0.0;
  // Number of solves that needed the fallback ridge. Diagnostic only.
  mutable std::int64_t ridge_fallbacks = 0;

  static OlsState zero(int d, double c_tilde) {
    OlsState s;
    s.a = Eigen::MatrixXd::Zero(d, d);
    s.b = Eigen::VectorXd::Zero(d);
    s.c_tilde = c_tilde;
    return s;
  }

  int dim() const { return static_cast<int>(b.size()); }
};

inline OlsObservation make_ols_observation(const Eigen::VectorXd& x, double r,
                                           double sigma_base, double c_b,
                                           double c_r, Rng& rng) {
  if (!(c_b > 0.0) || !(c_r > 0.0)) {
    throw std::invalid_argument("make_ols_observation: bounds must be positive");
  }
  if (x.norm() > c_b * (1.0 + 1e-9)) {
    throw std::invalid_argument(
        "make_ols_observation: |x| exceeds the context bound C_B");
  }
  if (std::abs(r) > c_r * (1.0 + 1e-9)) {
    throw std::invalid_argument(
        "make_ols_observation: |r| exceeds the reward bound c_r; rewards "
        "must be clipped by the environment");
  }
  OlsObservation obs;
  const Eigen::MatrixXd outer = x * x.transpose();
  obs.m = perturb_symmetric_matrix(outer, 2.0 * c_b * sigma_base, rng);
  obs.u = perturb_vector(r * x, c_b * c_r * sigma_base, rng);
  return obs;
}

inline void ols_ingest(OlsState& state, const OlsObservation& obs) {
  if (obs.m.rows() != state.a.rows() || obs.m.cols() != state.a.cols() ||
      obs.u.size() != state.b.size()) {
    throw std::invalid_argument("ols_ingest: dimension mismatch");
  }
  state.a += obs.m;
  state.b += obs.u;
  state.t += 1;
}

// Solves (A + c_tilde*sqrt(t)*I) theta = b. The shifted matrix is expected
// to be positive definite; when the Cholesky factorization reports
// otherwise (pathological noise draws, or the noiseless debug mode before
// the design has full rank), one extra ridge of 1e-8*(1+max|A|) is applied
// and counted in ridge_fallbacks.
inline Eigen::VectorXd ols_point_estimate(const OlsState& state) {
  if (state.t < 1) {
    throw std::invalid_argument("ols_point_estimate: no observations");
  }
  const int d = state.dim();
  Eigen::MatrixXd shifted =
      state.a + state.c_tilde * std::sqrt(static_cast<double>(state.t)) *
                    Eigen::MatrixXd::Identity(d, d);
  Eigen::LLT<Eigen::MatrixXd> llt(shifted);
  if (llt.info() == Eigen::Success) {
    return llt.solve(state.b);
  }
  state.ridge_fallbacks += 1;
  const double ridge = 1e-8 * (1.0 + state.a.cwiseAbs().maxCoeff());
  shifted += ridge * Eigen::MatrixXd::Identity(d, d);
  Eigen::LLT<Eigen::MatrixXd> retry(shifted);
  if (retry.info() != Eigen::Success) {
    throw std::runtime_error(
        "ols_point_estimate: shifted matrix not positive definite after "
        "fallback ridge");
  }
  return retry.solve(state.b);
}

// Shift coefficient from the high-probability operator-norm bound of the
// accumulated noise: 2*sigma*(4*sqrt(d) + 2*ln(2*t_horizon/alpha)).
// The multi-parameter caller passes the half-budget sigma and t_horizon*K.
inline double default_c_tilde(double sigma, int d, std::int64_t t_horizon,
                              double alpha) {
  if (!(sigma >= 0.0) || d < 1 || t_horizon < 1 || !(alpha > 0.0) ||
      !(alpha < 1.0)) {
    throw std::invalid_argument("default_c_tilde: invalid arguments");
  }
  return 2.0 * sigma *
         (4.0 * std::sqrt(static_cast<double>(d)) +
          2.0 * std::log(2.0 * static_cast<double>(t_horizon) / alpha));
}

// Server-side SGD iterate. theta_hat starts at zero.
struct SgdState {
  Eigen::VectorXd theta_hat;
  std::int64_t step_count = 0;
  double c0 = 1.0;
  bool project_unit_ball = false;

  static SgdState zero(int d, double c0, bool project_unit_ball) {
    if (!(c0 > 0.0)) {
      throw std::invalid_argument("SgdState: c0 must be positive");
    }
    SgdState s;
    s.theta_hat = Eigen::VectorXd::Zero(d);
    s.c0 = c0;
    s.project_unit_ball = project_unit_ball;
    return s;
  }
};

// One private SGD release: the GLM gradient (mu(x^T theta) - r) x pushed
// through the l2-ball mechanism with input bound R = 2*c_r*C_B. `ball`
// must be built with that R. In noiseless mode the raw gradient is
// returned unchanged.
inline Eigen::VectorXd make_sgd_observation(const Eigen::VectorXd& x, double r,
                                            const Eigen::VectorXd& theta_hat,
                                            const LinkFunction& link,
                                            const BallMechanismParams& ball,
                                            Rng& rng, bool noiseless) {
  const double score = x.dot(theta_hat);
  const Eigen::VectorXd grad = (link.eval(score) - r) * x;
  if (noiseless) return grad;
  return l2_ball_privatize(grad, ball, rng);
}

inline Eigen::VectorXd make_sgd_observation(const Eigen::VectorXd& x, double r,
                                            const Eigen::VectorXd& theta_hat,
                                            const LinkFunction& link,
                                            double epsilon, double c_b,
                                            double c_r, Rng& rng,
                                            bool noiseless) {
  const auto ball = BallMechanismParams::make(
      epsilon, static_cast<int>(x.size()), 2.0 * c_r * c_b);
  return make_sgd_observation(x, r, theta_hat, link, ball, rng, noiseless);
}

inline void sgd_step(SgdState& state, const Eigen::VectorXd& z, double eta) {
  if (!(eta > 0.0)) {
    throw std::invalid_argument("sgd_step: eta must be positive");
  }
  if (z.size() != state.theta_hat.size()) {
    throw std::invalid_argument("sgd_step: dimension mismatch");
  }
  state.theta_hat -= eta * z;
  state.step_count += 1;
  if (state.project_unit_ball) {
    const double norm = state.theta_hat.norm();
    if (norm > 1.0) state.theta_hat /= norm;
  }
}

}  // namespace ldpb

#endif  // LDPB_ESTIMATORS_HPP_
