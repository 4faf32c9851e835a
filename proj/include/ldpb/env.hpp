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

#ifndef LDPB_ENV_HPP_
#define LDPB_ENV_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ldpb/link.hpp"
#include "ldpb/rng.hpp"

namespace ldpb {

enum class EnvMode { single_param, multi_param };

// Context distributions. unit_sphere_uniform and intercept_sphere produce
// exactly unit-norm vectors; gaussian_isotropic draws N(0, I/d) and clips
// to the context bound; pricing_grid builds per-arm contexts (x, p_i * x)
// from one base feature draw.
enum class ContextLaw {
  unit_sphere_uniform,
  gaussian_isotropic,
  intercept_sphere,
  pricing_grid
};

enum class NoiseKind { truncated_gaussian, bernoulli };

enum class PricingRegret { acceptance, revenue };

// Feature table backing the pricing environment: one row per customer,
// plus the imputed price column from the loader (kept for reference; the
// environment's arm prices come from its own grid).
struct PricingTable {
  std::vector<std::string> feature_names;
  Eigen::MatrixXd features;  // rows x feature_dim
  Eigen::VectorXd prices;    // imputed price per row
  std::int64_t dropped_rows = 0;
};

// Ground-truth environment description. theta_star holds one vector in
// single-parameter mode and K vectors in multi-parameter mode, each with
// norm at most 1. Every generated context has norm <= c_b and every
// realized reward satisfies |r| <= c_r; the estimators rely on both
// bounds for their privacy calibration.
struct EnvSpec {
  EnvMode mode = EnvMode::single_param;
  int d = 0;
  int k = 0;
  std::vector<Eigen::VectorXd> theta_star;
  LinkFunction link = LinkFunction::identity();
  ContextLaw context_law = ContextLaw::unit_sphere_uniform;
  NoiseKind noise_kind = NoiseKind::truncated_gaussian;
  double sigma_noise = 0.0;
  double c_b = 1.0;
  double c_r = 1.0;
  std::string name;

  // Benchmark metadata for margin presets: index of an arm known to be
  // sub-optimal on every context (-1 if none) and its worst-case gap.
  int suboptimal_arm = -1;
  double margin_gap = 0.0;

  // Pricing extras (context_law == pricing_grid only).
  std::vector<double> price_grid;
  int pricing_feature_dim = 0;
  PricingRegret pricing_regret = PricingRegret::acceptance;
  std::shared_ptr<const PricingTable> pricing_table;

  const Eigen::VectorXd& theta_for_arm(int arm) const {
    return mode == EnvMode::multi_param ? theta_star.at(arm) : theta_star.at(0);
  }

  void validate() const {
    if (d < 1 || k < 1) throw std::invalid_argument("EnvSpec: d, K must be >= 1");
    const std::size_t want = mode == EnvMode::multi_param ? k : 1;
    if (theta_star.size() != want) {
      throw std::invalid_argument("EnvSpec: wrong number of parameter vectors");
    }
    for (const auto& th : theta_star) {
      if (th.size() != d) throw std::invalid_argument("EnvSpec: theta dimension");
      if (th.norm() > 1.0 + 1e-9) {
        throw std::invalid_argument("EnvSpec: |theta| must be <= 1");
      }
    }
    if (!(c_b > 0.0) || !(c_r > 0.0)) {
      throw std::invalid_argument("EnvSpec: bounds must be positive");
    }
    if (noise_kind == NoiseKind::bernoulli) {
      if (link.kind() != LinkKind::logistic) {
        throw std::invalid_argument("EnvSpec: bernoulli rewards need logistic");
      }
      if (c_r < 1.0) {
        throw std::invalid_argument("EnvSpec: bernoulli rewards need c_r >= 1");
      }
    }
    if (context_law == ContextLaw::pricing_grid) {
      if (mode != EnvMode::single_param) {
        throw std::invalid_argument("EnvSpec: pricing runs single-parameter");
      }
      if (price_grid.empty() || pricing_feature_dim < 1 ||
          d != 2 * pricing_feature_dim ||
          static_cast<int>(price_grid.size()) != k) {
        throw std::invalid_argument("EnvSpec: inconsistent pricing layout");
      }
    }
    if (context_law == ContextLaw::intercept_sphere && d < 2) {
      throw std::invalid_argument("EnvSpec: intercept_sphere needs d >= 2");
    }
  }
};

// One round of environment output: per-arm decision contexts (K rows in
// single-parameter mode, one shared row in multi-parameter mode), the
// ground-truth linear scores and objective values, and the best arm.
struct RoundSample {
  Eigen::MatrixXd contexts;
  Eigen::VectorXd true_scores;
  Eigen::VectorXd objective;
  int optimal_arm = 0;
  double optimal_value = 0.0;

  Eigen::VectorXd context_for_arm(int arm) const {
    return contexts.rows() == 1 ? contexts.row(0).transpose()
                                : contexts.row(arm).transpose();
  }
};

namespace detail {

inline Eigen::VectorXd unit_sphere(int d, Rng& rng) {
  Eigen::VectorXd x(d);
  double norm = 0.0;
  do {
    for (int i = 0; i < d; ++i) x[i] = rng.normal();
    norm = x.norm();
  } while (norm == 0.0);
  return x / norm;
}

inline Eigen::VectorXd draw_context(const EnvSpec& env, Rng& rng) {
  switch (env.context_law) {
    case ContextLaw::unit_sphere_uniform:
      return unit_sphere(env.d, rng);
    case ContextLaw::gaussian_isotropic: {
      Eigen::VectorXd x(env.d);
      const double scale = 1.0 / std::sqrt(static_cast<double>(env.d));
      for (int i = 0; i < env.d; ++i) x[i] = rng.normal(0.0, scale);
      const double norm = x.norm();
      if (norm > env.c_b) x *= env.c_b / norm;
      return x;
    }
    case ContextLaw::intercept_sphere: {
      // (1, z)/sqrt(2) with z uniform on the unit sphere of R^{d-1}; the
      // fixed first coordinate keeps arms comparable on every context,
      // which the separated margin preset relies on.
      Eigen::VectorXd x(env.d);
      x[0] = 1.0;
      if (env.d == 2) {
        x[1] = rng.bernoulli(0.5) ? 1.0 : -1.0;
      } else {
        x.tail(env.d - 1) = unit_sphere(env.d - 1, rng);
      }
      return x / std::sqrt(2.0);
    }
    case ContextLaw::pricing_grid:
      throw std::logic_error("draw_context: pricing handled in draw_round");
  }
  throw std::logic_error("draw_context: unknown context law");
}

inline Eigen::VectorXd pricing_base_features(const EnvSpec& env, Rng& rng) {
  if (env.pricing_table) {
    const auto rows = env.pricing_table->features.rows();
    auto idx = static_cast<Eigen::Index>(rng.uniform() * static_cast<double>(rows));
    if (idx >= rows) idx = rows - 1;
    return env.pricing_table->features.row(idx).transpose();
  }
  // Synthetic customers: intercept plus uniform feature draws.
  Eigen::VectorXd x(env.pricing_feature_dim);
  x[0] = 1.0;
  for (int i = 1; i < env.pricing_feature_dim; ++i) x[i] = rng.uniform();
  return x;
}

}  // namespace detail

inline RoundSample draw_round(const EnvSpec& env, Rng& rng) {
  RoundSample sample;
  sample.true_scores.resize(env.k);
  if (env.context_law == ContextLaw::pricing_grid) {
    const Eigen::VectorXd base = detail::pricing_base_features(env, rng);
    sample.contexts.resize(env.k, env.d);
    for (int a = 0; a < env.k; ++a) {
      sample.contexts.row(a).head(env.pricing_feature_dim) = base.transpose();
      sample.contexts.row(a).tail(env.pricing_feature_dim) =
          env.price_grid[a] * base.transpose();
      sample.true_scores[a] = sample.contexts.row(a).dot(env.theta_star[0]);
    }
  } else if (env.mode == EnvMode::single_param) {
    sample.contexts.resize(env.k, env.d);
    for (int a = 0; a < env.k; ++a) {
      sample.contexts.row(a) = detail::draw_context(env, rng).transpose();
      sample.true_scores[a] = sample.contexts.row(a).dot(env.theta_star[0]);
    }
  } else {
    sample.contexts.resize(1, env.d);
    sample.contexts.row(0) = detail::draw_context(env, rng).transpose();
    for (int a = 0; a < env.k; ++a) {
      sample.true_scores[a] = sample.contexts.row(0).dot(env.theta_star[a]);
    }
  }

  sample.objective.resize(env.k);
  for (int a = 0; a < env.k; ++a) {
    double value = env.link.eval(sample.true_scores[a]);
    if (env.context_law == ContextLaw::pricing_grid &&
        env.pricing_regret == PricingRegret::revenue) {
      value *= env.price_grid[a];
    }
    sample.objective[a] = value;
  }
  sample.optimal_arm = 0;
  for (int a = 1; a < env.k; ++a) {
    if (sample.objective[a] > sample.objective[sample.optimal_arm]) {
      sample.optimal_arm = a;
    }
  }
  sample.optimal_value = sample.objective[sample.optimal_arm];
  return sample;
}

// Realizes the random reward of `arm` under the chosen context. Identity
// link pairs with Gaussian noise truncated at +-3 sigma and the result is
// clipped to [-c_r, c_r]; logistic link pairs with a Bernoulli draw.
inline double realize_reward(const EnvSpec& env, const Eigen::VectorXd& context,
                             int arm, Rng& rng) {
  if (arm < 0 || arm >= env.k) {
    throw std::invalid_argument("realize_reward: arm out of range");
  }
  const double score = context.dot(env.theta_for_arm(arm));
  if (env.noise_kind == NoiseKind::bernoulli) {
    return rng.bernoulli(env.link.eval(score)) ? 1.0 : 0.0;
  }
  double noise = 0.0;
  if (env.sigma_noise > 0.0) {
    do {
      noise = rng.normal(0.0, env.sigma_noise);
    } while (std::abs(noise) > 3.0 * env.sigma_noise);
  }
  return std::clamp(env.link.eval(score) + noise, -env.c_r, env.c_r);
}

// Instantaneous regret of playing `chosen` in this round, measured on the
// ground-truth objective. Zero exactly when the chosen arm attains the max.
inline double instant_regret(const EnvSpec& env, const RoundSample& sample,
                             int chosen) {
  if (chosen < 0 || chosen >= env.k) {
    throw std::invalid_argument("instant_regret: arm out of range");
  }
  return sample.optimal_value - sample.objective[chosen];
}

// Logit-demand pricing environment: arm i posts price p_i, the decision
// context for arm i is (x, p_i * x), and the binary "apply" reward has
// success probability logistic((x, p_i*x)^T theta). Regret is measured on
// acceptance probability by default, or on expected revenue p_i * prob.
inline EnvSpec make_pricing_env(
    const Eigen::VectorXd& theta_star, const std::vector<double>& price_grid,
    int feature_dim, PricingRegret regret_mode = PricingRegret::acceptance,
    std::shared_ptr<const PricingTable> table = nullptr) {
  if (price_grid.empty()) {
    throw std::invalid_argument("make_pricing_env: empty price grid");
  }
  for (std::size_t i = 0; i < price_grid.size(); ++i) {
    if (price_grid[i] < 0.0 || price_grid[i] > 25000.0) {
      throw std::invalid_argument(
          "make_pricing_env: prices must lie in [0, 25000]");
    }
    if (i > 0 && !(price_grid[i] > price_grid[i - 1])) {
      throw std::invalid_argument(
          "make_pricing_env: price grid must be strictly increasing");
    }
  }
  if (feature_dim < 1 || theta_star.size() != 2 * feature_dim) {
    throw std::invalid_argument("make_pricing_env: theta must have size 2*m");
  }
  if (table && table->features.cols() != feature_dim) {
    throw std::invalid_argument("make_pricing_env: table width mismatch");
  }

  EnvSpec env;
  env.mode = EnvMode::single_param;
  env.d = 2 * feature_dim;
  env.k = static_cast<int>(price_grid.size());
  env.theta_star = {theta_star};
  env.link = LinkFunction::logistic();
  env.context_law = ContextLaw::pricing_grid;
  env.noise_kind = NoiseKind::bernoulli;
  env.c_r = 1.0;
  env.price_grid = price_grid;
  env.pricing_feature_dim = feature_dim;
  env.pricing_regret = regret_mode;
  env.pricing_table = std::move(table);
  env.name = "pricing";

  double base_bound = std::sqrt(static_cast<double>(feature_dim));
  if (env.pricing_table) {
    base_bound = 0.0;
    for (Eigen::Index r = 0; r < env.pricing_table->features.rows(); ++r) {
      base_bound = std::max(base_bound, env.pricing_table->features.row(r).norm());
    }
  }
  const double p_max = price_grid.back();
  env.c_b = base_bound * std::sqrt(1.0 + p_max * p_max);
  env.validate();
  return env;
}

// ---------------------------------------------------------------------------
// Presets. The experiment presets are fixed, documented instances; the
// harness applies config overrides on top of them.
// ---------------------------------------------------------------------------

inline Eigen::VectorXd random_unit_vector(int d, std::uint64_t seed) {
  Rng rng(mix_seed(seed, 0));
  return detail::unit_sphere(d, rng);
}

// Single-parameter linear bandit: uniform unit-sphere contexts, identity
// link, truncated Gaussian reward noise.
inline EnvSpec single_default_env(int d = 5, int k = 10,
                                  double sigma_noise = 0.1,
                                  std::uint64_t theta_seed = 1) {
  EnvSpec env;
  env.mode = EnvMode::single_param;
  env.d = d;
  env.k = k;
  env.theta_star = {random_unit_vector(d, theta_seed)};
  env.link = LinkFunction::identity();
  env.context_law = ContextLaw::unit_sphere_uniform;
  env.noise_kind = NoiseKind::truncated_gaussian;
  env.sigma_noise = sigma_noise;
  env.c_b = 1.0;
  env.c_r = 1.0 + 3.0 * sigma_noise;
  env.name = "single_default";
  env.validate();
  return env;
}

// Single-parameter logistic bandit with binary rewards.
inline EnvSpec single_logistic_env(int d = 5, int k = 10,
                                   std::uint64_t theta_seed = 1) {
  EnvSpec env;
  env.mode = EnvMode::single_param;
  env.d = d;
  env.k = k;
  env.theta_star = {random_unit_vector(d, theta_seed)};
  env.link = LinkFunction::logistic();
  env.context_law = ContextLaw::unit_sphere_uniform;
  env.noise_kind = NoiseKind::bernoulli;
  env.c_b = 1.0;
  env.c_r = 1.0;
  env.name = "single_logistic";
  env.validate();
  return env;
}

// Three-arm multi-parameter preset with a margin: arms 1/2 split the
// context space and arm 3 trails the better of them by at least
// margin_gap = 0.65/sqrt(2) on every context of the intercept_sphere law.
// Pairwise parameter distances are >= 0.8.
inline EnvSpec multi_separated_env(int d = 5, double sigma_noise = 0.1) {
  if (d < 2) throw std::invalid_argument("multi_separated_env: d must be >= 2");
  EnvSpec env;
  env.mode = EnvMode::multi_param;
  env.d = d;
  env.k = 3;
  Eigen::VectorXd t1 = Eigen::VectorXd::Zero(d);
  Eigen::VectorXd t2 = Eigen::VectorXd::Zero(d);
  Eigen::VectorXd t3 = Eigen::VectorXd::Zero(d);
  t1[0] = 0.5;
  t1[1] = 0.5;
  t2[0] = 0.5;
  t2[1] = -0.5;
  t3[0] = -0.15;
  env.theta_star = {t1, t2, t3};
  env.link = LinkFunction::identity();
  env.context_law = ContextLaw::intercept_sphere;
  env.noise_kind = NoiseKind::truncated_gaussian;
  env.sigma_noise = sigma_noise;
  env.c_b = 1.0;
  env.c_r = 1.0 + 3.0 * sigma_noise;
  env.suboptimal_arm = 2;
  env.margin_gap = 0.65 / std::sqrt(2.0);
  env.name = "multi_separated";
  env.validate();
  return env;
}

// Multi-parameter preset with seeded random arms and no margin guarantee.
inline EnvSpec multi_hard_env(int d = 5, int k = 5, double sigma_noise = 0.1,
                              std::uint64_t theta_seed = 1) {
  EnvSpec env;
  env.mode = EnvMode::multi_param;
  env.d = d;
  env.k = k;
  Rng rng(mix_seed(theta_seed, 7));
  env.theta_star.reserve(k);
  for (int a = 0; a < k; ++a) {
    const double scale = 0.5 + 0.5 * rng.uniform();
    env.theta_star.push_back(scale * detail::unit_sphere(d, rng));
  }
  env.link = LinkFunction::identity();
  env.context_law = ContextLaw::unit_sphere_uniform;
  env.noise_kind = NoiseKind::truncated_gaussian;
  env.sigma_noise = sigma_noise;
  env.c_b = 1.0;
  env.c_r = 1.0 + 3.0 * sigma_noise;
  env.name = "multi_hard";
  env.validate();
  return env;
}

inline std::vector<double> uniform_price_grid(int options = 25,
                                              double lo = 0.0,
                                              double hi = 25000.0) {
  if (options < 2) throw std::invalid_argument("uniform_price_grid: need >= 2");
  std::vector<double> grid(options);
  for (int i = 0; i < options; ++i) {
    grid[i] = lo + (hi - lo) * static_cast<double>(i) / (options - 1);
  }
  return grid;
}

// Synthetic pricing preset: 3 base features (intercept + two uniforms),
// 25 uniformly spaced prices on [0, 25000], and a parameter with a
// negative price coefficient so acceptance decays with price.
inline EnvSpec pricing_default_env(
    PricingRegret regret_mode = PricingRegret::acceptance,
    std::shared_ptr<const PricingTable> table = nullptr) {
  const int m = table ? static_cast<int>(table->features.cols()) : 3;
  Eigen::VectorXd theta = Eigen::VectorXd::Zero(2 * m);
  theta[0] = 0.6;
  if (m > 1) theta[1] = 0.4;
  if (m > 2) theta[2] = -0.4;
  theta[m] = -1.8 / 25000.0;
  EnvSpec env = make_pricing_env(theta, uniform_price_grid(), m, regret_mode,
                                 std::move(table));
  env.name = "pricing_default";
  return env;
}

}  // namespace ldpb

#endif  // LDPB_ENV_HPP_
