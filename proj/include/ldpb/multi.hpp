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

#ifndef LDPB_MULTI_HPP_
#define LDPB_MULTI_HPP_

#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <type_traits>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "ldpb/env.hpp"
#include "ldpb/estimators.hpp"
#include "ldpb/single.hpp"
#include "ldpb/trace.hpp"

namespace ldpb {

// Multi-parameter run configuration. The configured budget is the total
// per-round guarantee; each mechanism invocation runs at half budget,
// which suffices because at most one of the K released observations
// depends on the user's data.
struct MultiAlgoConfig {
  EstimatorKind estimator_kind = EstimatorKind::private_ols;
  PrivacyBudget budget;
  std::int64_t s0 = 0;   // warm-up rounds per arm; 0 picks the default
  double h = 0.0;        // elimination gap; 0 picks the env's known gap
  double sgd_c0 = 0.0;   // 0 picks the default c0 = d
  int k_opt_guess = 0;   // 0 picks K
  std::int64_t horizon = 0;
  double alpha = 0.05;
  bool noiseless = false;
  bool project_unit_ball = false;
  // Warm-up stepsize denominator: per-arm update count by default, or the
  // cyclic round index (t mod K)+1 when set.
  bool warmup_stepsize_cyclic = false;
  std::optional<double> c_tilde_override;
};

// Default warm-up length per arm: ceil(25*K*(d + ln(T*K/alpha))/eps^2),
// capped at T/(4K) so the warm-up never exceeds a quarter of the horizon.
inline std::int64_t default_warmup_length(int k, int d, std::int64_t horizon,
                                          double alpha, double epsilon) {
  if (k < 1 || d < 1 || horizon < 1 || !(alpha > 0.0) || !(epsilon > 0.0)) {
    throw std::invalid_argument("default_warmup_length: invalid arguments");
  }
  const double raw = 25.0 * k *
                     (d + std::log(static_cast<double>(horizon) * k / alpha)) /
                     (epsilon * epsilon);
  const std::int64_t cap = std::max<std::int64_t>(horizon / (4 * k), 1);
  return std::max<std::int64_t>(
      1, std::min<std::int64_t>(static_cast<std::int64_t>(std::ceil(raw)), cap));
}

// Round-robin arm for warm-up round t (arms numbered 1..K).
inline int warmup_arm(std::int64_t t, int k) {
  if (t < 1 || k < 1) throw std::invalid_argument("warmup_arm: bad arguments");
  return static_cast<int>(t % k) + 1;
}

// Arms whose warm-up linear score is within h/2 of the best warm-up score.
// Always contains the warm-up argmax, hence never empty.
inline std::vector<int> eliminate(const Eigen::VectorXd& context,
                                  const std::vector<Eigen::VectorXd>& snapshot,
                                  double h) {
  if (!(h > 0.0)) throw std::invalid_argument("eliminate: h must be positive");
  if (snapshot.empty()) throw std::invalid_argument("eliminate: empty snapshot");
  std::vector<double> scores(snapshot.size());
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t a = 0; a < snapshot.size(); ++a) {
    scores[a] = context.dot(snapshot[a]);
    best = std::max(best, scores[a]);
  }
  std::vector<int> survivors;
  for (std::size_t a = 0; a < snapshot.size(); ++a) {
    if (scores[a] > best - h / 2.0) survivors.push_back(static_cast<int>(a));
  }
  return survivors;
}

// Builds the K per-arm observations of one main-phase round. The chosen
// arm's observation is built from the real (x, r); every other arm's
// builder call receives literally the zero pair, so its output law does
// not depend on (x, r) or on which arm was chosen. Each observation uses
// its own child stream of `rng`, forked in arm order.
template <class Builder>
auto synthetic_observations(const Eigen::VectorXd& x, double r, int chosen,
                            int k, Builder&& build, Rng& rng) {
  using Obs = std::invoke_result_t<Builder&, const Eigen::VectorXd&, double,
                                   int, Rng&>;
  if (chosen < 0 || chosen >= k) {
    throw std::invalid_argument("synthetic_observations: arm out of range");
  }
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(x.size());
  std::vector<Obs> out;
  out.reserve(k);
  for (int arm = 0; arm < k; ++arm) {
    Rng sub = rng.fork();
    if (arm == chosen) {
      out.push_back(build(x, r, arm, sub));
    } else {
      out.push_back(build(zero, 0.0, arm, sub));
    }
  }
  return out;
}

// Stepsize schedule of the multi-parameter SGD estimator. During warm-up
// each arm runs its own 1/t schedule over its update count (the cyclic
// variant uses (t mod K)+1 instead); in the main phase all arms share
// eta = c0 * K_opt_guess / (t - (K-1)*s0).
inline double multi_sgd_stepsize(std::int64_t t, int k, std::int64_t s0,
                                 int k_opt_guess, double c0,
                                 std::int64_t per_arm_update_count,
                                 bool cyclic_warmup = false) {
  if (t < 1) throw std::invalid_argument("multi_sgd_stepsize: t must be >= 1");
  if (t <= static_cast<std::int64_t>(k) * s0) {
    const double denom = cyclic_warmup
                             ? static_cast<double>(t % k + 1)
                             : static_cast<double>(per_arm_update_count);
    return c0 / denom;
  }
  return c0 * k_opt_guess /
         static_cast<double>(t - static_cast<std::int64_t>(k - 1) * s0);
}

// Server state of a multi-parameter run: one estimator per arm, the
// broadcast estimates, and the warm-up snapshot frozen at t = K*s0.
struct MultiRunState {
  std::int64_t t = 0;
  double cum_regret = 0.0;
  std::int64_t s0 = 0;
  double h = 0.0;
  std::vector<OlsState> ols;
  std::vector<SgdState> sgd;
  std::vector<Eigen::VectorXd> theta_hat;
  std::vector<Eigen::VectorXd> warmup_snapshot;
  bool snapshot_frozen = false;
  double sigma_base = 0.0;
  BallMechanismParams ball;
  std::vector<std::int64_t> main_phase_plays;
  std::int64_t solve_failures = 0;
};

inline MultiRunState make_multi_state(const MultiAlgoConfig& config,
                                      const EnvSpec& env) {
  if (env.mode != EnvMode::multi_param) {
    throw std::invalid_argument("run_multi: environment is single-parameter");
  }
  if (config.horizon < 0) throw std::invalid_argument("MultiAlgoConfig: T < 0");
  if (!(config.alpha > 0.0) || !(config.alpha < 1.0)) {
    throw std::invalid_argument("MultiAlgoConfig: alpha must be in (0,1)");
  }
  if (!config.noiseless) {
    PrivacyBudget::make(config.budget.epsilon, config.budget.delta);
    if (config.estimator_kind == EstimatorKind::private_ols &&
        !(config.budget.delta > 0.0)) {
      throw std::invalid_argument(
          "MultiAlgoConfig: Gaussian mechanism requires delta > 0");
    }
  }

  MultiRunState state;
  state.s0 = config.s0 > 0
                 ? config.s0
                 : default_warmup_length(env.k, env.d,
                                         std::max<std::int64_t>(config.horizon, 1),
                                         config.alpha,
                                         config.noiseless ? 1.0
                                                          : config.budget.epsilon);
  if (static_cast<std::int64_t>(env.k) * state.s0 > config.horizon) {
    throw std::invalid_argument("MultiAlgoConfig: K*s0 exceeds the horizon");
  }
  state.h = config.h > 0.0 ? config.h : env.margin_gap;
  if (!(state.h > 0.0)) {
    throw std::invalid_argument(
        "MultiAlgoConfig: no elimination gap h configured and the "
        "environment does not provide one");
  }

  state.theta_hat.assign(env.k, Eigen::VectorXd::Zero(env.d));
  state.main_phase_plays.assign(env.k, 0);
  if (config.estimator_kind == EstimatorKind::private_ols) {
    state.sigma_base =
        config.noiseless ? 0.0 : ols_sigma_base(config.budget.halved());
    const double c_tilde =
        config.c_tilde_override
            ? *config.c_tilde_override
            : default_c_tilde(state.sigma_base, env.d,
                              std::max<std::int64_t>(config.horizon, 1) * env.k,
                              config.alpha);
    state.ols.assign(env.k, OlsState::zero(env.d, c_tilde));
  } else {
    const double c0 = config.sgd_c0 > 0.0 ? config.sgd_c0 : env.d;
    state.sgd.assign(env.k,
                     SgdState::zero(env.d, c0, config.project_unit_ball));
    if (!config.noiseless) {
      state.ball = BallMechanismParams::make(config.budget.epsilon / 2.0,
                                             env.d, 2.0 * env.c_r * env.c_b);
    }
  }
  return state;
}

namespace detail {

inline void multi_refresh_ols_estimate(MultiRunState& state, int arm) {
  try {
    state.theta_hat[arm] = ols_point_estimate(state.ols[arm]);
  } catch (const std::runtime_error&) {
    state.solve_failures += 1;
  }
}

}  // namespace detail

// One round of the multi-parameter protocol. Warm-up rounds play the
// round-robin arm and update only that arm's estimator; the snapshot of
// all estimates is frozen once at t = K*s0. Main-phase rounds eliminate
// against the snapshot, play greedily among the survivors, and update all
// K estimators from synthetic observations.
inline RoundRecord multi_round(MultiRunState& state, const EnvSpec& env,
                               const MultiAlgoConfig& config, Rng& rng) {
  state.t += 1;
  const std::int64_t t = state.t;
  const std::int64_t warmup_end = static_cast<std::int64_t>(env.k) * state.s0;
  const RoundSample sample = draw_round(env, rng);
  const Eigen::VectorXd x = sample.context_for_arm(0);

  int chosen = 0;
  if (t <= warmup_end) {
    chosen = warmup_arm(t, env.k) - 1;
    const double r = realize_reward(env, x, chosen, rng);
    if (config.estimator_kind == EstimatorKind::private_ols) {
      const OlsObservation obs =
          make_ols_observation(x, r, state.sigma_base, env.c_b, env.c_r, rng);
      ols_ingest(state.ols[chosen], obs);
      detail::multi_refresh_ols_estimate(state, chosen);
    } else {
      SgdState& arm_state = state.sgd[chosen];
      const Eigen::VectorXd z =
          make_sgd_observation(x, r, arm_state.theta_hat, env.link, state.ball,
                               rng, config.noiseless);
      const double eta = multi_sgd_stepsize(
          t, env.k, state.s0, 0, arm_state.c0, arm_state.step_count + 1,
          config.warmup_stepsize_cyclic);
      sgd_step(arm_state, z, eta);
      state.theta_hat[chosen] = arm_state.theta_hat;
    }
    if (t == warmup_end) {
      state.warmup_snapshot = state.theta_hat;
      state.snapshot_frozen = true;
    }
  } else {
    const std::vector<int> survivors =
        eliminate(x, state.warmup_snapshot, state.h);
    chosen = survivors.front();
    double best_score = x.dot(state.theta_hat[chosen]);
    for (const int arm : survivors) {
      const double score = x.dot(state.theta_hat[arm]);
      if (score > best_score) {
        best_score = score;
        chosen = arm;
      }
    }
    const double r = realize_reward(env, x, chosen, rng);
    state.main_phase_plays[chosen] += 1;

    if (config.estimator_kind == EstimatorKind::private_ols) {
      auto obs_list = synthetic_observations(
          x, r, chosen, env.k,
          [&](const Eigen::VectorXd& xv, double rv, int /*arm*/, Rng& sub) {
            return make_ols_observation(xv, rv, state.sigma_base, env.c_b,
                                        env.c_r, sub);
          },
          rng);
      for (int arm = 0; arm < env.k; ++arm) {
        ols_ingest(state.ols[arm], obs_list[arm]);
        detail::multi_refresh_ols_estimate(state, arm);
      }
    } else {
      const int k_opt = config.k_opt_guess > 0 ? config.k_opt_guess : env.k;
      auto obs_list = synthetic_observations(
          x, r, chosen, env.k,
          [&](const Eigen::VectorXd& xv, double rv, int arm, Rng& sub) {
            return make_sgd_observation(xv, rv, state.sgd[arm].theta_hat,
                                        env.link, state.ball, sub,
                                        config.noiseless);
          },
          rng);
      for (int arm = 0; arm < env.k; ++arm) {
        SgdState& arm_state = state.sgd[arm];
        const double eta =
            multi_sgd_stepsize(t, env.k, state.s0, k_opt, arm_state.c0,
                               arm_state.step_count + 1,
                               config.warmup_stepsize_cyclic);
        sgd_step(arm_state, obs_list[arm], eta);
        state.theta_hat[arm] = arm_state.theta_hat;
      }
    }
  }

  RoundRecord record;
  record.t = t;
  record.chosen_arm = chosen;
  record.instant_regret = instant_regret(env, sample, chosen);
  state.cum_regret += record.instant_regret;
  record.cum_regret = state.cum_regret;
  return record;
}

struct MultiRunResult {
  RegretTrace trace;
  std::vector<std::int64_t> main_phase_plays;
  std::int64_t resolved_s0 = 0;
};

// Full multi-parameter run. OLS noise is calibrated at (eps/2, delta/2)
// and the SGD ball mechanism at eps/2.
inline MultiRunResult run_multi(const MultiAlgoConfig& config,
                                const EnvSpec& env, std::uint64_t seed,
                                std::int64_t log_stride = 1) {
  if (log_stride < 1) throw std::invalid_argument("run_multi: log_stride");
  MultiRunState state = make_multi_state(config, env);
  Rng rng(seed);
  MultiRunResult result;
  result.trace.meta = make_trace_meta(
      env, std::string("multi_") + estimator_name(config.estimator_kind),
      config.budget, config.noiseless, seed);
  for (std::int64_t t = 1; t <= config.horizon; ++t) {
    const RoundRecord record = multi_round(state, env, config, rng);
    if (t % log_stride == 0 || t == config.horizon) {
      result.trace.points.emplace_back(t, record.cum_regret);
    }
  }
  result.main_phase_plays = state.main_phase_plays;
  result.resolved_s0 = state.s0;
  return result;
}

}  // namespace ldpb

#endif  // LDPB_MULTI_HPP_
