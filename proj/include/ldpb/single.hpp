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

#ifndef LDPB_SINGLE_HPP_
#define LDPB_SINGLE_HPP_

#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>

#include <Eigen/Dense>

#include "ldpb/env.hpp"
#include "ldpb/estimators.hpp"
#include "ldpb/trace.hpp"

namespace ldpb {

enum class EstimatorKind { private_ols, private_sgd };

inline const char* estimator_name(EstimatorKind kind) {
  return kind == EstimatorKind::private_ols ? "ols" : "sgd";
}

// Greedy single-parameter run configuration. private_ols releases via the
// Gaussian mechanism and needs delta > 0; private_sgd releases via the
// l2-ball mechanism and spends epsilon only.
struct SingleAlgoConfig {
  EstimatorKind estimator_kind = EstimatorKind::private_ols;
  PrivacyBudget budget;
  std::int64_t horizon = 0;
  std::optional<double> c_tilde_override;
  double sgd_c0 = 0.0;  // 0 picks the default c0 = d
  double alpha = 0.05;
  bool noiseless = false;
  bool project_unit_ball = false;

  void validate() const {
    if (horizon < 0) throw std::invalid_argument("SingleAlgoConfig: T < 0");
    if (!(alpha > 0.0) || !(alpha < 1.0)) {
      throw std::invalid_argument("SingleAlgoConfig: alpha must be in (0,1)");
    }
    if (!noiseless) {
      PrivacyBudget::make(budget.epsilon, budget.delta);
      if (estimator_kind == EstimatorKind::private_ols &&
          !(budget.delta > 0.0)) {
        throw std::invalid_argument(
            "SingleAlgoConfig: Gaussian mechanism requires delta > 0");
      }
    }
  }
};

struct RoundRecord {
  std::int64_t t = 0;
  int chosen_arm = 0;
  double instant_regret = 0.0;
  double cum_regret = 0.0;
  std::optional<double> estimate_error;
};

// argmax_a of x_a^T theta_hat with lowest-index tie-break. The link is
// monotone increasing, so maximizing the linear score and maximizing the
// linked reward select the same arm.
inline int select_arm_greedy(const Eigen::VectorXd& theta_hat,
                             const Eigen::MatrixXd& contexts,
                             const LinkFunction& /*link*/) {
  if (!contexts.allFinite() || !theta_hat.allFinite()) {
    throw std::invalid_argument("select_arm_greedy: non-finite input");
  }
  const Eigen::VectorXd scores = contexts * theta_hat;
  int best = 0;
  for (int a = 1; a < scores.size(); ++a) {
    if (scores[a] > scores[best]) best = a;
  }
  return best;
}

// Mutable state of one single-parameter run. theta_hat is the broadcast
// estimate theta_{t-1} at the start of round t.
struct SingleRunState {
  std::int64_t t = 0;
  double cum_regret = 0.0;
  Eigen::VectorXd theta_hat;
  OlsState ols;
  SgdState sgd;
  double sigma_base = 0.0;
  BallMechanismParams ball;
  std::int64_t solve_failures = 0;
};

inline SingleRunState make_single_state(const SingleAlgoConfig& config,
                                        const EnvSpec& env) {
  config.validate();
  if (env.mode != EnvMode::single_param) {
    throw std::invalid_argument("run_single: environment is multi-parameter");
  }
  SingleRunState state;
  state.theta_hat = Eigen::VectorXd::Zero(env.d);
  if (config.estimator_kind == EstimatorKind::private_ols) {
    state.sigma_base = config.noiseless ? 0.0 : ols_sigma_base(config.budget);
    const double c_tilde =
        config.c_tilde_override
            ? *config.c_tilde_override
            : default_c_tilde(state.sigma_base, env.d,
                              std::max<std::int64_t>(config.horizon, 1),
                              config.alpha);
    state.ols = OlsState::zero(env.d, c_tilde);
  } else {
    const double c0 = config.sgd_c0 > 0.0 ? config.sgd_c0 : env.d;
    state.sgd = SgdState::zero(env.d, c0, config.project_unit_ball);
    if (!config.noiseless) {
      state.ball = BallMechanismParams::make(config.budget.epsilon, env.d,
                                             2.0 * env.c_r * env.c_b);
    }
  }
  return state;
}

// One protocol round: draw contexts, select greedily under the broadcast
// estimate, realize the reward, build the private observation on the user
// side, and update the server state. The only data crossing from user to
// server is the private observation; the server update functions
// (ols_ingest / sgd_step) admit nothing else.
inline RoundRecord single_round(SingleRunState& state, const EnvSpec& env,
                                const SingleAlgoConfig& config, Rng& rng) {
  state.t += 1;
  const RoundSample sample = draw_round(env, rng);
  const int chosen = select_arm_greedy(state.theta_hat, sample.contexts,
                                       env.link);
  const Eigen::VectorXd x = sample.context_for_arm(chosen);
  const double r = realize_reward(env, x, chosen, rng);

  if (config.estimator_kind == EstimatorKind::private_ols) {
    const OlsObservation obs =
        make_ols_observation(x, r, state.sigma_base, env.c_b, env.c_r, rng);
    ols_ingest(state.ols, obs);
    try {
      state.theta_hat = ols_point_estimate(state.ols);
    } catch (const std::runtime_error&) {
      // Pathological draw: keep the previous estimate for this round.
      state.solve_failures += 1;
    }
  } else {
    const Eigen::VectorXd z =
        config.noiseless
            ? make_sgd_observation(x, r, state.sgd.theta_hat, env.link,
                                   BallMechanismParams{}, rng, true)
            : make_sgd_observation(x, r, state.sgd.theta_hat, env.link,
                                   state.ball, rng, false);
    const double eta = state.sgd.c0 / static_cast<double>(state.t);
    sgd_step(state.sgd, z, eta);
    state.theta_hat = state.sgd.theta_hat;
  }

  RoundRecord record;
  record.t = state.t;
  record.chosen_arm = chosen;
  record.instant_regret = instant_regret(env, sample, chosen);
  state.cum_regret += record.instant_regret;
  record.cum_regret = state.cum_regret;
  record.estimate_error = (state.theta_hat - env.theta_star[0]).norm();
  return record;
}

inline TraceMeta make_trace_meta(const EnvSpec& env, const std::string& algo,
                                 const PrivacyBudget& budget, bool noiseless,
                                 std::uint64_t seed) {
  TraceMeta meta;
  meta.env = env.name.empty() ? "custom" : env.name;
  meta.algo = algo;
  meta.epsilon =
      noiseless ? std::numeric_limits<double>::infinity() : budget.epsilon;
  meta.delta = noiseless ? 0.0 : budget.delta;
  meta.seed = seed;
  return meta;
}

// Full single-parameter run. Deterministic given the seed. Cumulative
// regret is logged every log_stride rounds and always at t = T.
inline RegretTrace run_single(const SingleAlgoConfig& config, const EnvSpec& env,
                              std::uint64_t seed, std::int64_t log_stride = 1) {
  if (log_stride < 1) throw std::invalid_argument("run_single: log_stride");
  SingleRunState state = make_single_state(config, env);
  Rng rng(seed);
  RegretTrace trace;
  trace.meta = make_trace_meta(
      env,
      std::string("single_") + estimator_name(config.estimator_kind),
      config.budget, config.noiseless, seed);
  for (std::int64_t t = 1; t <= config.horizon; ++t) {
    const RoundRecord record = single_round(state, env, config, rng);
    if (t % log_stride == 0 || t == config.horizon) {
      trace.points.emplace_back(t, record.cum_regret);
    }
  }
  return trace;
}

}  // namespace ldpb

#endif  // LDPB_SINGLE_HPP_
