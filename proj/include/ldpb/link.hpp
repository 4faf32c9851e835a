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

#ifndef LDPB_LINK_HPP_
#define LDPB_LINK_HPP_

#include <cmath>
#include <stdexcept>
#include <string>

namespace ldpb {

enum class LinkKind { identity, logistic };

// Monotone link from linear score to expected reward. Identity gives the
// linear bandit; logistic gives binary-reward GLM bandits. Both are
// Lipschitz with strictly positive derivative, which is what the greedy
// arm selection and the gradient-based estimator rely on.
class LinkFunction {
 public:
  static LinkFunction identity() { return LinkFunction(LinkKind::identity); }
  static LinkFunction logistic() { return LinkFunction(LinkKind::logistic); }

  static LinkFunction from_name(const std::string& name) {
    if (name == "identity") return identity();
    if (name == "logistic") return logistic();
    throw std::invalid_argument("unknown link function: " + name);
  }

  LinkKind kind() const { return kind_; }

  const char* name() const {
    return kind_ == LinkKind::identity ? "identity" : "logistic";
  }

  double eval(double s) const {
    if (kind_ == LinkKind::identity) return s;
    return 1.0 / (1.0 + std::exp(-s));
  }

  double deriv(double s) const {
    if (kind_ == LinkKind::identity) return 1.0;
    const double mu = eval(s);
    return mu * (1.0 - mu);
  }

  // Lipschitz constant over the whole line.
  double lipschitz() const {
    return kind_ == LinkKind::identity ? 1.0 : 0.25;
  }

  // Lower bound on deriv over [-score_bound, score_bound]. The logistic
  // derivative is minimized at the interval endpoints.
  double curvature_floor(double score_bound) const {
    if (kind_ == LinkKind::identity) return 1.0;
    return deriv(std::abs(score_bound));
  }

 private:
  explicit LinkFunction(LinkKind kind) : kind_(kind) {}
  LinkKind kind_;
};

}  // namespace ldpb

#endif  // LDPB_LINK_HPP_
