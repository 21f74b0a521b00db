// Copyright 2026 The Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Majority-vote fusion of an odd group of workers and the group error law
// f_e(k) = I_{p_e}(k + 1, k + 1).

#ifndef NOISYTREE_FUSION_HPP_
#define NOISYTREE_FUSION_HPP_

#include <cstdint>
#include <span>
#include <vector>

namespace noisytree {

// Majority bit of an odd, non-empty vote list. Throws EvenVoteCount.
std::uint8_t majority_decide(std::span<const std::uint8_t> votes);

// Probability that a majority of 2k+1 independent workers with error p_e is
// wrong. Exact binomial summation for k <= 500, incomplete beta above.
double group_error(int k, double worker_error);

// Regularized incomplete beta I_x(a, b), accurate to about 1e-13 absolute.
double reg_incomplete_beta(double x, double a, double b);

struct MonotonicityReport {
  double worker_error = 0.0;
  std::vector<double> sequence;  // f_e(0) .. f_e(k_max + 1)
  bool strictly_decreasing = true;
  bool diminishing_steps = true;
  bool pass() const { return strictly_decreasing && diminishing_steps; }
};

// Checks for k = 0..k_max that f_e(k+1) < f_e(k) and that |f_e(k+1) - f_e(k)|
// never grows.
MonotonicityReport group_error_monotonicity(double worker_error, int k_max);

}  // namespace noisytree

#endif  // NOISYTREE_FUSION_HPP_
