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

#include "noisytree/fusion.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "noisytree/error.hpp"

namespace noisytree {

std::uint8_t majority_decide(std::span<const std::uint8_t> votes) {
  if (votes.size() % 2 == 0) {
    throw Error(ErrorCode::EvenVoteCount,
                "majority voting needs an odd number of votes, got " +
                    std::to_string(votes.size()));
  }
  std::size_t ones = 0;
  for (std::uint8_t v : votes) ones += v != 0;
  return ones * 2 > votes.size() ? 1 : 0;
}

namespace {

void check_worker_error(double p) {
  if (!(p > 0.0 && p < 0.5)) {
    throw Error(ErrorCode::ErrorProbOutOfRange,
                "worker error probability must lie in (0, 0.5), got " +
                    std::to_string(p));
  }
}

constexpr int kDirectSumLimit = 500;

// Modified Lentz evaluation of the continued fraction for I_x(a, b).
double beta_continued_fraction(double x, double a, double b) {
  constexpr int kMaxIterations = 10000;
  constexpr double kEps = 1e-16;
  constexpr double kTiny = 1e-300;

  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIterations; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < kEps) return h;
  }
  throw Error(ErrorCode::DomainError,
              "incomplete beta continued fraction did not converge");
}

}  // namespace

double reg_incomplete_beta(double x, double a, double b) {
  if (!(x >= 0.0 && x <= 1.0) || !(a > 0.0) || !(b > 0.0)) {
    throw Error(ErrorCode::DomainError,
                "incomplete beta needs x in [0, 1] and a, b > 0");
  }
  if (x == 0.0) return 0.0;
  if (x == 1.0) return 1.0;
  // log of x^a (1-x)^b / B(a, b)
  const double log_front = std::lgamma(a + b) - std::lgamma(a) -
                           std::lgamma(b) + a * std::log(x) +
                           b * std::log1p(-x);
  const double front = std::exp(log_front);
  if (x < (a + 1.0) / (a + b + 2.0)) {
    return front * beta_continued_fraction(x, a, b) / a;
  }
  return 1.0 - front * beta_continued_fraction(1.0 - x, b, a) / b;
}

double group_error(int k, double worker_error) {
  check_worker_error(worker_error);
  if (k < 0) {
    throw Error(ErrorCode::DomainError, "group size parameter k must be >= 0");
  }
  if (k > kDirectSumLimit) {
    return reg_incomplete_beta(worker_error, k + 1.0, k + 1.0);
  }
  // P(at most k of n = 2k+1 workers correct)
  //   = sum_{j=0}^{k} C(n, j) q^j p^(n-j),  q = 1 - p.
  // Extended precision keeps p^n clear of underflow for n up to 1001.
  const int n = 2 * k + 1;
  const long double p = worker_error;
  const long double q = 1.0L - p;
  long double coefficient = 1.0L;  // C(n, j)
  long double total = 0.0L;
  for (int j = 0; j <= k; ++j) {
    total += coefficient * std::pow(q, j) * std::pow(p, n - j);
    coefficient = coefficient * (n - j) / (j + 1);
  }
  return static_cast<double>(total);
}

MonotonicityReport group_error_monotonicity(double worker_error, int k_max) {
  check_worker_error(worker_error);
  MonotonicityReport report;
  report.worker_error = worker_error;
  for (int k = 0; k <= k_max + 1; ++k) {
    report.sequence.push_back(group_error(k, worker_error));
  }
  double previous_step = std::numeric_limits<double>::infinity();
  for (int k = 0; k <= k_max; ++k) {
    const double step = report.sequence[k] - report.sequence[k + 1];
    if (!(step > 0.0)) report.strictly_decreasing = false;
    if (std::abs(step) > previous_step) report.diminishing_steps = false;
    previous_step = std::abs(step);
  }
  return report;
}

}  // namespace noisytree
