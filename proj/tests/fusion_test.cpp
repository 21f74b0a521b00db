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

#include <gtest/gtest.h>

#include <boost/math/special_functions/beta.hpp>
#include <cstdint>
#include <vector>

#include "noisytree/error.hpp"
#include "noisytree/fusion.hpp"
#include "oracles.hpp"

namespace noisytree {
namespace {

using testing::incomplete_beta_simpson;
using testing::majority_error_enumeration;

TEST(MajorityDecide, Votes) {
  const std::vector<std::uint8_t> a{1, 0, 1};
  const std::vector<std::uint8_t> b{0, 0, 1, 1, 0};
  const std::vector<std::uint8_t> single{1};
  EXPECT_EQ(majority_decide(a), 1);
  EXPECT_EQ(majority_decide(b), 0);
  EXPECT_EQ(majority_decide(single), 1);
  const std::vector<std::uint8_t> even{1, 0};
  EXPECT_THROW(majority_decide(even), Error);
  EXPECT_THROW(majority_decide(std::vector<std::uint8_t>{}), Error);
}

TEST(GroupError, WorkedValues) {
  EXPECT_DOUBLE_EQ(group_error(0, 0.2), 0.2);
  EXPECT_NEAR(group_error(1, 0.2), 0.104, 1e-15);
  EXPECT_NEAR(group_error(2, 0.2), 0.05792, 1e-15);
}

TEST(GroupError, MatchesVoteEnumeration) {
  for (double p : {0.01, 0.1, 0.2, 0.3, 0.45, 0.499}) {
    for (int k = 0; k <= 8; ++k) {
      EXPECT_NEAR(group_error(k, p), majority_error_enumeration(k, p), 1e-14)
          << "p=" << p << " k=" << k;
    }
  }
}

TEST(GroupError, Domain) {
  EXPECT_THROW(group_error(1, 0.0), Error);
  EXPECT_THROW(group_error(1, 0.5), Error);
  EXPECT_THROW(group_error(1, 0.7), Error);
  EXPECT_THROW(group_error(-1, 0.2), Error);
}

TEST(GroupError, LargeGroupsUseIncompleteBeta) {
  for (double p : {0.3, 0.45, 0.49}) {
    for (int k : {450, 500, 501, 800, 2000}) {
      const double reference =
          boost::math::ibeta(k + 1.0, k + 1.0, p);
      EXPECT_NEAR(group_error(k, p), reference,
                  1e-10 * std::max(reference, 1e-300))
          << "p=" << p << " k=" << k;
    }
  }
}

TEST(IncompleteBeta, AgainstBoost) {
  for (double x : {0.001, 0.1, 0.3, 0.5, 0.7, 0.99}) {
    for (double a : {0.5, 1.0, 2.5, 10.0, 101.0}) {
      for (double b : {0.5, 1.0, 3.0, 10.0, 101.0}) {
        EXPECT_NEAR(reg_incomplete_beta(x, a, b), boost::math::ibeta(a, b, x),
                    1e-12)
            << x << " " << a << " " << b;
      }
    }
  }
}

TEST(IncompleteBeta, AgainstQuadrature) {
  for (double x : {0.05, 0.2, 0.4, 0.6}) {
    for (double a : {2.0, 3.5, 6.0}) {
      for (double b : {2.0, 4.0, 7.5}) {
        EXPECT_NEAR(reg_incomplete_beta(x, a, b),
                    incomplete_beta_simpson(x, a, b), 1e-9);
      }
    }
  }
}

TEST(IncompleteBeta, SymmetryAndEnds) {
  for (double x : {0.01, 0.25, 0.5, 0.8}) {
    for (double a : {1.5, 4.0, 20.0}) {
      for (double b : {0.7, 3.0, 9.0}) {
        EXPECT_NEAR(reg_incomplete_beta(x, a, b),
                    1.0 - reg_incomplete_beta(1.0 - x, b, a), 1e-13);
      }
    }
  }
  EXPECT_EQ(reg_incomplete_beta(0.0, 2.0, 3.0), 0.0);
  EXPECT_EQ(reg_incomplete_beta(1.0, 2.0, 3.0), 1.0);
  EXPECT_THROW(reg_incomplete_beta(1.1, 2.0, 3.0), Error);
  EXPECT_THROW(reg_incomplete_beta(0.5, 0.0, 3.0), Error);
}

TEST(GroupErrorShape, GridPasses) {
  for (int i = 1; i <= 9; ++i) {
    const double p = 0.05 * i;
    const auto report = group_error_monotonicity(p, 30);
    EXPECT_TRUE(report.pass()) << "p=" << p;
    ASSERT_EQ(report.sequence.size(), 32u);
    EXPECT_DOUBLE_EQ(report.sequence[0], p);
  }
}

// The continuous extension j -> I_p(j + 1, j + 1) decreases with shrinking
// steps on a fine grid of real j.
TEST(GroupErrorShape, ContinuousExtension) {
  for (double p : {0.1, 0.25, 0.4, 0.49}) {
    double previous = reg_incomplete_beta(p, 1.0, 1.0);
    double previous_step = std::numeric_limits<double>::infinity();
    for (double j = 0.25; j <= 20.0; j += 0.25) {
      const double value = reg_incomplete_beta(p, j + 1.0, j + 1.0);
      const double step = previous - value;
      EXPECT_GT(step, 0.0) << "p=" << p << " j=" << j;
      EXPECT_LE(step, previous_step * (1 + 1e-9)) << "p=" << p << " j=" << j;
      previous = value;
      previous_step = step;
    }
  }
}

}  // namespace
}  // namespace noisytree
