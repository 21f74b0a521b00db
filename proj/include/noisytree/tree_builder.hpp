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

// Decision tree construction: the level-by-level greedy builder, a random
// test-order baseline, and an exhaustive enumerator for small instances.

#ifndef NOISYTREE_TREE_BUILDER_HPP_
#define NOISYTREE_TREE_BUILDER_HPP_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

#include "noisytree/core_model.hpp"
#include "noisytree/metrics.hpp"

namespace noisytree {

struct BuilderConfig {
  MetricConfig metric;
  // Largest Cartesian product of per-block candidates scored exhaustively;
  // larger levels fall back to coordinate ascent.
  std::size_t joint_cap = 10000;
  std::size_t max_sweeps = 10;
  std::size_t depth_guard = 64;
};

struct BuildResult {
  DecisionTree tree;
  LevelQuantities quantities;
};

// Value the greedy builder maximizes for one level.
//   Additive:       F^m = dH / g.
//   Multiplicative: ln((H_prev + r) / (H_next + r)) / -ln(b), i.e. the
//                   entropy ratio per unit log correct-mass; +inf when b = 1.
double selection_score(double entropy_before, double entropy_after,
                       double error_mass, const MetricConfig& metric);

struct ScoredAssignment {
  LevelAssignment assignment;
  double entropy_after = 0.0;
  double error_mass = 0.0;
  double score = 0.0;
};

// Every joint assignment of applicable tests to the non-singleton blocks of
// `partition`, in lexicographic order (first block most significant).
// Throws InstanceTooLarge when the product exceeds `cap`.
std::vector<ScoredAssignment> score_joint_assignments(
    const TestTable& table, const Partition& partition,
    const MetricConfig& metric, std::size_t cap = 10000);

// The greedy choice for one level.
LevelAssignment select_level(const TestTable& table, const Partition& partition,
                             const BuilderConfig& config);

BuildResult build_greedy(const TestTable& table,
                         const BuilderConfig& config = {});

// Picks a uniformly random applicable test at every non-singleton block.
DecisionTree build_random(const TestTable& table, std::uint64_t seed);

struct EnumerationLimits {
  std::size_t max_classes = 5;
  std::size_t max_tests = 5;
};

// Calls `visit` once per distinct valid tree.
void for_each_tree(const TestTable& table, const EnumerationLimits& limits,
                   const std::function<void(const DecisionTree&)>& visit);

std::vector<DecisionTree> enumerate_trees(const TestTable& table,
                                          const EnumerationLimits& limits = {});

enum class Objective { ExactPm, ExactPc };

struct ExhaustiveResult {
  DecisionTree tree;
  double value = 0.0;
  std::size_t trees_examined = 0;
};

// Global optimum over enumerate_trees. Values within 1e-12 count as ties,
// broken by the lexicographically smallest level_test_sequence.
ExhaustiveResult best_tree_exhaustive(const TestTable& table,
                                      Objective objective,
                                      const EnumerationLimits& limits = {});

// Tests of every level in partition order, concatenated.
std::vector<TestIndex> level_test_sequence(const DecisionTree& tree);

}  // namespace noisytree

#endif  // NOISYTREE_TREE_BUILDER_HPP_
