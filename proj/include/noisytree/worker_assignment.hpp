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

// Distribution of extra worker pairs over the tests of a designed tree:
// the metric-driven greedy allocation and the comparison baselines.

#ifndef NOISYTREE_WORKER_ASSIGNMENT_HPP_
#define NOISYTREE_WORKER_ASSIGNMENT_HPP_

#include <cstdint>
#include <string_view>
#include <vector>

#include "noisytree/core_model.hpp"
#include "noisytree/metrics.hpp"

namespace noisytree {

enum class AssignmentStrategy {
  Proposed,
  RandomPerPair,
  SingleTest,
  AllWorkersAllTests,
};

const char* strategy_name(AssignmentStrategy strategy);
// Accepts "proposed", "random", "single", "all". Throws UnknownStrategy.
AssignmentStrategy parse_strategy(std::string_view name);

// Test m is answered by 2 k_m + 1 workers: one seated worker plus k_m pairs.
struct WorkerAllocation {
  AssignmentStrategy strategy = AssignmentStrategy::Proposed;
  std::vector<TestIndex> tests;  // tests of the tree, ascending
  std::vector<int> pairs;        // k_m, parallel to `tests`
  int budget = 0;                // K
  double worker_error = 0.0;     // p_e
  std::uint64_t seed = 0;

  int pairs_for(TestIndex test) const;  // throws UnknownTest
  int total_pairs() const;
};

// An allocation with no extra pairs on every test of `tree`.
WorkerAllocation seated_allocation(const DecisionTree& tree,
                                   double worker_error);

// f_e(k_m) at the allocation's worker error.
double effective_error(const WorkerAllocation& allocation, TestIndex test);

// The table with every allocated test's error column replaced by its
// effective error.
TestTable apply_allocation(const TestTable& table,
                           const WorkerAllocation& allocation);

struct AssignmentStep {
  int iteration = 0;
  std::size_t level = 0;  // d', 1-based
  TestIndex test = 0;
  int pairs_after = 0;
  double metric_before = 0.0;  // metric of level d' before the commit
  double metric_after = 0.0;
  std::vector<double> level_metrics;  // all levels, before the commit
};

struct ProposedAssignment {
  WorkerAllocation allocation;
  std::vector<AssignmentStep> log;
};

// Greedy pair-by-pair allocation. Each iteration picks the weakest level
// (min F^m, or max F^c; earliest on ties) and gives one pair to the test of
// that level whose extra pair improves the level metric most (lowest test
// index on ties).
ProposedAssignment assign_proposed(const DecisionTree& tree,
                                   const TestTable& table, int pair_budget,
                                   double worker_error,
                                   const MetricConfig& metric = {});

// SingleTest: every pair on one seeded-uniform test. RandomPerPair: each pair
// on an independent seeded-uniform test. AllWorkersAllTests: every test is
// answered by the same 2K + 1 workers.
WorkerAllocation assign_baseline(const DecisionTree& tree,
                                 AssignmentStrategy strategy, int pair_budget,
                                 double worker_error, std::uint64_t seed);

struct AllocationCost {
  // Worker answers per object, weighted by error-free reach probability.
  double expected_questions = 0.0;
  // Sum over tests of 2 k_m + 1.
  long flat_total = 0;
};

AllocationCost allocation_cost(const DecisionTree& tree, const TestTable& table,
                               const WorkerAllocation& allocation);

}  // namespace noisytree

#endif  // NOISYTREE_WORKER_ASSIGNMENT_HPP_
