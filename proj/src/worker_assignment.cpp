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

#include "noisytree/worker_assignment.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "noisytree/fusion.hpp"
#include "noisytree/random.hpp"

namespace noisytree {

const char* strategy_name(AssignmentStrategy strategy) {
  switch (strategy) {
    case AssignmentStrategy::Proposed: return "proposed";
    case AssignmentStrategy::RandomPerPair: return "random";
    case AssignmentStrategy::SingleTest: return "single";
    case AssignmentStrategy::AllWorkersAllTests: return "all";
  }
  return "unknown";
}

AssignmentStrategy parse_strategy(std::string_view name) {
  for (auto s : {AssignmentStrategy::Proposed, AssignmentStrategy::RandomPerPair,
                 AssignmentStrategy::SingleTest,
                 AssignmentStrategy::AllWorkersAllTests}) {
    if (name == strategy_name(s)) return s;
  }
  throw Error(ErrorCode::UnknownStrategy,
              "unknown strategy '" + std::string(name) + "'");
}

int WorkerAllocation::pairs_for(TestIndex test) const {
  auto it = std::lower_bound(tests.begin(), tests.end(), test);
  if (it == tests.end() || *it != test) {
    throw Error(ErrorCode::UnknownTest, "test is not part of the allocation");
  }
  return pairs[it - tests.begin()];
}

int WorkerAllocation::total_pairs() const {
  return std::accumulate(pairs.begin(), pairs.end(), 0);
}

WorkerAllocation seated_allocation(const DecisionTree& tree,
                                   double worker_error) {
  WorkerAllocation allocation;
  allocation.tests = tree.tests();
  allocation.pairs.assign(allocation.tests.size(), 0);
  allocation.worker_error = worker_error;
  return allocation;
}

double effective_error(const WorkerAllocation& allocation, TestIndex test) {
  return group_error(allocation.pairs_for(test), allocation.worker_error);
}

TestTable apply_allocation(const TestTable& table,
                           const WorkerAllocation& allocation) {
  TestTable result = table;
  for (std::size_t i = 0; i < allocation.tests.size(); ++i) {
    result = result.with_test_error(
        allocation.tests[i],
        group_error(allocation.pairs[i], allocation.worker_error));
  }
  return result;
}

namespace {

void check_budget(int pair_budget) {
  if (pair_budget < 0) {
    throw Error(ErrorCode::InvalidArgument, "pair budget must be >= 0");
  }
}

double level_metric(const TestTable& table, const Level& level,
                    const MetricConfig& metric) {
  const LevelQuantity q =
      level_quantity(table, level.before, level.assignment, metric.offset);
  return metric.kind == MetricKind::Additive ? q.additive : q.multiplicative;
}

// True when `candidate` is a better level metric than `incumbent` in the
// direction the allocation step improves (F^m up, F^c down).
bool improves(double candidate, double incumbent, MetricKind kind) {
  return kind == MetricKind::Additive ? candidate > incumbent
                                      : candidate < incumbent;
}

}  // namespace

ProposedAssignment assign_proposed(const DecisionTree& tree,
                                   const TestTable& table, int pair_budget,
                                   double worker_error,
                                   const MetricConfig& metric) {
  check_budget(pair_budget);
  group_error(0, worker_error);  // validates p_e

  ProposedAssignment result;
  result.allocation = seated_allocation(tree, worker_error);
  result.allocation.strategy = AssignmentStrategy::Proposed;
  result.allocation.budget = pair_budget;
  WorkerAllocation& alloc = result.allocation;

  const std::vector<Level> levels = level_trace(tree);
  if (levels.empty()) return result;

  for (int iteration = 0; iteration < pair_budget; ++iteration) {
    const TestTable current = apply_allocation(table, alloc);

    AssignmentStep step;
    step.iteration = iteration + 1;
    for (const Level& level : levels) {
      step.level_metrics.push_back(level_metric(current, level, metric));
    }
    // Weakest level: min F^m or max F^c, earliest on ties.
    std::size_t weakest = 0;
    for (std::size_t d = 1; d < levels.size(); ++d) {
      if (improves(step.level_metrics[weakest], step.level_metrics[d],
                   metric.kind)) {
        weakest = d;
      }
    }
    step.level = weakest + 1;
    step.metric_before = step.level_metrics[weakest];

    std::vector<TestIndex> candidates;
    for (const auto& test : levels[weakest].assignment) {
      if (test) candidates.push_back(*test);
    }
    std::sort(candidates.begin(), candidates.end());
    candidates.erase(std::unique(candidates.begin(), candidates.end()),
                     candidates.end());

    bool have_best = false;
    for (TestIndex t : candidates) {
      const int k = alloc.pairs_for(t) + 1;
      const TestTable trial =
          current.with_test_error(t, group_error(k, worker_error));
      const double value = level_metric(trial, levels[weakest], metric);
      if (!have_best || improves(value, step.metric_after, metric.kind)) {
        have_best = true;
        step.test = t;
        step.metric_after = value;
      }
    }

    auto it = std::lower_bound(alloc.tests.begin(), alloc.tests.end(),
                               step.test);
    step.pairs_after = ++alloc.pairs[it - alloc.tests.begin()];
    result.log.push_back(std::move(step));
  }
  return result;
}

WorkerAllocation assign_baseline(const DecisionTree& tree,
                                 AssignmentStrategy strategy, int pair_budget,
                                 double worker_error, std::uint64_t seed) {
  check_budget(pair_budget);
  group_error(0, worker_error);
  WorkerAllocation alloc = seated_allocation(tree, worker_error);
  alloc.strategy = strategy;
  alloc.budget = pair_budget;
  alloc.seed = seed;
  if (alloc.tests.empty()) return alloc;

  CounterRng rng(seed, 0);
  const std::size_t m = alloc.tests.size();
  switch (strategy) {
    case AssignmentStrategy::SingleTest:
      alloc.pairs[rng.below(m)] = pair_budget;
      break;
    case AssignmentStrategy::RandomPerPair:
      for (int i = 0; i < pair_budget; ++i) ++alloc.pairs[rng.below(m)];
      break;
    case AssignmentStrategy::AllWorkersAllTests:
      std::fill(alloc.pairs.begin(), alloc.pairs.end(), pair_budget);
      break;
    case AssignmentStrategy::Proposed:
      throw Error(ErrorCode::UnknownStrategy,
                  "the proposed strategy is not a baseline; use "
                  "assign_proposed");
  }
  return alloc;
}

AllocationCost allocation_cost(const DecisionTree& tree, const TestTable& table,
                               const WorkerAllocation& allocation) {
  AllocationCost cost;
  for (const auto& node : tree.nodes()) {
    if (node.is_leaf()) continue;
    const int group = 2 * allocation.pairs_for(*node.test) + 1;
    cost.expected_questions += node.block.mass(table.priors()) * group;
  }
  for (int k : allocation.pairs) cost.flat_total += 2L * k + 1;
  return cost;
}

}  // namespace noisytree
