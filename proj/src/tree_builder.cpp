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

#include "noisytree/tree_builder.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <string>

#include "noisytree/random.hpp"

namespace noisytree {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// -sum p log2(p / mass) over one block.
double block_entropy(std::span<const double> priors, const Block& block) {
  if (block.is_singleton()) return 0.0;
  const double mass = block.mass(priors);
  double h = 0.0;
  for (ClassIndex c : block) h -= priors[c] * std::log2(priors[c] / mass);
  return h;
}

struct Candidate {
  TestIndex test;
  double entropy;  // contribution of the two sub-blocks to H(L_d)
  double error;    // contribution to g(d-1, d)
};

[[noreturn]] void throw_inseparable(const TestTable& table, const Block& block) {
  // Prefer a pair that no test in the table can tell apart at all.
  const auto& cs = block.classes();
  for (std::size_t i = 0; i < cs.size(); ++i) {
    for (std::size_t j = i + 1; j < cs.size(); ++j) {
      bool separable = false;
      for (TestIndex t = 0; t < table.num_tests() && !separable; ++t) {
        const Outcome a = table.outcome(t, cs[i]);
        const Outcome b = table.outcome(t, cs[j]);
        separable = a != Outcome::NotApplicable &&
                    b != Outcome::NotApplicable && a != b;
      }
      if (!separable) {
        throw Error(ErrorCode::InseparableClasses,
                    "classes '" + table.class_id(cs[i]) + "' and '" +
                        table.class_id(cs[j]) + "' cannot be separated");
      }
    }
  }
  throw Error(ErrorCode::InseparableClasses,
              "classes '" + table.class_id(cs[0]) + "' and '" +
                  table.class_id(cs[1]) +
                  "' share a block that no test can split");
}

// Candidate lists per block; empty for singletons.
std::vector<std::vector<Candidate>> block_candidates(const TestTable& table,
                                                     const Partition& partition) {
  std::vector<std::vector<Candidate>> result(partition.size());
  for (std::size_t k = 0; k < partition.size(); ++k) {
    const Block& block = partition[k];
    if (block.is_singleton()) continue;
    for (TestIndex t : applicable_tests(table, block)) {
      auto [zero, one] = split_block(table, block, t);
      double error = 0.0;
      for (ClassIndex c : block) error += table.prior(c) * table.error(t, c);
      result[k].push_back({t,
                           block_entropy(table.priors(), zero) +
                               block_entropy(table.priors(), one),
                           error});
    }
    if (result[k].empty()) throw_inseparable(table, block);
  }
  return result;
}

// Joint state: one chosen candidate index per block (ignored for singletons).
struct Evaluator {
  const std::vector<std::vector<Candidate>>& candidates;
  double entropy_before;
  MetricConfig metric;

  ScoredAssignment score(const std::vector<std::size_t>& choice) const {
    ScoredAssignment s;
    s.assignment.resize(candidates.size());
    for (std::size_t k = 0; k < candidates.size(); ++k) {
      if (candidates[k].empty()) continue;
      const Candidate& c = candidates[k][choice[k]];
      s.assignment[k] = c.test;
      s.entropy_after += c.entropy;
      s.error_mass += c.error;
    }
    s.score = selection_score(entropy_before, s.entropy_after, s.error_mass,
                              metric);
    return s;
  }
};

// Saturating product of candidate counts.
std::size_t joint_size(const std::vector<std::vector<Candidate>>& candidates,
                       std::size_t cap) {
  std::size_t total = 1;
  for (const auto& list : candidates) {
    if (list.empty()) continue;
    if (total > cap / list.size()) return cap + 1;
    total *= list.size();
  }
  return total;
}

// Advances a mixed-radix counter, last block least significant.
bool next_choice(std::vector<std::size_t>& choice,
                 const std::vector<std::vector<Candidate>>& candidates) {
  for (std::size_t k = candidates.size(); k-- > 0;) {
    if (candidates[k].empty()) continue;
    if (++choice[k] < candidates[k].size()) return true;
    choice[k] = 0;
  }
  return false;
}

}  // namespace

double selection_score(double entropy_before, double entropy_after,
                       double error_mass, const MetricConfig& metric) {
  const double drop = std::max(0.0, entropy_before - entropy_after);
  if (metric.kind == MetricKind::Additive) {
    return metric_additive(drop, error_mass);
  }
  if (!(metric.offset > 0.0)) {
    throw Error(ErrorCode::DomainError, "ratio offset must be positive");
  }
  const double log_ratio = std::log((entropy_before + metric.offset) /
                                    (entropy_after + metric.offset));
  if (error_mass == 0.0) return log_ratio > 0.0 ? kInf : 0.0;
  return log_ratio / -std::log1p(-error_mass);
}

std::vector<ScoredAssignment> score_joint_assignments(
    const TestTable& table, const Partition& partition,
    const MetricConfig& metric, std::size_t cap) {
  const auto candidates = block_candidates(table, partition);
  if (joint_size(candidates, cap) > cap) {
    throw Error(ErrorCode::InstanceTooLarge,
                "joint assignment count exceeds " + std::to_string(cap));
  }
  const Evaluator eval{candidates, level_entropy(table.priors(), partition),
                       metric};
  std::vector<ScoredAssignment> result;
  std::vector<std::size_t> choice(candidates.size(), 0);
  do {
    result.push_back(eval.score(choice));
  } while (next_choice(choice, candidates));
  return result;
}

LevelAssignment select_level(const TestTable& table, const Partition& partition,
                             const BuilderConfig& config) {
  const auto candidates = block_candidates(table, partition);
  const Evaluator eval{candidates, level_entropy(table.priors(), partition),
                       config.metric};
  std::vector<std::size_t> choice(candidates.size(), 0);

  if (joint_size(candidates, config.joint_cap) <= config.joint_cap) {
    // Lexicographic scan; strict improvement keeps the earliest tie.
    ScoredAssignment best = eval.score(choice);
    while (next_choice(choice, candidates)) {
      ScoredAssignment s = eval.score(choice);
      if (s.score > best.score) best = std::move(s);
    }
    return best.assignment;
  }

  // Coordinate ascent from the lowest-index test of every block.
  double best_score = eval.score(choice).score;
  for (std::size_t sweep = 0; sweep < config.max_sweeps; ++sweep) {
    bool changed = false;
    for (std::size_t k = 0; k < candidates.size(); ++k) {
      if (candidates[k].size() < 2) continue;
      const std::size_t current = choice[k];
      std::size_t best_i = current;
      for (std::size_t i = 0; i < candidates[k].size(); ++i) {
        choice[k] = i;
        const double s = eval.score(choice).score;
        if (s > best_score || (s == best_score && i < best_i)) {
          best_score = s;
          best_i = i;
        }
      }
      choice[k] = best_i;
      changed |= best_i != current;
    }
    if (!changed) break;
  }
  return eval.score(choice).assignment;
}

BuildResult build_greedy(const TestTable& table, const BuilderConfig& config) {
  if (config.joint_cap < 1) {
    throw Error(ErrorCode::InvalidArgument, "joint cap must be at least 1");
  }
  BuildResult result;
  result.tree = grow_tree(
      table,
      [&](const Partition& partition) {
        return select_level(table, partition, config);
      },
      config.depth_guard);
  result.quantities =
      level_quantities(result.tree, table, config.metric.offset);
  return result;
}

DecisionTree build_random(const TestTable& table, std::uint64_t seed) {
  CounterRng rng(seed, 0);
  return grow_tree_by_block(table, [&](const Block& block) {
    const auto tests = applicable_tests(table, block);
    if (tests.empty()) throw_inseparable(table, block);
    return tests[rng.below(tests.size())];
  });
}

namespace {

class TreeEnumerator {
 public:
  TreeEnumerator(const TestTable& table,
                 const std::function<void(const DecisionTree&)>& visit)
      : table_(table), visit_(visit) {}

  void run() {
    std::vector<Block> pending{all_classes(table_)};
    recurse(pending);
  }

 private:
  void recurse(std::vector<Block>& pending) {
    if (pending.empty()) {
      visit_(grow_tree_by_block(
          table_, [&](const Block& block) { return choices_.at(block); }));
      return;
    }
    const Block block = pending.back();
    pending.pop_back();
    for (TestIndex t : applicable_tests(table_, block)) {
      auto [zero, one] = split_block(table_, block, t);
      choices_[block] = t;
      const std::size_t mark = pending.size();
      if (!one.is_singleton()) pending.push_back(std::move(one));
      if (!zero.is_singleton()) pending.push_back(std::move(zero));
      recurse(pending);
      pending.resize(mark);
    }
    choices_.erase(block);
    pending.push_back(block);
  }

  const TestTable& table_;
  const std::function<void(const DecisionTree&)>& visit_;
  std::map<Block, TestIndex> choices_;
};

}  // namespace

void for_each_tree(const TestTable& table, const EnumerationLimits& limits,
                   const std::function<void(const DecisionTree&)>& visit) {
  if (table.num_classes() > limits.max_classes ||
      table.num_tests() > limits.max_tests) {
    throw Error(ErrorCode::InstanceTooLarge,
                "exhaustive enumeration is limited to " +
                    std::to_string(limits.max_classes) + " classes and " +
                    std::to_string(limits.max_tests) + " tests");
  }
  TreeEnumerator(table, visit).run();
}

std::vector<DecisionTree> enumerate_trees(const TestTable& table,
                                          const EnumerationLimits& limits) {
  std::vector<DecisionTree> trees;
  for_each_tree(table, limits,
                [&](const DecisionTree& tree) { trees.push_back(tree); });
  return trees;
}

std::vector<TestIndex> level_test_sequence(const DecisionTree& tree) {
  std::vector<TestIndex> sequence;
  for (const Level& level : level_trace(tree)) {
    for (const auto& test : level.assignment) {
      if (test) sequence.push_back(*test);
    }
  }
  return sequence;
}

ExhaustiveResult best_tree_exhaustive(const TestTable& table,
                                      Objective objective,
                                      const EnumerationLimits& limits) {
  constexpr double kTieTolerance = 1e-12;
  ExhaustiveResult best;
  std::vector<TestIndex> best_sequence;
  for_each_tree(table, limits, [&](const DecisionTree& tree) {
    const double value = objective == Objective::ExactPm
                             ? exact_misclassification(tree, table)
                             : exact_correct(tree, table);
    // Orient so that smaller is always better.
    const double key = objective == Objective::ExactPm ? value : -value;
    const double best_key =
        objective == Objective::ExactPm ? best.value : -best.value;
    ++best.trees_examined;
    auto sequence = level_test_sequence(tree);
    const bool better =
        best.trees_examined == 1 || key < best_key - kTieTolerance ||
        (std::abs(key - best_key) <= kTieTolerance && sequence < best_sequence);
    if (better) {
      best.tree = tree;
      best.value = value;
      best_sequence = std::move(sequence);
    }
  });
  if (best.trees_examined == 0) {
    throw Error(ErrorCode::InseparableClasses,
                "no valid tree separates every class");
  }
  return best;
}

}  // namespace noisytree
