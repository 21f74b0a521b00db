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

#include "noisytree/core_model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <utility>

namespace noisytree {

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::NonPositivePrior: return "NonPositivePrior";
    case ErrorCode::PriorSumMismatch: return "PriorSumMismatch";
    case ErrorCode::ErrorProbOutOfRange: return "ErrorProbOutOfRange";
    case ErrorCode::UselessTest: return "UselessTest";
    case ErrorCode::DuplicateIdentifier: return "DuplicateIdentifier";
    case ErrorCode::SingletonBlock: return "SingletonBlock";
    case ErrorCode::InapplicableTest: return "InapplicableTest";
    case ErrorCode::InvalidPartition: return "InvalidPartition";
    case ErrorCode::UnknownClass: return "UnknownClass";
    case ErrorCode::UnknownTest: return "UnknownTest";
    case ErrorCode::ZeroErrorMass: return "ZeroErrorMass";
    case ErrorCode::InseparableClasses: return "InseparableClasses";
    case ErrorCode::DepthGuardExceeded: return "DepthGuardExceeded";
    case ErrorCode::InstanceTooLarge: return "InstanceTooLarge";
    case ErrorCode::EvenVoteCount: return "EvenVoteCount";
    case ErrorCode::DomainError: return "DomainError";
    case ErrorCode::UnknownStrategy: return "UnknownStrategy";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::CrossReference: return "CrossReference";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

namespace {

constexpr double kPriorSumTolerance = 1e-6;

void check_unique(const std::vector<std::string>& ids, const char* what) {
  std::set<std::string_view> seen;
  for (const auto& id : ids) {
    if (id.empty()) {
      throw Error(ErrorCode::InvalidArgument,
                  std::string("empty ") + what + " identifier");
    }
    if (!seen.insert(id).second) {
      throw Error(ErrorCode::DuplicateIdentifier,
                  std::string("duplicate ") + what + " identifier '" + id +
                      "'");
    }
  }
}

bool valid_error_prob(double p) { return p >= 0.0 && p < 0.5; }

}  // namespace

void set_uniform_error(RawTable& raw, double error_prob) {
  raw.errors.assign(raw.tests.size(),
                    std::vector<double>(raw.classes.size(), error_prob));
}

TestTable validate_table(RawTable raw) {
  const std::size_t n = raw.classes.size();
  const std::size_t m = raw.tests.size();
  if (n < 2) {
    throw Error(ErrorCode::InvalidArgument,
                "a table needs at least two classes");
  }
  check_unique(raw.classes, "class");
  check_unique(raw.tests, "test");

  if (raw.priors.size() != n) {
    throw Error(ErrorCode::InvalidArgument,
                "expected " + std::to_string(n) + " priors, got " +
                    std::to_string(raw.priors.size()));
  }
  for (std::size_t c = 0; c < n; ++c) {
    if (!(raw.priors[c] > 0.0)) {
      throw Error(ErrorCode::NonPositivePrior,
                  "prior of class '" + raw.classes[c] + "' is not positive");
    }
  }
  const double sum = std::accumulate(raw.priors.begin(), raw.priors.end(), 0.0);
  if (std::abs(sum - 1.0) > kPriorSumTolerance) {
    throw Error(ErrorCode::PriorSumMismatch,
                "priors sum to " + std::to_string(sum) + ", expected 1");
  }
  if (sum != 1.0) {
    for (double& p : raw.priors) p /= sum;
  }

  if (raw.outcomes.size() != m) {
    throw Error(ErrorCode::InvalidArgument, "outcome rows do not match tests");
  }
  if (raw.errors.size() != m) {
    throw Error(ErrorCode::InvalidArgument, "error rows do not match tests");
  }

  TestTable table;
  table.outcomes_.reserve(n * m);
  table.errors_.reserve(n * m);
  for (std::size_t t = 0; t < m; ++t) {
    if (raw.outcomes[t].size() != n || raw.errors[t].size() != n) {
      throw Error(ErrorCode::InvalidArgument,
                  "test '" + raw.tests[t] + "' row has the wrong width");
    }
    bool has_zero = false;
    bool has_one = false;
    for (std::size_t c = 0; c < n; ++c) {
      const Outcome o = raw.outcomes[t][c];
      has_zero |= o == Outcome::Zero;
      has_one |= o == Outcome::One;
      double p = raw.errors[t][c];
      if (o == Outcome::NotApplicable) {
        p = 0.0;
      } else if (!valid_error_prob(p)) {
        throw Error(ErrorCode::ErrorProbOutOfRange,
                    "error probability " + std::to_string(p) + " of test '" +
                        raw.tests[t] + "' for class '" + raw.classes[c] +
                        "' is outside [0, 0.5)");
      }
      table.outcomes_.push_back(o);
      table.errors_.push_back(p);
    }
    if (!has_zero || !has_one) {
      throw Error(ErrorCode::UselessTest,
                  "test '" + raw.tests[t] + "' never splits any classes");
    }
  }
  table.classes_ = std::move(raw.classes);
  table.priors_ = std::move(raw.priors);
  table.tests_ = std::move(raw.tests);
  return table;
}

std::optional<ClassIndex> TestTable::find_class(std::string_view id) const {
  auto it = std::find(classes_.begin(), classes_.end(), id);
  if (it == classes_.end()) return std::nullopt;
  return static_cast<ClassIndex>(it - classes_.begin());
}

std::optional<TestIndex> TestTable::find_test(std::string_view id) const {
  auto it = std::find(tests_.begin(), tests_.end(), id);
  if (it == tests_.end()) return std::nullopt;
  return static_cast<TestIndex>(it - tests_.begin());
}

ClassIndex TestTable::class_index(std::string_view id) const {
  if (auto c = find_class(id)) return *c;
  throw Error(ErrorCode::UnknownClass,
              "unknown class '" + std::string(id) + "'");
}

TestIndex TestTable::test_index(std::string_view id) const {
  if (auto t = find_test(id)) return *t;
  throw Error(ErrorCode::UnknownTest, "unknown test '" + std::string(id) + "'");
}

TestTable TestTable::with_test_error(TestIndex t, double error_prob) const {
  if (t >= num_tests()) {
    throw Error(ErrorCode::UnknownTest, "test index out of range");
  }
  if (!valid_error_prob(error_prob)) {
    throw Error(ErrorCode::ErrorProbOutOfRange,
                "error probability " + std::to_string(error_prob) +
                    " is outside [0, 0.5)");
  }
  TestTable copy = *this;
  const std::size_t n = num_classes();
  for (std::size_t c = 0; c < n; ++c) {
    if (outcome(t, c) != Outcome::NotApplicable) {
      copy.errors_[t * n + c] = error_prob;
    }
  }
  return copy;
}

TestTable TestTable::with_uniform_error(double error_prob) const {
  TestTable copy = *this;
  for (TestIndex t = 0; t < num_tests(); ++t) {
    copy = copy.with_test_error(t, error_prob);
  }
  return copy;
}

RawTable TestTable::to_raw() const {
  RawTable raw;
  raw.classes = classes_;
  raw.priors = priors_;
  raw.tests = tests_;
  const std::size_t n = num_classes();
  for (TestIndex t = 0; t < num_tests(); ++t) {
    raw.outcomes.emplace_back(outcomes_.begin() + t * n,
                              outcomes_.begin() + (t + 1) * n);
    raw.errors.emplace_back(errors_.begin() + t * n,
                            errors_.begin() + (t + 1) * n);
  }
  return raw;
}

Block::Block(std::vector<ClassIndex> classes) : classes_(std::move(classes)) {
  if (classes_.empty()) {
    throw Error(ErrorCode::InvalidPartition, "empty block");
  }
  std::sort(classes_.begin(), classes_.end());
  if (std::adjacent_find(classes_.begin(), classes_.end()) != classes_.end()) {
    throw Error(ErrorCode::InvalidPartition, "duplicate class in block");
  }
}

bool Block::contains(ClassIndex c) const {
  return std::binary_search(classes_.begin(), classes_.end(), c);
}

double Block::mass(std::span<const double> priors) const {
  double total = 0.0;
  for (ClassIndex c : classes_) total += priors[c];
  return total;
}

Block all_classes(const TestTable& table) {
  std::vector<ClassIndex> classes(table.num_classes());
  std::iota(classes.begin(), classes.end(), ClassIndex{0});
  return Block(std::move(classes));
}

void check_partition(const Partition& partition, std::size_t num_classes) {
  std::vector<bool> seen(num_classes, false);
  std::size_t count = 0;
  for (const Block& block : partition) {
    if (block.empty()) {
      throw Error(ErrorCode::InvalidPartition, "empty block in partition");
    }
    for (ClassIndex c : block) {
      if (c >= num_classes || seen[c]) {
        throw Error(ErrorCode::InvalidPartition,
                    "partition blocks overlap or reference unknown classes");
      }
      seen[c] = true;
      ++count;
    }
  }
  if (count != num_classes) {
    throw Error(ErrorCode::InvalidPartition,
                "partition does not cover every class");
  }
}

bool is_applicable(const TestTable& table, const Block& block, TestIndex test) {
  if (test >= table.num_tests()) return false;
  bool has_zero = false;
  bool has_one = false;
  for (ClassIndex c : block) {
    switch (table.outcome(test, c)) {
      case Outcome::Zero: has_zero = true; break;
      case Outcome::One: has_one = true; break;
      case Outcome::NotApplicable: return false;
    }
  }
  return has_zero && has_one;
}

std::vector<TestIndex> applicable_tests(const TestTable& table,
                                        const Block& block) {
  if (block.size() < 2) {
    throw Error(ErrorCode::SingletonBlock, "a singleton block cannot be split");
  }
  std::vector<TestIndex> result;
  for (TestIndex t = 0; t < table.num_tests(); ++t) {
    if (is_applicable(table, block, t)) result.push_back(t);
  }
  return result;
}

std::pair<Block, Block> split_block(const TestTable& table, const Block& block,
                                    TestIndex test) {
  if (!is_applicable(table, block, test)) {
    throw Error(ErrorCode::InapplicableTest,
                test < table.num_tests()
                    ? "test '" + table.test_id(test) +
                          "' does not split the block"
                    : std::string("test index out of range"));
  }
  std::vector<ClassIndex> zero;
  std::vector<ClassIndex> one;
  for (ClassIndex c : block) {
    (table.outcome(test, c) == Outcome::Zero ? zero : one).push_back(c);
  }
  return {Block(std::move(zero)), Block(std::move(one))};
}

Partition refine_partition(const TestTable& table, const Partition& partition,
                           const LevelAssignment& assignment) {
  if (assignment.size() != partition.size()) {
    throw Error(ErrorCode::InvalidArgument,
                "assignment size does not match partition");
  }
  Partition next;
  next.reserve(partition.size() * 2);
  for (std::size_t k = 0; k < partition.size(); ++k) {
    if (!assignment[k]) {
      next.push_back(partition[k]);
      continue;
    }
    auto [zero, one] = split_block(table, partition[k], *assignment[k]);
    next.push_back(std::move(zero));
    next.push_back(std::move(one));
  }
  return next;
}

DecisionTree::DecisionTree(std::vector<Node> nodes) : nodes_(std::move(nodes)) {
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    if (nodes_[i].is_leaf()) continue;
    for (NodeIndex child : nodes_[i].children) {
      if (child <= i || child >= nodes_.size()) {
        throw Error(ErrorCode::InvalidArgument, "malformed tree arena");
      }
    }
  }
}

std::size_t DecisionTree::depth() const {
  if (nodes_.empty()) return 0;
  std::vector<std::size_t> level(nodes_.size(), 0);
  std::size_t deepest = 0;
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    deepest = std::max(deepest, level[i]);
    if (nodes_[i].is_leaf()) continue;
    for (NodeIndex child : nodes_[i].children) level[child] = level[i] + 1;
  }
  return deepest;
}

std::vector<TestIndex> DecisionTree::tests() const {
  std::vector<TestIndex> result;
  for (const Node& node : nodes_) {
    if (node.test) result.push_back(*node.test);
  }
  std::sort(result.begin(), result.end());
  result.erase(std::unique(result.begin(), result.end()), result.end());
  return result;
}

std::vector<ClassIndex> DecisionTree::leaf_classes() const {
  std::vector<ClassIndex> result;
  for (const Node& node : nodes_) {
    if (node.is_leaf()) result.push_back(node.leaf_class());
  }
  return result;
}

namespace {

bool same_subtree(const DecisionTree& a, DecisionTree::NodeIndex i,
                  const DecisionTree& b, DecisionTree::NodeIndex j) {
  const auto& x = a.node(i);
  const auto& y = b.node(j);
  if (x.test != y.test) return false;
  if (x.is_leaf()) return x.leaf_class() == y.leaf_class();
  return same_subtree(a, x.children[0], b, y.children[0]) &&
         same_subtree(a, x.children[1], b, y.children[1]);
}

}  // namespace

bool same_structure(const DecisionTree& a, const DecisionTree& b) {
  if (a.empty() || b.empty()) return a.empty() && b.empty();
  return same_subtree(a, 0, b, 0);
}

void check_tree(const DecisionTree& tree, const TestTable& table) {
  if (tree.empty()) throw Error(ErrorCode::InvalidArgument, "empty tree");
  if (tree.root().block != all_classes(table)) {
    throw Error(ErrorCode::InvalidPartition,
                "root block does not hold every class");
  }
  // Depth-first walk carrying the tests used on the current path.
  struct Frame {
    DecisionTree::NodeIndex node;
    std::vector<TestIndex> path;
  };
  std::vector<Frame> stack{{0, {}}};
  std::vector<int> leaf_count(table.num_classes(), 0);
  while (!stack.empty()) {
    Frame frame = std::move(stack.back());
    stack.pop_back();
    const auto& node = tree.node(frame.node);
    if (node.is_leaf()) {
      if (!node.block.is_singleton()) {
        throw Error(ErrorCode::InvalidPartition,
                    "leaf holds more than one class");
      }
      ++leaf_count.at(node.leaf_class());
      continue;
    }
    const TestIndex t = *node.test;
    if (std::find(frame.path.begin(), frame.path.end(), t) !=
        frame.path.end()) {
      throw Error(ErrorCode::InapplicableTest,
                  "test '" + table.test_id(t) + "' repeats along a path");
    }
    auto [zero, one] = split_block(table, node.block, t);
    if (tree.node(node.children[0]).block != zero ||
        tree.node(node.children[1]).block != one) {
      throw Error(ErrorCode::InvalidPartition,
                  "children do not match the split of their parent");
    }
    frame.path.push_back(t);
    stack.push_back({node.children[1], frame.path});
    stack.push_back({node.children[0], std::move(frame.path)});
  }
  for (ClassIndex c = 0; c < table.num_classes(); ++c) {
    if (leaf_count[c] != 1) {
      throw Error(ErrorCode::InvalidPartition,
                  "class '" + table.class_id(c) +
                      "' does not appear at exactly one leaf");
    }
  }
}

DecisionTree grow_tree(
    const TestTable& table,
    const std::function<LevelAssignment(const Partition&)>& choose,
    std::size_t depth_guard) {
  std::vector<DecisionTree::Node> nodes;
  nodes.push_back({all_classes(table), std::nullopt, {}});
  Partition partition{nodes.front().block};
  std::vector<DecisionTree::NodeIndex> frontier{0};

  std::size_t depth = 0;
  auto unresolved = [&] {
    return std::any_of(partition.begin(), partition.end(),
                       [](const Block& b) { return !b.is_singleton(); });
  };
  while (unresolved()) {
    if (depth == depth_guard) {
      throw Error(ErrorCode::DepthGuardExceeded,
                  "tree depth exceeds guard of " + std::to_string(depth_guard));
    }
    const LevelAssignment assignment = choose(partition);
    if (assignment.size() != partition.size()) {
      throw Error(ErrorCode::InvalidArgument,
                  "assignment size does not match partition");
    }
    Partition next;
    std::vector<DecisionTree::NodeIndex> next_frontier;
    for (std::size_t k = 0; k < partition.size(); ++k) {
      const Block& block = partition[k];
      if (block.is_singleton()) {
        if (assignment[k]) {
          throw Error(ErrorCode::SingletonBlock,
                      "a test was assigned to a singleton block");
        }
        next.push_back(block);
        next_frontier.push_back(frontier[k]);
        continue;
      }
      if (!assignment[k]) {
        throw Error(ErrorCode::InvalidArgument,
                    "every non-singleton block needs a test");
      }
      auto [zero, one] = split_block(table, block, *assignment[k]);
      const auto zero_node = nodes.size();
      nodes[frontier[k]].test = assignment[k];
      nodes[frontier[k]].children = {zero_node, zero_node + 1};
      nodes.push_back({zero, std::nullopt, {}});
      nodes.push_back({one, std::nullopt, {}});
      next.push_back(std::move(zero));
      next.push_back(std::move(one));
      next_frontier.push_back(zero_node);
      next_frontier.push_back(zero_node + 1);
    }
    partition = std::move(next);
    frontier = std::move(next_frontier);
    ++depth;
  }
  return DecisionTree(std::move(nodes));
}

DecisionTree grow_tree_by_block(
    const TestTable& table,
    const std::function<TestIndex(const Block&)>& choose) {
  return grow_tree(table, [&](const Partition& partition) {
    LevelAssignment assignment(partition.size());
    for (std::size_t k = 0; k < partition.size(); ++k) {
      if (!partition[k].is_singleton()) assignment[k] = choose(partition[k]);
    }
    return assignment;
  });
}

std::vector<Level> level_trace(const DecisionTree& tree) {
  std::vector<Level> levels;
  if (tree.empty()) return levels;
  std::vector<DecisionTree::NodeIndex> frontier{0};
  auto has_internal = [&] {
    return std::any_of(frontier.begin(), frontier.end(), [&](auto i) {
      return !tree.node(i).is_leaf();
    });
  };
  while (has_internal()) {
    Level level;
    std::vector<DecisionTree::NodeIndex> next;
    for (auto i : frontier) {
      const auto& node = tree.node(i);
      level.before.push_back(node.block);
      level.assignment.push_back(node.test);
      if (node.is_leaf()) {
        level.after.push_back(node.block);
        next.push_back(i);
      } else {
        for (auto child : node.children) {
          level.after.push_back(tree.node(child).block);
          next.push_back(child);
        }
      }
    }
    levels.push_back(std::move(level));
    frontier = std::move(next);
  }
  return levels;
}

std::vector<PathStep> class_path(const DecisionTree& tree,
                                 const TestTable& table, ClassIndex cls) {
  if (cls >= table.num_classes() || tree.empty() ||
      !tree.root().block.contains(cls)) {
    throw Error(ErrorCode::UnknownClass, "class not present in the tree");
  }
  std::vector<PathStep> path;
  DecisionTree::NodeIndex i = 0;
  while (!tree.node(i).is_leaf()) {
    const auto& node = tree.node(i);
    const TestIndex t = *node.test;
    const Outcome o = table.outcome(t, cls);
    if (o == Outcome::NotApplicable) {
      throw Error(ErrorCode::InapplicableTest,
                  "test '" + table.test_id(t) + "' is undefined for class '" +
                      table.class_id(cls) + "'");
    }
    path.push_back({t, o, table.error(t, cls)});
    i = node.children[o == Outcome::Zero ? 0 : 1];
  }
  return path;
}

}  // namespace noisytree
