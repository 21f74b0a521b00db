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

// Classification instance (classes, priors, binary tests, error
// probabilities) and the partition / tree structures built on top of it.

#ifndef NOISYTREE_CORE_MODEL_HPP_
#define NOISYTREE_CORE_MODEL_HPP_

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "noisytree/error.hpp"

namespace noisytree {

using ClassIndex = std::size_t;
using TestIndex = std::size_t;

enum class Outcome : std::uint8_t { Zero = 0, One = 1, NotApplicable = 2 };

// Unvalidated table contents, as read from a file or assembled in code.
// `outcomes` and `errors` are indexed [test][class].
struct RawTable {
  std::vector<std::string> classes;
  std::vector<double> priors;
  std::vector<std::string> tests;
  std::vector<std::vector<Outcome>> outcomes;
  std::vector<std::vector<double>> errors;
};

// Fills `raw.errors` with a single scalar error probability.
void set_uniform_error(RawTable& raw, double error_prob);

// A validated classification instance. Immutable once constructed.
class TestTable {
 public:
  std::size_t num_classes() const { return classes_.size(); }
  std::size_t num_tests() const { return tests_.size(); }

  const std::string& class_id(ClassIndex c) const { return classes_.at(c); }
  const std::string& test_id(TestIndex t) const { return tests_.at(t); }
  const std::vector<std::string>& class_ids() const { return classes_; }
  const std::vector<std::string>& test_ids() const { return tests_; }

  double prior(ClassIndex c) const { return priors_[c]; }
  std::span<const double> priors() const { return priors_; }

  Outcome outcome(TestIndex t, ClassIndex c) const {
    return outcomes_[t * classes_.size() + c];
  }
  // p_{c,t}: probability that an object of class c is mis-categorized at t.
  double error(TestIndex t, ClassIndex c) const {
    return errors_[t * classes_.size() + c];
  }

  std::optional<ClassIndex> find_class(std::string_view id) const;
  std::optional<TestIndex> find_test(std::string_view id) const;
  ClassIndex class_index(std::string_view id) const;  // throws UnknownClass
  TestIndex test_index(std::string_view id) const;    // throws UnknownTest

  // Copy of this table with every entry of one test's error column replaced.
  TestTable with_test_error(TestIndex t, double error_prob) const;
  TestTable with_uniform_error(double error_prob) const;

  RawTable to_raw() const;

 private:
  friend TestTable validate_table(RawTable raw);
  TestTable() = default;

  std::vector<std::string> classes_;
  std::vector<double> priors_;
  std::vector<std::string> tests_;
  std::vector<Outcome> outcomes_;
  std::vector<double> errors_;
};

// Checks every table invariant. Priors off by at most 1e-6 are renormalized.
TestTable validate_table(RawTable raw);

// A non-empty set of classes, kept sorted by class index.
class Block {
 public:
  Block() = default;
  explicit Block(std::vector<ClassIndex> classes);
  Block(std::initializer_list<ClassIndex> classes)
      : Block(std::vector<ClassIndex>(classes)) {}

  std::size_t size() const { return classes_.size(); }
  bool empty() const { return classes_.empty(); }
  bool is_singleton() const { return classes_.size() == 1; }
  bool contains(ClassIndex c) const;
  ClassIndex front() const { return classes_.front(); }

  auto begin() const { return classes_.begin(); }
  auto end() const { return classes_.end(); }
  const std::vector<ClassIndex>& classes() const { return classes_; }

  double mass(std::span<const double> priors) const;

  friend bool operator==(const Block&, const Block&) = default;
  friend auto operator<=>(const Block&, const Block&) = default;

 private:
  std::vector<ClassIndex> classes_;
};

Block all_classes(const TestTable& table);

// Ordered list of disjoint blocks covering every class exactly once.
using Partition = std::vector<Block>;

// One optional test per block of a partition, in the same order.
using LevelAssignment = std::vector<std::optional<TestIndex>>;

// Throws InvalidPartition unless `partition` covers 0..num_classes-1 exactly.
void check_partition(const Partition& partition, std::size_t num_classes);

bool is_applicable(const TestTable& table, const Block& block, TestIndex test);
std::vector<TestIndex> applicable_tests(const TestTable& table,
                                        const Block& block);

// (classes with outcome Zero, classes with outcome One).
std::pair<Block, Block> split_block(const TestTable& table, const Block& block,
                                    TestIndex test);

// Each assigned block is replaced in place by its Zero then One sub-block.
Partition refine_partition(const TestTable& table, const Partition& partition,
                           const LevelAssignment& assignment);

// Binary tree of tests with one class per leaf. Nodes live in an arena with
// the root at index 0; children are laid out breadth first.
class DecisionTree {
 public:
  using NodeIndex = std::size_t;

  struct Node {
    Block block;
    std::optional<TestIndex> test;        // empty for leaves
    std::array<NodeIndex, 2> children{};  // [Zero, One], internal nodes only

    bool is_leaf() const { return !test.has_value(); }
    ClassIndex leaf_class() const { return block.front(); }
  };

  DecisionTree() = default;
  explicit DecisionTree(std::vector<Node> nodes);

  const Node& root() const { return nodes_.front(); }
  const Node& node(NodeIndex i) const { return nodes_.at(i); }
  const std::vector<Node>& nodes() const { return nodes_; }
  std::size_t size() const { return nodes_.size(); }
  bool empty() const { return nodes_.empty(); }

  // Number of test levels D (0 for a lone leaf).
  std::size_t depth() const;

  // Distinct tests used anywhere in the tree, by ascending index.
  std::vector<TestIndex> tests() const;

  // Leaf classes in node order.
  std::vector<ClassIndex> leaf_classes() const;

 private:
  std::vector<Node> nodes_;
};

// Structural equality: same tests at corresponding nodes, same leaves.
bool same_structure(const DecisionTree& a, const DecisionTree& b);

// Validates every tree invariant against a table; throws on violation.
void check_tree(const DecisionTree& tree, const TestTable& table);

// Grows a tree level by level. `choose` receives the current partition and
// returns one test per non-singleton block (singletons must stay empty).
DecisionTree grow_tree(
    const TestTable& table,
    const std::function<LevelAssignment(const Partition&)>& choose,
    std::size_t depth_guard = 64);

// Grows a tree from a per-block rule, e.g. for hand-specified trees.
DecisionTree grow_tree_by_block(
    const TestTable& table,
    const std::function<TestIndex(const Block&)>& choose);

struct Level {
  Partition before;             // gamma_{d-1}
  LevelAssignment assignment;   // test applied to each block of `before`
  Partition after;              // gamma_d
};

// Levels 1..D of a tree. Blocks that already reached a leaf carry no test.
std::vector<Level> level_trace(const DecisionTree& tree);

struct PathStep {
  TestIndex test;
  Outcome expected;
  double error_prob;
};

// Tests an error-free object of class `cls` traverses from root to its leaf.
std::vector<PathStep> class_path(const DecisionTree& tree,
                                 const TestTable& table, ClassIndex cls);

}  // namespace noisytree

#endif  // NOISYTREE_CORE_MODEL_HPP_
