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

// Shared fixtures for the test binaries: the five-class reference instance,
// its two hand-drawn trees, and a generator of random separable instances.

#ifndef NOISYTREE_TESTS_FIXTURES_HPP_
#define NOISYTREE_TESTS_FIXTURES_HPP_

#include <cstdint>
#include <map>
#include <string>

#include "noisytree/core_model.hpp"
#include "noisytree/random.hpp"
#include "noisytree/tree_builder.hpp"

namespace noisytree::testing {

inline RawTable reference_table_raw(double error_prob = 0.05) {
  RawTable raw;
  raw.classes = {"c1", "c2", "c3", "c4", "c5"};
  raw.priors = {0.20, 0.05, 0.10, 0.60, 0.05};
  raw.tests = {"T1", "T2", "T3", "T4", "T5"};
  constexpr auto Z = Outcome::Zero;
  constexpr auto O = Outcome::One;
  constexpr auto NA = Outcome::NotApplicable;
  raw.outcomes = {
      {Z, Z, Z, O, Z},
      {O, Z, Z, O, O},
      {Z, O, Z, Z, O},
      {Z, O, Z, O, O},
      {Z, O, O, NA, O},
  };
  set_uniform_error(raw, error_prob);
  return raw;
}

inline TestTable reference_table(double error_prob = 0.05) {
  return validate_table(reference_table_raw(error_prob));
}

// Builds a tree from a block -> test-id rule keyed by class-id lists.
inline DecisionTree tree_from_rule(
    const TestTable& table, const std::map<std::string, std::string>& rule) {
  return grow_tree_by_block(table, [&](const Block& block) {
    std::string key;
    for (ClassIndex c : block) key += table.class_id(c);
    return table.test_index(rule.at(key));
  });
}

// Root T3; {c1,c3,c4} -> T4; {c2,c5} -> T2; {c1,c3} -> T5.
inline DecisionTree t3_rooted_tree(const TestTable& table) {
  return tree_from_rule(table, {{"c1c2c3c4c5", "T3"},
                                {"c1c3c4", "T4"},
                                {"c2c5", "T2"},
                                {"c1c3", "T5"}});
}

// Root T1; {c1,c2,c3,c5} -> T5; {c2,c3,c5} -> T3; {c2,c5} -> T2.
inline DecisionTree t1_rooted_tree(const TestTable& table) {
  return tree_from_rule(table, {{"c1c2c3c4c5", "T1"},
                                {"c1c2c3c5", "T5"},
                                {"c2c3c5", "T3"},
                                {"c2c5", "T2"}});
}

struct RandomInstanceSpec {
  std::size_t max_classes = 6;
  std::size_t max_tests = 8;
  double max_error = 0.2;
  double not_applicable_rate = 0.1;
  bool per_cell_errors = true;
};

// Random table whose greedy build succeeds (every class separable).
inline TestTable random_instance(std::uint64_t seed,
                                 const RandomInstanceSpec& spec = {}) {
  CounterRng rng(seed, 0xfeed);
  for (;;) {
    RawTable raw;
    const std::size_t n = 2 + rng.below(spec.max_classes - 1);
    const std::size_t m = 1 + rng.below(spec.max_tests);
    double total = 0.0;
    for (std::size_t c = 0; c < n; ++c) {
      raw.classes.push_back("c" + std::to_string(c + 1));
      raw.priors.push_back(0.05 + rng.uniform());
      total += raw.priors.back();
    }
    for (double& p : raw.priors) p /= total;
    const double scalar = spec.max_error * (0.01 + 0.99 * rng.uniform());
    for (std::size_t t = 0; t < m; ++t) {
      raw.tests.push_back("T" + std::to_string(t + 1));
      std::vector<Outcome> row;
      std::vector<double> errors;
      bool zero = false, one = false;
      for (std::size_t c = 0; c < n; ++c) {
        Outcome o = rng.bernoulli(0.5) ? Outcome::One : Outcome::Zero;
        if (rng.bernoulli(spec.not_applicable_rate)) o = Outcome::NotApplicable;
        zero |= o == Outcome::Zero;
        one |= o == Outcome::One;
        row.push_back(o);
        errors.push_back(spec.per_cell_errors
                             ? spec.max_error * (0.01 + 0.99 * rng.uniform())
                             : scalar);
      }
      if (!zero || !one) {
        // Force a split so the test is not useless.
        row[0] = Outcome::Zero;
        row[1] = Outcome::One;
      }
      raw.outcomes.push_back(std::move(row));
      raw.errors.push_back(std::move(errors));
    }
    TestTable table = validate_table(std::move(raw));
    try {
      build_greedy(table);
      return table;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::InseparableClasses) throw;
    }
  }
}

}  // namespace noisytree::testing

#endif  // NOISYTREE_TESTS_FIXTURES_HPP_
