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

// Seeded Monte Carlo classification through a tree with fused noisy tests,
// and the two parameter sweeps (test error, worker budget).

#ifndef NOISYTREE_SIMULATOR_HPP_
#define NOISYTREE_SIMULATOR_HPP_

#include <cstdint>
#include <span>
#include <vector>

#include "noisytree/core_model.hpp"
#include "noisytree/tree_builder.hpp"
#include "noisytree/worker_assignment.hpp"

namespace noisytree {

struct SimulationConfig {
  std::uint64_t trials = 1000000;
  std::uint64_t seed = 0;
  unsigned threads = 1;
};

struct SimulationReport {
  std::uint64_t trials = 0;
  std::uint64_t errors = 0;
  double estimate = 0.0;    // errors / trials
  double half_width = 0.0;  // 1.96 sqrt(p (1 - p) / trials)
  std::vector<std::uint64_t> class_draws;
  std::vector<std::vector<std::uint64_t>> confusion;  // [true][leaf class]
  std::uint64_t worker_answers = 0;
  double mean_questions = 0.0;  // worker answers per object
  std::uint64_t seed = 0;

  double ci_low() const { return estimate - half_width; }
  double ci_high() const { return estimate + half_width; }
};

// One seated worker per test erring with the table's p_{i,m}; no extra pairs.
SimulationReport simulate(const DecisionTree& tree, const TestTable& table,
                          const SimulationConfig& config);

// Seated worker errs with p_{i,m}; each of the 2 k_m extra workers errs with
// the allocation's p_e. Results do not depend on `config.threads`.
SimulationReport simulate(const DecisionTree& tree, const TestTable& table,
                          const WorkerAllocation& allocation,
                          const SimulationConfig& config);

struct ErrorSweepRow {
  double error_prob = 0.0;
  double designed = 0.0;     // exact P_m of the greedy tree
  double random_mean = 0.0;  // mean exact P_m over the random trees
  double random_std = 0.0;   // sample standard deviation
};

// Scalar-error sweep comparing the greedy tree against random test orders.
// Random tree i uses seed `seed + i` at every grid point.
std::vector<ErrorSweepRow> sweep_error(const TestTable& table,
                                       std::span<const double> grid,
                                       std::size_t random_trees,
                                       const BuilderConfig& config,
                                       std::uint64_t seed);

struct WorkerSweepRow {
  int pairs = 0;
  AssignmentStrategy strategy = AssignmentStrategy::Proposed;
  double misclassification = 0.0;
  double spread = 0.0;  // std over allocation draws; 0 for deterministic rows
  double expected_questions = 0.0;
};

// Exact P_m per (K, strategy) under effective errors. RandomPerPair is the
// mean over `random_draws` allocations seeded `seed + j`; SingleTest is the
// exact mean over the uniformly chosen test.
std::vector<WorkerSweepRow> sweep_workers(
    const DecisionTree& tree, const TestTable& table,
    std::span<const int> budgets,
    std::span<const AssignmentStrategy> strategies, double worker_error,
    std::size_t random_draws, std::uint64_t seed,
    const MetricConfig& metric = {});

}  // namespace noisytree

#endif  // NOISYTREE_SIMULATOR_HPP_
