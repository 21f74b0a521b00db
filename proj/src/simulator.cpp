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

#include "noisytree/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include "noisytree/fusion.hpp"
#include "noisytree/metrics.hpp"
#include "noisytree/random.hpp"

namespace noisytree {

namespace {

struct Tally {
  std::uint64_t errors = 0;
  std::uint64_t answers = 0;
  std::vector<std::uint64_t> confusion;  // flattened [true * n + leaf]

  void merge(const Tally& other) {
    errors += other.errors;
    answers += other.answers;
    for (std::size_t i = 0; i < confusion.size(); ++i) {
      confusion[i] += other.confusion[i];
    }
  }
};

class TrialRunner {
 public:
  TrialRunner(const DecisionTree& tree, const TestTable& table,
              std::vector<int> node_pairs, double extra_error,
              std::uint64_t seed)
      : tree_(tree),
        table_(table),
        node_pairs_(std::move(node_pairs)),
        extra_error_(extra_error),
        seed_(seed) {
    double running = 0.0;
    for (double p : table.priors()) {
      running += p;
      cumulative_.push_back(running);
    }
  }

  void run(std::uint64_t first, std::uint64_t last, Tally& tally) const {
    const std::size_t n = table_.num_classes();
    for (std::uint64_t trial = first; trial < last; ++trial) {
      CounterRng rng(seed_, trial);
      const ClassIndex truth = draw_class(rng.uniform());
      DecisionTree::NodeIndex i = 0;
      while (!tree_.node(i).is_leaf()) {
        const auto& node = tree_.node(i);
        const TestIndex t = *node.test;
        const int extra = 2 * node_pairs_[i];
        tally.answers += static_cast<std::uint64_t>(extra) + 1;
        const Outcome o = table_.outcome(t, truth);
        int ones = 0;
        if (o == Outcome::NotApplicable) {
          // Only a misrouted object lands here; workers answer at random.
          for (int w = 0; w <= extra; ++w) ones += rng.bernoulli(0.5);
        } else {
          const int truth_bit = o == Outcome::One ? 1 : 0;
          ones += truth_bit ^ rng.bernoulli(table_.error(t, truth));
          for (int w = 0; w < extra; ++w) {
            ones += truth_bit ^ rng.bernoulli(extra_error_);
          }
        }
        const bool one = ones * 2 > extra + 1;
        i = node.children[one ? 1 : 0];
      }
      const ClassIndex leaf = tree_.node(i).leaf_class();
      tally.errors += leaf != truth;
      ++tally.confusion[truth * n + leaf];
    }
  }

 private:
  ClassIndex draw_class(double u) const {
    auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
    if (it == cumulative_.end()) --it;  // priors summing to 1 - ulp
    return static_cast<ClassIndex>(it - cumulative_.begin());
  }

  const DecisionTree& tree_;
  const TestTable& table_;
  std::vector<int> node_pairs_;
  double extra_error_;
  std::uint64_t seed_;
  std::vector<double> cumulative_;
};

SimulationReport run_simulation(const DecisionTree& tree,
                                const TestTable& table,
                                std::vector<int> node_pairs,
                                double extra_error,
                                const SimulationConfig& config) {
  if (config.trials < 1) {
    throw Error(ErrorCode::InvalidArgument, "trials must be at least 1");
  }
  check_tree(tree, table);
  const std::size_t n = table.num_classes();
  const TrialRunner runner(tree, table, std::move(node_pairs), extra_error,
                           config.seed);

  const unsigned lanes = static_cast<unsigned>(std::clamp<std::uint64_t>(
      config.threads == 0 ? 1 : config.threads, 1, config.trials));
  std::vector<Tally> tallies(lanes);
  for (auto& tally : tallies) tally.confusion.assign(n * n, 0);
  const std::uint64_t chunk = config.trials / lanes;
  const std::uint64_t remainder = config.trials % lanes;
  {
    std::vector<std::jthread> workers;
    std::uint64_t first = 0;
    for (unsigned lane = 0; lane < lanes; ++lane) {
      const std::uint64_t last = first + chunk + (lane < remainder ? 1 : 0);
      workers.emplace_back(
          [&runner, &tallies, lane, first, last] {
            runner.run(first, last, tallies[lane]);
          });
      first = last;
    }
  }
  for (unsigned lane = 1; lane < lanes; ++lane) tallies[0].merge(tallies[lane]);
  const Tally& total = tallies[0];

  SimulationReport report;
  report.trials = config.trials;
  report.seed = config.seed;
  report.errors = total.errors;
  report.estimate =
      static_cast<double>(total.errors) / static_cast<double>(config.trials);
  report.half_width =
      1.96 * std::sqrt(report.estimate * (1.0 - report.estimate) /
                       static_cast<double>(config.trials));
  report.worker_answers = total.answers;
  report.mean_questions =
      static_cast<double>(total.answers) / static_cast<double>(config.trials);
  report.confusion.assign(n, std::vector<std::uint64_t>(n, 0));
  report.class_draws.assign(n, 0);
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = 0; b < n; ++b) {
      report.confusion[a][b] = total.confusion[a * n + b];
      report.class_draws[a] += total.confusion[a * n + b];
    }
  }
  return report;
}

}  // namespace

SimulationReport simulate(const DecisionTree& tree, const TestTable& table,
                          const SimulationConfig& config) {
  return run_simulation(tree, table, std::vector<int>(tree.size(), 0), 0.0,
                        config);
}

SimulationReport simulate(const DecisionTree& tree, const TestTable& table,
                          const WorkerAllocation& allocation,
                          const SimulationConfig& config) {
  std::vector<int> node_pairs(tree.size(), 0);
  for (std::size_t i = 0; i < tree.size(); ++i) {
    const auto& node = tree.node(i);
    if (!node.is_leaf()) node_pairs[i] = allocation.pairs_for(*node.test);
  }
  return run_simulation(tree, table, std::move(node_pairs),
                        allocation.worker_error, config);
}

namespace {

struct MeanStd {
  double mean = 0.0;
  double std = 0.0;
};

MeanStd mean_std(const std::vector<double>& values) {
  MeanStd out;
  if (values.empty()) return out;
  for (double v : values) out.mean += v;
  out.mean /= static_cast<double>(values.size());
  if (values.size() < 2) return out;
  double ss = 0.0;
  for (double v : values) ss += (v - out.mean) * (v - out.mean);
  out.std = std::sqrt(ss / static_cast<double>(values.size() - 1));
  return out;
}

}  // namespace

std::vector<ErrorSweepRow> sweep_error(const TestTable& table,
                                       std::span<const double> grid,
                                       std::size_t random_trees,
                                       const BuilderConfig& config,
                                       std::uint64_t seed) {
  std::vector<DecisionTree> baselines;
  for (std::size_t i = 0; i < random_trees; ++i) {
    baselines.push_back(build_random(table, seed + i));
  }
  std::vector<ErrorSweepRow> rows;
  for (double p : grid) {
    if (!(p > 0.0 && p < 0.5)) {
      throw Error(ErrorCode::ErrorProbOutOfRange,
                  "sweep error probabilities must lie in (0, 0.5)");
    }
    const TestTable noisy = table.with_uniform_error(p);
    ErrorSweepRow row;
    row.error_prob = p;
    row.designed =
        exact_misclassification(build_greedy(noisy, config).tree, noisy);
    std::vector<double> values;
    for (const auto& tree : baselines) {
      values.push_back(exact_misclassification(tree, noisy));
    }
    const MeanStd stats = mean_std(values);
    row.random_mean = stats.mean;
    row.random_std = stats.std;
    rows.push_back(row);
  }
  return rows;
}

std::vector<WorkerSweepRow> sweep_workers(
    const DecisionTree& tree, const TestTable& table,
    std::span<const int> budgets,
    std::span<const AssignmentStrategy> strategies, double worker_error,
    std::size_t random_draws, std::uint64_t seed, const MetricConfig& metric) {
  auto evaluate = [&](const WorkerAllocation& alloc) {
    const TestTable effective = apply_allocation(table, alloc);
    return std::pair{exact_misclassification(tree, effective),
                     allocation_cost(tree, table, alloc).expected_questions};
  };

  std::vector<WorkerSweepRow> rows;
  for (int k : budgets) {
    for (AssignmentStrategy strategy : strategies) {
      WorkerSweepRow row;
      row.pairs = k;
      row.strategy = strategy;
      if (strategy == AssignmentStrategy::RandomPerPair) {
        std::vector<double> pm;
        double questions = 0.0;
        const std::size_t draws = std::max<std::size_t>(random_draws, 1);
        for (std::size_t j = 0; j < draws; ++j) {
          auto [value, q] = evaluate(
              assign_baseline(tree, strategy, k, worker_error, seed + j));
          pm.push_back(value);
          questions += q;
        }
        const MeanStd stats = mean_std(pm);
        row.misclassification = stats.mean;
        row.spread = stats.std;
        row.expected_questions = questions / static_cast<double>(draws);
      } else if (strategy == AssignmentStrategy::SingleTest) {
        // Exact expectation over the uniformly chosen test.
        WorkerAllocation alloc = seated_allocation(tree, worker_error);
        alloc.strategy = strategy;
        alloc.budget = k;
        std::vector<double> pm;
        double questions = 0.0;
        for (std::size_t i = 0; i < alloc.pairs.size(); ++i) {
          std::fill(alloc.pairs.begin(), alloc.pairs.end(), 0);
          alloc.pairs[i] = k;
          auto [value, q] = evaluate(alloc);
          pm.push_back(value);
          questions += q;
        }
        const MeanStd stats = mean_std(pm);
        row.misclassification = stats.mean;
        row.spread = stats.std;
        row.expected_questions =
            pm.empty() ? 0.0 : questions / static_cast<double>(pm.size());
      } else {
        const WorkerAllocation alloc =
            strategy == AssignmentStrategy::Proposed
                ? assign_proposed(tree, table, k, worker_error, metric)
                      .allocation
                : assign_baseline(tree, strategy, k, worker_error, seed);
        std::tie(row.misclassification, row.expected_questions) =
            evaluate(alloc);
      }
      rows.push_back(row);
    }
  }
  return rows;
}

}  // namespace noisytree
