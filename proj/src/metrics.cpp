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

#include "noisytree/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace noisytree {

const char* metric_name(MetricKind kind) {
  return kind == MetricKind::Additive ? "additive" : "multiplicative";
}

namespace {

template <typename Proj, typename Cmp>
double extreme(const std::vector<LevelQuantity>& levels, Proj proj, Cmp cmp,
               double empty_value) {
  if (levels.empty()) return empty_value;
  double best = proj(levels.front());
  for (const auto& level : levels) {
    const double v = proj(level);
    if (cmp(v, best)) best = v;
  }
  return best;
}

}  // namespace

double LevelQuantities::additive_min() const {
  return extreme(levels, [](const auto& l) { return l.additive; },
                 std::less<>(), std::numeric_limits<double>::infinity());
}

double LevelQuantities::additive_max() const {
  return extreme(levels, [](const auto& l) { return l.additive; },
                 std::greater<>(), std::numeric_limits<double>::infinity());
}

double LevelQuantities::multiplicative_min() const {
  return extreme(levels, [](const auto& l) { return l.multiplicative; },
                 std::less<>(), 1.0);
}

double LevelQuantities::multiplicative_max() const {
  return extreme(levels, [](const auto& l) { return l.multiplicative; },
                 std::greater<>(), 1.0);
}

double level_entropy(std::span<const double> priors,
                     const Partition& partition) {
  check_partition(partition, priors.size());
  double h = 0.0;
  for (const Block& block : partition) {
    const double mass = block.mass(priors);
    for (ClassIndex c : block) {
      const double p = priors[c];
      if (p > 0.0) h -= p * std::log2(p / mass);
    }
  }
  return h;
}

double level_error_mass(const TestTable& table, const Partition& partition,
                        const LevelAssignment& assignment) {
  if (assignment.size() != partition.size()) {
    throw Error(ErrorCode::InvalidArgument,
                "assignment size does not match partition");
  }
  double g = 0.0;
  for (std::size_t k = 0; k < partition.size(); ++k) {
    if (!assignment[k]) continue;
    const TestIndex t = *assignment[k];
    if (!is_applicable(table, partition[k], t)) {
      throw Error(ErrorCode::InapplicableTest,
                  "assigned test does not split its block");
    }
    for (ClassIndex c : partition[k]) g += table.prior(c) * table.error(t, c);
  }
  return g;
}

double level_correct_mass(const TestTable& table, const Partition& partition,
                          const LevelAssignment& assignment) {
  return 1.0 - level_error_mass(table, partition, assignment);
}

double metric_additive(double entropy_drop, double error_mass) {
  if (!(entropy_drop >= 0.0) || !(error_mass >= 0.0)) {
    throw Error(ErrorCode::DomainError,
                "additive metric needs a non-negative entropy drop and mass");
  }
  if (error_mass == 0.0) {
    if (entropy_drop == 0.0) {
      throw Error(ErrorCode::ZeroErrorMass,
                  "additive metric is undefined for a level with no entropy "
                  "drop and no error mass");
    }
    return std::numeric_limits<double>::infinity();
  }
  return entropy_drop / error_mass;
}

double metric_multiplicative(double entropy_before, double entropy_after,
                             double correct_mass, double offset) {
  if (!(correct_mass > 0.0) || !(offset > 0.0) || !(entropy_after >= 0.0)) {
    throw Error(ErrorCode::DomainError,
                "multiplicative metric needs b > 0, r > 0, H >= 0");
  }
  return ((entropy_before + offset) / (entropy_after + offset)) / correct_mass;
}

LevelQuantity level_quantity(const TestTable& table, const Partition& before,
                             const LevelAssignment& assignment, double offset) {
  LevelQuantity q;
  q.entropy_before = level_entropy(table.priors(), before);
  q.entropy_after =
      level_entropy(table.priors(), refine_partition(table, before, assignment));
  q.error_mass = level_error_mass(table, before, assignment);
  q.correct_mass = 1.0 - q.error_mass;
  // A strict split of positive-prior classes always lowers the entropy;
  // clamp rounding noise so the metric preconditions hold.
  const double drop = std::max(0.0, q.entropy_before - q.entropy_after);
  q.additive = metric_additive(drop, q.error_mass);
  q.multiplicative = metric_multiplicative(q.entropy_before, q.entropy_after,
                                           q.correct_mass, offset);
  return q;
}

LevelQuantities level_quantities(const DecisionTree& tree,
                                 const TestTable& table, double offset) {
  LevelQuantities result;
  result.initial_entropy =
      level_entropy(table.priors(), Partition{all_classes(table)});
  for (const Level& level : level_trace(tree)) {
    result.levels.push_back(
        level_quantity(table, level.before, level.assignment, offset));
  }
  return result;
}

namespace {

double path_survival(const DecisionTree& tree, const TestTable& table,
                     ClassIndex c) {
  double survive = 1.0;
  for (const PathStep& step : class_path(tree, table, c)) {
    survive *= 1.0 - step.error_prob;
  }
  return survive;
}

}  // namespace

double exact_misclassification(const DecisionTree& tree,
                               const TestTable& table) {
  double pm = 0.0;
  for (ClassIndex c = 0; c < table.num_classes(); ++c) {
    pm += table.prior(c) * (1.0 - path_survival(tree, table, c));
  }
  return pm;
}

double exact_correct(const DecisionTree& tree, const TestTable& table) {
  double pc = 0.0;
  for (ClassIndex c = 0; c < table.num_classes(); ++c) {
    pc += table.prior(c) * path_survival(tree, table, c);
  }
  return pc;
}

double additive_approx(const DecisionTree& tree, const TestTable& table) {
  double total = 0.0;
  for (const Level& level : level_trace(tree)) {
    total += level_error_mass(table, level.before, level.assignment);
  }
  return total;
}

double multiplicative_approx(const DecisionTree& tree, const TestTable& table) {
  double product = 1.0;
  for (const Level& level : level_trace(tree)) {
    product *= level_correct_mass(table, level.before, level.assignment);
  }
  return product;
}

Bounds bounds_additive(const LevelQuantities& q) {
  return {q.initial_entropy / q.additive_max(),
          q.initial_entropy / q.additive_min()};
}

Bounds bounds_additive(const DecisionTree& tree, const TestTable& table) {
  return bounds_additive(level_quantities(tree, table));
}

namespace {

// Product of the entropy ratios over all levels, (H(L_0) + r) / r since
// H(L_D) = 0. Equals H(L_0) + 1 at the default offset.
double ratio_product(const LevelQuantities& q, double offset) {
  return (q.initial_entropy + offset) / offset;
}

}  // namespace

Bounds bounds_multiplicative(const LevelQuantities& q, double offset) {
  const double top = ratio_product(q, offset);
  return {top / q.multiplicative_max(), top / q.multiplicative_min()};
}

Bounds bounds_multiplicative(const DecisionTree& tree, const TestTable& table,
                             double offset) {
  return bounds_multiplicative(level_quantities(tree, table, offset), offset);
}

Bounds bounds_multiplicative_geometric(const LevelQuantities& q,
                                       double offset) {
  const double top = ratio_product(q, offset);
  const double depth = static_cast<double>(q.levels.size());
  return {top / std::pow(q.multiplicative_max(), depth),
          top / std::pow(q.multiplicative_min(), depth)};
}

}  // namespace noisytree
