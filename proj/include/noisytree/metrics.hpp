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

// Level entropy, per-level error and correct masses, the two greedy
// construction metrics, and exact / approximate tree evaluators.

#ifndef NOISYTREE_METRICS_HPP_
#define NOISYTREE_METRICS_HPP_

#include <span>
#include <vector>

#include "noisytree/core_model.hpp"

namespace noisytree {

enum class MetricKind { Additive, Multiplicative };

struct MetricConfig {
  MetricKind kind = MetricKind::Additive;
  // Offset r in the generalized entropy ratio (H_prev + r) / (H_next + r).
  double offset = 1.0;
};

const char* metric_name(MetricKind kind);

// Quantities of a single level, i.e. the tests applied between L_{d-1} and
// L_d.
struct LevelQuantity {
  double entropy_before = 0.0;  // H(L_{d-1}), bits
  double entropy_after = 0.0;   // H(L_d), bits
  double error_mass = 0.0;      // g(d-1, d)
  double correct_mass = 1.0;    // b(d-1, d)
  double additive = 0.0;        // F^m, +inf when the level is error free
  double multiplicative = 1.0;  // F^c
};

struct LevelQuantities {
  double initial_entropy = 0.0;  // H(L_0)
  std::vector<LevelQuantity> levels;

  double additive_min() const;
  double additive_max() const;
  double multiplicative_min() const;
  double multiplicative_max() const;
};

// Conditional entropy of the all-singletons partition given `partition`, in
// bits. Test errors play no part: blocks are groups of true classes.
double level_entropy(std::span<const double> priors, const Partition& partition);

// g: prior mass times error probability summed over classes under test.
// Classes in unassigned blocks contribute nothing.
double level_error_mass(const TestTable& table, const Partition& partition,
                        const LevelAssignment& assignment);

// b = 1 - g.
double level_correct_mass(const TestTable& table, const Partition& partition,
                          const LevelAssignment& assignment);

// Entropy drop per unit error mass. Returns +inf for an error-free level
// that still reduces entropy; throws ZeroErrorMass for 0/0.
double metric_additive(double entropy_drop, double error_mass);

// ((H_prev + r) / (H_next + r)) / b.
double metric_multiplicative(double entropy_before, double entropy_after,
                             double correct_mass, double offset = 1.0);

LevelQuantity level_quantity(const TestTable& table, const Partition& before,
                             const LevelAssignment& assignment,
                             double offset = 1.0);

LevelQuantities level_quantities(const DecisionTree& tree,
                                 const TestTable& table, double offset = 1.0);

// Exact probabilities: an object is classified correctly iff every test on
// its class path answers correctly.
double exact_misclassification(const DecisionTree& tree, const TestTable& table);
double exact_correct(const DecisionTree& tree, const TestTable& table);

// Sum of level error masses (first-order approximation of P_m).
double additive_approx(const DecisionTree& tree, const TestTable& table);
// Product of level correct masses (approximation of P_c).
double multiplicative_approx(const DecisionTree& tree, const TestTable& table);

struct Bounds {
  double lower = 0.0;
  double upper = 0.0;
};

// (H(L_0) / F^m_max, H(L_0) / F^m_min).
Bounds bounds_additive(const DecisionTree& tree, const TestTable& table);
Bounds bounds_additive(const LevelQuantities& quantities);

// ((H(L_0) + r) / (r F^c_max), (H(L_0) + r) / (r F^c_min)); with r = 1 this
// is ((H(L_0) + 1) / F^c_max, (H(L_0) + 1) / F^c_min).
Bounds bounds_multiplicative(const DecisionTree& tree, const TestTable& table,
                             double offset = 1.0);
Bounds bounds_multiplicative(const LevelQuantities& quantities,
                             double offset = 1.0);

// Same numerator over (F^c_max)^D and (F^c_min)^D. The numerator equals the
// product of F^c b over all D levels, so these always bracket the product of
// the b's.
Bounds bounds_multiplicative_geometric(const LevelQuantities& quantities,
                                       double offset = 1.0);

}  // namespace noisytree

#endif  // NOISYTREE_METRICS_HPP_
