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

// Acceptance suite: one PASS/FAIL line per criterion.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "fixtures.hpp"
#include "noisytree/fusion.hpp"
#include "noisytree/metrics.hpp"
#include "noisytree/simulator.hpp"
#include "noisytree/tree_builder.hpp"
#include "noisytree/worker_assignment.hpp"
#include "oracles.hpp"

namespace nt = noisytree;
namespace ntt = noisytree::testing;

namespace {

using Clock = std::chrono::steady_clock;

int failures = 0;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

void report(int id, bool pass, const std::string& detail) {
  std::printf("%s criterion %d: %s\n", pass ? "PASS" : "FAIL", id,
              detail.c_str());
  std::fflush(stdout);
  if (!pass) ++failures;
}

std::string fmt(double v, int digits = 6) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

void criterion1() {
  const auto start = Clock::now();
  bool pass = true;
  std::string detail;
  for (double p : {0.01, 0.05, 0.1, 0.2, 0.3}) {
    const nt::TestTable table = ntt::reference_table(p);
    for (auto kind : {nt::MetricKind::Additive, nt::MetricKind::Multiplicative}) {
      nt::BuilderConfig config;
      config.metric = {kind, 1.0};
      const auto tree = nt::build_greedy(table, config).tree;
      std::string seq;
      for (auto t : nt::level_test_sequence(tree)) seq += table.test_id(t);
      const bool ok = nt::same_structure(tree, ntt::t1_rooted_tree(table));
      if (!ok) detail += " " + std::string(nt::metric_name(kind)) + "@" +
                         fmt(p) + "=" + seq;
      pass &= ok;
    }
  }
  const double t = seconds_since(start);
  pass &= t < 1.0;
  report(1, pass,
         "greedy gives T1,T5,T3,T2 under both metrics for all p*" +
             (detail.empty() ? "" : " (mismatch:" + detail + ")") + ", " +
             fmt(t, 3) + " s");
}

void criterion2() {
  const nt::TestTable table = ntt::reference_table(0.05);
  const auto scored =
      nt::score_joint_assignments(table, {nt::all_classes(table)}, {});
  const double h0 = ntt::conditional_entropy_oracle({{0.2, 0.05, 0.1, 0.6, 0.05}});
  const std::vector<std::vector<std::vector<double>>> splits{
      {{0.2, 0.05, 0.1, 0.05}, {0.6}},
      {{0.05, 0.1}, {0.2, 0.6, 0.05}},
      {{0.2, 0.1, 0.6}, {0.05, 0.05}},
      {{0.2, 0.1}, {0.05, 0.6, 0.05}},
  };
  const double expected[] = {19.419, 12.196, 9.379, 17.626};
  bool pass = scored.size() == 4;
  std::string detail;
  for (std::size_t t = 0; pass && t < 4; ++t) {
    const double oracle = (h0 - ntt::conditional_entropy_oracle(splits[t])) / 0.05;
    const double lib = scored[t].score;
    pass &= std::abs(lib - oracle) <= 1e-3 && std::abs(lib - expected[t]) <= 1e-3;
    detail += " " + table.test_id(t) + "=" + fmt(lib, 5);
  }
  pass = pass && scored[0].score > scored[3].score &&
         scored[3].score > scored[1].score && scored[1].score > scored[2].score;
  report(2, pass, "level-1 F^m T1 > T4 > T2 > T3:" + detail);
}

void criterion3() {
  const nt::TestTable table = ntt::reference_table(0.05);
  const double a = nt::exact_misclassification(ntt::t3_rooted_tree(table), table);
  const double b = nt::exact_misclassification(ntt::t1_rooted_tree(table), table);
  const bool pass_a = std::abs(a - 0.1113) <= 1e-4;
  const bool pass_b = std::abs(b - 0.08231) <= 1e-5;
  report(3, pass_a && pass_b,
         "T3-rooted tree P_m=" + fmt(a, 8) + " (target 0.1113 +- 1e-4)" +
             (pass_a ? "" : " out of tolerance") + ", T1-rooted tree P_m=" +
             fmt(b, 8) + " (target 0.08231 +- 1e-5)");
}

void criterion4() {
  ntt::RandomInstanceSpec spec;
  spec.per_cell_errors = false;
  int additive_ok = 0;
  int multiplicative_ok = 0;
  int geometric_ok = 0;
  constexpr int kInstances = 200;
  constexpr double kTol = 1e-9;
  for (int i = 0; i < kInstances; ++i) {
    const nt::TestTable table = ntt::random_instance(1000 + i, spec);
    const auto result = nt::build_greedy(table);
    const auto& q = result.quantities;
    const double add = nt::additive_approx(result.tree, table);
    const double mul = nt::multiplicative_approx(result.tree, table);
    const auto ab = nt::bounds_additive(q);
    const auto mb = nt::bounds_multiplicative(q, 1.0);
    const auto gb = nt::bounds_multiplicative_geometric(q, 1.0);
    additive_ok += ab.lower <= add + kTol && add <= ab.upper + kTol;
    multiplicative_ok += mb.lower <= mul + kTol && mul <= mb.upper + kTol;
    geometric_ok += gb.lower <= mul + kTol && mul <= gb.upper + kTol;
  }
  report(4, additive_ok == kInstances && multiplicative_ok == kInstances,
         "additive sandwich " + std::to_string(additive_ok) + "/200, "
         "multiplicative sandwich " + std::to_string(multiplicative_ok) +
             "/200 (depth-power form " + std::to_string(geometric_ok) +
             "/200)");
}

void criterion5() {
  const auto start = Clock::now();
  bool pass = true;
  double worst_beta = 0.0;
  for (int i = 1; i <= 9; ++i) {
    const double p = 0.05 * i;
    const auto r = nt::group_error_monotonicity(p, 50);
    pass &= r.pass();
    for (int k = 0; k <= 50; ++k) {
      const double beta = nt::reg_incomplete_beta(p, k + 1.0, k + 1.0);
      worst_beta = std::max(worst_beta, std::abs(beta - r.sequence[k]));
    }
    // Finite differences of the real-j extension stay negative.
    for (double j = 0.0; j <= 50.0; j += 0.125) {
      const double h = 1e-3;
      const double d = nt::reg_incomplete_beta(p, j + h + 1.0, j + h + 1.0) -
                       nt::reg_incomplete_beta(p, j + 1.0, j + 1.0);
      const double scale = nt::reg_incomplete_beta(p, j + 1.0, j + 1.0);
      pass &= d < 0.0 || scale < 1e-300;
    }
  }
  pass &= worst_beta <= 1e-10;
  const double t = seconds_since(start);
  pass &= t < 1.0;
  report(5, pass,
         "f_e strictly decreasing with shrinking steps, sum vs beta max diff " +
             fmt(worst_beta, 3) + ", " + fmt(t, 3) + " s");
}

void criterion6() {
  const auto start = Clock::now();
  std::vector<double> grid;
  for (int i = 1; i <= 30; ++i) grid.push_back(i / 100.0);
  const auto rows = nt::sweep_error(ntt::reference_table(0.0), grid, 20, {}, 0);
  bool ordered = true;
  for (const auto& row : rows) ordered &= row.designed <= row.random_mean;
  const double gap05 = rows[4].random_mean - rows[4].designed;
  const double gap30 = rows[29].random_mean - rows[29].designed;
  const double t = seconds_since(start);
  report(6, ordered && gap30 > gap05 && t < 5.0,
         "designed <= random mean at all 30 points, gap " + fmt(gap05, 4) +
             " at 0.05 -> " + fmt(gap30, 4) + " at 0.30, " + fmt(t, 3) + " s");
}

void criterion7() {
  const auto start = Clock::now();
  const nt::TestTable table = ntt::reference_table(0.2);
  const auto tree = ntt::t1_rooted_tree(table);
  std::vector<int> budgets;
  for (int k = 0; k <= 30; ++k) budgets.push_back(k);
  const std::vector<nt::AssignmentStrategy> strategies{
      nt::AssignmentStrategy::SingleTest, nt::AssignmentStrategy::RandomPerPair,
      nt::AssignmentStrategy::Proposed,
      nt::AssignmentStrategy::AllWorkersAllTests};
  const auto rows =
      nt::sweep_workers(tree, table, budgets, strategies, 0.2, 50, 0);
  auto at = [&](int k, std::size_t s) { return rows[k * 4 + s].misclassification; };
  bool ordered = true;
  for (int k = 5; k <= 30; ++k) {
    ordered &= at(k, 0) >= at(k, 1) && at(k, 1) >= at(k, 2) &&
               at(k, 2) >= at(k, 3);
  }
  bool monotone = true;
  for (int k = 1; k <= 30; ++k) {
    for (std::size_t s = 0; s < 4; ++s) monotone &= at(k, s) <= at(k - 1, s);
  }
  const double gap = at(30, 2) - at(30, 3);
  const double t = seconds_since(start);
  report(7, ordered && monotone && gap <= 0.02 && t < 10.0,
         std::string("single >= random >= proposed >= all for K>=5: ") +
             (ordered ? "yes" : "no") + ", non-increasing: " +
             (monotone ? "yes" : "no") + ", proposed - all at K=30 = " +
             fmt(gap, 3) + ", " + fmt(t, 3) + " s");
}

void criterion8() {
  const auto start = Clock::now();
  const nt::TestTable table = ntt::reference_table(0.05);
  const auto tree = ntt::t1_rooted_tree(table);
  const double exact = nt::exact_misclassification(tree, table);
  std::vector<nt::SimulationReport> reports;
  for (unsigned lanes : {1u, 4u, 8u}) {
    reports.push_back(nt::simulate(tree, table, {1000000, 42, lanes}));
  }
  bool identical = true;
  for (const auto& r : reports) {
    identical &= r.errors == reports[0].errors &&
                 r.confusion == reports[0].confusion;
  }
  const double sigma = std::sqrt(exact * (1 - exact) / 1e6);
  const double dev = std::abs(reports[0].estimate - exact);
  const double t = seconds_since(start);
  report(8, identical && dev <= 4 * sigma && t < 30.0,
         "estimate " + fmt(reports[0].estimate, 6) + " vs " + fmt(exact, 6) +
             " (" + fmt(dev / sigma, 3) + " sigma), lanes 1/4/8 " +
             (identical ? "identical" : "differ") + ", " + fmt(t, 3) + " s");
}

void criterion9() {
  ntt::RandomInstanceSpec spec;
  spec.max_classes = 4;
  spec.max_tests = 4;
  bool pass = true;
  double worst_gap = 0.0;
  int optimal = 0;
  std::size_t trees = 0;
  for (int i = 0; i < 50; ++i) {
    const nt::TestTable table = ntt::random_instance(5000 + i, spec);
    double best = 1.0;
    double worst = 0.0;
    nt::for_each_tree(table, {}, [&](const nt::DecisionTree& tree) {
      ++trees;
      const double pm = nt::exact_misclassification(tree, table);
      const double pc = nt::exact_correct(tree, table);
      pass &= std::abs(pm + pc - 1.0) <= 1e-12;
      best = std::min(best, pm);
      worst = std::max(worst, pm);
    });
    const double greedy =
        nt::exact_misclassification(nt::build_greedy(table).tree, table);
    pass &= greedy <= worst + 1e-15;
    worst_gap = std::max(worst_gap, greedy - best);
    optimal += greedy - best <= 1e-12;
  }
  report(9, pass,
         std::to_string(trees) + " trees enumerated, greedy optimal on " +
             std::to_string(optimal) + "/50, largest gap to optimum " +
             fmt(worst_gap, 3));
}

}  // namespace

int main() {
  criterion1();
  criterion2();
  criterion3();
  criterion4();
  criterion5();
  criterion6();
  criterion7();
  criterion8();
  criterion9();
  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
