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

#include "noisytree/cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdlib>
#include <functional>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "noisytree/fusion.hpp"
#include "noisytree/io.hpp"
#include "noisytree/metrics.hpp"
#include "noisytree/simulator.hpp"
#include "noisytree/tree_builder.hpp"
#include "noisytree/worker_assignment.hpp"

namespace noisytree {

namespace {

namespace fs = std::filesystem;

struct ErrorSpec {
  std::optional<double> error_prob;
  std::optional<fs::path> error_matrix;
};

struct MetricOptions {
  std::string metric = "additive";
  double offset = 1.0;

  MetricConfig config() const {
    MetricConfig m;
    if (metric == "additive") {
      m.kind = MetricKind::Additive;
    } else if (metric == "multiplicative") {
      m.kind = MetricKind::Multiplicative;
    } else {
      throw Error(ErrorCode::InvalidArgument,
                  "unknown metric '" + metric + "'");
    }
    if (!(offset > 0.0)) {
      throw Error(ErrorCode::InvalidArgument, "--offset must be positive");
    }
    m.offset = offset;
    return m;
  }
};

void add_error_spec(CLI::App* cmd, ErrorSpec& spec) {
  auto* prob = cmd->add_option("--error-prob", spec.error_prob,
                               "Scalar test error probability p*");
  auto* matrix = cmd->add_option("--error-matrix", spec.error_matrix,
                                 "Per-class, per-test error matrix file");
  prob->excludes(matrix);
}

void add_metric(CLI::App* cmd, MetricOptions& metric) {
  cmd->add_option("--metric", metric.metric, "additive | multiplicative")
      ->check(CLI::IsMember({"additive", "multiplicative"}));
  cmd->add_option("--offset", metric.offset,
                  "Offset r of the generalized entropy ratio");
}

unsigned default_threads() {
  if (const char* env = std::getenv("NOISYTREE_THREADS")) {
    const long value = std::strtol(env, nullptr, 10);
    if (value > 0) return static_cast<unsigned>(value);
  }
  return 1;
}

std::vector<double> parse_grid(const std::string& text) {
  std::vector<double> grid;
  auto number = [&](const std::string& s) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(s, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != s.size() || s.empty()) {
      throw Error(ErrorCode::InvalidArgument, "bad grid value '" + s + "'");
    }
    return v;
  };
  if (text.find(':') != std::string::npos) {
    std::vector<std::string> parts;
    std::stringstream ss(text);
    std::string part;
    while (std::getline(ss, part, ':')) parts.push_back(part);
    if (parts.size() != 3) {
      throw Error(ErrorCode::InvalidArgument,
                  "grid must look like start:stop:step");
    }
    const double start = number(parts[0]);
    const double stop = number(parts[1]);
    const double step = number(parts[2]);
    if (!(step > 0.0) || stop < start) {
      throw Error(ErrorCode::InvalidArgument, "empty or malformed grid");
    }
    const auto count =
        static_cast<long>(std::floor((stop - start) / step + 1e-9)) + 1;
    for (long i = 0; i < count; ++i) {
      // Round to 12 significant digits so 0.01 * 7 prints as 0.07.
      const double v = start + static_cast<double>(i) * step;
      grid.push_back(std::stod(format_number(std::round(v * 1e12) / 1e12)));
    }
    return grid;
  }
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, ',')) grid.push_back(number(part));
  return grid;
}

std::vector<AssignmentStrategy> parse_strategies(const std::string& text) {
  std::vector<AssignmentStrategy> result;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, ',')) result.push_back(parse_strategy(part));
  return result;
}

int pairs_from_workers(int workers) {
  if (workers < 0 || workers % 2 != 0) {
    throw Error(ErrorCode::InvalidArgument,
                "--workers must be a non-negative even number");
  }
  return workers / 2;
}

std::string joined_tests(const Level& level, const TestTable& table) {
  std::string s;
  for (const auto& t : level.assignment) {
    if (!t) continue;
    if (!s.empty()) s += ';';
    s += table.test_id(*t);
  }
  return s;
}

void print_evaluation(std::ostream& out, const DecisionTree& tree,
                      const TestTable& table, double offset) {
  const auto levels = level_trace(tree);
  const LevelQuantities q = level_quantities(tree, table, offset);
  out << "level,tests,H_before,H_after,g,b,F_m,F_c\n";
  for (std::size_t d = 0; d < levels.size(); ++d) {
    const auto& l = q.levels[d];
    out << d + 1 << ',' << joined_tests(levels[d], table) << ','
        << format_number(l.entropy_before) << ','
        << format_number(l.entropy_after) << ','
        << format_number(l.error_mass) << ',' << format_number(l.correct_mass)
        << ',' << format_number(l.additive) << ','
        << format_number(l.multiplicative) << '\n';
  }
  const Bounds add = bounds_additive(q);
  const Bounds mul = bounds_multiplicative(q, offset);
  out << "H_L0=" << format_number(q.initial_entropy) << '\n'
      << "depth=" << levels.size() << '\n'
      << "exact_pm=" << format_number(exact_misclassification(tree, table))
      << '\n'
      << "exact_pc=" << format_number(exact_correct(tree, table)) << '\n'
      << "additive_approx_pm=" << format_number(additive_approx(tree, table))
      << '\n'
      << "multiplicative_approx_pc="
      << format_number(multiplicative_approx(tree, table)) << '\n'
      << "bounds_additive_pm=" << format_number(add.lower) << ','
      << format_number(add.upper) << '\n'
      << "bounds_multiplicative_pc=" << format_number(mul.lower) << ','
      << format_number(mul.upper) << '\n';
}

void emit(std::ostream& out, const std::optional<fs::path>& path,
          const std::string& text) {
  if (path) {
    write_file(*path, text);
  } else {
    out << text;
  }
}

DecisionTree load_tree(const fs::path& path, const TestTable& table) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(read_file(path));
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::ParseError, path.string() + ": " + e.what());
  }
  return tree_from_json(doc, table);
}

// Resolves `--error-prob` / `--error-matrix`, falling back to `fallback`.
TestTable load_with_errors(const fs::path& table_path, const ErrorSpec& spec,
                           std::optional<double> fallback = std::nullopt) {
  std::optional<double> prob = spec.error_prob;
  if (!prob && !spec.error_matrix) prob = fallback;
  return load_table(table_path, prob, spec.error_matrix);
}

struct AllocationOptions {
  int workers = 0;
  std::optional<double> worker_error;
  std::string strategy = "proposed";
  std::uint64_t seed = 0;
};

void add_allocation(CLI::App* cmd, AllocationOptions& opts) {
  cmd->add_option("--workers", opts.workers,
                  "Extra workers 2K to distribute (even)");
  cmd->add_option("--worker-error", opts.worker_error,
                  "Per-worker error probability p_e");
  cmd->add_option("--strategy", opts.strategy,
                  "proposed | random | single | all");
  cmd->add_option("--seed", opts.seed, "Random seed");
}

struct AllocationResult {
  WorkerAllocation allocation;
  std::vector<AssignmentStep> log;
};

AllocationResult make_allocation(const DecisionTree& tree,
                                 const TestTable& table,
                                 const AllocationOptions& opts,
                                 const MetricConfig& metric) {
  if (!opts.worker_error) {
    throw Error(ErrorCode::InvalidArgument, "--worker-error is required");
  }
  const int pairs = pairs_from_workers(opts.workers);
  const AssignmentStrategy strategy = parse_strategy(opts.strategy);
  if (strategy == AssignmentStrategy::Proposed) {
    auto result = assign_proposed(tree, table, pairs, *opts.worker_error, metric);
    result.allocation.seed = opts.seed;
    return {std::move(result.allocation), std::move(result.log)};
  }
  return {assign_baseline(tree, strategy, pairs, *opts.worker_error, opts.seed),
          {}};
}

HeaderLines allocation_header(const WorkerAllocation& allocation,
                              const TestTable& table) {
  HeaderLines header{{"strategy", strategy_name(allocation.strategy)},
                     {"seed", std::to_string(allocation.seed)},
                     {"worker_error", format_number(allocation.worker_error)},
                     {"pair_budget", std::to_string(allocation.budget)}};
  if (allocation.strategy == AssignmentStrategy::AllWorkersAllTests) {
    header.emplace_back("group_convention",
                        "every test answered by the same 2K+1 workers");
  }
  for (std::size_t i = 0; i < allocation.tests.size(); ++i) {
    header.emplace_back(
        "allocation", table.test_id(allocation.tests[i]) + ":" +
                          std::to_string(allocation.pairs[i]) + ":" +
                          format_number(effective_error(
                              allocation, allocation.tests[i])));
  }
  return header;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out,
            std::ostream& err) {
  CLI::App app{"Noisy-test decision trees with crowd worker fusion",
               "noisytree"};
  app.require_subcommand(1);

  // build
  fs::path build_table;
  ErrorSpec build_errors;
  MetricOptions build_metric;
  std::size_t joint_cap = 10000;
  std::optional<fs::path> build_out;
  auto* build = app.add_subcommand("build", "Design a tree greedily");
  build->add_option("--table", build_table, "Test table")->required();
  add_error_spec(build, build_errors);
  add_metric(build, build_metric);
  build->add_option("--joint-cap", joint_cap,
                    "Largest joint assignment scored exhaustively per level");
  build->add_option("--out", build_out, "Tree document output path");

  // evaluate
  fs::path eval_tree, eval_table;
  ErrorSpec eval_errors;
  double eval_offset = 1.0;
  auto* evaluate = app.add_subcommand("evaluate", "Evaluate a tree");
  evaluate->add_option("--tree", eval_tree, "Tree document")->required();
  evaluate->add_option("--table", eval_table, "Test table")->required();
  add_error_spec(evaluate, eval_errors);
  evaluate->add_option("--offset", eval_offset,
                       "Offset r of the generalized entropy ratio");

  // assign
  fs::path assign_tree, assign_table;
  ErrorSpec assign_errors;
  AllocationOptions assign_opts;
  MetricOptions assign_metric;
  std::optional<fs::path> assign_out;
  auto* assign = app.add_subcommand("assign", "Distribute extra workers");
  assign->add_option("--tree", assign_tree, "Tree document")->required();
  assign->add_option("--table", assign_table, "Test table")->required();
  add_error_spec(assign, assign_errors);
  add_allocation(assign, assign_opts);
  add_metric(assign, assign_metric);
  assign->add_option("--out", assign_out, "Allocation document output path");

  // simulate
  fs::path sim_tree, sim_table;
  ErrorSpec sim_errors;
  AllocationOptions sim_alloc;
  MetricOptions sim_metric;
  std::uint64_t trials = 1000000;
  unsigned threads = default_threads();
  std::optional<fs::path> sim_out;
  auto* simulate_cmd =
      app.add_subcommand("simulate", "Monte Carlo classification");
  simulate_cmd->add_option("--tree", sim_tree, "Tree document")->required();
  simulate_cmd->add_option("--table", sim_table, "Test table")->required();
  add_error_spec(simulate_cmd, sim_errors);
  add_allocation(simulate_cmd, sim_alloc);
  add_metric(simulate_cmd, sim_metric);
  simulate_cmd->add_option("--trials", trials, "Number of objects");
  simulate_cmd->add_option("--threads", threads,
                           "Parallel lanes (default $NOISYTREE_THREADS or 1)");
  simulate_cmd->add_option("--out", sim_out, "Report output path");

  // sweep-error
  fs::path se_table;
  std::string se_grid = "0.01:0.30:0.01";
  std::size_t random_trees = 20;
  std::uint64_t se_seed = 0;
  MetricOptions se_metric;
  std::optional<fs::path> se_out;
  auto* sweep_err =
      app.add_subcommand("sweep-error", "Designed vs random trees over p*");
  sweep_err->add_option("--table", se_table, "Test table")->required();
  sweep_err->add_option("--grid", se_grid, "start:stop:step or a,b,c");
  sweep_err->add_option("--random-trees", random_trees,
                        "Random trees per grid point");
  sweep_err->add_option("--seed", se_seed, "Seed of the first random tree");
  add_metric(sweep_err, se_metric);
  sweep_err->add_option("--out", se_out, "Report output path");

  // sweep-workers
  fs::path sw_table;
  std::optional<fs::path> sw_tree;
  int kmax = 30;
  double sw_worker_error = 0.2;
  std::string sw_strategies = "proposed,random,single,all";
  std::size_t random_draws = 50;
  std::uint64_t sw_seed = 0;
  MetricOptions sw_metric;
  std::optional<fs::path> sw_out;
  auto* sweep_wrk = app.add_subcommand(
      "sweep-workers", "Misclassification against the pair budget K");
  sweep_wrk->add_option("--table", sw_table, "Test table")->required();
  sweep_wrk->add_option("--tree", sw_tree,
                        "Tree document (default: greedy tree at p_e)");
  sweep_wrk->add_option("--kmax", kmax, "Largest pair budget K");
  sweep_wrk->add_option("--worker-error", sw_worker_error,
                        "Per-worker error probability p_e");
  sweep_wrk->add_option("--strategies", sw_strategies,
                        "Comma-separated strategies");
  sweep_wrk->add_option("--random-draws", random_draws,
                        "Allocation draws averaged for the random strategy");
  sweep_wrk->add_option("--seed", sw_seed, "Random seed");
  add_metric(sweep_wrk, sw_metric);
  sweep_wrk->add_option("--out", sw_out, "Report output path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  }

  try {
    if (*build) {
      const TestTable table = load_with_errors(build_table, build_errors);
      BuilderConfig config;
      config.metric = build_metric.config();
      config.joint_cap = joint_cap;
      const BuildResult result = build_greedy(table, config);
      print_evaluation(out, result.tree, table, config.metric.offset);
      const std::string doc =
          tree_document(result.tree, table, builder_json(config)).dump(2) +
          "\n";
      emit(out, build_out, doc);
    } else if (*evaluate) {
      const TestTable table = load_with_errors(eval_table, eval_errors);
      if (!(eval_offset > 0.0)) {
        throw Error(ErrorCode::InvalidArgument, "--offset must be positive");
      }
      const DecisionTree tree = load_tree(eval_tree, table);
      print_evaluation(out, tree, table, eval_offset);
    } else if (*assign) {
      const TestTable table =
          load_with_errors(assign_table, assign_errors, assign_opts.worker_error);
      const DecisionTree tree = load_tree(assign_tree, table);
      const MetricConfig metric = assign_metric.config();
      const AllocationResult result =
          make_allocation(tree, table, assign_opts, metric);
      const WorkerAllocation& alloc = result.allocation;
      write_header(out, allocation_header(alloc, table));
      out << "test,pairs,workers,effective_error\n";
      for (std::size_t i = 0; i < alloc.tests.size(); ++i) {
        out << table.test_id(alloc.tests[i]) << ',' << alloc.pairs[i] << ','
            << 2 * alloc.pairs[i] + 1 << ','
            << format_number(effective_error(alloc, alloc.tests[i])) << '\n';
      }
      if (!result.log.empty()) {
        out << "iteration,level,test,pairs_after,metric_before,metric_after,"
               "level_metrics\n";
        for (const auto& step : result.log) {
          out << step.iteration << ',' << step.level << ','
              << table.test_id(step.test) << ',' << step.pairs_after << ','
              << format_number(step.metric_before) << ','
              << format_number(step.metric_after) << ',';
          for (std::size_t d = 0; d < step.level_metrics.size(); ++d) {
            out << (d ? ";" : "") << format_number(step.level_metrics[d]);
          }
          out << '\n';
        }
      }
      const AllocationCost cost = allocation_cost(tree, table, alloc);
      const TestTable effective = apply_allocation(table, alloc);
      out << "expected_questions=" << format_number(cost.expected_questions)
          << '\n'
          << "flat_total=" << cost.flat_total << '\n'
          << "exact_pm=" << format_number(exact_misclassification(tree, effective))
          << '\n';
      if (assign_out) {
        write_file(*assign_out, allocation_to_json(alloc, table).dump(2) + "\n");
      }
    } else if (*simulate_cmd) {
      const TestTable table =
          load_with_errors(sim_table, sim_errors, sim_alloc.worker_error);
      const DecisionTree tree = load_tree(sim_tree, table);
      SimulationConfig config{trials, sim_alloc.seed, threads};
      HeaderLines header{{"command", "simulate"},
                         {"table_checksum", table_checksum(table)}};
      SimulationReport report;
      double exact = 0.0;
      if (sim_alloc.workers > 0 || sim_alloc.worker_error) {
        const auto alloc =
            make_allocation(tree, table, sim_alloc, sim_metric.config())
                .allocation;
        const auto extra = allocation_header(alloc, table);
        header.insert(header.end(), extra.begin(), extra.end());
        report = simulate(tree, table, alloc, config);
        exact = exact_misclassification(tree, apply_allocation(table, alloc));
      } else {
        header.emplace_back("seed", std::to_string(config.seed));
        report = simulate(tree, table, config);
        exact = exact_misclassification(tree, table);
      }
      header.emplace_back("exact_pm", format_number(exact));
      std::ostringstream text;
      write_simulation(text, header, report, table);
      emit(out, sim_out, text.str());
    } else if (*sweep_err) {
      std::istringstream table_text(read_file(se_table));
      RawTable raw = parse_table(table_text, se_table.string());
      set_uniform_error(raw, 0.0);
      const TestTable table = validate_table(std::move(raw));
      BuilderConfig config;
      config.metric = se_metric.config();
      const auto grid = parse_grid(se_grid);
      const auto rows = sweep_error(table, grid, random_trees, config, se_seed);
      HeaderLines header{{"command", "sweep-error"},
                         {"table_checksum", table_checksum(table)},
                         {"metric", metric_name(config.metric.kind)},
                         {"offset", format_number(config.metric.offset)},
                         {"grid", se_grid},
                         {"random_trees", std::to_string(random_trees)},
                         {"seed", std::to_string(se_seed)}};
      std::ostringstream text;
      write_error_sweep(text, header, rows);
      emit(out, se_out, text.str());
    } else if (*sweep_wrk) {
      std::istringstream table_text(read_file(sw_table));
      RawTable raw = parse_table(table_text, sw_table.string());
      set_uniform_error(raw, sw_worker_error);
      const TestTable table = validate_table(std::move(raw));
      const MetricConfig metric = sw_metric.config();
      DecisionTree tree;
      if (sw_tree) {
        tree = load_tree(*sw_tree, table);
      } else {
        BuilderConfig config;
        config.metric = metric;
        tree = build_greedy(table, config).tree;
      }
      if (kmax < 0) throw Error(ErrorCode::InvalidArgument, "--kmax < 0");
      std::vector<int> budgets;
      for (int k = 0; k <= kmax; ++k) budgets.push_back(k);
      const auto strategies = parse_strategies(sw_strategies);
      const auto rows = sweep_workers(tree, table, budgets, strategies,
                                      sw_worker_error, random_draws, sw_seed,
                                      metric);
      HeaderLines header{
          {"command", "sweep-workers"},
          {"table_checksum", table_checksum(table)},
          {"worker_error", format_number(sw_worker_error)},
          {"kmax", std::to_string(kmax)},
          {"strategies", sw_strategies},
          {"random_draws", std::to_string(random_draws)},
          {"seed", std::to_string(sw_seed)},
          {"metric", metric_name(metric.kind)},
          {"all_convention", "every test answered by the same 2K+1 workers"},
          {"tree", tree_to_json(tree, table).dump()}};
      std::ostringstream text;
      write_worker_sweep(text, header, rows);
      emit(out, sw_out, text.str());
    }
  } catch (const Error& e) {
    err << "error: " << error_code_name(e.code()) << ": " << e.what() << '\n';
    switch (e.code()) {
      case ErrorCode::InseparableClasses: return kExitInfeasible;
      case ErrorCode::IoError: return kExitIo;
      default: return kExitValidation;
    }
  }
  return kExitOk;
}

}  // namespace noisytree
