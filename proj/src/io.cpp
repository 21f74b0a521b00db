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

#include "noisytree/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

namespace noisytree {

std::string format_number(double value) {
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  if (std::isnan(value)) return "nan";
  char buffer[64];
  auto [end, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value);
  return std::string(buffer, end);
}

namespace {

struct Line {
  std::size_t number;
  std::vector<std::string> fields;
};

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<Line> read_lines(std::istream& in) {
  std::vector<Line> lines;
  std::string text;
  std::size_t number = 0;
  while (std::getline(in, text)) {
    ++number;
    if (trim(text).empty()) continue;
    Line line{number, {}};
    std::stringstream ss(text);
    std::string field;
    while (std::getline(ss, field, ',')) line.fields.push_back(trim(field));
    if (!text.empty() && text.back() == ',') line.fields.emplace_back();
    lines.push_back(std::move(line));
  }
  return lines;
}

[[noreturn]] void parse_error(const std::string& source, std::size_t line,
                              const std::string& message) {
  throw Error(ErrorCode::ParseError,
              source + ":" + std::to_string(line) + ": " + message);
}

double parse_double(const std::string& text, const std::string& source,
                    std::size_t line) {
  double value = 0.0;
  const char* first = text.data();
  const char* last = first + text.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last || text.empty()) {
    parse_error(source, line, "'" + text + "' is not a number");
  }
  return value;
}

void expect_header(const std::vector<Line>& lines, const std::string& source,
                   std::size_t expected_line) {
  if (lines.empty() || lines.front().fields.front() != "class") {
    parse_error(source, lines.empty() ? expected_line : lines.front().number,
                "expected 'class,<id>,...' header");
  }
  if (lines.front().fields.size() < 2) {
    parse_error(source, lines.front().number, "header lists no classes");
  }
}

void expect_width(const Line& line, std::size_t width, const std::string& source) {
  if (line.fields.size() != width) {
    parse_error(source, line.number,
                "expected " + std::to_string(width) + " fields, got " +
                    std::to_string(line.fields.size()));
  }
}

}  // namespace

RawTable parse_table(std::istream& in, const std::string& source) {
  const auto lines = read_lines(in);
  expect_header(lines, source, 1);
  RawTable raw;
  raw.classes.assign(lines[0].fields.begin() + 1, lines[0].fields.end());
  const std::size_t width = lines[0].fields.size();

  if (lines.size() < 2 || lines[1].fields.front() != "prior") {
    parse_error(source, lines.size() < 2 ? lines[0].number + 1 : lines[1].number,
                "expected 'prior,<p1>,...' row");
  }
  expect_width(lines[1], width, source);
  for (std::size_t i = 1; i < width; ++i) {
    raw.priors.push_back(parse_double(lines[1].fields[i], source, lines[1].number));
  }

  for (std::size_t r = 2; r < lines.size(); ++r) {
    const Line& line = lines[r];
    expect_width(line, width, source);
    raw.tests.push_back(line.fields[0]);
    std::vector<Outcome> row;
    for (std::size_t i = 1; i < width; ++i) {
      const std::string& f = line.fields[i];
      if (f == "0") {
        row.push_back(Outcome::Zero);
      } else if (f == "1") {
        row.push_back(Outcome::One);
      } else if (f == "-") {
        row.push_back(Outcome::NotApplicable);
      } else {
        parse_error(source, line.number,
                    "outcome '" + f + "' is not one of 0, 1, -");
      }
    }
    raw.outcomes.push_back(std::move(row));
  }
  return raw;
}

void parse_error_matrix(std::istream& in, RawTable& raw,
                        const std::string& source) {
  const auto lines = read_lines(in);
  expect_header(lines, source, 1);
  const std::vector<std::string> classes(lines[0].fields.begin() + 1,
                                         lines[0].fields.end());
  if (classes != raw.classes) {
    parse_error(source, lines[0].number,
                "class header does not match the test table");
  }
  const std::size_t width = lines[0].fields.size();
  std::vector<std::optional<std::vector<double>>> rows(raw.tests.size());
  for (std::size_t r = 1; r < lines.size(); ++r) {
    const Line& line = lines[r];
    expect_width(line, width, source);
    auto it = std::find(raw.tests.begin(), raw.tests.end(), line.fields[0]);
    if (it == raw.tests.end()) {
      throw Error(ErrorCode::CrossReference,
                  source + ":" + std::to_string(line.number) +
                      ": test '" + line.fields[0] +
                      "' is not in the test table");
    }
    auto& row = rows[it - raw.tests.begin()];
    if (row) parse_error(source, line.number, "duplicate row for test");
    row.emplace();
    for (std::size_t i = 1; i < width; ++i) {
      const std::string& f = line.fields[i];
      row->push_back(f == "-" ? 0.0 : parse_double(f, source, line.number));
    }
  }
  raw.errors.clear();
  for (std::size_t t = 0; t < rows.size(); ++t) {
    if (!rows[t]) {
      throw Error(ErrorCode::CrossReference,
                  source + ": no error row for test '" + raw.tests[t] + "'");
    }
    raw.errors.push_back(std::move(*rows[t]));
  }
}

std::string serialize_table(const TestTable& table) {
  std::ostringstream out;
  out << "class";
  for (const auto& id : table.class_ids()) out << ',' << id;
  out << "\nprior";
  for (double p : table.priors()) out << ',' << format_number(p);
  out << '\n';
  for (TestIndex t = 0; t < table.num_tests(); ++t) {
    out << table.test_id(t);
    for (ClassIndex c = 0; c < table.num_classes(); ++c) {
      switch (table.outcome(t, c)) {
        case Outcome::Zero: out << ",0"; break;
        case Outcome::One: out << ",1"; break;
        case Outcome::NotApplicable: out << ",-"; break;
      }
    }
    out << '\n';
  }
  return out.str();
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorCode::IoError, "cannot open '" + path.string() + "'");
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out || !(out << text)) {
    throw Error(ErrorCode::IoError, "cannot write '" + path.string() + "'");
  }
}

TestTable load_table(const std::filesystem::path& table_path,
                     std::optional<double> error_prob,
                     const std::optional<std::filesystem::path>& error_matrix) {
  std::istringstream table_text(read_file(table_path));
  RawTable raw = parse_table(table_text, table_path.string());
  if (error_matrix) {
    std::istringstream matrix_text(read_file(*error_matrix));
    parse_error_matrix(matrix_text, raw, error_matrix->string());
  } else if (error_prob) {
    set_uniform_error(raw, *error_prob);
  } else {
    throw Error(ErrorCode::InvalidArgument,
                "an error probability or an error matrix is required");
  }
  return validate_table(std::move(raw));
}

std::string table_checksum(const TestTable& table) {
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (unsigned char ch : serialize_table(table)) {
    hash ^= ch;
    hash *= 0x100000001b3ULL;
  }
  std::ostringstream out;
  out << std::hex << std::setw(16) << std::setfill('0') << hash;
  return out.str();
}

namespace {

nlohmann::json node_to_json(const DecisionTree& tree,
                            DecisionTree::NodeIndex i,
                            const TestTable& table) {
  const auto& node = tree.node(i);
  if (node.is_leaf()) {
    return {{"leaf", table.class_id(node.leaf_class())}};
  }
  nlohmann::json j;
  j["test"] = table.test_id(*node.test);
  j["0"] = node_to_json(tree, node.children[0], table);
  j["1"] = node_to_json(tree, node.children[1], table);
  return j;
}

[[noreturn]] void cross_reference(const std::string& message) {
  throw Error(ErrorCode::CrossReference, message);
}

void collect_tests(const nlohmann::json& node, const Block& block,
                   const TestTable& table, std::map<Block, TestIndex>& tests) {
  if (!node.is_object()) cross_reference("tree node is not an object");
  if (node.contains("leaf")) {
    const auto cls = table.find_class(node.at("leaf").get<std::string>());
    if (!cls) {
      cross_reference("tree leaf '" + node.at("leaf").get<std::string>() +
                      "' is not a class of the table");
    }
    if (!block.is_singleton() || block.front() != *cls) {
      cross_reference("leaf '" + table.class_id(*cls) +
                      "' does not match the classes reaching it");
    }
    return;
  }
  if (!node.contains("test") || !node.contains("0") || !node.contains("1")) {
    cross_reference("tree node needs either 'leaf' or 'test', '0' and '1'");
  }
  const std::string id = node.at("test").get<std::string>();
  const auto test = table.find_test(id);
  if (!test) cross_reference("tree test '" + id + "' is not in the table");
  if (block.is_singleton() || !is_applicable(table, block, *test)) {
    cross_reference("tree test '" + id +
                    "' does not split the classes reaching it");
  }
  auto [zero, one] = split_block(table, block, *test);
  tests[block] = *test;
  collect_tests(node.at("0"), zero, table, tests);
  collect_tests(node.at("1"), one, table, tests);
}

}  // namespace

nlohmann::json tree_to_json(const DecisionTree& tree, const TestTable& table) {
  return node_to_json(tree, 0, table);
}

nlohmann::json builder_json(const BuilderConfig& config) {
  return {{"metric", metric_name(config.metric.kind)},
          {"offset", config.metric.offset},
          {"joint_cap", config.joint_cap},
          {"max_sweeps", config.max_sweeps},
          {"depth_guard", config.depth_guard}};
}

nlohmann::json tree_document(const DecisionTree& tree, const TestTable& table,
                             const nlohmann::json& builder) {
  nlohmann::json doc;
  doc["header"] = {{"format", "noisytree-tree/1"},
                   {"table_checksum", table_checksum(table)},
                   {"builder", builder}};
  doc["tree"] = tree_to_json(tree, table);
  return doc;
}

DecisionTree tree_from_json(const nlohmann::json& doc, const TestTable& table) {
  const nlohmann::json* root = &doc;
  if (doc.is_object() && doc.contains("tree")) {
    root = &doc.at("tree");
  }
  std::map<Block, TestIndex> tests;
  try {
    collect_tests(*root, all_classes(table), table, tests);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseError,
                std::string("malformed tree document: ") + e.what());
  }
  if (doc.is_object() && doc.contains("header")) {
    const auto& header = doc.at("header");
    if (header.contains("table_checksum") &&
        header.at("table_checksum").get<std::string>() !=
            table_checksum(table)) {
      cross_reference("tree document was built for a different table");
    }
  }
  return grow_tree_by_block(table,
                            [&](const Block& block) { return tests.at(block); });
}

nlohmann::json allocation_to_json(const WorkerAllocation& allocation,
                                  const TestTable& table) {
  nlohmann::json doc;
  doc["strategy"] = strategy_name(allocation.strategy);
  doc["seed"] = allocation.seed;
  doc["worker_error"] = allocation.worker_error;
  doc["pair_budget"] = allocation.budget;
  doc["tests"] = nlohmann::json::array();
  for (std::size_t i = 0; i < allocation.tests.size(); ++i) {
    doc["tests"].push_back(
        {{"test", table.test_id(allocation.tests[i])},
         {"pairs", allocation.pairs[i]},
         {"workers", 2 * allocation.pairs[i] + 1},
         {"effective_error",
          effective_error(allocation, allocation.tests[i])}});
  }
  return doc;
}

WorkerAllocation allocation_from_json(const nlohmann::json& doc,
                                      const TestTable& table) {
  try {
    WorkerAllocation allocation;
    allocation.strategy = parse_strategy(doc.at("strategy").get<std::string>());
    allocation.seed = doc.at("seed").get<std::uint64_t>();
    allocation.worker_error = doc.at("worker_error").get<double>();
    allocation.budget = doc.at("pair_budget").get<int>();
    std::vector<std::pair<TestIndex, int>> entries;
    for (const auto& entry : doc.at("tests")) {
      const std::string id = entry.at("test").get<std::string>();
      const auto test = table.find_test(id);
      if (!test) cross_reference("allocation test '" + id + "' is unknown");
      entries.emplace_back(*test, entry.at("pairs").get<int>());
    }
    std::sort(entries.begin(), entries.end());
    for (const auto& [test, pairs] : entries) {
      allocation.tests.push_back(test);
      allocation.pairs.push_back(pairs);
    }
    return allocation;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseError,
                std::string("malformed allocation document: ") + e.what());
  }
}

void write_header(std::ostream& out, const HeaderLines& header) {
  for (const auto& [key, value] : header) {
    out << "# " << key << '=' << value << '\n';
  }
}

void write_error_sweep(std::ostream& out, const HeaderLines& header,
                       const std::vector<ErrorSweepRow>& rows) {
  write_header(out, header);
  out << "error_prob,designed_pm,random_mean_pm,random_std_pm\n";
  for (const auto& row : rows) {
    out << format_number(row.error_prob) << ',' << format_number(row.designed)
        << ',' << format_number(row.random_mean) << ','
        << format_number(row.random_std) << '\n';
  }
}

void write_worker_sweep(std::ostream& out, const HeaderLines& header,
                        const std::vector<WorkerSweepRow>& rows) {
  write_header(out, header);
  out << "pairs,strategy,pm,pm_std,expected_questions\n";
  for (const auto& row : rows) {
    out << row.pairs << ',' << strategy_name(row.strategy) << ','
        << format_number(row.misclassification) << ','
        << format_number(row.spread) << ','
        << format_number(row.expected_questions) << '\n';
  }
}

void write_simulation(std::ostream& out, const HeaderLines& header,
                      const SimulationReport& report, const TestTable& table) {
  write_header(out, header);
  out << "# trials=" << report.trials << '\n'
      << "# errors=" << report.errors << '\n'
      << "# pm_hat=" << format_number(report.estimate) << '\n'
      << "# ci95=" << format_number(report.ci_low()) << ','
      << format_number(report.ci_high()) << '\n'
      << "# mean_questions=" << format_number(report.mean_questions) << '\n';
  out << "true_class,draws";
  for (const auto& id : table.class_ids()) out << ",leaf_" << id;
  out << '\n';
  for (ClassIndex c = 0; c < table.num_classes(); ++c) {
    out << table.class_id(c) << ',' << report.class_draws[c];
    for (auto count : report.confusion[c]) out << ',' << count;
    out << '\n';
  }
}

}  // namespace noisytree
