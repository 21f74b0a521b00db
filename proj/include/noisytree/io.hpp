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

// Text formats: test tables, error matrices, tree and allocation documents,
// and CSV reports with `#` header lines.

#ifndef NOISYTREE_IO_HPP_
#define NOISYTREE_IO_HPP_

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "noisytree/core_model.hpp"
#include "noisytree/simulator.hpp"
#include "noisytree/tree_builder.hpp"
#include "noisytree/worker_assignment.hpp"

namespace noisytree {

// Shortest round-trip decimal form of `value` ("inf" for infinity).
std::string format_number(double value);

// Parses `class,...` / `prior,...` / `<test>,<0|1|->...`. The returned raw
// table has no error matrix yet. ParseError messages cite `source:line`.
RawTable parse_table(std::istream& in, const std::string& source = "<input>");

// Parses an error matrix (`class,...` header then `<test>,<p>...` rows) into
// `raw.errors`. Every test of `raw` must appear exactly once.
void parse_error_matrix(std::istream& in, RawTable& raw,
                        const std::string& source = "<input>");

std::string serialize_table(const TestTable& table);

// Error probabilities come from `error_matrix` when given, else from the
// scalar `error_prob`.
TestTable load_table(const std::filesystem::path& table_path,
                     std::optional<double> error_prob,
                     const std::optional<std::filesystem::path>& error_matrix);

// FNV-1a over classes, priors, tests and outcomes (error probabilities are
// supplied separately and do not take part).
std::string table_checksum(const TestTable& table);

struct TreeHeader {
  std::string table_checksum;
  nlohmann::json builder;  // free-form builder configuration echo
};

nlohmann::json tree_to_json(const DecisionTree& tree, const TestTable& table);
nlohmann::json tree_document(const DecisionTree& tree, const TestTable& table,
                             const nlohmann::json& builder);
nlohmann::json builder_json(const BuilderConfig& config);

// Accepts either a full document ({"header": ..., "tree": ...}) or a bare
// node. Throws CrossReference on unknown ids, checksum mismatch, or a node
// that disagrees with the table's splits.
DecisionTree tree_from_json(const nlohmann::json& doc, const TestTable& table);

nlohmann::json allocation_to_json(const WorkerAllocation& allocation,
                                  const TestTable& table);
WorkerAllocation allocation_from_json(const nlohmann::json& doc,
                                      const TestTable& table);

using HeaderLines = std::vector<std::pair<std::string, std::string>>;

void write_header(std::ostream& out, const HeaderLines& header);
void write_error_sweep(std::ostream& out, const HeaderLines& header,
                       const std::vector<ErrorSweepRow>& rows);
void write_worker_sweep(std::ostream& out, const HeaderLines& header,
                        const std::vector<WorkerSweepRow>& rows);
void write_simulation(std::ostream& out, const HeaderLines& header,
                      const SimulationReport& report, const TestTable& table);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const std::string& text);

}  // namespace noisytree

#endif  // NOISYTREE_IO_HPP_
