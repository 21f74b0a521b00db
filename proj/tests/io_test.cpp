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

#include <gtest/gtest.h>

#include <filesystem>
#include <sstream>

#include "fixtures.hpp"
#include "noisytree/io.hpp"
#include "noisytree/metrics.hpp"

namespace noisytree {
namespace {

namespace fs = std::filesystem;
using testing::t3_rooted_tree;
using testing::t1_rooted_tree;
using testing::reference_table;

const fs::path kData = NOISYTREE_DATA_DIR;

ErrorCode parse_code(const std::string& text, std::string* message = nullptr) {
  std::istringstream in(text);
  try {
    parse_table(in, "t.csv");
  } catch (const Error& e) {
    if (message) *message = e.what();
    return e.code();
  }
  return ErrorCode::InvalidArgument;
}

TEST(FormatNumber, ShortestRoundTrip) {
  EXPECT_EQ(format_number(0.05), "0.05");
  EXPECT_EQ(format_number(20.0), "20");
  EXPECT_EQ(format_number(std::numeric_limits<double>::infinity()), "inf");
  const double x = 0.1 + 0.2;
  EXPECT_EQ(std::stod(format_number(x)), x);
}

TEST(ParseTable, ReferenceFile) {
  const TestTable table = load_table(kData / "reference_table.csv", 0.05, std::nullopt);
  const TestTable expected = reference_table();
  EXPECT_EQ(table.class_ids(), expected.class_ids());
  EXPECT_EQ(table.test_ids(), expected.test_ids());
  for (TestIndex t = 0; t < 5; ++t) {
    for (ClassIndex c = 0; c < 5; ++c) {
      EXPECT_EQ(table.outcome(t, c), expected.outcome(t, c));
      EXPECT_EQ(table.error(t, c), expected.error(t, c));
    }
  }
}

TEST(ParseTable, ErrorsCiteLines) {
  std::string message;
  EXPECT_EQ(parse_code("class,a,b\n", &message), ErrorCode::ParseError);
  EXPECT_NE(message.find("t.csv:2"), std::string::npos) << message;

  EXPECT_EQ(parse_code("class,a,b\nprior,0.5,x\n", &message),
            ErrorCode::ParseError);
  EXPECT_NE(message.find("t.csv:2"), std::string::npos) << message;

  EXPECT_EQ(parse_code("class,a,b\nprior,0.5,0.5\n\nt,0,2\n", &message),
            ErrorCode::ParseError);
  EXPECT_NE(message.find("t.csv:4"), std::string::npos) << message;

  EXPECT_EQ(parse_code("class,a,b\nprior,0.5,0.5\nt,0\n", &message),
            ErrorCode::ParseError);
  EXPECT_EQ(parse_code("name,a,b\n"), ErrorCode::ParseError);
}

TEST(ErrorMatrix, PerCellValues) {
  std::istringstream table_text(
      "class,a,b,c\nprior,0.2,0.3,0.5\nt1,0,1,-\nt2,1,0,0\n");
  RawTable raw = parse_table(table_text);
  std::istringstream matrix("class,a,b,c\nt2,0.1,0.2,0.3\nt1,0.01,0.02,-\n");
  parse_error_matrix(matrix, raw);
  const TestTable table = validate_table(raw);
  EXPECT_DOUBLE_EQ(table.error(0, 1), 0.02);
  EXPECT_DOUBLE_EQ(table.error(1, 2), 0.3);
  EXPECT_EQ(table.error(0, 2), 0.0);

  std::istringstream table_again(
      "class,a,b,c\nprior,0.2,0.3,0.5\nt1,0,1,-\nt2,1,0,0\n");
  RawTable again = parse_table(table_again);
  std::istringstream unknown("class,a,b,c\nt9,0.1,0.2,0.3\n");
  try {
    parse_error_matrix(unknown, again);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::CrossReference);
  }
  std::istringstream missing("class,a,b,c\nt1,0.1,0.2,0.3\n");
  EXPECT_THROW(parse_error_matrix(missing, again), Error);
  std::istringstream wrong_header("class,a,c,b\nt1,0.1,0.2,0.3\n");
  EXPECT_THROW(parse_error_matrix(wrong_header, again), Error);
}

TEST(SerializeTable, RoundTrip) {
  const TestTable table = reference_table();
  std::istringstream in(serialize_table(table));
  RawTable raw = parse_table(in);
  set_uniform_error(raw, 0.05);
  const TestTable back = validate_table(raw);
  EXPECT_EQ(serialize_table(back), serialize_table(table));
  EXPECT_EQ(table_checksum(back), table_checksum(table));
  EXPECT_EQ(table_checksum(table).size(), 16u);
  EXPECT_EQ(table_checksum(reference_table(0.2)), table_checksum(table));

  RawTable other = reference_table().to_raw();
  other.priors[0] = 0.15;
  other.priors[3] = 0.65;
  EXPECT_NE(table_checksum(validate_table(other)), table_checksum(table));
}

TEST(TreeJson, RoundTripAndFixtures) {
  const TestTable table = reference_table();
  for (const DecisionTree& tree : {t3_rooted_tree(table), t1_rooted_tree(table)}) {
    const auto doc = tree_document(tree, table, builder_json({}));
    EXPECT_EQ(doc["header"]["format"], "noisytree-tree/1");
    EXPECT_TRUE(same_structure(tree_from_json(doc, table), tree));
    EXPECT_TRUE(same_structure(tree_from_json(tree_to_json(tree, table), table),
                               tree));
  }
  const auto t1_doc = nlohmann::json::parse(read_file(kData / "t1_rooted_tree.json"));
  EXPECT_TRUE(same_structure(tree_from_json(t1_doc, table), t1_rooted_tree(table)));
  const auto t3_doc = nlohmann::json::parse(read_file(kData / "t3_rooted_tree.json"));
  EXPECT_TRUE(same_structure(tree_from_json(t3_doc, table), t3_rooted_tree(table)));
}

TEST(TreeJson, RejectsMismatches) {
  const TestTable table = reference_table();
  auto expect_code = [&](const nlohmann::json& doc, ErrorCode code) {
    try {
      tree_from_json(doc, table);
      ADD_FAILURE() << doc.dump();
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), code) << e.what();
    }
  };
  auto doc = tree_document(t1_rooted_tree(table), table, {});
  doc["header"]["table_checksum"] = "0000000000000000";
  expect_code(doc, ErrorCode::CrossReference);

  auto swapped = tree_to_json(t1_rooted_tree(table), table);
  std::swap(swapped["0"], swapped["1"]);
  expect_code(swapped, ErrorCode::CrossReference);

  auto unknown = tree_to_json(t1_rooted_tree(table), table);
  unknown["test"] = "T9";
  expect_code(unknown, ErrorCode::CrossReference);

  // T5 is undefined for c4 so it cannot sit at the root.
  auto undefined = tree_to_json(t1_rooted_tree(table), table);
  undefined["test"] = "T5";
  expect_code(undefined, ErrorCode::CrossReference);

  expect_code(nlohmann::json{{"test", "T1"}}, ErrorCode::CrossReference);
  expect_code(nlohmann::json{{"test", 3}, {"0", {}}, {"1", {}}},
              ErrorCode::ParseError);
}

TEST(AllocationJson, RoundTrip) {
  const TestTable table = reference_table();
  WorkerAllocation alloc = seated_allocation(t1_rooted_tree(table), 0.2);
  alloc.strategy = AssignmentStrategy::RandomPerPair;
  alloc.pairs = {3, 0, 1, 2};
  alloc.budget = 6;
  alloc.seed = 17;
  const auto doc = allocation_to_json(alloc, table);
  EXPECT_EQ(doc["tests"][0]["workers"], 7);
  const WorkerAllocation back = allocation_from_json(doc, table);
  EXPECT_EQ(back.tests, alloc.tests);
  EXPECT_EQ(back.pairs, alloc.pairs);
  EXPECT_EQ(back.strategy, alloc.strategy);
  EXPECT_EQ(back.seed, 17u);
  EXPECT_EQ(back.budget, 6);
  EXPECT_DOUBLE_EQ(back.worker_error, 0.2);
}

TEST(Reports, HeaderAndRows) {
  std::ostringstream out;
  write_error_sweep(out, {{"seed", "3"}}, {{0.05, 0.08, 0.1, 0.01}});
  EXPECT_EQ(out.str(),
            "# seed=3\nerror_prob,designed_pm,random_mean_pm,random_std_pm\n"
            "0.05,0.08,0.1,0.01\n");
}

TEST(Files, MissingFileIsIoError) {
  try {
    read_file(kData / "does_not_exist.csv");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::IoError);
  }
}

}  // namespace
}  // namespace noisytree
