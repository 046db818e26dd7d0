// Copyright 2026 The MomentForge Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "momentforge/io.hpp"

#include <cstdio>
#include <filesystem>
#include <sstream>

#include <gtest/gtest.h>

namespace momentforge {
namespace {

long error_line(const std::string& text, int columns = 0) {
  std::istringstream in(text);
  try {
    read_numeric_csv(in, columns);
  } catch (const IoError& e) {
    return e.line();
  }
  return -1;
}

TEST(NumericCsv, HeaderAndRows) {
  std::istringstream in("a,b\n1,2\n\n3.5, -4\n");
  std::vector<std::string> header;
  const auto rows = read_numeric_csv(in, 2, &header);
  EXPECT_EQ(header, (std::vector<std::string>{"a", "b"}));
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[1], (std::vector<double>{3.5, -4.0}));
}

TEST(NumericCsv, ErrorsReportTheLine) {
  EXPECT_EQ(error_line("x,weight\n0.1,0.5\n0.2,oops\n"), 3);
  EXPECT_EQ(error_line("1,2\n3\n"), 2);
  EXPECT_EQ(error_line("1,2,3\n", 2), 1);
  EXPECT_EQ(error_line("1,nan\n"), 1);
}

TEST(DistributionCsv, RoundTripIsExact) {
  const DiscreteDistribution p(Eigen::MatrixXd(Eigen::Vector3d(-0.1, 1.0 / 3.0, 0.9)),
                               Eigen::Vector3d(0.2, 0.7, 0.1));
  std::stringstream s;
  write_distribution_csv(s, p);
  EXPECT_EQ(s.str().substr(0, 9), "x,weight\n");
  bool renorm = true;
  const DiscreteDistribution q = read_distribution_csv(s, &renorm);
  EXPECT_FALSE(renorm);
  EXPECT_EQ(q.support(), p.support());
  EXPECT_EQ(q.weights(), p.weights());
}

TEST(DistributionCsv, RenormalizesAndValidates) {
  std::istringstream in("x,weight\n0,1\n0.5,1\n");
  bool renorm = false;
  const DiscreteDistribution p = read_distribution_csv(in, &renorm);
  EXPECT_TRUE(renorm);
  EXPECT_DOUBLE_EQ(p.weights()(0), 0.5);
  std::istringstream neg("x,weight\n0,-1\n0.5,2\n");
  EXPECT_THROW(read_distribution_csv(neg), std::exception);
  std::istringstream outside("x,weight\n2,1\n");
  EXPECT_THROW(read_distribution_csv(outside), std::exception);
}

TEST(MomentsCsv, ContiguousIndices) {
  std::istringstream in("j,m\n1,0.5\n2,-0.25\n");
  const MomentVector m = read_moments_csv(in);
  EXPECT_EQ(m.degree(), 2);
  EXPECT_EQ(m[2], -0.25);
  std::istringstream gap("j,m\n1,0.5\n3,0.1\n");
  try {
    read_moments_csv(gap);
    FAIL();
  } catch (const IoError& e) {
    EXPECT_EQ(e.line(), 3);
  }
}

TEST(Rescale, MapsColumnsOntoUnitBox) {
  Eigen::MatrixXd data(3, 2);
  data << 0, 5, 10, 5, 5, 5;
  const Eigen::MatrixXd r = rescale_to_unit(data);
  EXPECT_LE((r.col(0) - Eigen::Vector3d(-1, 1, 0)).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_EQ(r.col(1), Eigen::Vector3d::Zero());
}

TEST(Files, DigestAndManifest) {
  EXPECT_EQ(fnv1a64(""), 0xcbf29ce484222325ULL);
  EXPECT_EQ(fnv1a64("a"), 0xaf63dc4c8601ec8cULL);
  EXPECT_EQ(hex64(0xabcULL), "0000000000000abc");
  const auto path = (std::filesystem::temp_directory_path() / "momentforge_io_test.txt").string();
  write_file(path, "1\n2\n3\n");
  EXPECT_EQ(read_counts_csv(path), (std::vector<int>{1, 2, 3}));
  RunManifest m;
  m.subcommand = "popmle";
  m.seed = 9;
  m.add_input(path, read_file(path));
  const auto j = m.to_json();
  EXPECT_EQ(j["subcommand"], "popmle");
  EXPECT_EQ(j["seed"], 9);
  EXPECT_EQ(j["inputs"][path], hex64(fnv1a64("1\n2\n3\n")));
  std::remove(path.c_str());
  EXPECT_THROW(read_file(path), IoError);
}

}  // namespace
}  // namespace momentforge
