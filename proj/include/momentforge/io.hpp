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

#ifndef MOMENTFORGE_IO_HPP_
#define MOMENTFORGE_IO_HPP_

#include <cstdint>
#include <iosfwd>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include "json.hpp"  // vendored nlohmann/json

#include "momentforge/distribution.hpp"

namespace momentforge {

// Malformed or unreadable input.  line is 1-based, 0 when not tied to a line.
class IoError : public std::runtime_error {
 public:
  IoError(const std::string& what, long line = 0);
  long line() const { return line_; }

 private:
  long line_;
};

// Rows of numbers.  A first line that does not parse is taken as a header
// and returned through `header`.  Blank lines are skipped.  Every row must
// have the same width (or `columns` if positive).  `row_lines` receives the
// 1-based source line of each returned row.
std::vector<std::vector<double>> read_numeric_csv(std::istream& in, int columns = 0,
                                                  std::vector<std::string>* header = nullptr,
                                                  std::vector<long>* row_lines = nullptr);

// Header x,weight (or x1,..,xd,weight).  Weights off by more than 1e-6 from
// summing to one are renormalized and `renormalized` is set.
DiscreteDistribution read_distribution_csv(std::istream& in, bool* renormalized = nullptr);
DiscreteDistribution read_distribution_csv(const std::string& path, bool* renormalized = nullptr);
void write_distribution_csv(std::ostream& out, const DiscreteDistribution& p);
void write_distribution_csv(const std::string& path, const DiscreteDistribution& p);

// Header j,m with j = 1..k contiguous; plain basis.
MomentVector read_moments_csv(std::istream& in);
MomentVector read_moments_csv(const std::string& path);

// One point per row, one column per dimension.
Eigen::MatrixXd read_dataset_csv(const std::string& path);
// Integer counts, one per row.
std::vector<int> read_counts_csv(const std::string& path);

// Affine map of each column from [min, max] onto [-1, 1].  Constant
// columns map to 0.
Eigen::MatrixXd rescale_to_unit(const Eigen::MatrixXd& data);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& contents);

// 64-bit FNV-1a.
std::uint64_t fnv1a64(const std::string& bytes);
std::string hex64(std::uint64_t v);

// Everything that determines a run's output.
struct RunManifest {
  std::string subcommand;
  nlohmann::json parameters = nlohmann::json::object();
  std::uint64_t seed = 0;
  std::map<std::string, std::string> input_digests;  // path -> fnv1a64 hex
  std::string version;

  void add_input(const std::string& path, const std::string& contents);
  nlohmann::json to_json() const;
};

std::string library_version();

}  // namespace momentforge

#endif  // MOMENTFORGE_IO_HPP_
