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

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace momentforge {
namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_commas(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

bool parse_double(const std::string& s, double& v) {
  if (s.empty()) return false;
  const char* b = s.data();
  const char* e = b + s.size();
  if (*b == '+') ++b;
  auto [p, ec] = std::from_chars(b, e, v);
  return ec == std::errc() && p == e;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  return in;
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

IoError::IoError(const std::string& what, long line)
    : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
      line_(line) {}

std::vector<std::vector<double>> read_numeric_csv(std::istream& in, int columns,
                                                  std::vector<std::string>* header,
                                                  std::vector<long>* row_lines) {
  std::vector<std::vector<double>> rows;
  if (row_lines) row_lines->clear();
  std::string line;
  long lineno = 0;
  bool first = true;
  int width = columns;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    const auto cells = split_commas(line);
    std::vector<double> row(cells.size());
    bool ok = true;
    for (std::size_t c = 0; c < cells.size() && ok; ++c) ok = parse_double(cells[c], row[c]);
    if (!ok) {
      if (first) {
        if (header) *header = cells;
        if (width <= 0) width = static_cast<int>(cells.size());
        first = false;
        continue;
      }
      throw IoError("malformed row '" + trim(line) + "'", lineno);
    }
    first = false;
    if (width <= 0) width = static_cast<int>(row.size());
    if (static_cast<int>(row.size()) != width)
      throw IoError("expected " + std::to_string(width) + " columns, got " +
                        std::to_string(row.size()),
                    lineno);
    for (double v : row)
      if (!std::isfinite(v)) throw IoError("non-finite value", lineno);
    rows.push_back(std::move(row));
    if (row_lines) row_lines->push_back(lineno);
  }
  if (in.bad()) throw IoError("read failure");
  return rows;
}

DiscreteDistribution read_distribution_csv(std::istream& in, bool* renormalized) {
  std::vector<std::string> header;
  std::vector<long> lines;
  const auto rows = read_numeric_csv(in, 0, &header, &lines);
  if (rows.empty()) throw IoError("distribution has no rows");
  const int width = static_cast<int>(rows.front().size());
  if (width < 2 || width > 4) throw IoError("distribution needs 2 to 4 columns");
  if (!header.empty() && header.back() != "weight") throw IoError("last column must be 'weight'", 1);
  const int d = width - 1;
  Eigen::MatrixXd support(rows.size(), d);
  Eigen::VectorXd w(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (int c = 0; c < d; ++c) support(i, c) = rows[i][c];
    w(i) = rows[i][d];
    if (w(i) < 0.0) throw IoError("negative weight", lines[i]);
    for (int c = 0; c < d; ++c)
      if (std::abs(support(i, c)) > 1.0 + kDomainSlack)
        throw IoError("support point outside [-1, 1]", lines[i]);
  }
  const double drift = std::abs(w.sum() - 1.0);
  if (renormalized) *renormalized = drift > 1e-6;
  try {
    // Leave weights that already sum to one alone so a write/read round trip is exact.
    if (drift <= DiscreteDistribution::kWeightSumTolerance)
      return DiscreteDistribution(std::move(support), std::move(w));
    return DiscreteDistribution::normalized(std::move(support), std::move(w));
  } catch (const std::exception& e) {
    throw IoError(e.what());
  }
}

DiscreteDistribution read_distribution_csv(const std::string& path, bool* renormalized) {
  auto in = open_in(path);
  return read_distribution_csv(in, renormalized);
}

void write_distribution_csv(std::ostream& out, const DiscreteDistribution& p) {
  const int d = p.dim();
  if (d == 1) {
    out << "x,weight\n";
  } else {
    for (int c = 0; c < d; ++c) out << 'x' << (c + 1) << ',';
    out << "weight\n";
  }
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    for (int c = 0; c < d; ++c) out << format_double(p.support()(i, c)) << ',';
    out << format_double(p.weights()(i)) << '\n';
  }
}

void write_distribution_csv(const std::string& path, const DiscreteDistribution& p) {
  std::ostringstream os;
  write_distribution_csv(os, p);
  write_file(path, os.str());
}

MomentVector read_moments_csv(std::istream& in) {
  std::vector<std::string> header;
  std::vector<long> lines;
  const auto rows = read_numeric_csv(in, 2, &header, &lines);
  if (!header.empty() && (header.size() != 2 || header[0] != "j" || header[1] != "m"))
    throw IoError("expected header j,m", 1);
  if (rows.empty()) throw IoError("no moments");
  MomentVector mv;
  mv.values.resize(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i][0] != static_cast<double>(i + 1))
      throw IoError("moment indices must run 1..k contiguously; found j = " +
                        format_double(rows[i][0]) + " where " + std::to_string(i + 1) +
                        " was expected",
                    lines[i]);
    mv.values(i) = rows[i][1];
  }
  return mv;
}

MomentVector read_moments_csv(const std::string& path) {
  auto in = open_in(path);
  return read_moments_csv(in);
}

Eigen::MatrixXd read_dataset_csv(const std::string& path) {
  auto in = open_in(path);
  const auto rows = read_numeric_csv(in);
  if (rows.empty()) throw IoError("dataset " + path + " is empty");
  Eigen::MatrixXd out(rows.size(), rows.front().size());
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t c = 0; c < rows[i].size(); ++c) out(i, c) = rows[i][c];
  return out;
}

std::vector<int> read_counts_csv(const std::string& path) {
  auto in = open_in(path);
  std::string line;
  long lineno = 0;
  std::vector<int> out;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string s = trim(line);
    if (s.empty()) continue;
    int v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size()) {
      if (out.empty() && lineno == 1 && !std::isdigit(static_cast<unsigned char>(s[0]))) continue;
      throw IoError("expected an integer count, got '" + s + "'", lineno);
    }
    out.push_back(v);
  }
  return out;
}

Eigen::MatrixXd rescale_to_unit(const Eigen::MatrixXd& data) {
  Eigen::MatrixXd out(data.rows(), data.cols());
  for (Eigen::Index c = 0; c < data.cols(); ++c) {
    const double lo = data.col(c).minCoeff();
    const double hi = data.col(c).maxCoeff();
    if (hi > lo)
      out.col(c) = ((data.col(c).array() - lo) * (2.0 / (hi - lo)) - 1.0).cwiseMax(-1.0).cwiseMin(1.0);
    else
      out.col(c).setZero();
  }
  return out;
}

std::string read_file(const std::string& path) {
  auto in = open_in(path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  out << contents;
  if (!out) throw IoError("write failed for " + path);
}

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

void RunManifest::add_input(const std::string& path, const std::string& contents) {
  input_digests[path] = hex64(fnv1a64(contents));
}

nlohmann::json RunManifest::to_json() const {
  nlohmann::json j;
  j["subcommand"] = subcommand;
  j["parameters"] = parameters;
  j["seed"] = seed;
  j["inputs"] = input_digests;
  j["version"] = version.empty() ? library_version() : version;
  return j;
}

std::string library_version() { return MOMENTFORGE_VERSION; }

}  // namespace momentforge
