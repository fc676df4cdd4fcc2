// Copyright 2026 The cfmaps Authors.
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

#include "cfmaps/matrix_io.hpp"

#include "cfmaps/errors.hpp"
#include "cfmaps/hash.hpp"

#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>
#include <vector>

namespace cfmaps {

namespace {

constexpr char kMagic[8] = {'C', 'F', 'M', 'M', 'A', 'T', 'R', 'X'};
constexpr std::uint32_t kVersion = 1;

std::ofstream open_out(const std::filesystem::path& path, bool binary) {
  std::ofstream out(path, binary ? std::ios::binary : std::ios::out);
  if (!out) throw Error("cannot write " + path.string());
  return out;
}

std::vector<std::vector<double>> read_csv(const std::filesystem::path& path, long& rows,
                                          long& cols) {
  std::ifstream in(path);
  if (!in) throw Error("cannot read " + path.string());
  std::string line;
  std::size_t lineno = 1;
  if (!std::getline(in, line)) throw FormatError("empty matrix file", lineno);
  char comma = 0;
  std::istringstream head(line);
  if (!(head >> rows >> comma >> cols) || comma != ',' || rows < 0 || cols < 0) {
    throw FormatError("expected header 'rows,cols'", lineno);
  }
  std::vector<std::vector<double>> data;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<double> row;
    std::size_t pos = 0;
    while (pos <= line.size()) {
      const std::size_t next = std::min(line.find(',', pos), line.size());
      const std::string cell = line.substr(pos, next - pos);
      char* end = nullptr;
      const double v = std::strtod(cell.c_str(), &end);
      if (cell.empty() || end == cell.c_str() || *end != '\0') {
        throw FormatError("bad number '" + cell + "'", lineno);
      }
      row.push_back(v);
      pos = next + 1;
    }
    data.push_back(std::move(row));
  }
  return data;
}

void write_bin(const std::filesystem::path& path, std::uint8_t kind, long rows, long cols,
               const double* data, std::size_t count) {
  std::vector<std::uint8_t> bytes(std::begin(kMagic), std::end(kMagic));
  auto put = [&](const void* p, std::size_t n) {
    const auto* b = static_cast<const std::uint8_t*>(p);
    bytes.insert(bytes.end(), b, b + n);
  };
  put(&kVersion, 4);
  put(&kind, 1);
  const std::uint64_t r = rows, c = cols;
  put(&r, 8);
  put(&c, 8);
  put(data, count * sizeof(double));
  const std::string sum = sha256_hex(std::span<const std::uint8_t>(bytes));
  bytes.insert(bytes.end(), sum.begin(), sum.end());
  auto out = open_out(path, true);
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

std::vector<double> read_bin(const std::filesystem::path& path, std::uint8_t kind, long& rows,
                             long& cols) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path.string());
  const std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                        std::istreambuf_iterator<char>());
  const std::size_t header = 8 + 4 + 1 + 16;
  if (bytes.size() < header + 64) throw FormatError("matrix file too short", 0);
  const std::size_t body = bytes.size() - 64;
  const std::string sum = sha256_hex(std::span<const std::uint8_t>(bytes.data(), body));
  if (std::memcmp(sum.data(), bytes.data() + body, 64) != 0) {
    throw FormatError("matrix file checksum mismatch", 0);
  }
  if (std::memcmp(bytes.data(), kMagic, 8) != 0) throw FormatError("not a matrix file", 0);
  std::uint32_t version;
  std::memcpy(&version, bytes.data() + 8, 4);
  if (version != kVersion) throw FormatError("unsupported matrix file version", 0);
  if (bytes[12] != kind) throw FormatError("matrix file holds the wrong scalar type", 0);
  std::uint64_t r, c;
  std::memcpy(&r, bytes.data() + 13, 8);
  std::memcpy(&c, bytes.data() + 21, 8);
  const std::size_t count = r * c * (kind == 1 ? 2 : 1);
  if (header + count * sizeof(double) != body) throw FormatError("matrix size mismatch", 0);
  std::vector<double> data(count);
  std::memcpy(data.data(), bytes.data() + header, count * sizeof(double));
  rows = static_cast<long>(r);
  cols = static_cast<long>(c);
  return data;
}

}  // namespace

void save_matrix_csv(const std::filesystem::path& path, const MatrixXd& m) {
  auto out = open_out(path, false);
  out.precision(17);
  out << m.rows() << ',' << m.cols() << '\n';
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) out << (j ? "," : "") << m(i, j);
    out << '\n';
  }
}

void save_matrix_csv(const std::filesystem::path& path, const MatrixXc& m) {
  auto out = open_out(path, false);
  out.precision(17);
  out << m.rows() << ',' << m.cols() << '\n';
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      out << (j ? "," : "") << m(i, j).real() << ',' << m(i, j).imag();
    }
    out << '\n';
  }
}

MatrixXd load_matrix_csv(const std::filesystem::path& path) {
  long rows = 0, cols = 0;
  const auto data = read_csv(path, rows, cols);
  if (static_cast<long>(data.size()) != rows) throw FormatError("row count mismatch", 0);
  MatrixXd m(rows, cols);
  for (long i = 0; i < rows; ++i) {
    if (static_cast<long>(data[i].size()) != cols) throw FormatError("column count mismatch", i + 2);
    for (long j = 0; j < cols; ++j) m(i, j) = data[i][j];
  }
  return m;
}

MatrixXc load_complex_matrix_csv(const std::filesystem::path& path) {
  long rows = 0, cols = 0;
  const auto data = read_csv(path, rows, cols);
  if (static_cast<long>(data.size()) != rows) throw FormatError("row count mismatch", 0);
  MatrixXc m(rows, cols);
  for (long i = 0; i < rows; ++i) {
    if (static_cast<long>(data[i].size()) != 2 * cols) {
      throw FormatError("column count mismatch", i + 2);
    }
    for (long j = 0; j < cols; ++j) m(i, j) = Complex(data[i][2 * j], data[i][2 * j + 1]);
  }
  return m;
}

void save_matrix_bin(const std::filesystem::path& path, const MatrixXd& m) {
  write_bin(path, 0, m.rows(), m.cols(), m.data(), m.size());
}

void save_matrix_bin(const std::filesystem::path& path, const MatrixXc& m) {
  write_bin(path, 1, m.rows(), m.cols(), reinterpret_cast<const double*>(m.data()), 2 * m.size());
}

MatrixXd load_matrix_bin(const std::filesystem::path& path) {
  long rows = 0, cols = 0;
  const auto data = read_bin(path, 0, rows, cols);
  return Eigen::Map<const MatrixXd>(data.data(), rows, cols);
}

MatrixXc load_complex_matrix_bin(const std::filesystem::path& path) {
  long rows = 0, cols = 0;
  const auto data = read_bin(path, 1, rows, cols);
  return Eigen::Map<const MatrixXc>(reinterpret_cast<const Complex*>(data.data()), rows, cols);
}

}  // namespace cfmaps
