// Copyright 2026 The EmbedLens Authors.
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

#include "embedlens/matrix_csv.h"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <utility>
#include <vector>

#include "embedlens/error.h"

namespace embedlens {
namespace {

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      fields.push_back(line.substr(start));
      return fields;
    }
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

[[noreturn]] void fail(std::string_view source, std::size_t line,
                       const std::string& what) {
  throw ParseError(std::string(source) + ":" + std::to_string(line) + ": " +
                   what);
}

}  // namespace

std::string format_real(double value) {
  if (std::isnan(value)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  return buf;
}

std::string format_matrix_csv(const DataMatrix& m) {
  std::string out;
  for (std::size_t c = 0; c < m.cols(); ++c) {
    if (c) out += ',';
    out += 'f';
    out += std::to_string(c);
  }
  if (m.has_labels()) out += ",label";
  out += '\n';
  for (std::size_t r = 0; r < m.rows(); ++r) {
    for (std::size_t c = 0; c < m.cols(); ++c) {
      if (c) out += ',';
      out += format_real(m(r, c));
    }
    if (m.has_labels()) {
      out += ',';
      out += std::to_string(m.labels()[r]);
    }
    out += '\n';
  }
  return out;
}

void write_matrix_csv(const DataMatrix& m, const std::filesystem::path& path) {
  write_text_file(path, format_matrix_csv(m));
}

DataMatrix parse_matrix_csv(std::string_view text, std::string_view source) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back(line);
    start = end + 1;
  }
  // A single trailing blank line is the normal end of file.
  while (!lines.empty() && lines.back().empty()) lines.pop_back();
  if (lines.empty()) fail(source, 1, "empty file, expected a header line");

  const auto header = split_fields(lines[0]);
  bool labeled = !header.empty() && header.back() == "label";
  const std::size_t d = header.size() - (labeled ? 1 : 0);
  if (d == 0) fail(source, 1, "header declares no feature columns");
  for (std::size_t c = 0; c < d; ++c) {
    if (header[c] != "f" + std::to_string(c)) {
      fail(source, 1,
           "bad header column " + std::to_string(c + 1) + " '" +
               std::string(header[c]) + "', expected 'f" + std::to_string(c) +
               "'");
    }
  }

  const std::size_t n = lines.size() - 1;
  RowMatrix values(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
  std::vector<int> labels;
  if (labeled) labels.resize(n);
  for (std::size_t r = 0; r < n; ++r) {
    const std::size_t line_no = r + 2;
    const auto fields = split_fields(lines[r + 1]);
    if (fields.size() != header.size()) {
      fail(source, line_no,
           "expected " + std::to_string(header.size()) + " fields, got " +
               std::to_string(fields.size()));
    }
    for (std::size_t c = 0; c < d; ++c) {
      const std::string_view f = fields[c];
      double v = 0.0;
      const auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), v);
      if (ec != std::errc() || ptr != f.data() + f.size() || f.empty()) {
        fail(source, line_no,
             "cannot parse '" + std::string(f) + "' in column " +
                 std::to_string(c + 1) + " as a number");
      }
      if (!std::isfinite(v)) {
        fail(source, line_no,
             "non-finite value '" + std::string(f) + "' in column " +
                 std::to_string(c + 1));
      }
      values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = v;
    }
    if (labeled) {
      const std::string_view f = fields[d];
      int label = 0;
      const auto [ptr, ec] =
          std::from_chars(f.data(), f.data() + f.size(), label);
      if (ec != std::errc() || ptr != f.data() + f.size() || f.empty()) {
        fail(source, line_no,
             "label '" + std::string(f) + "' is not an integer");
      }
      labels[r] = label;
    }
  }
  if (labeled) return DataMatrix(std::move(values), std::move(labels));
  return DataMatrix(std::move(values));
}

DataMatrix read_matrix_csv(const std::filesystem::path& path) {
  return parse_matrix_csv(read_text_file(path), path.string());
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw IoError("write to '" + path.string() + "' failed");
}

}  // namespace embedlens
