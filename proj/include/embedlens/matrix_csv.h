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

#ifndef EMBEDLENS_MATRIX_CSV_H_
#define EMBEDLENS_MATRIX_CSV_H_

#include <filesystem>
#include <string>
#include <string_view>

#include "embedlens/data_matrix.h"

namespace embedlens {

// Shortest-safe round-trip text for a double: 17 significant digits, "nan"
// for NaN.
std::string format_real(double value);

// Matrix CSV: header `f0,f1,...,f{d-1}` with an optional trailing `label`
// column, then one LF-terminated line per sample.
std::string format_matrix_csv(const DataMatrix& m);
void write_matrix_csv(const DataMatrix& m, const std::filesystem::path& path);

// Throws ParseError naming `source` and the 1-based line number on a bad
// header, ragged row, unparsable or non-finite value, or bad label.
DataMatrix parse_matrix_csv(std::string_view text,
                            std::string_view source = "<memory>");
DataMatrix read_matrix_csv(const std::filesystem::path& path);

// Whole-file helpers shared with the results writer. Throw IoError.
std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view text);

}  // namespace embedlens

#endif  // EMBEDLENS_MATRIX_CSV_H_
