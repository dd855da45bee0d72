// Copyright 2026 The dagrpo Authors
// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Standalone SVG line charts of metrics CSV columns: one panel per series,
// dashed target lines, vertical phase boundaries.

#pragma once

#include <filesystem>
#include <istream>
#include <optional>
#include <string>
#include <vector>

#include "dagrpo/config.hpp"

namespace dagrpo {

struct CsvTable {
  std::string name;  // legend label
  std::vector<std::string> header;
  // Empty cells are absent values.
  std::vector<std::vector<std::optional<double>>> rows;

  // Column index, or -1.
  int column(const std::string& name) const;
};

// Throws ConfigError on an empty file, a header without data rows, ragged
// rows or non-numeric cells.
CsvTable read_csv(std::istream& in, const std::string& name);
CsvTable read_csv(const std::filesystem::path& path);

// Throws ConfigError naming the first missing column.
std::string render_svg(const PlotSpec& spec, const std::vector<CsvTable>& tables);

// Reads the sources, renders, writes spec.output.
void emit_plot(const PlotSpec& spec);

}  // namespace dagrpo
