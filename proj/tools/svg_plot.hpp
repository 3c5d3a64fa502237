// Copyright 2026 The qdsps Authors
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


#pragma once

// Minimal static SVG renderings of the CSV outputs: line plots (optionally
// one line per value of a grouping column) and heatmaps.

#include <iosfwd>
#include <string>
#include <vector>

namespace qdsps::tools {

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    std::size_t index(const std::string& column) const;
    std::vector<double> numbers(const std::string& column) const;
    std::vector<std::string> text(const std::string& column) const;
};

Table read_table(std::istream& in);

void line_plot_svg(std::ostream& out, const Table& table, const std::string& x, const std::string& y,
                   const std::string& group = {});

void heatmap_svg(std::ostream& out, const Table& table, const std::string& x, const std::string& y,
                 const std::string& z);

}  // namespace qdsps::tools
