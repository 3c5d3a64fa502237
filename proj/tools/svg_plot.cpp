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


#include "svg_plot.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>

#include "qdsps/csv.hpp"
#include "qdsps/errors.hpp"

namespace qdsps::tools {

namespace {

constexpr double width = 640.0, height = 420.0;
constexpr double left = 70.0, right = 20.0, top = 20.0, bottom = 50.0;

const char* palette[] = {"#1b1b1b", "#d95f02", "#1b9e77", "#7570b3", "#e7298a", "#66a61e", "#e6ab02"};

double parse(const std::string& text) {
    if (text == "nan") return std::nan("");
    double value = 0.0;
    const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || end != text.data() + text.size()) return std::nan("");
    return value;
}

struct Range {
    double lo = 0.0, hi = 1.0;
};

Range range_of(const std::vector<double>& values) {
    Range r{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
    for (double v : values) {
        if (std::isfinite(v)) {
            r.lo = std::min(r.lo, v);
            r.hi = std::max(r.hi, v);
        }
    }
    if (!std::isfinite(r.lo)) return {0.0, 1.0};
    if (r.hi == r.lo) {
        r.lo -= 0.5;
        r.hi += 0.5;
    }
    return r;
}

double sx(double v, Range r) { return left + (v - r.lo) / (r.hi - r.lo) * (width - left - right); }
double sy(double v, Range r) { return height - bottom - (v - r.lo) / (r.hi - r.lo) * (height - top - bottom); }

void frame(std::ostream& out, const std::string& x, const std::string& y, Range rx, Range ry) {
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
        << "\" font-family=\"sans-serif\" font-size=\"12\">\n"
        << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
        << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << width - left - right << "\" height=\""
        << height - top - bottom << "\" fill=\"none\" stroke=\"black\"/>\n";
    for (int k = 0; k <= 4; ++k) {
        const double vx = rx.lo + (rx.hi - rx.lo) * k / 4.0;
        const double vy = ry.lo + (ry.hi - ry.lo) * k / 4.0;
        out << "<text x=\"" << sx(vx, rx) << "\" y=\"" << height - bottom + 16 << "\" text-anchor=\"middle\">"
            << format_number(vx, 4) << "</text>\n";
        out << "<text x=\"" << left - 6 << "\" y=\"" << sy(vy, ry) + 4 << "\" text-anchor=\"end\">"
            << format_number(vy, 4) << "</text>\n";
    }
    out << "<text x=\"" << (left + width - right) / 2 << "\" y=\"" << height - 12 << "\" text-anchor=\"middle\">" << x
        << "</text>\n"
        << "<text transform=\"translate(16," << (top + height - bottom) / 2
        << ") rotate(-90)\" text-anchor=\"middle\">" << y << "</text>\n";
}

}  // namespace

std::size_t Table::index(const std::string& column) const {
    const auto it = std::find(header.begin(), header.end(), column);
    if (it == header.end()) throw ConfigError("plot: no column '" + column + "'");
    return static_cast<std::size_t>(it - header.begin());
}

std::vector<double> Table::numbers(const std::string& column) const {
    const auto k = index(column);
    std::vector<double> values;
    for (const auto& row : rows) values.push_back(k < row.size() ? parse(row[k]) : std::nan(""));
    return values;
}

std::vector<std::string> Table::text(const std::string& column) const {
    const auto k = index(column);
    std::vector<std::string> values;
    for (const auto& row : rows) values.push_back(k < row.size() ? row[k] : std::string());
    return values;
}

Table read_table(std::istream& in) {
    Table table;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::stringstream row(line);
        for (std::string cell; std::getline(row, cell, ',');) cells.push_back(cell);
        if (first) {
            table.header = std::move(cells);
            first = false;
        } else {
            table.rows.push_back(std::move(cells));
        }
    }
    if (table.header.empty()) throw ConfigError("plot: empty CSV");
    return table;
}

void line_plot_svg(std::ostream& out, const Table& table, const std::string& x, const std::string& y,
                   const std::string& group) {
    const auto xs = table.numbers(x);
    const auto ys = table.numbers(y);
    const std::vector<std::string> keys = group.empty() ? std::vector<std::string>(xs.size()) : table.text(group);
    const Range rx = range_of(xs), ry = range_of(ys);
    frame(out, x, y, rx, ry);
    std::vector<std::string> order;
    std::map<std::string, std::vector<std::size_t>> members;
    for (std::size_t k = 0; k < xs.size(); ++k) {
        if (!members.count(keys[k])) order.push_back(keys[k]);
        members[keys[k]].push_back(k);
    }
    for (std::size_t s = 0; s < order.size(); ++s) {
        const char* colour = palette[s % std::size(palette)];
        out << "<polyline fill=\"none\" stroke=\"" << colour << "\" stroke-width=\"1.5\" points=\"";
        for (std::size_t k : members[order[s]]) {
            if (std::isfinite(xs[k]) && std::isfinite(ys[k])) out << sx(xs[k], rx) << ',' << sy(ys[k], ry) << ' ';
        }
        out << "\"/>\n";
        if (!group.empty()) {
            out << "<text x=\"" << width - right - 8 << "\" y=\"" << top + 16 + 14 * static_cast<double>(s)
                << "\" text-anchor=\"end\" fill=\"" << colour << "\">" << group << '=' << order[s] << "</text>\n";
        }
    }
    out << "</svg>\n";
}

void heatmap_svg(std::ostream& out, const Table& table, const std::string& x, const std::string& y,
                 const std::string& z) {
    const auto xs = table.numbers(x), ys = table.numbers(y), zs = table.numbers(z);
    std::vector<double> ux = xs, uy = ys;
    std::sort(ux.begin(), ux.end());
    ux.erase(std::unique(ux.begin(), ux.end()), ux.end());
    std::sort(uy.begin(), uy.end());
    uy.erase(std::unique(uy.begin(), uy.end()), uy.end());
    const Range rz = range_of(zs);
    const Range rx{-0.5, static_cast<double>(ux.size()) - 0.5}, ry{-0.5, static_cast<double>(uy.size()) - 0.5};
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
        << "\" font-family=\"sans-serif\" font-size=\"12\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    const double cw = (width - left - right) / static_cast<double>(ux.size());
    const double ch = (height - top - bottom) / static_cast<double>(uy.size());
    for (std::size_t k = 0; k < zs.size(); ++k) {
        const auto ix = static_cast<double>(std::lower_bound(ux.begin(), ux.end(), xs[k]) - ux.begin());
        const auto iy = static_cast<double>(std::lower_bound(uy.begin(), uy.end(), ys[k]) - uy.begin());
        const double t = std::isfinite(zs[k]) ? (zs[k] - rz.lo) / (rz.hi - rz.lo) : 0.0;
        const int red = static_cast<int>(255 * t), blue = static_cast<int>(255 * (1.0 - t));
        out << "<rect x=\"" << sx(ix - 0.5, rx) << "\" y=\"" << sy(iy + 0.5, ry) << "\" width=\"" << cw
            << "\" height=\"" << ch << "\" fill=\"rgb(" << red << ",64," << blue << ")\"/>\n";
        out << "<text x=\"" << sx(ix, rx) << "\" y=\"" << sy(iy, ry) + 4 << "\" text-anchor=\"middle\" fill=\"white\">"
            << format_number(zs[k], 3) << "</text>\n";
    }
    for (std::size_t k = 0; k < ux.size(); ++k) {
        out << "<text x=\"" << sx(static_cast<double>(k), rx) << "\" y=\"" << height - bottom + 16
            << "\" text-anchor=\"middle\">" << format_number(ux[k], 4) << "</text>\n";
    }
    for (std::size_t k = 0; k < uy.size(); ++k) {
        out << "<text x=\"" << left - 6 << "\" y=\"" << sy(static_cast<double>(k), ry) + 4 << "\" text-anchor=\"end\">"
            << format_number(uy[k], 4) << "</text>\n";
    }
    out << "<text x=\"" << (left + width - right) / 2 << "\" y=\"" << height - 12 << "\" text-anchor=\"middle\">" << x
        << "</text>\n<text transform=\"translate(16," << (top + height - bottom) / 2
        << ") rotate(-90)\" text-anchor=\"middle\">" << y << "</text>\n"
        << "<text x=\"" << width - right << "\" y=\"14\" text-anchor=\"end\">" << z << " [" << format_number(rz.lo, 3)
        << ", " << format_number(rz.hi, 3) << "]</text>\n</svg>\n";
}

}  // namespace qdsps::tools
