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

#include <initializer_list>
#include <ostream>
#include <string>
#include <string_view>

namespace qdsps {

/// Locale-independent, round-trippable decimal text for CSV and reports.
/// Non-finite values are written as "nan" / "inf" / "-inf".
std::string format_number(double value, int significant_digits = 12);

/// Minimal CSV row writer; fields are never quoted, so callers keep
/// names free of commas.
class CsvWriter {
public:
    explicit CsvWriter(std::ostream& out) : out_(out) {}

    void header(std::initializer_list<std::string_view> names);

    CsvWriter& field(double value);
    CsvWriter& field(std::string_view text);
    CsvWriter& field(long long value);
    void end_row();

private:
    void separator();

    std::ostream& out_;
    bool row_started_ = false;
};

}  // namespace qdsps
