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

#include <filesystem>
#include <random>

#include "qdsps/config.hpp"

namespace qdsps::test {

inline std::filesystem::path source_dir() { return QDSPS_SOURCE_DIR; }
inline std::filesystem::path config_path(const char* name) { return source_dir() / "configs" / name; }

/// Profile B at 7 K, 0.6 nm, 16 ps, bath as recorded in configs/sample_b.ini.
inline Config sample_b() { return load_config(config_path("sample_b.ini")); }

inline std::mt19937_64 rng(unsigned seed) { return std::mt19937_64(seed); }

}  // namespace qdsps::test
