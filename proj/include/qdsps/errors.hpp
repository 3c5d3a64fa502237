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

#include <stdexcept>
#include <string>

namespace qdsps {

/// Input outside the domain of an operation (non-positive wavelength, g2 >= 1, ...).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// A pulse grid too short to hold the requested envelope.
class TruncationError : public DomainError {
public:
    using DomainError::DomainError;
};

/// Malformed or inconsistent configuration file.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Base for failures of the numerical machinery (exit code 2 in the CLI).
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class IntegrationError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

/// A figure of merit that has no value, e.g. g2 of a source that never emits.
class UndefinedResultError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class FitError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class CalibrationError : public NumericalError {
public:
    CalibrationError(const std::string& what, std::string trace)
        : NumericalError(what), trace_(std::move(trace)) {}

    const std::string& trace() const noexcept { return trace_; }

private:
    std::string trace_;
};

}  // namespace qdsps
