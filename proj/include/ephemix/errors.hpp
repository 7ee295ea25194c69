// Copyright 2026 The Ephemix Authors
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

#ifndef EPHEMIX_ERRORS_HPP
#define EPHEMIX_ERRORS_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ephemix {

/// Input text could not be parsed. Carries the 1-based line number when known.
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& what, std::size_t line)
        : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}

    explicit ParseError(const std::string& what) : std::runtime_error(what), line_(0) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// A value is well-formed but violates a domain constraint.
class ValidationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Configuration file or experiment setup is unusable.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Numerical failure during training (NaN/Inf gradients or weights).
class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace ephemix

#endif  // EPHEMIX_ERRORS_HPP
