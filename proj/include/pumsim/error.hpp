/*
 * Copyright 2026 The pumsim Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace pumsim {

enum class ErrorKind {
    InvalidConfig,
    AddressRange,
    NumericDomain,
    MetastableSense,
    CommandDropped,
    NoOpenRow,
    SubarrayMismatch,
    SameBankTransfer,
    StaleCell,
    SameRow,
    ReservedRowTarget,
    UnsupportedPlacement,
    UnknownMechanism,
    CalibrationFailed,
    FallbackToCpu,
    RowRequired,
    PageFault,
    NoPoolPage,
    TimingViolation,
    Blocked,
    ParseError,
    InvalidWorkload,
};

std::string_view to_string(ErrorKind kind);

/// Every simulator failure is reported through this type; `kind()` is the
/// machine-readable discriminator the CLI prints.
class SimError : public std::runtime_error {
public:
    SimError(ErrorKind kind, const std::string& message)
        : std::runtime_error(message), kind_(kind) {}

    [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

/// Parse and trace-replay failures carry the 1-based source line.
class LineError : public SimError {
public:
    LineError(ErrorKind kind, std::size_t line, const std::string& message)
        : SimError(kind, "line " + std::to_string(line) + ": " + message), line_(line) {}

    [[nodiscard]] std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& message) {
    throw SimError(kind, message);
}

}  // namespace pumsim
