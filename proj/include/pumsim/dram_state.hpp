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

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

#include "pumsim/address.hpp"
#include "pumsim/analog.hpp"
#include "pumsim/config.hpp"

namespace pumsim {

using Bytes = std::vector<std::uint8_t>;

enum class ColumnOp { Read, Write };

struct RowBuffer {
    Bytes data;
    bool valid = false;
    std::uint32_t source_row = 0;  ///< bank-local, as addressed by the controller
};

struct SenseAmpState {
    bool activated = false;
    std::uint32_t subarray = 0;              ///< physical subarray, when activated
    std::vector<std::uint32_t> connected_rows;  ///< bank-local rows with raised wordlines
};

/// Functional model of every cell, sense amplifier and row buffer.
///
/// Rows are stored sparsely as byte vectors; a row never written reads as
/// zero with last_refresh = 0. A row's cells are restored together, so the
/// per-cell voltage is derived from (bit, now - last_refresh) on demand.
/// Row indices are bank-local and logical; spare-row remapping from the
/// config is applied internally.
class DramState {
public:
    explicit DramState(const DeviceConfig& cfg);

    void set_time(Nanoseconds t) { now_ = t; }
    [[nodiscard]] Nanoseconds now() const { return now_; }
    [[nodiscard]] const DeviceConfig& config() const { return cfg_; }

    /// Opens `row`. A second ACTIVATE to the open subarray copies the row
    /// buffer into `row`; any other subarray is CommandDropped.
    void activate(const BankId& bank, std::uint32_t row);
    void precharge(const BankId& bank);
    Bytes column_access(const BankId& bank, std::uint32_t column, ColumnOp op,
                        std::span<const std::uint8_t> data = {});
    /// Simultaneous activation of three rows of one subarray from precharge.
    void multi_activate(const BankId& bank, const std::array<std::uint32_t, 3>& rows);
    void transfer(const BankId& src, std::uint32_t src_column, const BankId& dst, std::uint32_t dst_column);

    [[nodiscard]] const RowBuffer& row_buffer(const BankId& bank) const;
    [[nodiscard]] SenseAmpState sense_amp(const BankId& bank) const;
    /// Per-bitline sense amplifier mode.
    [[nodiscard]] SenseMode sense_mode(const BankId& bank, std::uint64_t bit) const;
    [[nodiscard]] CellState cell(const BankId& bank, std::uint32_t row, std::uint64_t bit) const;
    [[nodiscard]] Nanoseconds last_refresh(const BankId& bank, std::uint32_t row) const;

    /// Backdoor access without commands or timing (initialisation, oracles).
    [[nodiscard]] Bytes peek_row(const BankId& bank, std::uint32_t row) const;
    void poke_row(const BankId& bank, std::uint32_t row, std::span<const std::uint8_t> data);

    /// One materialised row per line: "channel rank bank subarray row hex".
    void dump(std::ostream& os) const;

private:
    struct StoredRow {
        Bytes data;
        Nanoseconds last_refresh = 0.0;
    };
    struct Bank {
        std::unordered_map<std::uint32_t, StoredRow> rows;  // keyed by physical row
        SenseAmpState amps;
        RowBuffer buffer;
    };

    Bank& bank_state(const BankId& bank);
    const Bank& bank_state(const BankId& bank) const;
    StoredRow& stored(Bank& b, std::uint32_t physical_row);
    void check_row(std::uint32_t row) const;
    void check_column(std::uint32_t column) const;
    void sense_single(const StoredRow& row) const;

    DeviceConfig cfg_;
    std::vector<Bank> banks_;
    Nanoseconds now_ = 0.0;
};

}  // namespace pumsim
