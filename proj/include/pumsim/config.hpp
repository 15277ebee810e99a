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

#include <cstdint>
#include <filesystem>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pumsim/energy_table.hpp"

namespace pumsim {

using Nanoseconds = double;
using Addr = std::uint64_t;

inline constexpr std::uint64_t kPageBytes = 4096;

enum class Interleave { Row, Cacheline };
enum class FpmLatencyMode { Conservative, Aggressive };
enum class IdaoConservativeSource { Text, Table };
enum class EnergyMode { TableDriven, PerCommand };

/// DDR3-1600 timing (ns).
struct TimingParams {
    Nanoseconds tRAS = 35.0;  ///< ACTIVATE to PRECHARGE
    Nanoseconds tRCD = 15.0;  ///< ACTIVATE to READ/WRITE
    Nanoseconds tRP = 15.0;   ///< PRECHARGE to ACTIVATE
    Nanoseconds tWR = 15.0;   ///< WRITE to PRECHARGE
    /// Streaming model: a row stream of n lines takes tOH + n * tLINE.
    /// 465/64 is exact in binary, so 45 + 64 * tLINE == 510 bit-for-bit.
    Nanoseconds tLINE = 465.0 / 64.0;
    Nanoseconds tOH = 45.0;
    Nanoseconds tTRANSFER = 465.0 / 64.0;
};

/// Per-command energies (uJ). Overlapped activations carry no separate cost.
struct PerCommandEnergy {
    double E_ACT = 0.0;
    double E_PRE = 0.0;
    double E_COL_IO = 0.0;
    double E_TRANSFER = 0.0;
    double E_MULTI_ACT = 0.0;
};

struct EnergyParams {
    EnergyMode mode = EnergyMode::TableDriven;
    EnergyTable table = EnergyTable::reference();
    /// Unset means "calibrate against `table` when an engine is built".
    std::optional<PerCommandEnergy> per_command;
};

struct RowRemap {
    std::uint32_t faulty = 0;  ///< bank-local row index
    std::uint32_t spare = 0;   ///< bank-local row index
};

struct DeviceConfig {
    std::uint32_t channels = 1;
    std::uint32_t ranks_per_channel = 1;
    std::uint32_t chips_per_rank = 8;
    std::uint32_t banks_per_chip = 8;
    std::uint32_t subarrays_per_bank = 64;
    std::uint32_t rows_per_subarray = 512;
    std::uint32_t row_size_bytes = 8192;  ///< rank-level row
    std::uint32_t cacheline_bytes = 64;
    TimingParams timing;
    EnergyParams energy;
    Interleave interleave = Interleave::Row;
    FpmLatencyMode fpm_latency_mode = FpmLatencyMode::Conservative;
    IdaoConservativeSource idao_conservative_source = IdaoConservativeSource::Text;
    double cell_capacitance = 1.0;       ///< Cc, relative units
    double bitline_capacitance = 10.0;   ///< Cb
    double vdd = 1.0;
    Nanoseconds retention_window = 64'000'000.0;
    bool decay_enabled = false;
    std::vector<RowRemap> row_remaps;
    std::uint64_t llc_bytes = 2ull << 20;
    std::uint32_t llc_ways = 16;

    /// Throws InvalidConfig on any violated invariant.
    void validate() const;

    [[nodiscard]] std::uint32_t lines_per_row() const { return row_size_bytes / cacheline_bytes; }
    [[nodiscard]] std::uint32_t rows_per_bank() const { return rows_per_subarray * subarrays_per_bank; }
    [[nodiscard]] std::uint64_t banks_total() const {
        return std::uint64_t{channels} * ranks_per_channel * banks_per_chip;
    }
    [[nodiscard]] std::uint64_t capacity() const {
        return banks_total() * rows_per_bank() * row_size_bytes;
    }
    /// Smallest contiguous address span made only of whole rows.
    [[nodiscard]] std::uint64_t row_span() const {
        return interleave == Interleave::Cacheline ? std::uint64_t{row_size_bytes} * channels
                                                   : row_size_bytes;
    }
    /// Device-internal row after spare-row remapping.
    [[nodiscard]] std::uint32_t physical_row(std::uint32_t bank_row) const;
    [[nodiscard]] std::uint32_t physical_subarray(std::uint32_t bank_row) const {
        return physical_row(bank_row) / rows_per_subarray;
    }
    [[nodiscard]] bool is_spare_row(std::uint32_t bank_row) const;
};

/// Small functional geometry used by tests and the oracle suite.
DeviceConfig tiny_config();
/// Desk-scale geometry with 4 KiB rows, used for workload experiments.
DeviceConfig desk_config();

/// `key=value` lines, `#` comments. Starts from `base`.
DeviceConfig parse_config_text(std::string_view text, DeviceConfig base = {});
DeviceConfig load_config(const std::filesystem::path& path, DeviceConfig base = {});
/// Applies one `key=value` override.
void apply_override(DeviceConfig& cfg, std::string_view assignment);
void apply_setting(DeviceConfig& cfg, std::string_view key, std::string_view value);
/// Canonical text form; parse_config_text(format_config(c)) reproduces c.
std::string format_config(const DeviceConfig& cfg);

std::string_view to_string(Interleave v);
std::string_view to_string(FpmLatencyMode v);
std::string_view to_string(IdaoConservativeSource v);
std::string_view to_string(EnergyMode v);

}  // namespace pumsim
