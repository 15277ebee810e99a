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
#include <span>
#include <utility>
#include <vector>

#include "pumsim/address.hpp"
#include "pumsim/config.hpp"
#include "pumsim/energy_table.hpp"
#include "pumsim/engine.hpp"

namespace pumsim {

/// Rows withheld from software.
///
/// Per subarray, counted down from the top local row: the zero row, C0, C1,
/// T1, T2, T3. Per bank, one tmp row (local row rows-7 of the last
/// subarray) that serves as the intra-bank PSM bounce row for the previous
/// bank and as the bulk-init staging row.
namespace reserved {

enum class Slot { Zero = 1, C0 = 2, C1 = 3, T1 = 4, T2 = 5, T3 = 6, Tmp = 7 };

inline constexpr std::uint32_t kPerSubarray = 6;

[[nodiscard]] inline std::uint32_t local_row(Slot slot, const DeviceConfig& cfg) {
    return cfg.rows_per_subarray - static_cast<std::uint32_t>(slot);
}
/// Reserved row `slot` of `subarray` in `bank` (Tmp is only valid for the
/// last subarray).
[[nodiscard]] inline RowAddress row(Slot slot, const BankId& bank, std::uint32_t subarray, const DeviceConfig& cfg) {
    return {bank, subarray * cfg.rows_per_subarray + local_row(slot, cfg)};
}
[[nodiscard]] inline RowAddress zero_row(const BankId& bank, std::uint32_t subarray, const DeviceConfig& cfg) {
    return row(Slot::Zero, bank, subarray, cfg);
}
/// Bounce/staging row serving `bank`: lives in bank (bank + 1) mod banks.
RowAddress tmp_row_for(const BankId& bank, const DeviceConfig& cfg);

/// True for reserved rows and for spare rows that back remapped faults.
bool is_reserved(std::uint32_t bank_row, const DeviceConfig& cfg);
[[nodiscard]] inline bool is_reserved(const RowAddress& r, const DeviceConfig& cfg) {
    return is_reserved(r.row, cfg);
}

/// Zero rows and tmp rows as a fraction of capacity.
double rowclone_overhead(const DeviceConfig& cfg);
/// The five in-DRAM bitwise rows per subarray.
double idao_overhead(const DeviceConfig& cfg);

/// Remaps may not move reserved rows nor take them as spares.
void check_remaps(const DeviceConfig& cfg);

/// Writes the all-ones control rows.
void initialize(DramState& dram);

}  // namespace reserved

struct CopyResult {
    Mechanism mechanism = Mechanism::Fpm;
    Nanoseconds latency = 0.0;
};

using ColumnPairs = std::vector<std::pair<std::uint32_t, std::uint32_t>>;

/// Both rows must share a bank and physical subarray. Conservative:
/// ACT src, ACT dst after tRAS, PRE after another tRAS. Aggressive: the
/// dst ACT overlaps at tRCD and the PRE follows the src ACT by tRAS.
CopyResult fpm_copy(Engine& engine, const RowAddress& src, const RowAddress& dst);

/// Pipelined line transfer between two banks of one rank: ACT both,
/// TRANSFER per (src column, dst column), PRE both.
CopyResult psm_copy(Engine& engine, const RowAddress& src, const RowAddress& dst, const ColumnPairs& columns);
/// Whole-row PSM copy.
CopyResult psm_copy(Engine& engine, const RowAddress& src, const RowAddress& dst);

/// Dispatches on placement: same subarray FPM, different banks PSM, same
/// bank different subarrays two PSM hops through the tmp row. Rows in
/// different ranks or channels are UnsupportedPlacement.
CopyResult bulk_copy(Engine& engine, const RowAddress& src, const RowAddress& dst);

/// FPM copy from the zero row of dst's subarray.
CopyResult bulk_zero(Engine& engine, const RowAddress& dst);

/// Streams `value_row` into one staging row per (channel, rank), then
/// bulk-copies it to every destination. Returns one result per
/// destination, preceded by one per staging write.
std::vector<CopyResult> bulk_init(Engine& engine, std::span<const RowAddress> dsts, std::span<const std::uint8_t> value_row);

/// Placement class of a row-to-row copy, without executing it.
Mechanism classify_copy(const RowAddress& src, const RowAddress& dst, const DeviceConfig& cfg);

}  // namespace pumsim
