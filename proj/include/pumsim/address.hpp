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

#include <compare>
#include <cstdint>
#include <string>
#include <vector>

#include "pumsim/config.hpp"

namespace pumsim {

/// Decoded physical address.
///
/// Bit layout, least significant field first:
///   row interleave:       byte | column | subarray | bank | rank | channel | row
///   cacheline interleave: byte | channel | column | subarray | bank | rank | row
/// `row` is the index within the subarray; `column` is the cacheline index
/// within the rank-level row.
struct Location {
    std::uint32_t channel = 0;
    std::uint32_t rank = 0;
    std::uint32_t bank = 0;
    std::uint32_t subarray = 0;
    std::uint32_t row = 0;
    std::uint32_t column = 0;
    std::uint32_t byte_offset_in_line = 0;

    auto operator<=>(const Location&) const = default;
};

struct BankId {
    std::uint32_t channel = 0;
    std::uint32_t rank = 0;
    std::uint32_t bank = 0;

    auto operator<=>(const BankId&) const = default;

    [[nodiscard]] std::uint64_t flat(const DeviceConfig& cfg) const {
        return (std::uint64_t{channel} * cfg.ranks_per_channel + rank) * cfg.banks_per_chip + bank;
    }
    [[nodiscard]] bool same_rank(const BankId& o) const { return channel == o.channel && rank == o.rank; }
};

/// A row named by its bank and bank-local index (subarray * rows_per_subarray + row).
struct RowAddress {
    BankId bank;
    std::uint32_t row = 0;

    auto operator<=>(const RowAddress&) const = default;

    [[nodiscard]] std::uint32_t subarray(const DeviceConfig& cfg) const { return row / cfg.rows_per_subarray; }
    [[nodiscard]] std::uint32_t physical_subarray(const DeviceConfig& cfg) const {
        return cfg.physical_subarray(row);
    }
};

std::string to_string(const BankId& b);
std::string to_string(const RowAddress& r);

Location decode_address(Addr addr, const DeviceConfig& cfg);
Addr encode_location(const Location& loc, const DeviceConfig& cfg);

[[nodiscard]] inline RowAddress row_of(const Location& loc, const DeviceConfig& cfg) {
    return {{loc.channel, loc.rank, loc.bank}, loc.subarray * cfg.rows_per_subarray + loc.row};
}
[[nodiscard]] inline Location location_of(const RowAddress& r, std::uint32_t column, const DeviceConfig& cfg) {
    return {r.bank.channel, r.bank.rank,        r.bank.bank, r.row / cfg.rows_per_subarray,
            r.row % cfg.rows_per_subarray, column, 0};
}
/// Address of the first byte of `column` in row `r`.
[[nodiscard]] inline Addr address_of(const RowAddress& r, std::uint32_t column, const DeviceConfig& cfg) {
    return encode_location(location_of(r, column, cfg), cfg);
}

/// Minimum DRAM granularity: row size times channel count.
std::uint64_t mdgr(const DeviceConfig& cfg);

/// Which physical address bits select the subarray, as exported to software.
struct SubarrayMask {
    std::vector<unsigned> bits;  ///< ascending bit positions; empty with one subarray
    unsigned shift = 0;
    std::uint64_t mask = 0;      ///< field mask after shifting

    [[nodiscard]] std::uint32_t extract(Addr addr) const {
        return static_cast<std::uint32_t>((addr >> shift) & mask);
    }
};

SubarrayMask spd_subarray_mask(const DeviceConfig& cfg);

/// Global subarray id used by the page pools.
[[nodiscard]] inline std::uint64_t subarray_key(const Location& loc, const DeviceConfig& cfg) {
    return BankId{loc.channel, loc.rank, loc.bank}.flat(cfg) * cfg.subarrays_per_bank + loc.subarray;
}

}  // namespace pumsim
