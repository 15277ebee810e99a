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

#include "pumsim/address.hpp"

#include <array>
#include <bit>

#include "pumsim/error.hpp"

namespace pumsim {

namespace {

enum Field { kByte, kColumn, kChannel, kSubarray, kBank, kRank, kRow, kFieldCount };

struct Layout {
    std::array<Field, kFieldCount> order;  // least significant first
    std::array<std::uint64_t, kFieldCount> radix;
};

Layout layout_for(const DeviceConfig& cfg) {
    Layout l{};
    l.radix[kByte] = cfg.cacheline_bytes;
    l.radix[kColumn] = cfg.lines_per_row();
    l.radix[kChannel] = cfg.channels;
    l.radix[kSubarray] = cfg.subarrays_per_bank;
    l.radix[kBank] = cfg.banks_per_chip;
    l.radix[kRank] = cfg.ranks_per_channel;
    l.radix[kRow] = cfg.rows_per_subarray;
    if (cfg.interleave == Interleave::Row) {
        l.order = {kByte, kColumn, kSubarray, kBank, kRank, kChannel, kRow};
    } else {
        l.order = {kByte, kChannel, kColumn, kSubarray, kBank, kRank, kRow};
    }
    return l;
}

std::array<std::uint32_t*, kFieldCount> fields(Location& loc) {
    std::array<std::uint32_t*, kFieldCount> f{};
    f[kByte] = &loc.byte_offset_in_line;
    f[kColumn] = &loc.column;
    f[kChannel] = &loc.channel;
    f[kSubarray] = &loc.subarray;
    f[kBank] = &loc.bank;
    f[kRank] = &loc.rank;
    f[kRow] = &loc.row;
    return f;
}

}  // namespace

std::string to_string(const BankId& b) {
    return "ch" + std::to_string(b.channel) + "/rk" + std::to_string(b.rank) + "/bk" + std::to_string(b.bank);
}

std::string to_string(const RowAddress& r) { return to_string(r.bank) + "/row" + std::to_string(r.row); }

Location decode_address(Addr addr, const DeviceConfig& cfg) {
    if (addr >= cfg.capacity()) {
        fail(ErrorKind::AddressRange, "address " + std::to_string(addr) + " beyond capacity " +
                                          std::to_string(cfg.capacity()));
    }
    const auto layout = layout_for(cfg);
    Location loc;
    auto f = fields(loc);
    for (Field field : layout.order) {
        *f[field] = static_cast<std::uint32_t>(addr % layout.radix[field]);
        addr /= layout.radix[field];
    }
    return loc;
}

Addr encode_location(const Location& loc_in, const DeviceConfig& cfg) {
    const auto layout = layout_for(cfg);
    Location loc = loc_in;
    auto f = fields(loc);
    Addr addr = 0;
    for (auto it = layout.order.rbegin(); it != layout.order.rend(); ++it) {
        const std::uint64_t v = *f[*it];
        if (v >= layout.radix[*it]) fail(ErrorKind::AddressRange, "location index out of range");
        addr = addr * layout.radix[*it] + v;
    }
    return addr;
}

std::uint64_t mdgr(const DeviceConfig& cfg) { return std::uint64_t{cfg.row_size_bytes} * cfg.channels; }

SubarrayMask spd_subarray_mask(const DeviceConfig& cfg) {
    const auto layout = layout_for(cfg);
    SubarrayMask m;
    unsigned bit = 0;
    for (Field field : layout.order) {
        const auto width = static_cast<unsigned>(std::countr_zero(layout.radix[field]));
        if (field == kSubarray) {
            m.shift = bit;
            m.mask = layout.radix[field] - 1;
            for (unsigned i = 0; i < width; ++i) m.bits.push_back(bit + i);
            break;
        }
        bit += width;
    }
    return m;
}

}  // namespace pumsim
