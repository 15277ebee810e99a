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

#include "pumsim/dram_state.hpp"

#include <algorithm>
#include <bit>
#include <cstdio>
#include <map>
#include <ostream>
#include <string>
#include <utility>

#include "pumsim/error.hpp"

namespace pumsim {

DramState::DramState(const DeviceConfig& cfg) : cfg_(cfg) {
    cfg_.validate();
    banks_.resize(cfg_.banks_total());
    for (auto& b : banks_) b.buffer.data.assign(cfg_.row_size_bytes, 0);
}

DramState::Bank& DramState::bank_state(const BankId& bank) {
    return const_cast<Bank&>(std::as_const(*this).bank_state(bank));
}

const DramState::Bank& DramState::bank_state(const BankId& bank) const {
    if (bank.channel >= cfg_.channels || bank.rank >= cfg_.ranks_per_channel || bank.bank >= cfg_.banks_per_chip) {
        fail(ErrorKind::AddressRange, "bank " + to_string(bank) + " out of range");
    }
    return banks_[bank.flat(cfg_)];
}

DramState::StoredRow& DramState::stored(Bank& b, std::uint32_t physical_row) {
    auto [it, inserted] = b.rows.try_emplace(physical_row);
    if (inserted) it->second.data.assign(cfg_.row_size_bytes, 0);
    return it->second;
}

void DramState::check_row(std::uint32_t row) const {
    if (row >= cfg_.rows_per_bank()) fail(ErrorKind::AddressRange, "row " + std::to_string(row) + " out of range");
}

void DramState::check_column(std::uint32_t column) const {
    if (column >= cfg_.lines_per_row()) {
        fail(ErrorKind::AddressRange, "column " + std::to_string(column) + " out of range");
    }
}

void DramState::sense_single(const StoredRow& row) const {
    if (!cfg_.decay_enabled) return;
    // Each bitline sees one cell; only the two rail values can occur.
    const Nanoseconds elapsed = now_ - row.last_refresh;
    for (bool bit : {false, true}) {
        const double v = cell_voltage(bit, elapsed, cfg_);
        sense_amplify(charge_share_deviation(std::span(&v, 1), cfg_.cell_capacitance,
                                             cfg_.bitline_capacitance, cfg_.vdd));
    }
}

void DramState::activate(const BankId& bank, std::uint32_t row) {
    check_row(row);
    Bank& b = bank_state(bank);
    const std::uint32_t phys = cfg_.physical_row(row);
    const std::uint32_t sub = phys / cfg_.rows_per_subarray;

    if (!b.amps.activated) {
        StoredRow& r = stored(b, phys);
        sense_single(r);
        r.last_refresh = now_;
        b.buffer.data = r.data;
        b.buffer.valid = true;
        b.buffer.source_row = row;
        b.amps = {true, sub, {row}};
        return;
    }
    if (b.amps.subarray != sub) {
        fail(ErrorKind::CommandDropped, "ACTIVATE to subarray " + std::to_string(sub) + " while subarray " +
                                            std::to_string(b.amps.subarray) + " of " + to_string(bank) +
                                            " is open");
    }
    // The latched sense amplifiers overpower the new row's cells.
    StoredRow& r = stored(b, phys);
    r.data = b.buffer.data;
    r.last_refresh = now_;
    b.buffer.source_row = row;
    b.amps.connected_rows = {row};
}

void DramState::precharge(const BankId& bank) {
    Bank& b = bank_state(bank);
    b.amps = {};
    b.buffer.valid = false;
}

Bytes DramState::column_access(const BankId& bank, std::uint32_t column, ColumnOp op,
                               std::span<const std::uint8_t> data) {
    Bank& b = bank_state(bank);
    if (!b.buffer.valid) fail(ErrorKind::NoOpenRow, "column access to precharged " + to_string(bank));
    check_column(column);
    const std::size_t off = std::size_t{column} * cfg_.cacheline_bytes;
    if (op == ColumnOp::Read) {
        return Bytes(b.buffer.data.begin() + off, b.buffer.data.begin() + off + cfg_.cacheline_bytes);
    }
    if (data.size() != cfg_.cacheline_bytes) {
        fail(ErrorKind::AddressRange, "column write needs exactly one cacheline of data");
    }
    std::copy(data.begin(), data.end(), b.buffer.data.begin() + off);
    for (std::uint32_t row : b.amps.connected_rows) {
        StoredRow& r = stored(b, cfg_.physical_row(row));
        std::copy(data.begin(), data.end(), r.data.begin() + off);
        r.last_refresh = now_;
    }
    return {};
}

void DramState::multi_activate(const BankId& bank, const std::array<std::uint32_t, 3>& rows) {
    Bank& b = bank_state(bank);
    if (b.amps.activated) {
        fail(ErrorKind::CommandDropped, "triple activation requires a precharged bank");
    }
    std::array<std::uint32_t, 3> phys{};
    for (int i = 0; i < 3; ++i) {
        check_row(rows[i]);
        phys[i] = cfg_.physical_row(rows[i]);
    }
    if (rows[0] == rows[1] || rows[1] == rows[2] || rows[0] == rows[2]) {
        fail(ErrorKind::SameRow, "triple activation needs three distinct rows");
    }
    const std::uint32_t sub = phys[0] / cfg_.rows_per_subarray;
    for (auto p : phys) {
        if (p / cfg_.rows_per_subarray != sub) {
            fail(ErrorKind::SubarrayMismatch, "triple activation rows span subarrays");
        }
    }

    std::array<StoredRow*, 3> cells{};
    std::array<Nanoseconds, 3> elapsed{};
    for (int i = 0; i < 3; ++i) {
        cells[i] = &stored(b, phys[i]);
        elapsed[i] = now_ - cells[i]->last_refresh;
        if (!cfg_.decay_enabled && elapsed[i] > cfg_.retention_window) {
            fail(ErrorKind::StaleCell, "row " + std::to_string(rows[i]) + " not restored for " +
                                           std::to_string(elapsed[i]) + " ns");
        }
    }

    // Every bitline sees one of eight voltage combinations; evaluate each
    // through the charge-sharing model once.
    std::array<int, 8> outcome{};  // 1, 0, or -1 for metastable
    bool is_majority = true;
    for (int combo = 0; combo < 8; ++combo) {
        std::array<double, 3> v{};
        for (int i = 0; i < 3; ++i) v[i] = cell_voltage((combo >> i) & 1, elapsed[i], cfg_);
        const double delta =
            charge_share_deviation(v, cfg_.cell_capacitance, cfg_.bitline_capacitance, cfg_.vdd);
        outcome[combo] = delta > 0 ? 1 : (delta < 0 ? 0 : -1);
        const int maj = std::popcount(static_cast<unsigned>(combo)) >= 2 ? 1 : 0;
        is_majority = is_majority && outcome[combo] == maj;
    }

    const Bytes& a = cells[0]->data;
    const Bytes& bb = cells[1]->data;
    const Bytes& c = cells[2]->data;
    Bytes result(cfg_.row_size_bytes);
    if (is_majority) {
        for (std::size_t i = 0; i < result.size(); ++i) {
            result[i] = static_cast<std::uint8_t>((a[i] & bb[i]) | (bb[i] & c[i]) | (a[i] & c[i]));
        }
    } else {
        for (std::size_t i = 0; i < result.size(); ++i) {
            std::uint8_t out = 0;
            for (int bit = 0; bit < 8; ++bit) {
                const int combo = ((a[i] >> bit) & 1) | (((bb[i] >> bit) & 1) << 1) | (((c[i] >> bit) & 1) << 2);
                const int o = outcome[combo];
                if (o < 0) {
                    fail(ErrorKind::MetastableSense,
                         "zero bitline deviation at byte " + std::to_string(i) + " bit " + std::to_string(bit));
                }
                out |= static_cast<std::uint8_t>(o << bit);
            }
            result[i] = out;
        }
    }

    for (auto* r : cells) {
        r->data = result;
        r->last_refresh = now_;
    }
    b.buffer.data = std::move(result);
    b.buffer.valid = true;
    b.buffer.source_row = rows[0];
    b.amps = {true, sub, {rows[0], rows[1], rows[2]}};
}

void DramState::transfer(const BankId& src, std::uint32_t src_column, const BankId& dst,
                         std::uint32_t dst_column) {
    if (src == dst) fail(ErrorKind::SameBankTransfer, "TRANSFER within " + to_string(src));
    if (!src.same_rank(dst)) {
        fail(ErrorKind::UnsupportedPlacement, "TRANSFER across ranks or channels");
    }
    check_column(src_column);
    check_column(dst_column);
    const Bank& s = bank_state(src);
    if (!s.buffer.valid) fail(ErrorKind::NoOpenRow, "TRANSFER source " + to_string(src) + " is precharged");
    if (!bank_state(dst).buffer.valid) {
        fail(ErrorKind::NoOpenRow, "TRANSFER destination " + to_string(dst) + " is precharged");
    }
    const std::size_t line = cfg_.cacheline_bytes;
    const Bytes chunk(s.buffer.data.begin() + src_column * line, s.buffer.data.begin() + (src_column + 1) * line);
    column_access(dst, dst_column, ColumnOp::Write, chunk);
}

const RowBuffer& DramState::row_buffer(const BankId& bank) const { return bank_state(bank).buffer; }

SenseAmpState DramState::sense_amp(const BankId& bank) const { return bank_state(bank).amps; }

SenseMode DramState::sense_mode(const BankId& bank, std::uint64_t bit) const {
    const Bank& b = bank_state(bank);
    if (!b.amps.activated) return SenseMode::Precharged;
    if (bit >= std::uint64_t{cfg_.row_size_bytes} * 8) fail(ErrorKind::AddressRange, "bit index out of range");
    return ((b.buffer.data[bit / 8] >> (bit % 8)) & 1) ? SenseMode::DrivingHigh : SenseMode::DrivingLow;
}

CellState DramState::cell(const BankId& bank, std::uint32_t row, std::uint64_t bit) const {
    check_row(row);
    if (bit >= std::uint64_t{cfg_.row_size_bytes} * 8) fail(ErrorKind::AddressRange, "bit index out of range");
    const Bank& b = bank_state(bank);
    CellState c;
    if (auto it = b.rows.find(cfg_.physical_row(row)); it != b.rows.end()) {
        c.bit = (it->second.data[bit / 8] >> (bit % 8)) & 1;
        c.last_refresh = it->second.last_refresh;
    }
    c.voltage = cell_voltage(c.bit, now_ - c.last_refresh, cfg_);
    return c;
}

Nanoseconds DramState::last_refresh(const BankId& bank, std::uint32_t row) const {
    check_row(row);
    const Bank& b = bank_state(bank);
    auto it = b.rows.find(cfg_.physical_row(row));
    return it == b.rows.end() ? 0.0 : it->second.last_refresh;
}

Bytes DramState::peek_row(const BankId& bank, std::uint32_t row) const {
    check_row(row);
    const Bank& b = bank_state(bank);
    auto it = b.rows.find(cfg_.physical_row(row));
    return it == b.rows.end() ? Bytes(cfg_.row_size_bytes, 0) : it->second.data;
}

void DramState::poke_row(const BankId& bank, std::uint32_t row, std::span<const std::uint8_t> data) {
    check_row(row);
    if (data.size() != cfg_.row_size_bytes) fail(ErrorKind::AddressRange, "poke_row needs exactly one row");
    Bank& b = bank_state(bank);
    StoredRow& r = stored(b, cfg_.physical_row(row));
    r.data.assign(data.begin(), data.end());
    r.last_refresh = now_;
}

void DramState::dump(std::ostream& os) const {
    os << "# channel rank bank subarray row data\n";
    static constexpr char kHex[] = "0123456789abcdef";
    for (std::uint32_t ch = 0; ch < cfg_.channels; ++ch) {
        for (std::uint32_t rk = 0; rk < cfg_.ranks_per_channel; ++rk) {
            for (std::uint32_t bk = 0; bk < cfg_.banks_per_chip; ++bk) {
                const Bank& b = bank_state({ch, rk, bk});
                std::map<std::uint32_t, const StoredRow*> sorted;
                for (const auto& [row, r] : b.rows) sorted.emplace(row, &r);
                for (const auto& [row, r] : sorted) {
                    os << ch << ' ' << rk << ' ' << bk << ' ' << row / cfg_.rows_per_subarray << ' '
                       << row % cfg_.rows_per_subarray << ' ';
                    for (auto byte : r->data) os << kHex[byte >> 4] << kHex[byte & 0xf];
                    os << '\n';
                }
            }
        }
    }
}

}  // namespace pumsim
