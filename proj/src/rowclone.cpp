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


#include "pumsim/rowclone.hpp"

#include <algorithm>
#include <map>
#include <string>

#include "pumsim/error.hpp"

namespace pumsim {

namespace reserved {

RowAddress tmp_row_for(const BankId& bank, const DeviceConfig& cfg) {
    const BankId host{bank.channel, bank.rank, (bank.bank + 1) % cfg.banks_per_chip};
    return row(Slot::Tmp, host, cfg.subarrays_per_bank - 1, cfg);
}

bool is_reserved(std::uint32_t bank_row, const DeviceConfig& cfg) {
    const std::uint32_t local = bank_row % cfg.rows_per_subarray;
    if (local >= cfg.rows_per_subarray - kPerSubarray) return true;
    if (bank_row == (cfg.subarrays_per_bank - 1) * cfg.rows_per_subarray + local_row(Slot::Tmp, cfg)) return true;
    return cfg.is_spare_row(bank_row);
}

double rowclone_overhead(const DeviceConfig& cfg) {
    return 1.0 / cfg.rows_per_subarray + 1.0 / cfg.rows_per_bank();
}

double idao_overhead(const DeviceConfig& cfg) { return 5.0 / cfg.rows_per_subarray; }

void check_remaps(const DeviceConfig& cfg) {
    for (const auto& r : cfg.row_remaps) {
        DeviceConfig plain = cfg;
        plain.row_remaps.clear();
        if (is_reserved(r.faulty, plain) || is_reserved(r.spare, plain)) {
            fail(ErrorKind::InvalidConfig, "row remap " + std::to_string(r.faulty) + ":" + std::to_string(r.spare) +
                                               " touches a reserved row");
        }
    }
}

void initialize(DramState& dram) {
    const DeviceConfig& cfg = dram.config();
    const Bytes ones(cfg.row_size_bytes, 0xff);
    for (std::uint32_t ch = 0; ch < cfg.channels; ++ch) {
        for (std::uint32_t rk = 0; rk < cfg.ranks_per_channel; ++rk) {
            for (std::uint32_t bk = 0; bk < cfg.banks_per_chip; ++bk) {
                for (std::uint32_t s = 0; s < cfg.subarrays_per_bank; ++s) {
                    dram.poke_row({ch, rk, bk}, row(Slot::C1, {ch, rk, bk}, s, cfg).row, ones);
                }
            }
        }
    }
}

}  // namespace reserved

namespace {

void check_rows(const RowAddress& a, const DeviceConfig& cfg) {
    if (a.row >= cfg.rows_per_bank()) fail(ErrorKind::AddressRange, "row " + to_string(a) + " out of range");
}

Nanoseconds start_time(Engine& engine, std::initializer_list<BankId> banks) {
    Nanoseconds t = engine.cursor();
    for (const auto& b : banks) t = engine.earliest(BankRole::Activate, b, t);
    return t;
}

}  // namespace

Mechanism classify_copy(const RowAddress& src, const RowAddress& dst, const DeviceConfig& cfg) {
    if (!src.bank.same_rank(dst.bank)) {
        fail(ErrorKind::UnsupportedPlacement, "copy across ranks or channels: " + to_string(src) + " -> " + to_string(dst));
    }
    if (src.bank != dst.bank) return Mechanism::PsmInterBank;
    if (src.physical_subarray(cfg) == dst.physical_subarray(cfg)) return Mechanism::Fpm;
    if (cfg.banks_per_chip < 2) fail(ErrorKind::UnsupportedPlacement, "intra-bank PSM needs a second bank");
    return Mechanism::PsmIntraBank;
}

CopyResult fpm_copy(Engine& engine, const RowAddress& src, const RowAddress& dst) {
    const DeviceConfig& cfg = engine.config();
    check_rows(src, cfg);
    check_rows(dst, cfg);
    if (src == dst) fail(ErrorKind::SameRow, "FPM copy of " + to_string(src) + " onto itself");
    if (src.bank != dst.bank || src.physical_subarray(cfg) != dst.physical_subarray(cfg)) {
        fail(ErrorKind::SubarrayMismatch, "FPM needs one subarray: " + to_string(src) + " -> " + to_string(dst));
    }
    const auto& t = cfg.timing;
    const Nanoseconds t0 = start_time(engine, {src.bank});
    engine.activate(src.bank, src.row, t0);
    if (cfg.fpm_latency_mode == FpmLatencyMode::Conservative) {
        engine.activate(dst.bank, dst.row, t0 + t.tRAS);
        engine.precharge(dst.bank, t0 + t.tRAS + t.tRAS);
    } else {
        engine.activate(dst.bank, dst.row, t0 + t.tRCD, /*overlapped=*/true);
        engine.precharge(dst.bank, t0 + t.tRAS);
    }
    return {Mechanism::Fpm, engine.cursor() - t0};
}

CopyResult psm_copy(Engine& engine, const RowAddress& src, const RowAddress& dst, const ColumnPairs& columns) {
    const DeviceConfig& cfg = engine.config();
    check_rows(src, cfg);
    check_rows(dst, cfg);
    if (src.bank == dst.bank) fail(ErrorKind::SameBankTransfer, "PSM within " + to_string(src.bank));
    if (!src.bank.same_rank(dst.bank)) fail(ErrorKind::UnsupportedPlacement, "PSM across ranks or channels");
    if (columns.empty()) fail(ErrorKind::AddressRange, "PSM copy of zero lines");
    for (const auto& [s, d] : columns) {
        if (s >= cfg.lines_per_row() || d >= cfg.lines_per_row()) fail(ErrorKind::AddressRange, "PSM column out of range");
    }
    const auto& t = cfg.timing;
    const Nanoseconds t0 = start_time(engine, {src.bank, dst.bank});
    engine.activate(src.bank, src.row, t0);
    engine.activate(dst.bank, dst.row, t0);
    for (std::size_t i = 0; i < columns.size(); ++i) {
        engine.transfer(src.bank, columns[i].first, dst.bank, columns[i].second,
                        t0 + t.tRCD + static_cast<double>(i) * t.tTRANSFER);
    }
    const Nanoseconds pre = t0 + (t.tOH - t.tRP) + static_cast<double>(columns.size()) * t.tTRANSFER;
    engine.precharge(src.bank, engine.earliest(BankRole::Precharge, src.bank, pre));
    engine.precharge(dst.bank, engine.earliest(BankRole::Precharge, dst.bank, pre));
    return {Mechanism::PsmInterBank, engine.cursor() - t0};
}

CopyResult psm_copy(Engine& engine, const RowAddress& src, const RowAddress& dst) {
    ColumnPairs cols(engine.config().lines_per_row());
    for (std::uint32_t c = 0; c < cols.size(); ++c) cols[c] = {c, c};
    return psm_copy(engine, src, dst, cols);
}

CopyResult bulk_copy(Engine& engine, const RowAddress& src, const RowAddress& dst) {
    const DeviceConfig& cfg = engine.config();
    const Nanoseconds start = engine.cursor();
    switch (classify_copy(src, dst, cfg)) {
        case Mechanism::Fpm: return fpm_copy(engine, src, dst);
        case Mechanism::PsmInterBank: return psm_copy(engine, src, dst);
        default: {
            const RowAddress tmp = reserved::tmp_row_for(src.bank, cfg);
            psm_copy(engine, src, tmp);
            psm_copy(engine, tmp, dst);
            return {Mechanism::PsmIntraBank, engine.cursor() - start};
        }
    }
}

CopyResult bulk_zero(Engine& engine, const RowAddress& dst) {
    const DeviceConfig& cfg = engine.config();
    check_rows(dst, cfg);
    if (reserved::is_reserved(dst, cfg)) fail(ErrorKind::ReservedRowTarget, "bulk zero of reserved row " + to_string(dst));
    return fpm_copy(engine, reserved::zero_row(dst.bank, dst.physical_subarray(cfg), cfg), dst);
}

std::vector<CopyResult> bulk_init(Engine& engine, std::span<const RowAddress> dsts,
                                  std::span<const std::uint8_t> value_row) {
    const DeviceConfig& cfg = engine.config();
    if (value_row.size() != cfg.row_size_bytes) fail(ErrorKind::RowRequired, "bulk init value must be one full row");
    for (const auto& d : dsts) {
        check_rows(d, cfg);
        if (reserved::is_reserved(d, cfg)) fail(ErrorKind::ReservedRowTarget, "bulk init of reserved row " + to_string(d));
    }
    // One staging row per rank, hosted next to the first destination bank.
    std::map<std::pair<std::uint32_t, std::uint32_t>, RowAddress> staging;
    std::vector<CopyResult> out;
    std::vector<std::uint32_t> columns(cfg.lines_per_row());
    std::vector<Bytes> lines(cfg.lines_per_row());
    for (std::uint32_t c = 0; c < columns.size(); ++c) {
        columns[c] = c;
        lines[c].assign(value_row.begin() + c * cfg.cacheline_bytes, value_row.begin() + (c + 1) * cfg.cacheline_bytes);
    }
    for (const auto& d : dsts) {
        const auto key = std::make_pair(d.bank.channel, d.bank.rank);
        if (staging.contains(key)) continue;
        const RowAddress stage = reserved::tmp_row_for(d.bank, cfg);
        staging.emplace(key, stage);
        const Nanoseconds before = engine.cursor();
        engine.write_stream(stage, columns, lines);
        out.push_back({Mechanism::Baseline, engine.cursor() - before});
    }
    for (const auto& d : dsts) out.push_back(bulk_copy(engine, staging.at({d.bank.channel, d.bank.rank}), d));
    return out;
}

}  // namespace pumsim
