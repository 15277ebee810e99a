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


#include "pumsim/engine.hpp"

#include <algorithm>

#include "pumsim/error.hpp"

namespace pumsim {

Engine::Engine(const DeviceConfig& cfg, EngineOptions options)
    : cfg_(cfg), options_(options), dram_(cfg), histories_(cfg.banks_total()) {}

void Engine::begin_op() {
    in_op_ = true;
    op_start_ = now_;
    op_end_ = now_;
}

Nanoseconds Engine::end_op() {
    in_op_ = false;
    now_ = std::max(now_, op_end_);
    return now_ - op_start_;
}

Nanoseconds Engine::earliest(BankRole role, const BankId& bank, Nanoseconds at) const {
    return earliest_issue(role, histories_[bank.flat(cfg_)], at, cfg_.timing);
}

Nanoseconds Engine::issue(TimedCommand cmd, Nanoseconds at, const std::function<void()>& effect) {
    Nanoseconds when = at;
    for (const auto& [bank, role] : bank_roles(cmd)) {
        when = std::max(when, earliest(role, bank, at));
        if (histories_[bank.flat(cfg_)].last_issue) when = std::max(when, *histories_[bank.flat(cfg_)].last_issue);
    }
    cmd.issue_time = options_.strict ? at : when;
    cmd.complete_time = cmd.issue_time + command_duration(cmd.kind, cfg_.timing);
    if (auto msg = check_command(cmd, histories_, cfg_)) fail(ErrorKind::TimingViolation, *msg);

    dram_.set_time(cmd.issue_time);
    effect();

    for (const auto& [bank, role] : bank_roles(cmd)) record_issue(histories_[bank.flat(cfg_)], role, cmd.issue_time);
    switch (cmd.kind) {
        case CommandKind::Activate: ++(cmd.overlapped ? counters_.overlapped_activate : counters_.activate); break;
        case CommandKind::Precharge: ++counters_.precharge; break;
        case CommandKind::Read: ++counters_.read; break;
        case CommandKind::Write: ++counters_.write; break;
        case CommandKind::MultiActivate: ++counters_.multi_activate; break;
        case CommandKind::Transfer: ++counters_.transfer; break;
    }
    if (cmd.kind == CommandKind::Read || cmd.kind == CommandKind::Write) {
        switch (traffic_class_) {
            case TrafficClass::Copy: traffic_.copy_bytes += cfg_.cacheline_bytes; break;
            case TrafficClass::Bitwise: traffic_.bitwise_bytes += cfg_.cacheline_bytes; break;
            case TrafficClass::Other: traffic_.other_bytes += cfg_.cacheline_bytes; break;
        }
    }
    if (in_op_) op_end_ = std::max(op_end_, cmd.complete_time);
    else now_ = std::max(now_, cmd.complete_time);
    if (observer_) observer_(cmd);
    if (options_.keep_log) log_.push_back(cmd);
    return cmd.issue_time;
}

Nanoseconds Engine::activate(const BankId& bank, std::uint32_t row, Nanoseconds at, bool overlapped) {
    TimedCommand cmd;
    cmd.kind = CommandKind::Activate;
    cmd.bank = bank;
    cmd.rows[0] = row;
    cmd.row_count = 1;
    cmd.overlapped = overlapped;
    return issue(cmd, at, [&] { dram_.activate(bank, row); });
}

Nanoseconds Engine::precharge(const BankId& bank, Nanoseconds at) {
    TimedCommand cmd;
    cmd.kind = CommandKind::Precharge;
    cmd.bank = bank;
    return issue(cmd, at, [&] { dram_.precharge(bank); });
}

namespace {

void tag_open_row(TimedCommand& cmd, const DramState& dram) {
    const RowBuffer& rb = dram.row_buffer(cmd.bank);
    if (rb.valid) {
        cmd.rows[0] = rb.source_row;
        cmd.row_count = 1;
    }
}

}  // namespace

Bytes Engine::read(const BankId& bank, std::uint32_t column, Nanoseconds at) {
    TimedCommand cmd;
    cmd.kind = CommandKind::Read;
    cmd.bank = bank;
    cmd.column = column;
    tag_open_row(cmd, dram_);
    Bytes out;
    issue(cmd, at, [&] { out = dram_.column_access(bank, column, ColumnOp::Read); });
    return out;
}

Nanoseconds Engine::write(const BankId& bank, std::uint32_t column, std::span<const std::uint8_t> data,
                          Nanoseconds at) {
    TimedCommand cmd;
    cmd.kind = CommandKind::Write;
    cmd.bank = bank;
    cmd.column = column;
    tag_open_row(cmd, dram_);
    return issue(cmd, at, [&] { dram_.column_access(bank, column, ColumnOp::Write, data); });
}

Nanoseconds Engine::multi_activate(const BankId& bank, const std::array<std::uint32_t, 3>& rows, Nanoseconds at) {
    TimedCommand cmd;
    cmd.kind = CommandKind::MultiActivate;
    cmd.bank = bank;
    cmd.rows = rows;
    cmd.row_count = 3;
    return issue(cmd, at, [&] { dram_.multi_activate(bank, rows); });
}

Nanoseconds Engine::transfer(const BankId& src, std::uint32_t src_column, const BankId& dst,
                             std::uint32_t dst_column, Nanoseconds at) {
    TimedCommand cmd;
    cmd.kind = CommandKind::Transfer;
    cmd.bank = src;
    cmd.column = src_column;
    cmd.peer_bank = dst;
    cmd.peer_column = dst_column;
    return issue(cmd, at, [&] { dram_.transfer(src, src_column, dst, dst_column); });
}

std::vector<Bytes> Engine::read_stream(const RowAddress& row, std::span<const std::uint32_t> columns) {
    const auto& t = cfg_.timing;
    const Nanoseconds t0 = earliest(BankRole::Activate, row.bank, cursor());
    activate(row.bank, row.row, t0);
    std::vector<Bytes> out;
    out.reserve(columns.size());
    for (std::size_t i = 0; i < columns.size(); ++i) {
        out.push_back(read(row.bank, columns[i], t0 + t.tRCD + static_cast<double>(i) * t.tLINE));
    }
    const Nanoseconds pre = t0 + (t.tOH - t.tRP) + static_cast<double>(columns.size()) * t.tLINE;
    precharge(row.bank, earliest(BankRole::Precharge, row.bank, pre));
    return out;
}

void Engine::write_stream(const RowAddress& row, std::span<const std::uint32_t> columns,
                          std::span<const Bytes> data) {
    if (columns.size() != data.size()) fail(ErrorKind::AddressRange, "write stream column/data count mismatch");
    const auto& t = cfg_.timing;
    const Nanoseconds t0 = earliest(BankRole::Activate, row.bank, cursor());
    activate(row.bank, row.row, t0);
    for (std::size_t i = 0; i < columns.size(); ++i) {
        write(row.bank, columns[i], data[i], t0 + t.tRCD + static_cast<double>(i) * t.tLINE);
    }
    const Nanoseconds pre = t0 + (t.tOH - t.tRP) + static_cast<double>(columns.size()) * t.tLINE;
    precharge(row.bank, earliest(BankRole::Precharge, row.bank, pre));
}

}  // namespace pumsim
