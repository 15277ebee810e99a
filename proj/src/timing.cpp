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


#include "pumsim/timing.hpp"

#include <algorithm>
#include <charconv>
#include <ostream>

#include "pumsim/error.hpp"

namespace pumsim {

namespace {

// Scheduled times are sums of dyadic constants, so equality is usually exact;
// the slack only absorbs rounding in user-supplied timings.
constexpr double kSlack = 1e-9;

std::string format_time(Nanoseconds t) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, t);
    return std::string(buf, res.ptr);
}

}  // namespace

std::string_view to_string(CommandKind kind) {
    switch (kind) {
        case CommandKind::Activate: return "ACTIVATE";
        case CommandKind::Precharge: return "PRECHARGE";
        case CommandKind::Read: return "READ";
        case CommandKind::Write: return "WRITE";
        case CommandKind::MultiActivate: return "MULTI_ACTIVATE";
        case CommandKind::Transfer: return "TRANSFER";
    }
    return "?";
}

Nanoseconds earliest_issue(BankRole role, const BankHistory& h, Nanoseconds now, const TimingParams& t) {
    Nanoseconds at = now;
    switch (role) {
        case BankRole::Activate:
            if (h.last_pre) at = std::max(at, *h.last_pre + t.tRP);
            break;
        case BankRole::OverlappedActivate:
            break;
        case BankRole::Precharge:
            if (h.last_act) at = std::max(at, *h.last_act + t.tRAS);
            if (h.last_write) at = std::max(at, *h.last_write + t.tWR);
            break;
        case BankRole::Read:
        case BankRole::Write:
            if (h.last_act) at = std::max(at, *h.last_act + t.tRCD);
            break;
    }
    return at;
}

void record_issue(BankHistory& h, BankRole role, Nanoseconds at) {
    switch (role) {
        case BankRole::Activate: h.last_act = at; break;
        case BankRole::OverlappedActivate: break;
        case BankRole::Precharge: h.last_pre = at; break;
        case BankRole::Read: break;
        case BankRole::Write: h.last_write = at; break;
    }
    h.last_issue = at;
}

std::vector<std::pair<BankId, BankRole>> bank_roles(const TimedCommand& cmd) {
    switch (cmd.kind) {
        case CommandKind::Activate:
            return {{cmd.bank, cmd.overlapped ? BankRole::OverlappedActivate : BankRole::Activate}};
        case CommandKind::MultiActivate: return {{cmd.bank, BankRole::Activate}};
        case CommandKind::Precharge: return {{cmd.bank, BankRole::Precharge}};
        case CommandKind::Read: return {{cmd.bank, BankRole::Read}};
        case CommandKind::Write: return {{cmd.bank, BankRole::Write}};
        case CommandKind::Transfer: return {{cmd.bank, BankRole::Read}, {cmd.peer_bank, BankRole::Write}};
    }
    return {};
}

Nanoseconds command_duration(CommandKind kind, const TimingParams& t) {
    switch (kind) {
        case CommandKind::Activate:
        case CommandKind::MultiActivate: return t.tRCD;
        case CommandKind::Precharge: return t.tRP;
        case CommandKind::Read:
        case CommandKind::Write: return t.tLINE;
        case CommandKind::Transfer: return t.tTRANSFER;
    }
    return 0.0;
}

Nanoseconds latency_fpm_copy(const DeviceConfig& cfg) {
    const auto& t = cfg.timing;
    return cfg.fpm_latency_mode == FpmLatencyMode::Conservative ? t.tRAS + t.tRAS + t.tRP : t.tRAS + t.tRP;
}

Nanoseconds latency_stream_row(const DeviceConfig& cfg, std::uint64_t lines) {
    if (lines == 0) fail(ErrorKind::NumericDomain, "a row stream needs at least one line");
    return cfg.timing.tOH + static_cast<double>(lines) * cfg.timing.tLINE;
}

Nanoseconds latency_psm_copy(const DeviceConfig& cfg, std::uint64_t lines) {
    if (lines == 0) fail(ErrorKind::NumericDomain, "a PSM copy needs at least one line");
    return cfg.timing.tOH + static_cast<double>(lines) * cfg.timing.tTRANSFER;
}

Nanoseconds latency_idao(const DeviceConfig& cfg) {
    const auto& t = cfg.timing;
    if (cfg.fpm_latency_mode == FpmLatencyMode::Aggressive) return 4 * latency_fpm_copy(cfg);
    if (cfg.idao_conservative_source == IdaoConservativeSource::Text) return 4 * latency_fpm_copy(cfg);
    // Result copy issued tRCD after the triple activation.
    return 3 * latency_fpm_copy(cfg) + t.tRCD + t.tRAS + t.tRP;
}

std::optional<std::string> check_command(const TimedCommand& cmd, const std::vector<BankHistory>& histories,
                                         const DeviceConfig& cfg) {
    if (cmd.complete_time < cmd.issue_time) return "complete_time precedes issue_time";
    for (const auto& [bank, role] : bank_roles(cmd)) {
        const BankHistory& h = histories[bank.flat(cfg)];
        if (h.last_issue && cmd.issue_time + kSlack < *h.last_issue) {
            return "out-of-order issue on " + to_string(bank);
        }
        const Nanoseconds need = earliest_issue(role, h, cmd.issue_time, cfg.timing);
        if (cmd.issue_time + kSlack < need) {
            return std::string(to_string(cmd.kind)) + " on " + to_string(bank) + " at " +
                   format_time(cmd.issue_time) + " ns needs " + format_time(need) + " ns";
        }
    }
    return std::nullopt;
}

std::vector<ScheduleViolation> validate_schedule(const std::vector<TimedCommand>& log, const DeviceConfig& cfg) {
    std::vector<BankHistory> histories(cfg.banks_total());
    std::vector<ScheduleViolation> out;
    for (std::size_t i = 0; i < log.size(); ++i) {
        const TimedCommand& cmd = log[i];
        if (auto msg = check_command(cmd, histories, cfg)) out.push_back({i, *msg});
        for (const auto& [bank, role] : bank_roles(cmd)) {
            record_issue(histories[bank.flat(cfg)], role, cmd.issue_time);
        }
    }
    return out;
}

void write_command_csv(std::ostream& os, const std::vector<TimedCommand>& log, const DeviceConfig& cfg) {
    os << "time_ns,kind,channel,rank,bank,subarray,row,column\n";
    const std::uint32_t rps = cfg.rows_per_subarray;
    for (const auto& c : log) {
        os << format_time(c.issue_time) << ',' << to_string(c.kind) << ',' << c.bank.channel << ','
           << c.bank.rank << ',';
        switch (c.kind) {
            case CommandKind::Activate:
            case CommandKind::Read:
            case CommandKind::Write:
                os << c.bank.bank << ',';
                if (c.row_count > 0) os << c.rows[0] / rps << ',' << c.rows[0] % rps;
                else os << ',';
                os << ',';
                if (c.kind != CommandKind::Activate) os << c.column;
                break;
            case CommandKind::MultiActivate:
                os << c.bank.bank << ',' << c.rows[0] / rps << ',' << c.rows[0] % rps << '|' << c.rows[1] % rps
                   << '|' << c.rows[2] % rps << ',';
                break;
            case CommandKind::Precharge:
                os << c.bank.bank << ",,,";
                break;
            case CommandKind::Transfer:
                os << c.bank.bank << '>' << c.peer_bank.bank << ",,," << c.column << '>' << c.peer_column;
                break;
        }
        os << '\n';
    }
}

}  // namespace pumsim
