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
#include <string>
#include <string_view>
#include <vector>

#include "pumsim/address.hpp"
#include "pumsim/config.hpp"

namespace pumsim {

enum class CommandKind { Activate, Precharge, Read, Write, MultiActivate, Transfer };

std::string_view to_string(CommandKind kind);

struct TimedCommand {
    CommandKind kind = CommandKind::Activate;
    BankId bank;                         ///< TRANSFER: source bank
    std::array<std::uint32_t, 3> rows{};  ///< bank-local rows (ACT: 1, MULTI: 3)
    std::uint8_t row_count = 0;
    std::uint32_t column = 0;            ///< READ/WRITE/TRANSFER source column
    BankId peer_bank;                    ///< TRANSFER destination
    std::uint32_t peer_column = 0;
    /// An ACTIVATE issued into a bank whose sense amplifiers are still
    /// settling. It neither restarts tRAS nor gates column commands.
    bool overlapped = false;
    Nanoseconds issue_time = 0.0;
    Nanoseconds complete_time = 0.0;
};

struct BankHistory {
    std::optional<Nanoseconds> last_act;
    std::optional<Nanoseconds> last_pre;
    std::optional<Nanoseconds> last_write;
    std::optional<Nanoseconds> last_issue;
};

/// Role a command plays on one bank. TRANSFER reads its source bank and
/// writes its destination bank.
enum class BankRole { Activate, OverlappedActivate, Precharge, Read, Write };

/// Smallest time >= now satisfying every timing constraint for `role`.
Nanoseconds earliest_issue(BankRole role, const BankHistory& history, Nanoseconds now, const TimingParams& t);
void record_issue(BankHistory& history, BankRole role, Nanoseconds at);

/// Bank roles touched by a command, as (bank, role) pairs.
std::vector<std::pair<BankId, BankRole>> bank_roles(const TimedCommand& cmd);

/// Time after issue at which the command's effect is complete.
Nanoseconds command_duration(CommandKind kind, const TimingParams& t);

Nanoseconds latency_fpm_copy(const DeviceConfig& cfg);
Nanoseconds latency_stream_row(const DeviceConfig& cfg, std::uint64_t lines);
/// One inter-bank hop; an intra-bank copy is two hops.
Nanoseconds latency_psm_copy(const DeviceConfig& cfg, std::uint64_t lines);
/// Four-step in-DRAM AND/OR, honouring the FPM latency mode and the
/// conservative-total source.
Nanoseconds latency_idao(const DeviceConfig& cfg);

struct ScheduleViolation {
    std::size_t index = 0;  ///< position in the log
    std::string message;
};

/// Checks one command against the histories of the banks it touches.
std::optional<std::string> check_command(const TimedCommand& cmd, const std::vector<BankHistory>& histories,
                                         const DeviceConfig& cfg);
/// Replays a full command log and reports every violated constraint.
std::vector<ScheduleViolation> validate_schedule(const std::vector<TimedCommand>& log, const DeviceConfig& cfg);

/// CSV with header time_ns,kind,channel,rank,bank,subarray,row,column.
/// MULTI_ACTIVATE rows are written "r1|r2|r3"; TRANSFER bank and column as
/// "src>dst".
void write_command_csv(std::ostream& os, const std::vector<TimedCommand>& log, const DeviceConfig& cfg);

}  // namespace pumsim
