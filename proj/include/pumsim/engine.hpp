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
#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

#include "pumsim/address.hpp"
#include "pumsim/config.hpp"
#include "pumsim/dram_state.hpp"
#include "pumsim/timing.hpp"

namespace pumsim {

struct CommandCounters {
    std::uint64_t activate = 0;
    std::uint64_t overlapped_activate = 0;
    std::uint64_t precharge = 0;
    std::uint64_t read = 0;
    std::uint64_t write = 0;
    std::uint64_t multi_activate = 0;
    std::uint64_t transfer = 0;

    CommandCounters operator-(const CommandCounters& o) const {
        return {activate - o.activate, overlapped_activate - o.overlapped_activate, precharge - o.precharge,
                read - o.read,         write - o.write,
                multi_activate - o.multi_activate, transfer - o.transfer};
    }
    bool operator==(const CommandCounters&) const = default;
};

/// Which kind of work channel bytes are attributed to.
enum class TrafficClass { Copy, Bitwise, Other };

struct TrafficCounters {
    std::uint64_t copy_bytes = 0;
    std::uint64_t bitwise_bytes = 0;
    std::uint64_t other_bytes = 0;

    [[nodiscard]] std::uint64_t total() const { return copy_bytes + bitwise_bytes + other_bytes; }
};

struct EngineOptions {
    /// Strict: a command requested before its earliest legal time throws
    /// TimingViolation. Otherwise it is delayed.
    bool strict = true;
    bool keep_log = true;
};

/// Owns the DRAM state, the per-bank timing histories and the command log.
///
/// Operations are serialised: begin_op() opens an operation at the current
/// clock, every command issued extends its completion, and end_op() advances
/// the clock to that completion and returns the latency.
class Engine {
public:
    explicit Engine(const DeviceConfig& cfg, EngineOptions options = {});

    [[nodiscard]] const DeviceConfig& config() const { return cfg_; }
    DramState& dram() { return dram_; }
    [[nodiscard]] const DramState& dram() const { return dram_; }

    [[nodiscard]] Nanoseconds now() const { return now_; }
    /// Start time for the next sequence inside the current operation.
    [[nodiscard]] Nanoseconds cursor() const { return in_op_ ? op_end_ : now_; }
    void begin_op();
    Nanoseconds end_op();
    [[nodiscard]] bool in_op() const { return in_op_; }

    /// Primitive commands; `at` is the requested issue time. Returns the
    /// time actually used.
    Nanoseconds activate(const BankId& bank, std::uint32_t row, Nanoseconds at, bool overlapped = false);
    Nanoseconds precharge(const BankId& bank, Nanoseconds at);
    Bytes read(const BankId& bank, std::uint32_t column, Nanoseconds at);
    Nanoseconds write(const BankId& bank, std::uint32_t column, std::span<const std::uint8_t> data, Nanoseconds at);
    Nanoseconds multi_activate(const BankId& bank, const std::array<std::uint32_t, 3>& rows, Nanoseconds at);
    Nanoseconds transfer(const BankId& src, std::uint32_t src_column, const BankId& dst, std::uint32_t dst_column,
                         Nanoseconds at);

    [[nodiscard]] Nanoseconds earliest(BankRole role, const BankId& bank, Nanoseconds at) const;

    /// Row streams over the channel: ACT, one column command every tLINE
    /// starting tRCD after it, PRE. n lines take tOH + n * tLINE.
    std::vector<Bytes> read_stream(const RowAddress& row, std::span<const std::uint32_t> columns);
    void write_stream(const RowAddress& row, std::span<const std::uint32_t> columns, std::span<const Bytes> data);

    void set_traffic_class(TrafficClass c) { traffic_class_ = c; }
    [[nodiscard]] TrafficClass traffic_class() const { return traffic_class_; }

    [[nodiscard]] const CommandCounters& counters() const { return counters_; }
    [[nodiscard]] const TrafficCounters& traffic() const { return traffic_; }
    [[nodiscard]] const std::vector<TimedCommand>& log() const { return log_; }
    void set_observer(std::function<void(const TimedCommand&)> fn) { observer_ = std::move(fn); }

    void write_cmdlog(std::ostream& os) const { write_command_csv(os, log_, cfg_); }

private:
    Nanoseconds issue(TimedCommand cmd, Nanoseconds at, const std::function<void()>& effect);

    DeviceConfig cfg_;
    EngineOptions options_;
    DramState dram_;
    std::vector<BankHistory> histories_;
    std::vector<TimedCommand> log_;
    CommandCounters counters_;
    TrafficCounters traffic_;
    TrafficClass traffic_class_ = TrafficClass::Other;
    std::function<void(const TimedCommand&)> observer_;
    Nanoseconds now_ = 0.0;
    Nanoseconds op_start_ = 0.0;
    Nanoseconds op_end_ = 0.0;
    bool in_op_ = false;
};

}  // namespace pumsim
