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
#include <memory>
#include <string>
#include <vector>

#include "pumsim/config.hpp"
#include "pumsim/energy.hpp"
#include "pumsim/memctrl.hpp"
#include "pumsim/trace.hpp"

namespace pumsim {

struct RunOptions {
    ControllerMode mode = ControllerMode::Baseline;
    bool mc_dma = false;
    bool in_cache_copy = true;
    /// Keep the full command log (needed for --cmdlog and post-hoc checks).
    bool keep_log = false;
    /// Write back every dirty line after the last trace op.
    bool flush_at_end = true;
};

struct RunStats {
    ControllerMode mode = ControllerMode::Baseline;
    std::uint64_t trace_ops = 0;
    Nanoseconds total_latency = 0.0;
    EnergyMode energy_mode = EnergyMode::TableDriven;
    EnergyLedger energy;
    TrafficCounters traffic;
    double fmtc = 0.0;
    std::uint64_t llc_hits = 0;
    std::uint64_t llc_misses = 0;
    CommandCounters commands;
    std::size_t timing_violations = 0;
    ControllerStats controller;
};

/// Fraction of channel bytes moved on behalf of copy and initialisation.
double fmtc(const TrafficCounters& t);

struct RunResult {
    RunStats stats;
    std::unique_ptr<MemoryController> controller;
};

/// Replays a trace on a fresh controller. Engine errors are rethrown with
/// the trace line attached.
RunResult run(const Trace& trace, const DeviceConfig& cfg, const RunOptions& options = {});

struct Table3Row {
    OpKind op = OpKind::Copy;
    Mechanism mechanism = Mechanism::Baseline;
    std::string label;
    Nanoseconds latency_ns = 0.0;
    Nanoseconds baseline_latency_ns = 0.0;
    double latency_reduction = 0.0;  ///< baseline / latency, rounded to the printed decimals
    double printed_latency_reduction = 0.0;
    int latency_decimals = 1;
    double energy_uj = 0.0;           ///< table mode
    double printed_energy_reduction = 0.0;
    double absolute_energy_quotient = 0.0;  ///< baseline absolute / this absolute
    double per_command_energy_uj = 0.0;
    double per_command_relative_error = 0.0;  ///< vs. the table absolute
};

struct Table3Result {
    std::vector<Table3Row> rows;
    Nanoseconds idao_conservative_text_ns = 0.0;
    Nanoseconds idao_conservative_table_ns = 0.0;
    std::size_t timing_violations = 0;  ///< over every job's command log
    CalibrationResult calibration;
};

/// Runs each comparison row as one cold 4 KiB operation on a geometry
/// derived from `base` with 4 KiB rows and row interleaving.
Table3Result table3(const DeviceConfig& base);

}  // namespace pumsim
