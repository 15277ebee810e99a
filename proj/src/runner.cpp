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


#include "pumsim/runner.hpp"

#include <cmath>
#include <map>

#include "pumsim/error.hpp"

namespace pumsim {

double fmtc(const TrafficCounters& t) {
    return t.total() == 0 ? 0.0 : static_cast<double>(t.copy_bytes) / static_cast<double>(t.total());
}

RunResult run(const Trace& trace, const DeviceConfig& cfg, const RunOptions& options) {
    RunResult result;
    result.controller = std::make_unique<MemoryController>(
        cfg, ControllerOptions{options.mode, options.in_cache_copy, options.mc_dma}, EngineOptions{true, options.keep_log});
    MemoryController& mc = *result.controller;
    for (const auto& op : trace) {
        try {
            switch (op.kind) {
                case TraceKind::Read: mc.read(op.addr); break;
                case TraceKind::Write: mc.write(op.addr, op.value); break;
                default: mc.exec_isa(op.isa); break;
            }
        } catch (const LineError&) {
            throw;
        } catch (const SimError& e) {
            if (op.line == 0) throw;
            throw LineError(e.kind(), op.line, e.what());
        }
    }
    if (options.flush_at_end) mc.flush();

    RunStats& s = result.stats;
    s.mode = options.mode;
    s.trace_ops = trace.size();
    s.controller = mc.stats();
    s.total_latency = s.controller.total_latency;
    s.energy_mode = mc.energy_model().mode();
    s.energy = mc.energy();
    s.traffic = mc.engine().traffic();
    s.fmtc = fmtc(s.traffic);
    s.llc_hits = mc.llc().hits();
    s.llc_misses = mc.llc().misses();
    s.commands = mc.engine().counters();
    if (options.keep_log) s.timing_violations = validate_schedule(mc.engine().log(), cfg).size();
    return result;
}

namespace {

struct Measured {
    Nanoseconds latency = 0.0;
    double energy_uj = 0.0;
    std::size_t timing_violations = 0;
};

Measured measure(const DeviceConfig& cfg, ControllerMode mode, const IsaOp& op) {
    MemoryController mc(cfg, {mode});
    const OpOutcome out = mc.exec_isa(op);
    return {out.latency, mc.energy().total_uj(), validate_schedule(mc.engine().log(), cfg).size()};
}

double round_to(double v, int decimals) {
    const double scale = std::pow(10.0, decimals);
    return std::round(v * scale) / scale;
}

}  // namespace

Table3Result table3(const DeviceConfig& base) {
    DeviceConfig cfg = base;
    cfg.row_size_bytes = 4096;
    cfg.interleave = Interleave::Row;
    cfg.energy.mode = EnergyMode::TableDriven;
    cfg.fpm_latency_mode = FpmLatencyMode::Conservative;
    cfg.idao_conservative_source = IdaoConservativeSource::Table;
    cfg.validate();
    if (cfg.banks_per_chip < 2 || cfg.subarrays_per_bank < 2) {
        fail(ErrorKind::InvalidConfig, "the comparison table needs two banks and two subarrays");
    }

    const BankId b0{0, 0, 0};
    const BankId b1{0, 0, 1};
    const std::uint32_t rps = cfg.rows_per_subarray;
    auto at = [&](const BankId& b, std::uint32_t row) { return address_of({b, row}, 0, cfg); };
    constexpr std::uint64_t kSize = 4096;

    struct Job {
        OpKind op;
        Mechanism mech;
        const char* label;
        ControllerMode mode;
        IsaOp isa;
    };
    const IsaOp and_op{IsaKind::MemAnd, at(b0, 0), at(b0, 1), at(b0, 2), kSize, 0};
    const std::vector<Job> jobs = {
        {OpKind::Copy, Mechanism::Baseline, "copy/baseline", ControllerMode::Baseline,
         {IsaKind::MemCopy, at(b0, 0), 0, at(b0, 1), kSize, 0}},
        {OpKind::Copy, Mechanism::Fpm, "copy/fpm", ControllerMode::RowClone,
         {IsaKind::MemCopy, at(b0, 0), 0, at(b0, 1), kSize, 0}},
        {OpKind::Copy, Mechanism::PsmInterBank, "copy/psm_inter_bank", ControllerMode::RowClone,
         {IsaKind::MemCopy, at(b0, 0), 0, at(b1, 1), kSize, 0}},
        {OpKind::Copy, Mechanism::PsmIntraBank, "copy/psm_intra_bank", ControllerMode::RowClone,
         {IsaKind::MemCopy, at(b0, 0), 0, at(b0, rps), kSize, 0}},
        {OpKind::Zero, Mechanism::Baseline, "zero/baseline", ControllerMode::Baseline,
         {IsaKind::MemInit, 0, 0, at(b0, 1), kSize, 0}},
        {OpKind::Zero, Mechanism::Fpm, "zero/fpm", ControllerMode::RowClone, {IsaKind::MemInit, 0, 0, at(b0, 1), kSize, 0}},
        {OpKind::AndOr, Mechanism::Baseline, "and_or/baseline", ControllerMode::Baseline, and_op},
        {OpKind::AndOr, Mechanism::IdaoConservative, "and_or/idao_conservative", ControllerMode::Idao, and_op},
        {OpKind::AndOr, Mechanism::IdaoAggressive, "and_or/idao_aggressive", ControllerMode::Idao, and_op},
    };

    DeviceConfig per_cmd = cfg;
    per_cmd.energy.mode = EnergyMode::PerCommand;
    Table3Result result;
    result.calibration = calibrate_per_command(cfg.energy.table);
    per_cmd.energy.per_command = result.calibration.constants;

    std::map<OpKind, Measured> baselines;
    for (const auto& job : jobs) {
        DeviceConfig c = cfg;
        DeviceConfig p = per_cmd;
        if (job.mech == Mechanism::IdaoAggressive) {
            c.fpm_latency_mode = FpmLatencyMode::Aggressive;
            p.fpm_latency_mode = FpmLatencyMode::Aggressive;
        }
        const Measured m = measure(c, job.mode, job.isa);
        const Measured pc = measure(p, job.mode, job.isa);
        result.timing_violations += m.timing_violations + pc.timing_violations;
        if (job.mech == Mechanism::Baseline) baselines[job.op] = m;
        const Measured& b = baselines.at(job.op);
        const EnergyTableEntry& entry = cfg.energy.table.at(job.op, job.mech);
        const EnergyTableEntry& base_entry = cfg.energy.table.at(job.op, Mechanism::Baseline);

        Table3Row row;
        row.op = job.op;
        row.mechanism = job.mech;
        row.label = job.label;
        row.latency_ns = m.latency;
        row.baseline_latency_ns = b.latency;
        row.latency_decimals = entry.latency_reduction_decimals;
        row.latency_reduction = round_to(b.latency / m.latency, row.latency_decimals);
        row.printed_latency_reduction = entry.printed_latency_reduction.value_or(0.0);
        row.energy_uj = m.energy_uj;
        row.printed_energy_reduction = entry.printed_reduction.value_or(0.0);
        row.absolute_energy_quotient = base_entry.absolute_uj / entry.absolute_uj;
        row.per_command_energy_uj = pc.energy_uj;
        row.per_command_relative_error = (pc.energy_uj - entry.absolute_uj) / entry.absolute_uj;
        result.rows.push_back(row);
    }
    result.idao_conservative_table_ns = result.rows[7].latency_ns;
    DeviceConfig text = cfg;
    text.idao_conservative_source = IdaoConservativeSource::Text;
    const Measured t = measure(text, ControllerMode::Idao, and_op);
    result.idao_conservative_text_ns = t.latency;
    result.timing_violations += t.timing_violations;
    return result;
}

}  // namespace pumsim
