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


#include "pumsim/report.hpp"

#include <sstream>

#include "pumsim/error.hpp"

namespace pumsim {

using nlohmann::ordered_json;

ReportFormat parse_report_format(std::string_view name) {
    if (name == "json") return ReportFormat::Json;
    if (name == "csv") return ReportFormat::Csv;
    if (name == "text") return ReportFormat::Text;
    fail(ErrorKind::InvalidConfig, "unknown report format '" + std::string(name) + "'");
}

namespace {

ordered_json commands_json(const CommandCounters& c) {
    ordered_json j;
    j["activate"] = c.activate;
    j["overlapped_activate"] = c.overlapped_activate;
    j["precharge"] = c.precharge;
    j["read"] = c.read;
    j["write"] = c.write;
    j["multi_activate"] = c.multi_activate;
    j["transfer"] = c.transfer;
    return j;
}

ordered_json config_json(const DeviceConfig& cfg) {
    ordered_json j;
    std::istringstream in(format_config(cfg));
    std::string line;
    while (std::getline(in, line)) {
        const auto eq = line.find('=');
        if (line.empty() || line[0] == '#' || eq == std::string::npos) continue;
        j[line.substr(0, eq)] = line.substr(eq + 1);
    }
    return j;
}

std::string key_of(std::string_view op, std::string_view mech) {
    return std::string(op) + "/" + std::string(mech);
}

}  // namespace

ordered_json reference_table_json(const EnergyTable& table) {
    ordered_json rows = ordered_json::array();
    for (const auto& key : EnergyTable::comparison_rows()) {
        const auto& e = table.at(key.first, key.second);
        const auto& base = table.at(key.first, Mechanism::Baseline);
        ordered_json r;
        r["op"] = to_string(key.first);
        r["mechanism"] = to_string(key.second);
        r["latency_ns"] = e.absolute_latency_ns.value_or(0.0);
        r["energy_uj"] = e.absolute_uj;
        r["printed_latency_reduction"] = e.printed_latency_reduction.value_or(0.0);
        r["printed_energy_reduction"] = e.printed_reduction.value_or(0.0);
        r["absolute_energy_quotient"] = base.absolute_uj / e.absolute_uj;
        rows.push_back(r);
    }
    return rows;
}

ordered_json run_report(const RunStats& stats, const DeviceConfig& cfg) {
    ordered_json doc;
    doc["schema"] = kRunReportSchema;
    doc["mechanism"] = to_string(stats.mode);
    doc["config"] = config_json(cfg);

    ordered_json summary;
    summary["trace_ops"] = stats.trace_ops;
    summary["total_latency_ns"] = stats.total_latency;
    summary["channel_bytes"] = stats.traffic.total();
    summary["copy_bytes"] = stats.traffic.copy_bytes;
    summary["bitwise_bytes"] = stats.traffic.bitwise_bytes;
    summary["other_bytes"] = stats.traffic.other_bytes;
    summary["fmtc"] = stats.fmtc;
    doc["summary"] = summary;

    ordered_json energy;
    energy["mode"] = to_string(stats.energy_mode);
    energy["total_uj"] = stats.energy.total_uj();
    ordered_json cats;
    for (std::size_t i = 0; i < EnergyLedger::kCategories; ++i) {
        const auto op = static_cast<OpKind>(i);
        cats[std::string(to_string(op))] = stats.energy.category_uj(op);
    }
    energy["categories_uj"] = cats;
    doc["energy"] = energy;

    ordered_json llc;
    llc["hits"] = stats.llc_hits;
    llc["misses"] = stats.llc_misses;
    doc["llc"] = llc;

    doc["commands"] = commands_json(stats.commands);

    const ControllerStats& c = stats.controller;
    ordered_json ops;
    ops["isa"] = c.isa_ops;
    ops["reads"] = c.reads;
    ops["writes"] = c.writes;
    ops["cpu_bytes"] = c.cpu_bytes;
    ops["psm_lines"] = c.psm_lines;
    ops["fallback_rows"] = c.fallback_rows;
    ops["zi_lines"] = c.zi_lines;
    ops["page_faults"] = c.page_faults;
    ordered_json rows = ordered_json::object();
    for (const auto& [k, v] : c.rows_by_mechanism) rows[k] = v;
    ops["rows_by_mechanism"] = rows;
    doc["operations"] = ops;

    // Per (op, mechanism) work, with the reduction against the baseline of
    // the same op. Table mode reports the stored reductions.
    const EnergyTable& table = cfg.energy.table;
    ordered_json mechs = ordered_json::array();
    for (const auto& [k, m] : c.by_mechanism) {
        ordered_json r;
        r["key"] = k;
        r["portions"] = m.portions;
        r["bytes"] = m.bytes;
        r["latency_ns"] = m.latency;
        r["energy_uj"] = static_cast<double>(m.energy_fj) * 1e-9;
        r["energy_reduction"] = nullptr;
        for (const auto& key : EnergyTable::comparison_rows()) {
            if (key_of(to_string(key.first), to_string(key.second)) != k) continue;
            if (stats.energy_mode == EnergyMode::TableDriven) {
                r["energy_reduction"] = table.at(key.first, key.second).printed_reduction.value_or(1.0);
            } else if (m.bytes > 0 && m.energy_fj > 0) {
                const double per4k = static_cast<double>(m.energy_fj) * 1e-9 * kPageBytes /
                                     static_cast<double>(m.bytes);
                r["energy_reduction"] = table.at(key.first, Mechanism::Baseline).absolute_uj / per4k;
            }
        }
        mechs.push_back(r);
    }
    doc["mechanisms"] = mechs;

    ordered_json coh;
    coh["writebacks"] = c.writebacks;
    coh["in_cache_copies"] = c.in_cache_copies;
    coh["invalidations"] = c.invalidations;
    doc["coherence"] = coh;

    ordered_json timing;
    timing["violations"] = stats.timing_violations;
    doc["timing"] = timing;

    doc["reference_table"] = reference_table_json(table);
    return doc;
}

ordered_json table3_report(const Table3Result& t3) {
    ordered_json doc;
    ordered_json rows = ordered_json::array();
    for (const auto& r : t3.rows) {
        ordered_json j;
        j["label"] = r.label;
        j["op"] = to_string(r.op);
        j["mechanism"] = to_string(r.mechanism);
        j["latency_ns"] = r.latency_ns;
        j["baseline_latency_ns"] = r.baseline_latency_ns;
        j["latency_reduction"] = r.latency_reduction;
        j["printed_latency_reduction"] = r.printed_latency_reduction;
        j["energy_uj"] = r.energy_uj;
        j["printed_energy_reduction"] = r.printed_energy_reduction;
        j["absolute_energy_quotient"] = r.absolute_energy_quotient;
        j["per_command_energy_uj"] = r.per_command_energy_uj;
        j["per_command_relative_error"] = r.per_command_relative_error;
        rows.push_back(j);
    }
    doc["rows"] = rows;
    doc["idao_conservative_text_ns"] = t3.idao_conservative_text_ns;
    doc["idao_conservative_table_ns"] = t3.idao_conservative_table_ns;
    doc["timing_violations"] = t3.timing_violations;
    doc["calibration"] = calibration_report(t3.calibration);
    return doc;
}

ordered_json calibration_report(const CalibrationResult& cal) {
    ordered_json doc;
    ordered_json k;
    k["E_ACT"] = cal.constants.E_ACT;
    k["E_PRE"] = cal.constants.E_PRE;
    k["E_COL_IO"] = cal.constants.E_COL_IO;
    k["E_TRANSFER"] = cal.constants.E_TRANSFER;
    k["E_MULTI_ACT"] = cal.constants.E_MULTI_ACT;
    doc["constants_uj"] = k;
    ordered_json rows = ordered_json::array();
    for (const auto& r : cal.rows) {
        ordered_json j;
        j["op"] = to_string(r.key.first);
        j["mechanism"] = to_string(r.key.second);
        j["commands"] = commands_json(r.counts);
        j["target_uj"] = r.target_uj;
        j["fitted_uj"] = r.fitted_uj;
        j["relative_residual"] = r.relative_residual;
        rows.push_back(j);
    }
    doc["rows"] = rows;
    doc["max_abs_relative_residual"] = cal.max_abs_relative_residual();
    return doc;
}

ordered_json bitmap_report(const std::vector<BitmapQueryResult>& results) {
    ordered_json rows = ordered_json::array();
    for (const auto& r : results) {
        ordered_json j;
        j["bins"] = r.bins;
        j["or_fraction"] = r.or_fraction;
        j["baseline_or_ns"] = r.baseline_or_ns;
        j["mechanism_or_ns"] = r.mechanism_or_ns;
        j["non_or_ns"] = r.non_or_ns;
        j["speedup"] = r.speedup;
        j["amdahl_bound"] = r.amdahl_bound;
        j["result_correct"] = r.result_correct;
        j["timing_violations"] = r.timing_violations;
        rows.push_back(j);
    }
    ordered_json doc;
    doc["queries"] = rows;
    return doc;
}

namespace {

std::string scalar(const ordered_json& v) {
    if (v.is_string()) return v.get<std::string>();
    return v.dump();
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char ch : s) {
        if (ch == '"') out += '"';
        out += ch;
    }
    return out + "\"";
}

void flatten(const ordered_json& v, const std::string& section, const std::string& name, std::ostream& os) {
    if (v.is_object() || v.is_array()) {
        if (v.empty()) return;
        std::size_t i = 0;
        for (auto it = v.begin(); it != v.end(); ++it, ++i) {
            const std::string part = v.is_object() ? it.key() : std::to_string(i);
            flatten(*it, section, name.empty() ? part : name + "." + part, os);
        }
        return;
    }
    os << csv_field(section) << ',' << csv_field(name) << ',' << csv_field(scalar(v)) << '\n';
}

void text(const ordered_json& v, int depth, std::ostream& os) {
    const std::string pad(static_cast<std::size_t>(depth) * 2, ' ');
    std::size_t i = 0;
    for (auto it = v.begin(); it != v.end(); ++it, ++i) {
        const std::string label = v.is_object() ? it.key() : "[" + std::to_string(i) + "]";
        if (it->is_structured() && !it->empty()) {
            os << pad << label << ":\n";
            text(*it, depth + 1, os);
        } else {
            os << pad << label << ": " << scalar(*it) << '\n';
        }
    }
}

}  // namespace

std::string to_csv(const ordered_json& doc) {
    std::ostringstream os;
    os << "section,name,value\n";
    if (doc.is_object()) {
        for (auto it = doc.begin(); it != doc.end(); ++it) {
            if (it->is_structured()) flatten(*it, it.key(), "", os);
            else flatten(*it, it.key(), "value", os);
        }
    } else {
        flatten(doc, "root", "", os);
    }
    return os.str();
}

std::string to_text(const ordered_json& doc) {
    std::ostringstream os;
    text(doc, 0, os);
    return os.str();
}

std::string render(const ordered_json& doc, ReportFormat format) {
    switch (format) {
        case ReportFormat::Json: return doc.dump(2) + "\n";
        case ReportFormat::Csv: return to_csv(doc);
        case ReportFormat::Text: return to_text(doc);
    }
    return {};
}

}  // namespace pumsim
