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

#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "pumsim/config.hpp"
#include "pumsim/runner.hpp"
#include "pumsim/workloads.hpp"

namespace pumsim {

enum class ReportFormat { Json, Csv, Text };

ReportFormat parse_report_format(std::string_view name);

inline constexpr std::string_view kRunReportSchema = "pumsim.run/1";

/// Run report. Keys are emitted in a fixed order so equal stats give
/// byte-identical documents.
nlohmann::ordered_json run_report(const RunStats& stats, const DeviceConfig& cfg);
nlohmann::ordered_json table3_report(const Table3Result& t3);
nlohmann::ordered_json calibration_report(const CalibrationResult& cal);
nlohmann::ordered_json bitmap_report(const std::vector<BitmapQueryResult>& results);

/// The stored comparison table with both the printed reductions and the
/// quotients of the absolute energies.
nlohmann::ordered_json reference_table_json(const EnergyTable& table);

/// CSV columns: section,name,value. Nested keys join with '.', array
/// elements with their index.
std::string to_csv(const nlohmann::ordered_json& doc);
/// Indented `key: value` lines.
std::string to_text(const nlohmann::ordered_json& doc);
std::string render(const nlohmann::ordered_json& doc, ReportFormat format);

}  // namespace pumsim
