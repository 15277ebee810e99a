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

#include <string>

#include "doctest.h"
#include "oracles.hpp"
#include "pumsim/report.hpp"
#include "schema_check.hpp"

using namespace pumsim;
using pumsim::testing::error_of;
using pumsim::testing::load_json;
using pumsim::testing::validate_schema;

namespace {

const nlohmann::json& schema() {
    static const nlohmann::json s = load_json(PUMSIM_SOURCE_DIR "/schema/report.schema.json");
    return s;
}

Trace mixed_trace(const DeviceConfig& c) {
    const Addr a = address_of({{0, 0, 0}, 0}, 0, c);
    const Addr b = address_of({{0, 0, 0}, 1}, 0, c);
    const Addr d = address_of({{0, 0, 0}, 2}, 0, c);
    const Addr e = address_of({{0, 0, 1}, 3}, 0, c);
    return parse_trace("WRITE " + std::to_string(a) + " 5\n" +
                       "MEMCOPY " + std::to_string(a) + " " + std::to_string(b) + " 4096\n" +
                       "MEMCOPY " + std::to_string(a) + " " + std::to_string(e) + " 4160\n" +
                       "MEMINIT " + std::to_string(d) + " 4096 0\n" +
                       "MEMOR " + std::to_string(a) + " " + std::to_string(b) + " " + std::to_string(d) + " 4096\n" +
                       "MEMAND " + std::to_string(a) + " " + std::to_string(b) + " " + std::to_string(d) + " 100\n" +
                       "READ " + std::to_string(d) + "\n");
}

}  // namespace

TEST_CASE("report formats by name") {
    CHECK(parse_report_format("json") == ReportFormat::Json);
    CHECK(parse_report_format("csv") == ReportFormat::Csv);
    CHECK(parse_report_format("text") == ReportFormat::Text);
    CHECK(error_of([] { parse_report_format("xml"); }) == ErrorKind::InvalidConfig);
}

TEST_CASE("run reports validate against the shipped schema") {
    for (EnergyMode em : {EnergyMode::TableDriven, EnergyMode::PerCommand}) {
        DeviceConfig c = desk_config();
        c.energy.mode = em;
        const Trace t = mixed_trace(c);
        for (ControllerMode m :
             {ControllerMode::Baseline, ControllerMode::RowClone, ControllerMode::RowCloneZi, ControllerMode::Idao}) {
            const auto doc = run_report(run(t, c, {m}).stats, c);
            const auto errors = validate_schema(schema(), nlohmann::json::parse(doc.dump()));
            INFO(to_string(m));
            CHECK(errors.empty());
            if (!errors.empty()) MESSAGE(errors.front());
            CHECK(doc["schema"] == kRunReportSchema);
        }
    }
}

TEST_CASE("the schema checker rejects stray and missing keys") {
    const DeviceConfig c = desk_config();
    nlohmann::json doc = nlohmann::json::parse(run_report(run(mixed_trace(c), c, {}).stats, c).dump());
    doc["extra"] = 1;
    CHECK_FALSE(validate_schema(schema(), doc).empty());
    doc.erase("extra");
    doc.erase("summary");
    CHECK_FALSE(validate_schema(schema(), doc).empty());
}

TEST_CASE("reports are byte identical across runs") {
    const DeviceConfig c = desk_config();
    const Trace t = mixed_trace(c);
    for (ReportFormat f : {ReportFormat::Json, ReportFormat::Csv, ReportFormat::Text}) {
        const std::string a = render(run_report(run(t, c, {ControllerMode::Idao}).stats, c), f);
        const std::string b = render(run_report(run(t, c, {ControllerMode::Idao}).stats, c), f);
        CHECK(a == b);
    }
}

TEST_CASE("csv and text rendering") {
    nlohmann::ordered_json doc;
    doc["schema"] = "x";
    doc["summary"]["ops"] = 3;
    doc["list"] = nlohmann::ordered_json::array({1, 2});
    const std::string csv = to_csv(doc);
    CHECK(csv.rfind("section,name,value\n", 0) == 0);
    CHECK(csv.find("summary,ops,3") != std::string::npos);
    CHECK(csv.find("list,1,2") != std::string::npos);
    const std::string text = to_text(doc);
    CHECK(text.find("schema: x") != std::string::npos);
    CHECK(text.find("  ops: 3") != std::string::npos);
    CHECK(render(doc, ReportFormat::Json).back() == '\n');
}

TEST_CASE("reference table") {
    const auto t = reference_table_json(EnergyTable::reference());
    REQUIRE(t.size() == 9);
    const auto& fpm = t[1];
    CHECK(fpm["op"] == "copy");
    CHECK(fpm["mechanism"] == "fpm");
    CHECK(fpm["latency_ns"] == 85.0);
    CHECK(fpm["energy_uj"] == 0.04);
    CHECK(fpm["printed_energy_reduction"] == 74.4);
    CHECK(fpm["absolute_energy_quotient"].get<double>() == doctest::Approx(90.0));
}

TEST_CASE("table3 report carries the measured rows") {
    const Table3Result t3 = table3(desk_config());
    const auto doc = table3_report(t3);
    REQUIRE(doc["rows"].size() == t3.rows.size());
    for (std::size_t i = 0; i < t3.rows.size(); ++i) {
        CHECK(doc["rows"][i]["latency_ns"].get<double>() == t3.rows[i].latency_ns);
    }
    CHECK(doc["timing_violations"] == 0);
}
