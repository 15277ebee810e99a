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


#include <cstdint>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "pumsim/config.hpp"
#include "pumsim/energy.hpp"
#include "pumsim/error.hpp"
#include "pumsim/memctrl.hpp"
#include "pumsim/report.hpp"
#include "pumsim/runner.hpp"
#include "pumsim/trace.hpp"
#include "pumsim/workloads.hpp"

namespace {

using namespace pumsim;

int report_error(std::string_view kind, const std::string& message, std::optional<std::size_t> line = {}) {
    nlohmann::ordered_json e;
    e["error"]["kind"] = kind;
    e["error"]["message"] = message;
    if (line) e["error"]["line"] = *line;
    std::cerr << e.dump() << '\n';
    return 1;
}

struct ConfigArgs {
    std::string path;
    std::vector<std::string> overrides;

    void attach(CLI::App* app, bool required) {
        auto* opt = app->add_option("--config", path, "device config file (key=value lines)");
        if (required) opt->required();
        app->add_option("--set", overrides, "override one config key (key=value)");
    }
    DeviceConfig load(DeviceConfig base = desk_config()) const {
        DeviceConfig cfg = path.empty() ? base : load_config(path, base);
        for (const auto& o : overrides) apply_override(cfg, o);
        cfg.validate();
        return cfg;
    }
};

std::ofstream open_out(const std::string& path) {
    std::ofstream os(path);
    if (!os) fail(ErrorKind::InvalidConfig, "cannot write '" + path + "'");
    return os;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"pumsim: DRAM bulk copy and bitwise operation simulator"};
    app.require_subcommand(1);

    // run
    auto* run_cmd = app.add_subcommand("run", "replay a trace and print a report");
    ConfigArgs run_cfg;
    std::string trace_path;
    std::string mechanism = "baseline";
    std::string format = "json";
    std::string cmdlog_path;
    std::string dump_path;
    bool mc_dma = false;
    bool no_in_cache_copy = false;
    run_cmd->add_option("--trace", trace_path, "trace file")->required();
    run_cfg.attach(run_cmd, true);
    run_cmd->add_option("--mechanism", mechanism, "baseline|rowclone|rowclone-zi|idao");
    run_cmd->add_option("--report", format, "json|csv|text");
    run_cmd->add_option("--cmdlog", cmdlog_path, "write the DRAM command log as CSV");
    run_cmd->add_option("--dump-state", dump_path, "write every materialised row as hex");
    run_cmd->add_flag("--mc-dma", mc_dma, "copy traffic bypasses the LLC");
    run_cmd->add_flag("--no-in-cache-copy", no_in_cache_copy, "write back dirty copy sources instead");

    // gen
    auto* gen_cmd = app.add_subcommand("gen", "emit a synthetic trace");
    gen_cmd->require_subcommand(1);
    auto* fork_cmd = gen_cmd->add_subcommand("forkbench", "fork, then copy-on-write N random pages");
    ConfigArgs fork_cfg;
    std::uint64_t fork_s = 0;
    std::uint64_t fork_n = 0;
    std::uint64_t fork_seed = 1;
    fork_cmd->add_option("--s", fork_s, "array size in bytes")->required();
    fork_cmd->add_option("--n", fork_n, "pages updated by the child")->required();
    fork_cmd->add_option("--seed", fork_seed, "generator seed");
    fork_cfg.attach(fork_cmd, false);

    auto* bitmap_gen_cmd = gen_cmd->add_subcommand("bitmap", "bitmap range queries as MEMOR reductions");
    ConfigArgs bitmap_gen_cfg;
    std::uint32_t bins = 2;
    std::uint32_t queries = 1;
    std::uint32_t rows_per_bitmap = 1;
    std::uint64_t bitmap_gen_seed = 1;
    bitmap_gen_cmd->add_option("--bins", bins, "bins per query")->required();
    bitmap_gen_cmd->add_option("--queries", queries, "number of queries")->required();
    bitmap_gen_cmd->add_option("--rows-per-bitmap", rows_per_bitmap, "rows per bitmap");
    bitmap_gen_cmd->add_option("--seed", bitmap_gen_seed, "accepted for symmetry; the trace is fixed");
    bitmap_gen_cfg.attach(bitmap_gen_cmd, false);

    // calibrate
    auto* cal_cmd = app.add_subcommand("calibrate", "fit model parameters");
    cal_cmd->require_subcommand(1);
    auto* cal_energy = cal_cmd->add_subcommand("energy", "fit per-command energies to the energy table");
    ConfigArgs cal_cfg;
    std::string cal_format = "text";
    cal_cfg.attach(cal_energy, false);
    cal_energy->add_option("--report", cal_format, "json|csv|text");

    // table3
    auto* t3_cmd = app.add_subcommand("table3", "reproduce the latency and energy comparison table");
    ConfigArgs t3_cfg;
    std::string t3_format = "text";
    t3_cfg.attach(t3_cmd, false);
    t3_cmd->add_option("--report", t3_format, "json|csv|text");

    // bitmap
    auto* bm_cmd = app.add_subcommand("bitmap", "run the default bitmap query set");
    ConfigArgs bm_cfg;
    std::string bm_mechanism = "idao";
    std::string bm_format = "text";
    std::uint32_t bm_rows = 1;
    std::uint64_t bm_seed = 1;
    bm_cfg.attach(bm_cmd, false);
    bm_cmd->add_option("--mechanism", bm_mechanism, "baseline|rowclone|rowclone-zi|idao");
    bm_cmd->add_option("--rows-per-bitmap", bm_rows, "rows per bitmap");
    bm_cmd->add_option("--seed", bm_seed, "bitmap contents seed");
    bm_cmd->add_option("--report", bm_format, "json|csv|text");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        report_error("UsageError", e.what());
        return 2;
    }

    try {
        if (*run_cmd) {
            const DeviceConfig cfg = run_cfg.load();
            const ReportFormat fmt = parse_report_format(format);
            RunOptions opts;
            opts.mode = parse_controller_mode(mechanism);
            opts.mc_dma = mc_dma;
            opts.in_cache_copy = !no_in_cache_copy;
            opts.keep_log = !cmdlog_path.empty();
            const Trace trace = load_trace(trace_path);
            RunResult result = run(trace, cfg, opts);
            if (!cmdlog_path.empty()) {
                auto os = open_out(cmdlog_path);
                result.controller->engine().write_cmdlog(os);
            }
            if (!dump_path.empty()) {
                auto os = open_out(dump_path);
                result.controller->engine().dram().dump(os);
            }
            std::cout << render(run_report(result.stats, cfg), fmt);
        } else if (*fork_cmd) {
            const DeviceConfig cfg = fork_cfg.load();
            std::cout << format_trace(gen_forkbench(cfg, fork_s, fork_n, fork_seed).trace);
        } else if (*bitmap_gen_cmd) {
            const DeviceConfig cfg = bitmap_gen_cfg.load();
            std::cout << format_trace(gen_bitmap(cfg, bins, queries, rows_per_bitmap));
        } else if (*cal_energy) {
            const DeviceConfig cfg = cal_cfg.load();
            const auto cal = calibrate_per_command(cfg.energy.table);
            std::cout << render(calibration_report(cal), parse_report_format(cal_format));
        } else if (*t3_cmd) {
            const DeviceConfig cfg = t3_cfg.load();
            std::cout << render(table3_report(table3(cfg)), parse_report_format(t3_format));
        } else if (*bm_cmd) {
            const DeviceConfig cfg = bm_cfg.load();
            const auto results = run_bitmap_queries(cfg, default_bitmap_queries(), bm_rows,
                                                    parse_controller_mode(bm_mechanism), bm_seed);
            std::cout << render(bitmap_report(results), parse_report_format(bm_format));
        }
    } catch (const LineError& e) {
        return report_error(to_string(e.kind()), e.what(), e.line());
    } catch (const SimError& e) {
        return report_error(to_string(e.kind()), e.what());
    } catch (const std::exception& e) {
        return report_error("InternalError", e.what());
    }
    return 0;
}
