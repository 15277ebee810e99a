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

#include "pumsim/config.hpp"

#include <bit>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "pumsim/error.hpp"

namespace pumsim {

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

[[noreturn]] void bad_value(std::string_view key, std::string_view value, std::string_view why) {
    fail(ErrorKind::InvalidConfig,
         "bad value '" + std::string(value) + "' for " + std::string(key) + ": " + std::string(why));
}

std::uint64_t parse_uint(std::string_view key, std::string_view v) {
    std::uint64_t out = 0;
    int base = 10;
    if (v.starts_with("0x") || v.starts_with("0X")) {
        v.remove_prefix(2);
        base = 16;
    }
    auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out, base);
    if (ec != std::errc{} || ptr != v.data() + v.size() || v.empty()) bad_value(key, v, "expected an unsigned integer");
    return out;
}

std::uint32_t parse_u32(std::string_view key, std::string_view v) {
    const auto x = parse_uint(key, v);
    if (x > 0xffffffffull) bad_value(key, v, "out of range");
    return static_cast<std::uint32_t>(x);
}

double parse_number(std::string_view key, std::string_view v) {
    if (v == "inf" || v == "infinity") return std::numeric_limits<double>::infinity();
    // "465/64" style fractions keep calibrated constants exact in config files.
    if (const auto slash = v.find('/'); slash != std::string_view::npos) {
        const double num = parse_number(key, trim(v.substr(0, slash)));
        const double den = parse_number(key, trim(v.substr(slash + 1)));
        if (den == 0.0) bad_value(key, v, "division by zero");
        return num / den;
    }
    double out = 0.0;
    auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc{} || ptr != v.data() + v.size() || v.empty()) bad_value(key, v, "expected a number");
    return out;
}

bool parse_bool(std::string_view key, std::string_view v) {
    if (v == "1" || v == "true" || v == "on" || v == "yes") return true;
    if (v == "0" || v == "false" || v == "off" || v == "no") return false;
    bad_value(key, v, "expected a boolean");
}

std::string fmt_double(double v) {
    if (std::isinf(v)) return "inf";
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

void require(bool ok, const std::string& what) {
    if (!ok) fail(ErrorKind::InvalidConfig, what);
}

}  // namespace

std::string_view to_string(Interleave v) { return v == Interleave::Row ? "row" : "cacheline"; }
std::string_view to_string(FpmLatencyMode v) {
    return v == FpmLatencyMode::Conservative ? "conservative" : "aggressive";
}
std::string_view to_string(IdaoConservativeSource v) {
    return v == IdaoConservativeSource::Text ? "text" : "table";
}
std::string_view to_string(EnergyMode v) {
    return v == EnergyMode::TableDriven ? "table_driven" : "per_command";
}

void DeviceConfig::validate() const {
    auto pow2 = [](std::uint64_t x) { return x >= 1 && std::has_single_bit(x); };
    require(pow2(channels), "channels must be a power of two >= 1");
    require(pow2(ranks_per_channel), "ranks_per_channel must be a power of two >= 1");
    require(chips_per_rank >= 1, "chips_per_rank must be >= 1");
    require(pow2(banks_per_chip), "banks_per_chip must be a power of two >= 1");
    require(pow2(subarrays_per_bank), "subarrays_per_bank must be a power of two >= 1");
    require(pow2(rows_per_subarray), "rows_per_subarray must be a power of two >= 1");
    require(rows_per_subarray >= 8, "rows_per_subarray must be >= 8 (reserved rows)");
    require(pow2(cacheline_bytes), "cacheline_bytes must be a power of two >= 1");
    require(pow2(row_size_bytes), "row_size_bytes must be a power of two >= 1");
    require(row_size_bytes % cacheline_bytes == 0, "row_size_bytes must be a multiple of cacheline_bytes");
    require(cacheline_bytes >= 8, "cacheline_bytes must hold a 64-bit word");

    for (double t : {timing.tRAS, timing.tRCD, timing.tRP, timing.tWR, timing.tLINE, timing.tOH,
                     timing.tTRANSFER}) {
        require(std::isfinite(t) && t >= 0.0, "timing parameters must be finite and >= 0");
    }
    require(timing.tOH >= timing.tRP, "tOH must cover tRP");
    require(std::isfinite(cell_capacitance) && cell_capacitance > 0, "cell_capacitance must be > 0");
    require(std::isfinite(bitline_capacitance) && bitline_capacitance > 0,
            "bitline_capacitance must be > 0");
    require(std::isfinite(vdd) && vdd > 0, "vdd must be > 0");
    require(retention_window > 0 && !std::isnan(retention_window), "retention_window must be > 0");

    if (energy.per_command) {
        const auto& e = *energy.per_command;
        for (double x : {e.E_ACT, e.E_PRE, e.E_COL_IO, e.E_TRANSFER, e.E_MULTI_ACT}) {
            require(std::isfinite(x) && x >= 0, "per-command energies must be finite and >= 0");
        }
    }
    for (const auto& [key, entry] : energy.table.entries()) {
        require(entry.absolute_uj >= 0, "energy table values must be >= 0");
    }

    require(llc_ways >= 1, "llc_ways must be >= 1");
    require(llc_bytes % (std::uint64_t{cacheline_bytes} * llc_ways) == 0 && llc_bytes > 0,
            "llc_bytes must be a positive multiple of cacheline_bytes * llc_ways");

    std::set<std::uint32_t> faulty, spare;
    for (const auto& r : row_remaps) {
        require(r.faulty < rows_per_bank() && r.spare < rows_per_bank(), "row_remap index out of range");
        require(r.faulty != r.spare, "row_remap maps a row to itself");
        require(faulty.insert(r.faulty).second, "row_remap lists a faulty row twice");
        require(spare.insert(r.spare).second, "row_remap reuses a spare row");
    }
    for (auto s : spare) require(!faulty.contains(s), "a spare row cannot itself be remapped");
}

std::uint32_t DeviceConfig::physical_row(std::uint32_t bank_row) const {
    for (const auto& r : row_remaps) {
        if (r.faulty == bank_row) return r.spare;
    }
    return bank_row;
}

bool DeviceConfig::is_spare_row(std::uint32_t bank_row) const {
    for (const auto& r : row_remaps) {
        if (r.spare == bank_row) return true;
    }
    return false;
}

DeviceConfig tiny_config() {
    DeviceConfig c;
    c.banks_per_chip = 4;
    c.subarrays_per_bank = 4;
    c.rows_per_subarray = 16;
    c.row_size_bytes = 256;
    c.llc_bytes = 4096;
    c.llc_ways = 4;
    return c;
}

DeviceConfig desk_config() {
    DeviceConfig c;
    c.banks_per_chip = 8;
    c.subarrays_per_bank = 16;
    c.rows_per_subarray = 512;
    c.row_size_bytes = 4096;
    return c;
}

void apply_setting(DeviceConfig& c, std::string_view key, std::string_view value) {
    value = trim(value);
    key = trim(key);
    if (key.starts_with("timing.")) key.remove_prefix(7);
    if (key.starts_with("energy.")) {
        key.remove_prefix(7);
        if (key == "mode") key = "energy_mode";
    }

    auto per_cmd = [&]() -> PerCommandEnergy& {
        if (!c.energy.per_command) c.energy.per_command = PerCommandEnergy{};
        return *c.energy.per_command;
    };

    if (key == "channels") c.channels = parse_u32(key, value);
    else if (key == "ranks_per_channel") c.ranks_per_channel = parse_u32(key, value);
    else if (key == "chips_per_rank") c.chips_per_rank = parse_u32(key, value);
    else if (key == "banks_per_chip") c.banks_per_chip = parse_u32(key, value);
    else if (key == "subarrays_per_bank") c.subarrays_per_bank = parse_u32(key, value);
    else if (key == "rows_per_subarray") c.rows_per_subarray = parse_u32(key, value);
    else if (key == "row_size_bytes") c.row_size_bytes = parse_u32(key, value);
    else if (key == "cacheline_bytes") c.cacheline_bytes = parse_u32(key, value);
    else if (key == "tRAS") c.timing.tRAS = parse_number(key, value);
    else if (key == "tRCD") c.timing.tRCD = parse_number(key, value);
    else if (key == "tRP") c.timing.tRP = parse_number(key, value);
    else if (key == "tWR") c.timing.tWR = parse_number(key, value);
    else if (key == "tLINE") c.timing.tLINE = parse_number(key, value);
    else if (key == "tOH") c.timing.tOH = parse_number(key, value);
    else if (key == "tTRANSFER") c.timing.tTRANSFER = parse_number(key, value);
    else if (key == "energy_mode") {
        if (value == "table_driven" || value == "table") c.energy.mode = EnergyMode::TableDriven;
        else if (value == "per_command") c.energy.mode = EnergyMode::PerCommand;
        else bad_value(key, value, "expected table_driven|per_command");
    } else if (key == "E_ACT") per_cmd().E_ACT = parse_number(key, value);
    else if (key == "E_PRE") per_cmd().E_PRE = parse_number(key, value);
    else if (key == "E_COL_IO") per_cmd().E_COL_IO = parse_number(key, value);
    else if (key == "E_TRANSFER") per_cmd().E_TRANSFER = parse_number(key, value);
    else if (key == "E_MULTI_ACT") per_cmd().E_MULTI_ACT = parse_number(key, value);
    else if (key == "interleave") {
        if (value == "row") c.interleave = Interleave::Row;
        else if (value == "cacheline") c.interleave = Interleave::Cacheline;
        else bad_value(key, value, "expected row|cacheline");
    } else if (key == "fpm_latency_mode") {
        if (value == "conservative") c.fpm_latency_mode = FpmLatencyMode::Conservative;
        else if (value == "aggressive") c.fpm_latency_mode = FpmLatencyMode::Aggressive;
        else bad_value(key, value, "expected conservative|aggressive");
    } else if (key == "idao_conservative_source") {
        if (value == "text") c.idao_conservative_source = IdaoConservativeSource::Text;
        else if (value == "table") c.idao_conservative_source = IdaoConservativeSource::Table;
        else bad_value(key, value, "expected text|table");
    } else if (key == "cell_capacitance" || key == "Cc") c.cell_capacitance = parse_number(key, value);
    else if (key == "bitline_capacitance" || key == "Cb") c.bitline_capacitance = parse_number(key, value);
    else if (key == "vdd") c.vdd = parse_number(key, value);
    else if (key == "retention_window") c.retention_window = parse_number(key, value);
    else if (key == "decay_enabled") c.decay_enabled = parse_bool(key, value);
    else if (key == "llc_bytes") c.llc_bytes = parse_uint(key, value);
    else if (key == "llc_ways") c.llc_ways = parse_u32(key, value);
    else if (key == "row_remap") {
        // "faulty:spare[,faulty:spare...]"; empty clears the list.
        c.row_remaps.clear();
        std::string_view rest = value;
        while (!rest.empty()) {
            const auto comma = rest.find(',');
            const auto item = trim(rest.substr(0, comma));
            rest = comma == std::string_view::npos ? std::string_view{} : rest.substr(comma + 1);
            if (item.empty()) continue;
            const auto colon = item.find(':');
            if (colon == std::string_view::npos) bad_value(key, item, "expected faulty:spare");
            c.row_remaps.push_back(
                {parse_u32(key, trim(item.substr(0, colon))), parse_u32(key, trim(item.substr(colon + 1)))});
        }
    } else {
        fail(ErrorKind::InvalidConfig, "unknown config key '" + std::string(key) + "'");
    }
}

void apply_override(DeviceConfig& cfg, std::string_view assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string_view::npos) {
        fail(ErrorKind::InvalidConfig, "expected key=value, got '" + std::string(assignment) + "'");
    }
    apply_setting(cfg, assignment.substr(0, eq), assignment.substr(eq + 1));
}

DeviceConfig parse_config_text(std::string_view text, DeviceConfig base) {
    std::size_t line_no = 0;
    while (!text.empty()) {
        ++line_no;
        const auto nl = text.find('\n');
        auto line = text.substr(0, nl);
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        try {
            apply_override(base, line);
        } catch (const SimError& e) {
            throw LineError(e.kind(), line_no, e.what());
        }
    }
    base.validate();
    return base;
}

DeviceConfig load_config(const std::filesystem::path& path, DeviceConfig base) {
    std::ifstream in(path);
    if (!in) fail(ErrorKind::InvalidConfig, "cannot open config file " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str(), std::move(base));
}

std::string format_config(const DeviceConfig& c) {
    std::ostringstream os;
    os << "channels=" << c.channels << '\n'
       << "ranks_per_channel=" << c.ranks_per_channel << '\n'
       << "chips_per_rank=" << c.chips_per_rank << '\n'
       << "banks_per_chip=" << c.banks_per_chip << '\n'
       << "subarrays_per_bank=" << c.subarrays_per_bank << '\n'
       << "rows_per_subarray=" << c.rows_per_subarray << '\n'
       << "row_size_bytes=" << c.row_size_bytes << '\n'
       << "cacheline_bytes=" << c.cacheline_bytes << '\n'
       << "tRAS=" << fmt_double(c.timing.tRAS) << '\n'
       << "tRCD=" << fmt_double(c.timing.tRCD) << '\n'
       << "tRP=" << fmt_double(c.timing.tRP) << '\n'
       << "tWR=" << fmt_double(c.timing.tWR) << '\n'
       << "tLINE=" << fmt_double(c.timing.tLINE) << '\n'
       << "tOH=" << fmt_double(c.timing.tOH) << '\n'
       << "tTRANSFER=" << fmt_double(c.timing.tTRANSFER) << '\n'
       << "energy_mode=" << to_string(c.energy.mode) << '\n';
    if (c.energy.per_command) {
        const auto& e = *c.energy.per_command;
        os << "E_ACT=" << fmt_double(e.E_ACT) << '\n'
           << "E_PRE=" << fmt_double(e.E_PRE) << '\n'
           << "E_COL_IO=" << fmt_double(e.E_COL_IO) << '\n'
           << "E_TRANSFER=" << fmt_double(e.E_TRANSFER) << '\n'
           << "E_MULTI_ACT=" << fmt_double(e.E_MULTI_ACT) << '\n';
    }
    os << "interleave=" << to_string(c.interleave) << '\n'
       << "fpm_latency_mode=" << to_string(c.fpm_latency_mode) << '\n'
       << "idao_conservative_source=" << to_string(c.idao_conservative_source) << '\n'
       << "cell_capacitance=" << fmt_double(c.cell_capacitance) << '\n'
       << "bitline_capacitance=" << fmt_double(c.bitline_capacitance) << '\n'
       << "vdd=" << fmt_double(c.vdd) << '\n'
       << "retention_window=" << fmt_double(c.retention_window) << '\n'
       << "decay_enabled=" << (c.decay_enabled ? "true" : "false") << '\n'
       << "llc_bytes=" << c.llc_bytes << '\n'
       << "llc_ways=" << c.llc_ways << '\n';
    if (!c.row_remaps.empty()) {
        os << "row_remap=";
        for (std::size_t i = 0; i < c.row_remaps.size(); ++i) {
            os << (i ? "," : "") << c.row_remaps[i].faulty << ':' << c.row_remaps[i].spare;
        }
        os << '\n';
    }
    return os.str();
}

}  // namespace pumsim
