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


#include "pumsim/trace.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

#include "pumsim/error.hpp"

namespace pumsim {

namespace {

[[noreturn]] void parse_fail(std::size_t line, const std::string& msg) {
    throw LineError(ErrorKind::ParseError, line, msg);
}

std::uint64_t parse_u64(std::string_view tok, std::size_t line) {
    int base = 10;
    if (tok.size() > 2 && tok[0] == '0' && (tok[1] == 'x' || tok[1] == 'X')) {
        tok.remove_prefix(2);
        base = 16;
    }
    std::uint64_t v = 0;
    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v, base);
    if (ec != std::errc{} || ptr != tok.data() + tok.size() || tok.empty()) {
        parse_fail(line, "bad number '" + std::string(tok) + "'");
    }
    return v;
}

std::string hex(std::uint64_t v) {
    char buf[24] = "0x";
    auto res = std::to_chars(buf + 2, buf + sizeof buf, v, 16);
    return std::string(buf, res.ptr);
}

}  // namespace

TraceOp make_isa(const IsaOp& op) {
    TraceOp t;
    switch (op.kind) {
        case IsaKind::MemCopy: t.kind = TraceKind::MemCopy; break;
        case IsaKind::MemInit: t.kind = TraceKind::MemInit; break;
        case IsaKind::MemAnd: t.kind = TraceKind::MemAnd; break;
        case IsaKind::MemOr: t.kind = TraceKind::MemOr; break;
    }
    t.isa = op;
    return t;
}

TraceOp make_read(Addr addr) {
    TraceOp t;
    t.kind = TraceKind::Read;
    t.addr = addr;
    return t;
}

TraceOp make_write(Addr addr, std::uint64_t value) {
    TraceOp t;
    t.kind = TraceKind::Write;
    t.addr = addr;
    t.value = value;
    return t;
}

Trace parse_trace(std::string_view text) {
    Trace out;
    std::size_t line_no = 0;
    while (!text.empty()) {
        ++line_no;
        const auto nl = text.find('\n');
        std::string_view line = text.substr(0, nl);
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);

        std::vector<std::string_view> toks;
        std::size_t i = 0;
        while (i < line.size()) {
            while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
            std::size_t j = i;
            while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
            if (j > i) toks.push_back(line.substr(i, j - i));
            i = j;
        }
        if (toks.empty()) continue;

        std::string kw(toks[0]);
        std::transform(kw.begin(), kw.end(), kw.begin(), [](unsigned char c) { return std::toupper(c); });
        auto need = [&](std::size_t n) {
            if (toks.size() != n + 1) {
                parse_fail(line_no, kw + " takes " + std::to_string(n) + " operands, got " + std::to_string(toks.size() - 1));
            }
        };
        auto num = [&](std::size_t k) { return parse_u64(toks[k], line_no); };

        TraceOp op;
        if (kw == "MEMCOPY") {
            need(3);
            op = make_isa({IsaKind::MemCopy, num(1), 0, num(2), num(3), 0});
        } else if (kw == "MEMINIT") {
            need(3);
            const std::uint64_t val = num(3);
            if (val > 0xff) parse_fail(line_no, "MEMINIT value must fit in one byte");
            op = make_isa({IsaKind::MemInit, 0, 0, num(1), num(2), static_cast<std::uint8_t>(val)});
        } else if (kw == "MEMAND" || kw == "MEMOR") {
            need(4);
            op = make_isa({kw == "MEMAND" ? IsaKind::MemAnd : IsaKind::MemOr, num(1), num(2), num(3), num(4), 0});
        } else if (kw == "READ") {
            need(1);
            op = make_read(num(1));
        } else if (kw == "WRITE") {
            need(2);
            op = make_write(num(1), num(2));
        } else {
            parse_fail(line_no, "unsupported operation '" + std::string(toks[0]) + "'");
        }
        op.line = line_no;
        out.push_back(op);
    }
    return out;
}

Trace load_trace(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorKind::ParseError, "cannot open trace " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_trace(ss.str());
}

std::string format_op(const TraceOp& op) {
    const IsaOp& i = op.isa;
    switch (op.kind) {
        case TraceKind::MemCopy: return "MEMCOPY " + hex(i.src1) + ' ' + hex(i.dst) + ' ' + std::to_string(i.size);
        case TraceKind::MemInit: return "MEMINIT " + hex(i.dst) + ' ' + std::to_string(i.size) + ' ' + hex(i.val);
        case TraceKind::MemAnd:
        case TraceKind::MemOr:
            return std::string(op.kind == TraceKind::MemAnd ? "MEMAND " : "MEMOR ") + hex(i.src1) + ' ' + hex(i.src2) +
                   ' ' + hex(i.dst) + ' ' + std::to_string(i.size);
        case TraceKind::Read: return "READ " + hex(op.addr);
        case TraceKind::Write: return "WRITE " + hex(op.addr) + ' ' + hex(op.value);
    }
    return {};
}

std::string format_trace(const Trace& trace) {
    std::string out;
    for (const auto& op : trace) {
        out += format_op(op);
        out += '\n';
    }
    return out;
}

}  // namespace pumsim
