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
#include "pumsim/trace.hpp"

using namespace pumsim;
using pumsim::testing::error_of;
using pumsim::testing::Gen;

namespace {

std::size_t error_line(std::string_view text) {
    try {
        parse_trace(text);
    } catch (const LineError& e) {
        CHECK(e.kind() == ErrorKind::ParseError);
        return e.line();
    }
    return 0;
}

bool same(const TraceOp& a, const TraceOp& b) {
    return a.kind == b.kind && a.addr == b.addr && a.value == b.value && a.isa.kind == b.isa.kind &&
           a.isa.src1 == b.isa.src1 && a.isa.src2 == b.isa.src2 && a.isa.dst == b.isa.dst &&
           a.isa.size == b.isa.size && a.isa.val == b.isa.val;
}

}  // namespace

TEST_CASE("parses every operation") {
    const Trace t = parse_trace(
        "# header\n"
        "MEMCOPY 0x1000 0x2000 4096\n"
        "\n"
        "meminit 0x3000 64 0xab   # inline comment\n"
        "MEMAND 0 4096 8192 4096\n"
        "MEMOR 0x0 0x1000 0x2000 128\n"
        "READ 0x40\n"
        "WRITE 0x48 0xdeadbeef\n");
    REQUIRE(t.size() == 6);
    CHECK(t[0].kind == TraceKind::MemCopy);
    CHECK(t[0].isa.src1 == 0x1000);
    CHECK(t[0].isa.dst == 0x2000);
    CHECK(t[0].isa.size == 4096);
    CHECK(t[0].line == 2);
    CHECK(t[1].isa.kind == IsaKind::MemInit);
    CHECK(t[1].isa.val == 0xab);
    CHECK(t[1].line == 4);
    CHECK(t[2].isa.src2 == 4096);
    CHECK(t[3].kind == TraceKind::MemOr);
    CHECK(t[4].kind == TraceKind::Read);
    CHECK(t[4].addr == 0x40);
    CHECK(t[5].value == 0xdeadbeef);
    CHECK(t[0].is_isa());
    CHECK_FALSE(t[5].is_isa());
}

TEST_CASE("malformed lines report their line number") {
    CHECK(error_line("READ 0\n\nMEMXOR 0 0 0 64\n") == 3);
    CHECK(error_line("MEMCOPY 0 64\n") == 1);
    CHECK(error_line("READ 0\nREAD 0xzz\n") == 2);
    CHECK(error_line("MEMINIT 0 64 256\n") == 1);
    CHECK(error_line("WRITE 0 1 2\n") == 1);
    CHECK(error_line("READ 99999999999999999999999\n") == 1);
}

TEST_CASE("missing file") {
    CHECK(error_of([] { load_trace("/nonexistent/trace.txt"); }) == ErrorKind::ParseError);
}

TEST_CASE("canonical formatting") {
    CHECK(format_op(make_isa({IsaKind::MemCopy, 4096, 0, 8192, 64, 0})) == "MEMCOPY 0x1000 0x2000 64");
    CHECK(format_op(make_write(8, 255)) == "WRITE 0x8 0xff");
}

TEST_CASE("random traces survive a round trip") {
    Gen g(5);
    for (int n = 0; n < 200; ++n) {
        Trace t;
        for (int i = 0; i < 20; ++i) {
            const Addr a = g.rng();
            const Addr b = g.rng();
            const Addr d = g.rng();
            const std::uint64_t size = g.below(1u << 20);
            switch (g.below(6)) {
                case 0: t.push_back(make_isa({IsaKind::MemCopy, a, 0, d, size, 0})); break;
                case 1: t.push_back(make_isa({IsaKind::MemInit, 0, 0, d, size, static_cast<std::uint8_t>(g.below(256))})); break;
                case 2: t.push_back(make_isa({IsaKind::MemAnd, a, b, d, size, 0})); break;
                case 3: t.push_back(make_isa({IsaKind::MemOr, a, b, d, size, 0})); break;
                case 4: t.push_back(make_read(a)); break;
                default: t.push_back(make_write(a, g.rng())); break;
            }
        }
        const std::string text = format_trace(t);
        const Trace back = parse_trace(text);
        REQUIRE(back.size() == t.size());
        for (std::size_t i = 0; i < t.size(); ++i) REQUIRE(same(t[i], back[i]));
        REQUIRE(format_trace(back) == text);
    }
}
