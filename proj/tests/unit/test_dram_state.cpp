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


#include <sstream>

#include "doctest.h"
#include "oracles.hpp"
#include "pumsim/dram_state.hpp"

using namespace pumsim;
using pumsim::testing::bit_majority;
using pumsim::testing::error_of;
using pumsim::testing::Gen;

namespace {

const BankId kB0{0, 0, 0};
const BankId kB1{0, 0, 1};

Bytes filled(const DeviceConfig& c, std::uint8_t v) { return Bytes(c.row_size_bytes, v); }

}  // namespace

TEST_CASE("activate exposes the row") {
    const DeviceConfig c = tiny_config();
    DramState d(c);
    Gen g(1);
    const Bytes data = g.bytes(c.row_size_bytes);
    d.poke_row(kB0, 5, data);
    d.activate(kB0, 5);
    CHECK(d.row_buffer(kB0).valid);
    CHECK(d.row_buffer(kB0).source_row == 5);
    CHECK(d.row_buffer(kB0).data == data);
    const SenseAmpState s = d.sense_amp(kB0);
    CHECK(s.activated);
    CHECK(s.connected_rows == std::vector<std::uint32_t>{5});
}

TEST_CASE("second activation in a subarray copies the row buffer") {
    const DeviceConfig c = tiny_config();
    DramState d(c);
    Gen g(2);
    const Bytes src = g.bytes(c.row_size_bytes);
    d.poke_row(kB0, 5, src);
    d.poke_row(kB0, 9, g.bytes(c.row_size_bytes));
    d.activate(kB0, 5);
    d.activate(kB0, 9);
    d.precharge(kB0);
    CHECK(d.peek_row(kB0, 9) == src);
    CHECK(d.peek_row(kB0, 5) == src);
}

TEST_CASE("activation of another subarray is dropped") {
    const DeviceConfig c = tiny_config();
    DramState d(c);
    d.activate(kB0, 5);
    CHECK(error_of([&] { d.activate(kB0, c.rows_per_subarray + 1); }) == ErrorKind::CommandDropped);
    CHECK(error_of([&] { d.activate(kB1, c.rows_per_bank()); }) == ErrorKind::AddressRange);
}

TEST_CASE("precharge is idempotent and closes the row") {
    const DeviceConfig c = tiny_config();
    DramState d(c);
    d.activate(kB0, 1);
    d.precharge(kB0);
    CHECK_FALSE(d.row_buffer(kB0).valid);
    CHECK_FALSE(d.sense_amp(kB0).activated);
    CHECK(d.sense_amp(kB0).connected_rows.empty());
    d.precharge(kB0);
    CHECK_FALSE(d.sense_amp(kB0).activated);
    CHECK(d.sense_mode(kB0, 0) == SenseMode::Precharged);
    CHECK(error_of([&] { (void)d.column_access(kB0, 0, ColumnOp::Read); }) == ErrorKind::NoOpenRow);
}

TEST_CASE("column reads and writes") {
    const DeviceConfig c = tiny_config();
    DramState d(c);
    d.activate(kB0, 2);
    CHECK(d.column_access(kB0, 1, ColumnOp::Read) == Bytes(c.cacheline_bytes, 0));
    Gen g(3);
    const Bytes line = g.bytes(c.cacheline_bytes);
    d.column_access(kB0, 3, ColumnOp::Write, line);
    CHECK(d.column_access(kB0, 3, ColumnOp::Read) == line);
    CHECK(error_of([&] { (void)d.column_access(kB0, c.lines_per_row(), ColumnOp::Read); }) == ErrorKind::AddressRange);
    d.precharge(kB0);
    const Bytes row = d.peek_row(kB0, 2);
    CHECK(Bytes(row.begin() + 3 * c.cacheline_bytes, row.begin() + 4 * c.cacheline_bytes) == line);
}

TEST_CASE("random column traffic matches a flat array") {
    const DeviceConfig c = tiny_config();
    DramState d(c);
    Gen g(4);
    std::vector<Bytes> flat(c.banks_total() * c.rows_per_bank(), Bytes(c.row_size_bytes, 0));
    for (int i = 0; i < 3000; ++i) {
        const BankId b{0, 0, static_cast<std::uint32_t>(g.below(c.banks_per_chip))};
        const auto row = static_cast<std::uint32_t>(g.below(c.rows_per_bank()));
        const auto col = static_cast<std::uint32_t>(g.below(c.lines_per_row()));
        Bytes& ref = flat[b.bank * c.rows_per_bank() + row];
        d.activate(b, row);
        if (g.coin()) {
            const Bytes line = g.bytes(c.cacheline_bytes);
            d.column_access(b, col, ColumnOp::Write, line);
            std::copy(line.begin(), line.end(), ref.begin() + std::ptrdiff_t{col} * c.cacheline_bytes);
        } else {
            const Bytes got = d.column_access(b, col, ColumnOp::Read);
            REQUIRE(got == Bytes(ref.begin() + std::ptrdiff_t{col} * c.cacheline_bytes,
                                 ref.begin() + std::ptrdiff_t{col + 1} * c.cacheline_bytes));
        }
        d.precharge(b);
    }
    for (std::uint32_t b = 0; b < c.banks_per_chip; ++b) {
        for (std::uint32_t r = 0; r < c.rows_per_bank(); ++r) REQUIRE(d.peek_row({0, 0, b}, r) == flat[b * c.rows_per_bank() + r]);
    }
}

TEST_CASE("triple activation computes the majority") {
    const DeviceConfig c = tiny_config();
    DramState d(c);
    d.poke_row(kB0, 0, filled(c, 0b1100));
    d.poke_row(kB0, 1, filled(c, 0b1010));
    d.poke_row(kB0, 2, filled(c, 0b0110));
    d.multi_activate(kB0, {0, 1, 2});
    CHECK(d.row_buffer(kB0).data == filled(c, 0b1110));
    CHECK(d.sense_amp(kB0).connected_rows.size() == 3);
    CHECK(d.sense_mode(kB0, 1) == SenseMode::DrivingHigh);
    CHECK(d.sense_mode(kB0, 0) == SenseMode::DrivingLow);
    d.precharge(kB0);
    for (std::uint32_t r = 0; r < 3; ++r) CHECK(d.peek_row(kB0, r) == filled(c, 0b1110));

    d.poke_row(kB0, 0, filled(c, 0));
    d.poke_row(kB0, 1, filled(c, 0));
    d.poke_row(kB0, 2, filled(c, 0));
    d.multi_activate(kB0, {0, 1, 2});
    CHECK(d.row_buffer(kB0).data == filled(c, 0));
}

TEST_CASE("majority truth table and algebra") {
    const DeviceConfig c = tiny_config();
    for (int bits = 0; bits < 8; ++bits) {
        DramState d(c);
        const int a = bits & 1, b = (bits >> 1) & 1, cc = (bits >> 2) & 1;
        d.poke_row(kB0, 0, filled(c, a ? 0xff : 0));
        d.poke_row(kB0, 1, filled(c, b ? 0xff : 0));
        d.poke_row(kB0, 2, filled(c, cc ? 0xff : 0));
        d.multi_activate(kB0, {2, 0, 1});
        const int expect = (a & b) | (b & cc) | (cc & a);
        CHECK(d.row_buffer(kB0).data == filled(c, expect ? 0xff : 0));
    }
    Gen g(5);
    for (int i = 0; i < 200; ++i) {
        const Bytes x = g.bytes(64), y = g.bytes(64), z = g.bytes(64);
        CHECK(bit_majority(x, y, z) == bit_majority(z, x, y));
        CHECK(bit_majority(x, x, y) == x);
    }
}

TEST_CASE("triple activation preconditions") {
    const DeviceConfig c = tiny_config();
    DramState d(c);
    CHECK(error_of([&] { d.multi_activate(kB0, {0, 1, c.rows_per_subarray}); }) == ErrorKind::SubarrayMismatch);
    CHECK(error_of([&] { d.multi_activate(kB0, {0, 1, 1}); }) == ErrorKind::SameRow);
    d.activate(kB0, 4);
    CHECK(error_of([&] { d.multi_activate(kB0, {0, 1, 2}); }) == ErrorKind::CommandDropped);
}

TEST_CASE("retention: stale cells without decay, analog outcome with decay") {
    DeviceConfig c = tiny_config();
    c.retention_window = 1000.0;
    {
        DramState d(c);
        d.poke_row(kB0, 0, filled(c, 0xff));
        d.set_time(2000.0);
        CHECK(error_of([&] { d.multi_activate(kB0, {0, 1, 2}); }) == ErrorKind::StaleCell);
    }
    c.decay_enabled = true;
    {
        // One fresh 1, one fresh 0 and a fully decayed cell leave the bitline at vdd/2.
        DramState d(c);
        d.poke_row(kB0, 2, filled(c, 0xff));
        d.set_time(2000.0);
        d.poke_row(kB0, 0, filled(c, 0xff));
        d.poke_row(kB0, 1, filled(c, 0x00));
        CHECK(error_of([&] { d.multi_activate(kB0, {0, 1, 2}); }) == ErrorKind::MetastableSense);
    }
    {
        // Two partly decayed ones still outvote a fresh zero.
        DramState d(c);
        d.poke_row(kB0, 0, filled(c, 0xff));
        d.poke_row(kB0, 1, filled(c, 0xff));
        d.set_time(250.0);
        d.poke_row(kB0, 2, filled(c, 0x00));
        CHECK(d.cell(kB0, 0, 0).voltage == doctest::Approx(0.875));
        CHECK(d.last_refresh(kB0, 2) == 250.0);
        d.multi_activate(kB0, {0, 1, 2});
        CHECK(d.row_buffer(kB0).data == filled(c, 0xff));
        d.precharge(kB0);
        CHECK(d.cell(kB0, 0, 0).voltage == 1.0);
    }
}

TEST_CASE("transfer moves one line between open banks") {
    const DeviceConfig c = tiny_config();
    DramState d(c);
    Gen g(6);
    const Bytes src = g.bytes(c.row_size_bytes);
    d.poke_row(kB0, 1, src);
    d.activate(kB0, 1);
    d.activate(kB1, 2);
    d.transfer(kB0, 0, kB1, 0);
    CHECK(d.row_buffer(kB0).data == src);
    d.precharge(kB1);
    const Bytes dst = d.peek_row(kB1, 2);
    CHECK(Bytes(dst.begin(), dst.begin() + c.cacheline_bytes) == Bytes(src.begin(), src.begin() + c.cacheline_bytes));
    CHECK(Bytes(dst.begin() + c.cacheline_bytes, dst.end()) == Bytes(c.row_size_bytes - c.cacheline_bytes, 0));
    CHECK(error_of([&] { d.transfer(kB0, 0, kB0, 1); }) == ErrorKind::SameBankTransfer);
    CHECK(error_of([&] { d.transfer(kB0, 0, kB1, 1); }) == ErrorKind::NoOpenRow);
}

TEST_CASE("line-by-line transfer replicates a 4 KiB row") {
    DeviceConfig c = tiny_config();
    c.row_size_bytes = 4096;
    DramState d(c);
    Gen g(7);
    const Bytes src = g.bytes(c.row_size_bytes);
    d.poke_row(kB0, 3, src);
    d.activate(kB0, 3);
    d.activate(kB1, 4);
    for (std::uint32_t col = 0; col < 64; ++col) d.transfer(kB0, col, kB1, col);
    d.precharge(kB0);
    d.precharge(kB1);
    CHECK(d.peek_row(kB1, 4) == src);
}

TEST_CASE("remapped rows live in their spare") {
    DeviceConfig c = tiny_config();
    c.row_remaps = {{1, 5}};
    DramState d(c);
    const Bytes v = filled(c, 0x5a);
    d.poke_row(kB0, 1, v);
    CHECK(d.peek_row(kB0, 1) == v);
    d.activate(kB0, 1);
    d.activate(kB0, 2);
    d.precharge(kB0);
    CHECK(d.peek_row(kB0, 2) == v);
}

TEST_CASE("dump lists materialised rows") {
    const DeviceConfig c = tiny_config();
    DramState d(c);
    d.poke_row(kB1, c.rows_per_subarray + 3, filled(c, 0xab));
    std::ostringstream os;
    d.dump(os);
    const std::string out = os.str();
    CHECK(out.rfind("# channel rank bank subarray row data\n", 0) == 0);
    CHECK(out.find("0 0 1 1 3 abab") != std::string::npos);
}
