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

#include <algorithm>

#include "doctest.h"
#include "oracles.hpp"
#include "pumsim/rowclone.hpp"
#include "pumsim/timing.hpp"

using namespace pumsim;
using pumsim::testing::error_of;
using pumsim::testing::Gen;
using pumsim::testing::random_user_row;
using pumsim::testing::timing_violations;

namespace {

const BankId kB0{0, 0, 0};
const BankId kB1{0, 0, 1};

template <typename F>
Nanoseconds timed(Engine& e, F&& f) {
    e.begin_op();
    f();
    return e.end_op();
}

std::size_t count(const Engine& e, CommandKind k) {
    return static_cast<std::size_t>(
        std::count_if(e.log().begin(), e.log().end(), [&](const TimedCommand& c) { return c.kind == k; }));
}

}  // namespace

TEST_CASE("fpm copy duplicates a full row") {
    const DeviceConfig c = desk_config();
    Engine e(c);
    Gen g(3);
    const RowAddress src{kB0, 10};
    const RowAddress dst{kB0, 200};
    const Bytes data = g.bytes(c.row_size_bytes);
    e.dram().poke_row(src.bank, src.row, data);
    e.dram().poke_row(dst.bank, dst.row, g.bytes(c.row_size_bytes));
    const Nanoseconds lat = timed(e, [&] { fpm_copy(e, src, dst); });
    CHECK(lat == doctest::Approx(85.0));
    CHECK(e.dram().peek_row(kB0, dst.row) == data);
    CHECK(e.dram().peek_row(kB0, src.row) == data);
    CHECK(count(e, CommandKind::Activate) == 2);
    CHECK(count(e, CommandKind::Precharge) == 1);
    CHECK(timing_violations(e) == 0);
}

TEST_CASE("aggressive fpm overlaps the second activation") {
    DeviceConfig c = desk_config();
    c.fpm_latency_mode = FpmLatencyMode::Aggressive;
    Engine e(c);
    const Nanoseconds lat = timed(e, [&] { fpm_copy(e, {kB0, 1}, {kB0, 2}); });
    CHECK(lat == doctest::Approx(50.0));
    CHECK(e.counters().overlapped_activate == 1);
    CHECK(timing_violations(e) == 0);
}

TEST_CASE("fpm rejects bad placements") {
    const DeviceConfig c = desk_config();
    Engine e(c);
    e.begin_op();
    CHECK(error_of([&] { fpm_copy(e, {kB0, 4}, {kB0, 4}); }) == ErrorKind::SameRow);
    CHECK(error_of([&] { fpm_copy(e, {kB0, 4}, {kB0, c.rows_per_subarray + 4}); }) == ErrorKind::SubarrayMismatch);
    CHECK(error_of([&] { fpm_copy(e, {kB0, 4}, {kB1, 4}); }) == ErrorKind::SubarrayMismatch);
    CHECK(error_of([&] { fpm_copy(e, {kB0, 4}, {kB0, c.rows_per_bank()}); }) == ErrorKind::AddressRange);
    e.end_op();
}

TEST_CASE("psm copies lines between banks") {
    const DeviceConfig c = desk_config();
    Engine e(c);
    Gen g(4);
    const Bytes data = g.bytes(c.row_size_bytes);
    e.dram().poke_row(kB0, 30, data);
    const Nanoseconds lat = timed(e, [&] { psm_copy(e, {kB0, 30}, {kB1, 40}); });
    CHECK(lat == doctest::Approx(510.0));
    CHECK(e.dram().peek_row(kB1, 40) == data);
    CHECK(count(e, CommandKind::Transfer) == c.lines_per_row());
    CHECK(count(e, CommandKind::Activate) == 2);
    CHECK(count(e, CommandKind::Precharge) == 2);
    CHECK(timing_violations(e) == 0);
}

TEST_CASE("psm single line leaves the rest of the row") {
    const DeviceConfig c = desk_config();
    Engine e(c);
    Gen g(5);
    const Bytes src = g.bytes(c.row_size_bytes);
    const Bytes dst = g.bytes(c.row_size_bytes);
    e.dram().poke_row(kB0, 7, src);
    e.dram().poke_row(kB1, 9, dst);
    timed(e, [&] { psm_copy(e, {kB0, 7}, {kB1, 9}, ColumnPairs{{3, 5}}); });
    Bytes expect = dst;
    std::copy_n(src.begin() + 3 * c.cacheline_bytes, c.cacheline_bytes, expect.begin() + 5 * c.cacheline_bytes);
    CHECK(e.dram().peek_row(kB1, 9) == expect);
}

TEST_CASE("psm rejects a single bank and empty column lists") {
    const DeviceConfig c = desk_config();
    Engine e(c);
    e.begin_op();
    CHECK(error_of([&] { psm_copy(e, {kB0, 1}, {kB0, 600}); }) == ErrorKind::SameBankTransfer);
    CHECK(error_of([&] { psm_copy(e, {kB0, 1}, {kB1, 1}, ColumnPairs{}); }) == ErrorKind::AddressRange);
    CHECK(error_of([&] { psm_copy(e, {kB0, 1}, {kB1, 1}, ColumnPairs{{c.lines_per_row(), 0}}); }) ==
          ErrorKind::AddressRange);
    e.end_op();
}

TEST_CASE("bulk copy dispatches on placement") {
    const DeviceConfig c = desk_config();
    Engine e(c);
    Gen g(6);
    const Bytes data = g.bytes(c.row_size_bytes);
    e.dram().poke_row(kB0, 3, data);

    CopyResult r{};
    Nanoseconds lat = timed(e, [&] { r = bulk_copy(e, {kB0, 3}, {kB0, 5}); });
    CHECK(r.mechanism == Mechanism::Fpm);
    CHECK(lat == doctest::Approx(85.0));

    lat = timed(e, [&] { r = bulk_copy(e, {kB0, 3}, {kB1, 5}); });
    CHECK(r.mechanism == Mechanism::PsmInterBank);
    CHECK(lat == doctest::Approx(510.0));

    const RowAddress far{kB0, 3 * c.rows_per_subarray + 5};
    lat = timed(e, [&] { r = bulk_copy(e, {kB0, 3}, far); });
    CHECK(r.mechanism == Mechanism::PsmIntraBank);
    CHECK(lat == doctest::Approx(1020.0));

    CHECK(e.dram().peek_row(kB0, 5) == data);
    CHECK(e.dram().peek_row(kB1, 5) == data);
    CHECK(e.dram().peek_row(kB0, far.row) == data);
    CHECK(timing_violations(e) == 0);
}

TEST_CASE("classify_copy") {
    DeviceConfig c = desk_config();
    c.ranks_per_channel = 2;
    CHECK(classify_copy({kB0, 1}, {kB0, 2}, c) == Mechanism::Fpm);
    CHECK(classify_copy({kB0, 1}, {kB1, 2}, c) == Mechanism::PsmInterBank);
    CHECK(classify_copy({kB0, 1}, {kB0, c.rows_per_subarray + 2}, c) == Mechanism::PsmIntraBank);
    CHECK(error_of([&] { (void)classify_copy({kB0, 1}, {{0, 1, 0}, 1}, c); }) == ErrorKind::UnsupportedPlacement);
}

TEST_CASE("bulk zero clears any user row and keeps the zero row clean") {
    const DeviceConfig c = tiny_config();
    Engine e(c);
    Gen g(7);
    for (int i = 0; i < 1000; ++i) {
        const BankId b{0, 0, static_cast<std::uint32_t>(g.below(c.banks_per_chip))};
        const RowAddress r = random_user_row(g, c, b);
        e.dram().poke_row(b, r.row, g.bytes(c.row_size_bytes));
        const Nanoseconds lat = timed(e, [&] { bulk_zero(e, r); });
        REQUIRE(lat == doctest::Approx(85.0));
        REQUIRE(e.dram().peek_row(b, r.row) == Bytes(c.row_size_bytes, 0));
    }
    for (std::uint32_t b = 0; b < c.banks_per_chip; ++b) {
        for (std::uint32_t s = 0; s < c.subarrays_per_bank; ++s) {
            const RowAddress z = reserved::zero_row({0, 0, b}, s, c);
            CHECK(e.dram().peek_row(z.bank, z.row) == Bytes(c.row_size_bytes, 0));
        }
    }
    CHECK(timing_violations(e) == 0);
}

TEST_CASE("bulk zero refuses reserved rows") {
    const DeviceConfig c = tiny_config();
    Engine e(c);
    e.begin_op();
    CHECK(error_of([&] { bulk_zero(e, reserved::zero_row(kB0, 1, c)); }) == ErrorKind::ReservedRowTarget);
    CHECK(error_of([&] { bulk_zero(e, reserved::row(reserved::Slot::C1, kB0, 0, c)); }) ==
          ErrorKind::ReservedRowTarget);
    e.end_op();
}

TEST_CASE("bulk init writes a pattern through one staging stream") {
    const DeviceConfig c = desk_config();
    Engine e(c);
    const Bytes pattern(c.row_size_bytes, 0xAB);
    const std::vector<RowAddress> dsts = {{kB0, 1}, {kB0, 2}, {kB1, 3}, {kB0, 2 * c.rows_per_subarray + 4}};
    std::vector<CopyResult> results;
    timed(e, [&] { results = bulk_init(e, dsts, pattern); });
    REQUIRE(results.size() == dsts.size() + 1);
    CHECK(results[0].mechanism == Mechanism::Baseline);
    CHECK(count(e, CommandKind::Write) == c.lines_per_row());
    for (const auto& d : dsts) CHECK(e.dram().peek_row(d.bank, d.row) == pattern);
    CHECK(timing_violations(e) == 0);
}

TEST_CASE("bulk init of zeros matches bulk zero") {
    const DeviceConfig c = tiny_config();
    Engine a(c);
    Engine b(c);
    Gen g(8);
    const Bytes junk = g.bytes(c.row_size_bytes);
    const RowAddress r{kB1, 6};
    a.dram().poke_row(r.bank, r.row, junk);
    b.dram().poke_row(r.bank, r.row, junk);
    const std::vector<RowAddress> one{r};
    timed(a, [&] { bulk_init(a, one, Bytes(c.row_size_bytes, 0)); });
    timed(b, [&] { bulk_zero(b, r); });
    CHECK(a.dram().peek_row(r.bank, r.row) == b.dram().peek_row(r.bank, r.row));
    CHECK(error_of([&] { bulk_init(a, one, Bytes(3, 0)); }) == ErrorKind::RowRequired);
}

TEST_CASE("fpm result does not depend on prior destination contents") {
    const DeviceConfig c = tiny_config();
    Gen g(9);
    const Bytes src = g.bytes(c.row_size_bytes);
    for (int i = 0; i < 50; ++i) {
        Engine e(c);
        e.dram().poke_row(kB0, 0, src);
        e.dram().poke_row(kB0, 1, g.bytes(c.row_size_bytes));
        timed(e, [&] { fpm_copy(e, {kB0, 0}, {kB0, 1}); });
        REQUIRE(e.dram().peek_row(kB0, 1) == src);
    }
}

TEST_CASE("copies leave every other row untouched") {
    const DeviceConfig c = tiny_config();
    Gen g(10);
    Engine e(c);
    reserved::initialize(e.dram());
    std::vector<Bytes> before;
    for (std::uint32_t b = 0; b < c.banks_per_chip; ++b) {
        for (std::uint32_t r = 0; r < c.rows_per_bank(); ++r) {
            if (reserved::is_reserved(r, c)) continue;
            e.dram().poke_row({0, 0, b}, r, g.bytes(c.row_size_bytes));
        }
    }
    for (std::uint32_t b = 0; b < c.banks_per_chip; ++b) {
        for (std::uint32_t r = 0; r < c.rows_per_bank(); ++r) before.push_back(e.dram().peek_row({0, 0, b}, r));
    }
    const RowAddress src = random_user_row(g, c, kB0);
    const RowAddress dst = random_user_row(g, c, {0, 0, 2});
    timed(e, [&] { bulk_copy(e, src, dst); });
    std::size_t i = 0;
    for (std::uint32_t b = 0; b < c.banks_per_chip; ++b) {
        for (std::uint32_t r = 0; r < c.rows_per_bank(); ++r, ++i) {
            const bool target = RowAddress{{0, 0, b}, r} == dst;
            if (!target) CHECK(e.dram().peek_row({0, 0, b}, r) == before[i]);
        }
    }
}

TEST_CASE("reserved rows") {
    const DeviceConfig c = tiny_config();
    DramState d(c);
    reserved::initialize(d);
    const RowAddress c1 = reserved::row(reserved::Slot::C1, {0, 0, 3}, 2, c);
    CHECK(d.peek_row(c1.bank, c1.row) == Bytes(c.row_size_bytes, 0xff));
    const RowAddress c0 = reserved::row(reserved::Slot::C0, {0, 0, 3}, 2, c);
    CHECK(d.peek_row(c0.bank, c0.row) == Bytes(c.row_size_bytes, 0));
    CHECK(reserved::tmp_row_for({0, 0, 3}, c).bank.bank == 0);
    for (std::uint32_t r = 0; r < c.rows_per_bank(); ++r) {
        CHECK(reserved::is_reserved(r, c) == pumsim::testing::oracle_reserved(r, c));
    }
    const double rows = static_cast<double>(c.rows_per_bank());
    CHECK(reserved::idao_overhead(c) == doctest::Approx(5.0 * c.subarrays_per_bank / rows));
}
