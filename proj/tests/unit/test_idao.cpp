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

#include <limits>

#include "doctest.h"
#include "oracles.hpp"
#include "pumsim/idao.hpp"
#include "pumsim/rowclone.hpp"

using namespace pumsim;
using pumsim::testing::bit_majority;
using pumsim::testing::error_of;
using pumsim::testing::Gen;
using pumsim::testing::timing_violations;

namespace {

const BankId kB0{0, 0, 0};
const BankId kB1{0, 0, 1};
const BankId kB2{0, 0, 2};

Bytes apply(BitwiseOp op, const Bytes& a, const Bytes& b) {
    Bytes out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        out[i] = op == BitwiseOp::And ? static_cast<std::uint8_t>(a[i] & b[i]) : static_cast<std::uint8_t>(a[i] | b[i]);
    }
    return out;
}

struct Run {
    Engine engine;
    explicit Run(const DeviceConfig& c) : engine(c) { reserved::initialize(engine.dram()); }

    BitwiseResult op(BitwiseOp o, const RowAddress& a, const RowAddress& b, const RowAddress& r) {
        engine.begin_op();
        BitwiseResult res;
        try {
            res = in_dram_bitwise(engine, o, a, b, r);
        } catch (...) {
            engine.end_op();
            throw;
        }
        res.latency = engine.end_op();
        return res;
    }
};

}  // namespace

TEST_CASE("majority3 identities") {
    Gen g(1);
    for (int i = 0; i < 100; ++i) {
        const Bytes a = g.bytes(64);
        const Bytes b = g.bytes(64);
        const Bytes c = g.bytes(64);
        CHECK(majority3(a, b, c) == bit_majority(a, b, c));
        CHECK(majority3(a, b, Bytes(64, 0)) == apply(BitwiseOp::And, a, b));
        CHECK(majority3(a, b, Bytes(64, 0xff)) == apply(BitwiseOp::Or, a, b));
        CHECK(majority3(a, a, c) == a);
    }
}

TEST_CASE("and and or on a four bit example") {
    const DeviceConfig c = tiny_config();
    Run run(c);
    Bytes a(c.row_size_bytes, 0);
    Bytes b(c.row_size_bytes, 0);
    a[0] = 0b1100;
    b[0] = 0b1010;
    run.engine.dram().poke_row(kB0, 0, a);
    run.engine.dram().poke_row(kB0, 1, b);
    run.op(BitwiseOp::And, {kB0, 0}, {kB0, 1}, {kB0, 2});
    CHECK(run.engine.dram().peek_row(kB0, 2)[0] == 0b1000);
    run.op(BitwiseOp::Or, {kB0, 0}, {kB0, 1}, {kB0, 3});
    CHECK(run.engine.dram().peek_row(kB0, 3)[0] == 0b1110);
    CHECK(run.engine.dram().peek_row(kB0, 0) == a);
    CHECK(run.engine.dram().peek_row(kB0, 1) == b);
}

TEST_CASE("latency per mode with operands in one subarray") {
    DeviceConfig c = desk_config();
    {
        Run run(c);
        const BitwiseResult r = run.op(BitwiseOp::And, {kB0, 0}, {kB0, 1}, {kB0, 2});
        CHECK(r.mechanism == Mechanism::IdaoConservative);
        CHECK(r.latency == doctest::Approx(340.0));
        CHECK(r.plan.total_hops() == 0);
        CHECK(run.engine.counters().multi_activate == 1);
        CHECK(timing_violations(run.engine) == 0);
    }
    c.idao_conservative_source = IdaoConservativeSource::Table;
    {
        Run run(c);
        CHECK(run.op(BitwiseOp::Or, {kB0, 0}, {kB0, 1}, {kB0, 2}).latency == doctest::Approx(320.0));
        CHECK(timing_violations(run.engine) == 0);
    }
    c.fpm_latency_mode = FpmLatencyMode::Aggressive;
    {
        Run run(c);
        const BitwiseResult r = run.op(BitwiseOp::Or, {kB0, 0}, {kB0, 1}, {kB0, 2});
        CHECK(r.mechanism == Mechanism::IdaoAggressive);
        CHECK(r.latency == doctest::Approx(200.0));
        CHECK(timing_violations(run.engine) == 0);
    }
}

TEST_CASE("aliased operands") {
    const DeviceConfig c = tiny_config();
    Run run(c);
    Gen g(2);
    const Bytes a = g.bytes(c.row_size_bytes);
    const Bytes b = g.bytes(c.row_size_bytes);
    run.engine.dram().poke_row(kB1, 0, a);
    run.engine.dram().poke_row(kB1, 1, b);
    run.op(BitwiseOp::And, {kB1, 0}, {kB1, 0}, {kB1, 2});
    CHECK(run.engine.dram().peek_row(kB1, 2) == a);
    run.op(BitwiseOp::Or, {kB1, 0}, {kB1, 1}, {kB1, 0});
    CHECK(run.engine.dram().peek_row(kB1, 0) == apply(BitwiseOp::Or, a, b));
}

TEST_CASE("plans count psm hops") {
    const DeviceConfig c = tiny_config();
    const std::uint32_t rps = c.rows_per_subarray;
    CHECK(plan_bitwise({kB0, 0}, {kB0, 1}, {kB0, 2}, c).total_hops() == 0);
    CHECK(plan_bitwise({kB0, 0}, {kB1, 1}, {kB0, 2}, c).total_hops() == 1);
    CHECK(plan_bitwise({kB0, 0}, {kB0, rps + 1}, {kB0, 2}, c).total_hops() == 2);
    CHECK(plan_bitwise({kB0, 0}, {kB1, 1}, {kB2, 2}, c).total_hops() == 2);
    CHECK(plan_bitwise({kB0, 0}, {kB0, rps + 1}, {kB1, 2}, c).total_hops() == 2);
    CHECK_FALSE(plan_bitwise({kB0, 0}, {kB0, rps + 1}, {kB0, 2 * rps + 2}, c).profitable());
}

TEST_CASE("cross bank operands are copied in and out") {
    const DeviceConfig c = tiny_config();
    Run run(c);
    Gen g(3);
    const Bytes a = g.bytes(c.row_size_bytes);
    const Bytes b = g.bytes(c.row_size_bytes);
    run.engine.dram().poke_row(kB0, 0, a);
    run.engine.dram().poke_row(kB1, 0, b);
    const BitwiseResult r = run.op(BitwiseOp::And, {kB0, 0}, {kB1, 0}, {kB2, 0});
    CHECK(r.plan.total_hops() == 2);
    CHECK(run.engine.dram().peek_row(kB2, 0) == apply(BitwiseOp::And, a, b));
    CHECK(timing_violations(run.engine) == 0);
}

TEST_CASE("unprofitable and illegal requests") {
    const DeviceConfig c = tiny_config();
    Run run(c);
    const std::uint32_t rps = c.rows_per_subarray;
    CHECK(error_of([&] { run.op(BitwiseOp::And, {kB0, 0}, {kB0, rps + 1}, {kB0, 2 * rps + 2}); }) == ErrorKind::FallbackToCpu);
    CHECK(error_of([&] { run.op(BitwiseOp::And, {kB0, 0}, {kB0, 1}, reserved::zero_row(kB0, 0, c)); }) ==
          ErrorKind::ReservedRowTarget);
    CHECK(error_of([&] { run.op(BitwiseOp::And, {kB0, c.rows_per_bank()}, {kB0, 1}, {kB0, 2}); }) ==
          ErrorKind::AddressRange);
}

TEST_CASE("freshness guard") {
    DeviceConfig c = tiny_config();
    c.retention_window = 1000.0;
    DramState d(c);
    d.set_time(100.0);
    d.poke_row(kB0, 4, Bytes(c.row_size_bytes, 1));
    const std::array<RowAddress, 1> rows{RowAddress{kB0, 4}};
    CHECK_FALSE(error_of([&] { freshness_guard(d, rows, 1100.0); }));
    CHECK(error_of([&] { freshness_guard(d, rows, 1100.5); }) == ErrorKind::StaleCell);
    c.retention_window = std::numeric_limits<double>::infinity();
    DramState forever(c);
    CHECK_FALSE(error_of([&] { freshness_guard(forever, rows, 1e18); }));
}

TEST_CASE("control rows survive repeated operations") {
    const DeviceConfig c = tiny_config();
    Run run(c);
    Gen g(4);
    for (int i = 0; i < 1000; ++i) {
        const BankId b{0, 0, static_cast<std::uint32_t>(g.below(c.banks_per_chip))};
        const std::uint32_t s = static_cast<std::uint32_t>(g.below(c.subarrays_per_bank));
        auto user = [&] { return RowAddress{b, s * c.rows_per_subarray + static_cast<std::uint32_t>(g.below(4))}; };
        const RowAddress a = user();
        run.engine.dram().poke_row(a.bank, a.row, g.bytes(c.row_size_bytes));
        run.op(g.coin() ? BitwiseOp::And : BitwiseOp::Or, a, user(), user());
    }
    for (std::uint32_t b = 0; b < c.banks_per_chip; ++b) {
        for (std::uint32_t s = 0; s < c.subarrays_per_bank; ++s) {
            const RowAddress c0 = reserved::row(reserved::Slot::C0, {0, 0, b}, s, c);
            const RowAddress c1 = reserved::row(reserved::Slot::C1, {0, 0, b}, s, c);
            CHECK(run.engine.dram().peek_row(c0.bank, c0.row) == Bytes(c.row_size_bytes, 0));
            CHECK(run.engine.dram().peek_row(c1.bank, c1.row) == Bytes(c.row_size_bytes, 0xff));
        }
    }
    CHECK(timing_violations(run.engine) == 0);
}
