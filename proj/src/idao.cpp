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


#include "pumsim/idao.hpp"

#include <array>
#include <cmath>
#include <string>

#include "pumsim/error.hpp"
#include "pumsim/rowclone.hpp"

namespace pumsim {

namespace {

constexpr int kUnreachable = 1000;

int hops_between(const RowAddress& x, const BankId& bank, std::uint32_t subarray, const DeviceConfig& cfg) {
    if (!x.bank.same_rank(bank)) return kUnreachable;
    if (x.bank != bank) return 1;
    if (x.physical_subarray(cfg) == subarray) return 0;
    return cfg.banks_per_chip < 2 ? kUnreachable : 2;
}

void copy_row(Engine& engine, const RowAddress& src, const RowAddress& dst) {
    if (src == dst) return;
    bulk_copy(engine, src, dst);
}

}  // namespace

std::string_view to_string(BitwiseOp op) { return op == BitwiseOp::And ? "and" : "or"; }

Bytes majority3(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b, std::span<const std::uint8_t> c) {
    if (a.size() != b.size() || b.size() != c.size()) fail(ErrorKind::NumericDomain, "majority3 operand length mismatch");
    Bytes out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = static_cast<std::uint8_t>((a[i] & b[i]) | (b[i] & c[i]) | (c[i] & a[i]));
    return out;
}

void freshness_guard(const DramState& dram, std::span<const RowAddress> rows, Nanoseconds now) {
    const Nanoseconds window = dram.config().retention_window;
    if (std::isinf(window)) return;
    for (const auto& r : rows) {
        const Nanoseconds age = now - dram.last_refresh(r.bank, r.row);
        if (age > window) {
            fail(ErrorKind::StaleCell, "row " + to_string(r) + " last restored " + std::to_string(age) + " ns ago");
        }
    }
}

BitwisePlan plan_bitwise(const RowAddress& a, const RowAddress& b, const RowAddress& r, const DeviceConfig& cfg) {
    BitwisePlan best;
    bool have = false;
    for (const RowAddress* host : {&a, &b, &r}) {
        BitwisePlan p;
        p.bank = host->bank;
        p.subarray = host->physical_subarray(cfg);
        p.hops_a = hops_between(a, p.bank, p.subarray, cfg);
        p.hops_b = hops_between(b, p.bank, p.subarray, cfg);
        p.hops_r = hops_between(r, p.bank, p.subarray, cfg);
        if (!have || p.total_hops() < best.total_hops()) {
            best = p;
            have = true;
        }
    }
    return best;
}

BitwiseResult in_dram_bitwise(Engine& engine, BitwiseOp op, const RowAddress& a, const RowAddress& b,
                              const RowAddress& r) {
    const DeviceConfig& cfg = engine.config();
    for (const auto* x : {&a, &b, &r}) {
        if (x->row >= cfg.rows_per_bank()) fail(ErrorKind::AddressRange, "row " + to_string(*x) + " out of range");
    }
    if (reserved::is_reserved(r, cfg)) fail(ErrorKind::ReservedRowTarget, "bitwise result in reserved row " + to_string(r));
    const BitwisePlan plan = plan_bitwise(a, b, r, cfg);
    if (!plan.profitable()) {
        fail(ErrorKind::FallbackToCpu, "bitwise operation needs " + std::to_string(plan.total_hops()) + " PSM hops");
    }

    using reserved::Slot;
    const auto t1 = reserved::row(Slot::T1, plan.bank, plan.subarray, cfg);
    const auto t2 = reserved::row(Slot::T2, plan.bank, plan.subarray, cfg);
    const auto t3 = reserved::row(Slot::T3, plan.bank, plan.subarray, cfg);
    const auto control = reserved::row(op == BitwiseOp::And ? Slot::C0 : Slot::C1, plan.bank, plan.subarray, cfg);

    const Nanoseconds start = engine.cursor();
    copy_row(engine, a, t1);
    copy_row(engine, b, t2);
    copy_row(engine, control, t3);

    const auto& t = cfg.timing;
    const Nanoseconds t0 = engine.earliest(BankRole::Activate, plan.bank, engine.cursor());
    const std::array<RowAddress, 3> ts{t1, t2, t3};
    freshness_guard(engine.dram(), ts, t0);
    engine.multi_activate(plan.bank, {t1.row, t2.row, t3.row}, t0);
    if (plan.hops_r == 0) {
        // The result copy reuses the triple activation as its source ACT.
        if (cfg.fpm_latency_mode == FpmLatencyMode::Aggressive) {
            engine.activate(r.bank, r.row, t0 + t.tRCD, /*overlapped=*/true);
            engine.precharge(r.bank, t0 + t.tRAS);
        } else {
            const Nanoseconds act = cfg.idao_conservative_source == IdaoConservativeSource::Table ? t0 + t.tRCD
                                                                                                  : t0 + t.tRAS;
            engine.activate(r.bank, r.row, act);
            engine.precharge(r.bank, act + t.tRAS);
        }
    } else {
        engine.precharge(plan.bank, t0 + t.tRAS);
        bulk_copy(engine, t1, r);
    }
    const Mechanism mech = cfg.fpm_latency_mode == FpmLatencyMode::Aggressive ? Mechanism::IdaoAggressive
                                                                              : Mechanism::IdaoConservative;
    return {mech, plan, engine.cursor() - start};
}

}  // namespace pumsim
