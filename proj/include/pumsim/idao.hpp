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

#include <cstdint>
#include <span>

#include "pumsim/address.hpp"
#include "pumsim/dram_state.hpp"
#include "pumsim/energy_table.hpp"
#include "pumsim/engine.hpp"

namespace pumsim {

enum class BitwiseOp { And, Or };

std::string_view to_string(BitwiseOp op);

/// Per-bit ab + bc + ca.
Bytes majority3(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b, std::span<const std::uint8_t> c);

/// Throws StaleCell unless every row was restored within the retention
/// window as of `now`.
void freshness_guard(const DramState& dram, std::span<const RowAddress> rows, Nanoseconds now);

/// Where the triple activation runs and how many PSM hops the copies need.
/// A hop is one inter-bank PSM copy; a same-bank cross-subarray copy is two.
struct BitwisePlan {
    BankId bank;
    std::uint32_t subarray = 0;  ///< physical subarray holding T1..T3
    int hops_a = 0;
    int hops_b = 0;
    int hops_r = 0;

    [[nodiscard]] int total_hops() const { return hops_a + hops_b + hops_r; }
    /// Three or more hops are left to the CPU.
    [[nodiscard]] bool profitable() const { return total_hops() < 3; }
};

/// Picks the subarray among those of A, B and R that minimises hops.
/// Operands in another rank or channel than the chosen subarray make the
/// plan unprofitable.
BitwisePlan plan_bitwise(const RowAddress& a, const RowAddress& b, const RowAddress& r, const DeviceConfig& cfg);

struct BitwiseResult {
    Mechanism mechanism = Mechanism::IdaoConservative;
    BitwisePlan plan;
    Nanoseconds latency = 0.0;
};

/// Copy A->T1, B->T2, C0/C1->T3, triple-activate, copy T1->R. Operands may
/// alias one another. Throws FallbackToCpu when the plan is unprofitable.
BitwiseResult in_dram_bitwise(Engine& engine, BitwiseOp op, const RowAddress& a, const RowAddress& b,
                              const RowAddress& r);

}  // namespace pumsim
