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

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace pumsim {

/// Ledger categories; also the op-kind axis of the energy table.
enum class OpKind { Copy, Zero, AndOr, Read, Write };

/// How a bulk operation (or a slice of it) was carried out.
enum class Mechanism { Baseline, Fpm, PsmInterBank, PsmIntraBank, IdaoConservative, IdaoAggressive };

std::string_view to_string(OpKind kind);
std::string_view to_string(Mechanism mechanism);

struct EnergyTableEntry {
    double absolute_uj = 0.0;  ///< per 4 KiB
    /// Reduction vs. baseline as printed in the reference table. Stored, never
    /// recomputed from the absolutes (they are rounded).
    std::optional<double> printed_reduction;
    /// Printed latency reduction for the same row, with its decimal count.
    std::optional<double> printed_latency_reduction;
    int latency_reduction_decimals = 1;
    std::optional<double> absolute_latency_ns;
};

using EnergyKey = std::pair<OpKind, Mechanism>;

class EnergyTable {
public:
    static constexpr double kBytesPerEntry = 4096.0;

    /// DDR3-1600 reference values, plus derived single-stream read/write
    /// entries used to price demand traffic.
    static EnergyTable reference();

    void set(OpKind op, Mechanism mech, EnergyTableEntry entry) { entries_[{op, mech}] = entry; }
    [[nodiscard]] const EnergyTableEntry* find(OpKind op, Mechanism mech) const;
    /// Throws UnknownMechanism when the pair is not present.
    [[nodiscard]] const EnergyTableEntry& at(OpKind op, Mechanism mech) const;
    [[nodiscard]] const std::map<EnergyKey, EnergyTableEntry>& entries() const { return entries_; }

    /// The nine rows of the latency/energy comparison, in print order.
    static const std::vector<EnergyKey>& comparison_rows();

private:
    std::map<EnergyKey, EnergyTableEntry> entries_;
};

}  // namespace pumsim
