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

#include "pumsim/energy_table.hpp"

#include <string>

#include "pumsim/error.hpp"

namespace pumsim {

std::string_view to_string(OpKind kind) {
    switch (kind) {
        case OpKind::Copy: return "copy";
        case OpKind::Zero: return "zero";
        case OpKind::AndOr: return "and_or";
        case OpKind::Read: return "read";
        case OpKind::Write: return "write";
    }
    return "?";
}

std::string_view to_string(Mechanism mechanism) {
    switch (mechanism) {
        case Mechanism::Baseline: return "baseline";
        case Mechanism::Fpm: return "fpm";
        case Mechanism::PsmInterBank: return "psm_inter_bank";
        case Mechanism::PsmIntraBank: return "psm_intra_bank";
        case Mechanism::IdaoConservative: return "idao_conservative";
        case Mechanism::IdaoAggressive: return "idao_aggressive";
    }
    return "?";
}

EnergyTable EnergyTable::reference() {
    EnergyTable t;
    auto row = [&](OpKind op, Mechanism m, double lat, double uj, double lat_red, int decimals,
                   double e_red) {
        t.set(op, m, EnergyTableEntry{uj, e_red, lat_red, decimals, lat});
    };
    row(OpKind::Copy, Mechanism::Baseline, 1020, 3.6, 1.00, 2, 1.0);
    row(OpKind::Copy, Mechanism::Fpm, 85, 0.04, 12.0, 1, 74.4);
    row(OpKind::Copy, Mechanism::PsmInterBank, 510, 1.1, 2.0, 1, 3.2);
    row(OpKind::Copy, Mechanism::PsmIntraBank, 1020, 2.5, 1.0, 1, 1.5);
    row(OpKind::Zero, Mechanism::Baseline, 510, 2.0, 1.00, 2, 1.0);
    row(OpKind::Zero, Mechanism::Fpm, 85, 0.05, 6.0, 1, 41.5);
    row(OpKind::AndOr, Mechanism::Baseline, 1530, 5.0, 1.00, 2, 1.0);
    row(OpKind::AndOr, Mechanism::IdaoConservative, 320, 0.16, 4.78, 2, 31.6);
    row(OpKind::AndOr, Mechanism::IdaoAggressive, 200, 0.10, 7.65, 2, 50.5);
    // Demand reads/writes are single row streams: priced like the one-stream
    // zeroing baseline.
    t.set(OpKind::Read, Mechanism::Baseline, EnergyTableEntry{2.0, std::nullopt, std::nullopt, 1, 510});
    t.set(OpKind::Write, Mechanism::Baseline, EnergyTableEntry{2.0, std::nullopt, std::nullopt, 1, 510});
    // Initialisation through PSM moves the same lines as a PSM copy.
    t.set(OpKind::Zero, Mechanism::PsmInterBank, EnergyTableEntry{1.1, std::nullopt, std::nullopt, 1, 510});
    t.set(OpKind::Zero, Mechanism::PsmIntraBank, EnergyTableEntry{2.5, std::nullopt, std::nullopt, 1, 1020});
    return t;
}

const EnergyTableEntry* EnergyTable::find(OpKind op, Mechanism mech) const {
    auto it = entries_.find({op, mech});
    return it == entries_.end() ? nullptr : &it->second;
}

const EnergyTableEntry& EnergyTable::at(OpKind op, Mechanism mech) const {
    if (const auto* e = find(op, mech)) return *e;
    fail(ErrorKind::UnknownMechanism, "no energy entry for (" + std::string(to_string(op)) + ", " +
                                          std::string(to_string(mech)) + ")");
}

const std::vector<EnergyKey>& EnergyTable::comparison_rows() {
    static const std::vector<EnergyKey> rows = {
        {OpKind::Copy, Mechanism::Baseline},       {OpKind::Copy, Mechanism::Fpm},
        {OpKind::Copy, Mechanism::PsmInterBank},   {OpKind::Copy, Mechanism::PsmIntraBank},
        {OpKind::Zero, Mechanism::Baseline},       {OpKind::Zero, Mechanism::Fpm},
        {OpKind::AndOr, Mechanism::Baseline},      {OpKind::AndOr, Mechanism::IdaoConservative},
        {OpKind::AndOr, Mechanism::IdaoAggressive},
    };
    return rows;
}

}  // namespace pumsim
