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

#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

#include "pumsim/config.hpp"
#include "pumsim/energy_table.hpp"
#include "pumsim/engine.hpp"

namespace pumsim {

/// Per-category energy, kept as integer femtojoules so totals are exact.
class EnergyLedger {
public:
    static constexpr std::size_t kCategories = 5;

    void add_fj(OpKind category, std::int64_t fj) { fj_[static_cast<std::size_t>(category)] += fj; }
    [[nodiscard]] std::int64_t category_fj(OpKind category) const { return fj_[static_cast<std::size_t>(category)]; }
    [[nodiscard]] std::int64_t total_fj() const;
    [[nodiscard]] double category_uj(OpKind category) const { return static_cast<double>(category_fj(category)) * 1e-9; }
    [[nodiscard]] double total_uj() const { return static_cast<double>(total_fj()) * 1e-9; }

private:
    std::array<std::int64_t, kCategories> fj_{};
};

[[nodiscard]] inline std::int64_t uj_to_fj(double uj) { return static_cast<std::int64_t>(std::llround(uj * 1e9)); }

/// Energy of a command-count slice under per-command constants.
std::int64_t command_energy_fj(const CommandCounters& counts, const PerCommandEnergy& e);

struct CalibrationRow {
    EnergyKey key;
    CommandCounters counts;
    double target_uj = 0.0;
    double fitted_uj = 0.0;
    double relative_residual = 0.0;  ///< (fitted - target) / target
};

struct CalibrationResult {
    PerCommandEnergy constants;
    std::vector<CalibrationRow> rows;
    [[nodiscard]] double max_abs_relative_residual() const;
};

/// Command counts of one 4 KiB (64-line) instance of each mechanism.
/// Overlapped activations are listed separately and carry no energy.
CommandCounters canonical_command_counts(OpKind op, Mechanism mech);

/// Non-negative least squares over relative residuals. Throws
/// CalibrationFailed when the system does not determine every constant.
CalibrationResult calibrate_per_command(std::vector<CalibrationRow> rows);
/// Fits against the nine comparison rows of `table`.
CalibrationResult calibrate_per_command(const EnergyTable& table);

/// Applies the configured energy mode.
class EnergyModel {
public:
    explicit EnergyModel(const DeviceConfig& cfg);

    [[nodiscard]] EnergyMode mode() const { return mode_; }
    [[nodiscard]] const EnergyTable& table() const { return table_; }
    [[nodiscard]] const PerCommandEnergy& per_command() const { return per_command_; }
    [[nodiscard]] const std::optional<CalibrationResult>& calibration() const { return calibration_; }

    /// Table mode: table[(op, mech)] * bytes / 4096. Per-command mode: the
    /// energy of `slice`. Unknown pairs throw UnknownMechanism in both modes.
    void charge(EnergyLedger& ledger, OpKind op, Mechanism mech, std::uint64_t bytes,
                const CommandCounters& slice) const;
    [[nodiscard]] std::int64_t table_fj(OpKind op, Mechanism mech, std::uint64_t bytes) const;

private:
    EnergyMode mode_;
    EnergyTable table_;
    PerCommandEnergy per_command_;
    std::optional<CalibrationResult> calibration_;
};

}  // namespace pumsim
