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


#include <cmath>

#include "doctest.h"
#include "oracles.hpp"
#include "pumsim/energy.hpp"
#include "pumsim/rowclone.hpp"

using namespace pumsim;
using pumsim::testing::error_of;
using pumsim::testing::Gen;

namespace {

std::int64_t charged_fj(const DeviceConfig& cfg, OpKind op, Mechanism m, std::uint64_t bytes,
                        const CommandCounters& slice = {}) {
    EnergyModel model(cfg);
    EnergyLedger ledger;
    model.charge(ledger, op, m, bytes, slice);
    return ledger.total_fj();
}

double model_uj(const CommandCounters& n, const PerCommandEnergy& e) {
    return static_cast<double>(n.activate) * e.E_ACT + static_cast<double>(n.precharge) * e.E_PRE +
           static_cast<double>(n.read + n.write) * e.E_COL_IO + static_cast<double>(n.transfer) * e.E_TRANSFER +
           static_cast<double>(n.multi_activate) * e.E_MULTI_ACT;
}

}  // namespace

TEST_CASE("reference table holds the printed values") {
    const EnergyTable t = EnergyTable::reference();
    struct Row {
        OpKind op;
        Mechanism m;
        double uj;
        double reduction;
    };
    const Row rows[] = {
        {OpKind::Copy, Mechanism::Baseline, 3.6, 1.0},        {OpKind::Copy, Mechanism::Fpm, 0.04, 74.4},
        {OpKind::Copy, Mechanism::PsmInterBank, 1.1, 3.2},    {OpKind::Copy, Mechanism::PsmIntraBank, 2.5, 1.5},
        {OpKind::Zero, Mechanism::Baseline, 2.0, 1.0},        {OpKind::Zero, Mechanism::Fpm, 0.05, 41.5},
        {OpKind::AndOr, Mechanism::Baseline, 5.0, 1.0},       {OpKind::AndOr, Mechanism::IdaoConservative, 0.16, 31.6},
        {OpKind::AndOr, Mechanism::IdaoAggressive, 0.10, 50.5},
    };
    REQUIRE(EnergyTable::comparison_rows().size() == 9);
    for (std::size_t i = 0; i < 9; ++i) {
        const auto& r = rows[i];
        CHECK(EnergyTable::comparison_rows()[i] == EnergyKey{r.op, r.m});
        CHECK(t.at(r.op, r.m).absolute_uj == r.uj);
        CHECK(t.at(r.op, r.m).printed_reduction.value() == r.reduction);
    }
    // Printed reductions are stored, not derived from the rounded absolutes.
    CHECK(t.at(OpKind::Copy, Mechanism::Baseline).absolute_uj / t.at(OpKind::Copy, Mechanism::Fpm).absolute_uj ==
          doctest::Approx(90.0));
    CHECK(error_of([&] { (void)t.at(OpKind::AndOr, Mechanism::Fpm); }) == ErrorKind::UnknownMechanism);
}

TEST_CASE("table-mode charges scale linearly") {
    const DeviceConfig c = desk_config();
    CHECK(charged_fj(c, OpKind::Copy, Mechanism::Fpm, 4096) == 40'000'000);
    CHECK(charged_fj(c, OpKind::Copy, Mechanism::Baseline, 4096) == 3'600'000'000);
    CHECK(charged_fj(c, OpKind::Zero, Mechanism::Fpm, 8192) == 100'000'000);
    CHECK(charged_fj(c, OpKind::Copy, Mechanism::Baseline, 64) == 56'250'000);
    CHECK(charged_fj(c, OpKind::Copy, Mechanism::Fpm, 0) == 0);
    CHECK(error_of([&] { (void)charged_fj(c, OpKind::AndOr, Mechanism::Fpm, 4096); }) == ErrorKind::UnknownMechanism);
    DeviceConfig p = c;
    p.energy.mode = EnergyMode::PerCommand;
    CHECK(error_of([&] { (void)charged_fj(p, OpKind::Copy, Mechanism::IdaoAggressive, 4096); }) ==
          ErrorKind::UnknownMechanism);
}

TEST_CASE("per-command mode charges the command slice") {
    DeviceConfig c = desk_config();
    c.energy.mode = EnergyMode::PerCommand;
    c.energy.per_command = PerCommandEnergy{0.01, 0.02, 0.003, 0.004, 0.05};
    CommandCounters slice;
    slice.activate = 2;
    slice.overlapped_activate = 5;
    slice.precharge = 1;
    slice.read = 3;
    slice.write = 4;
    slice.transfer = 10;
    slice.multi_activate = 1;
    const double uj = 2 * 0.01 + 0.02 + 7 * 0.003 + 10 * 0.004 + 0.05;
    CHECK(charged_fj(c, OpKind::Copy, Mechanism::Fpm, 4096, slice) == uj_to_fj(uj));
}

TEST_CASE("ledger totals are exact sums") {
    const DeviceConfig c = desk_config();
    EnergyModel model(c);
    EnergyLedger ledger;
    Gen g(9);
    const auto& keys = EnergyTable::comparison_rows();
    for (int i = 0; i < 5000; ++i) {
        const auto& k = keys[g.below(keys.size())];
        model.charge(ledger, k.first, k.second, 1 + g.below(1 << 20), {});
    }
    std::int64_t sum = 0;
    for (std::size_t i = 0; i < EnergyLedger::kCategories; ++i) sum += ledger.category_fj(static_cast<OpKind>(i));
    CHECK(ledger.total_fj() == sum);
    double uj = 0;
    for (std::size_t i = 0; i < EnergyLedger::kCategories; ++i) uj += ledger.category_uj(static_cast<OpKind>(i));
    CHECK(ledger.total_uj() == doctest::Approx(uj).epsilon(1e-12));
}

TEST_CASE("canonical command counts") {
    const auto fpm = canonical_command_counts(OpKind::Copy, Mechanism::Fpm);
    CHECK(fpm.activate == 2);
    CHECK(fpm.precharge == 1);
    const auto psm = canonical_command_counts(OpKind::Copy, Mechanism::PsmInterBank);
    CHECK(psm.transfer == 64);
    CHECK(canonical_command_counts(OpKind::Copy, Mechanism::PsmIntraBank).transfer == 128);
    const auto base = canonical_command_counts(OpKind::AndOr, Mechanism::Baseline);
    CHECK(base.read + base.write == 192);
    CHECK(canonical_command_counts(OpKind::AndOr, Mechanism::IdaoAggressive).overlapped_activate == 4);
}

TEST_CASE("calibration fits the table within 25 percent") {
    const EnergyTable t = EnergyTable::reference();
    const CalibrationResult cal = calibrate_per_command(t);
    REQUIRE(cal.rows.size() == 9);
    const auto& k = cal.constants;
    for (double x : {k.E_ACT, k.E_PRE, k.E_COL_IO, k.E_TRANSFER, k.E_MULTI_ACT}) CHECK(x >= 0.0);
    for (const auto& r : cal.rows) {
        CHECK(r.fitted_uj == doctest::Approx(model_uj(r.counts, k)).epsilon(1e-12));
        CHECK(r.relative_residual == doctest::Approx((r.fitted_uj - r.target_uj) / r.target_uj).epsilon(1e-12));
        CHECK(std::abs(r.relative_residual) <= 0.25);
    }
    const double fpm = 2 * k.E_ACT + k.E_PRE;
    CHECK(std::abs(fpm - 0.04) / 0.04 <= 0.25);
    const double base = model_uj(canonical_command_counts(OpKind::Copy, Mechanism::Baseline), k);
    CHECK(std::abs(base / fpm - 74.4) / 74.4 <= 0.25);

    SUBCASE("the fit is a constrained optimum") {
        // KKT conditions of min sum(((Ax - t) / t)^2) subject to x >= 0.
        std::array<double, 5> grad{};
        for (const auto& r : cal.rows) {
            const double w = 2 * (r.fitted_uj - r.target_uj) / (r.target_uj * r.target_uj);
            grad[0] += w * static_cast<double>(r.counts.activate);
            grad[1] += w * static_cast<double>(r.counts.precharge);
            grad[2] += w * static_cast<double>(r.counts.read + r.counts.write);
            grad[3] += w * static_cast<double>(r.counts.transfer);
            grad[4] += w * static_cast<double>(r.counts.multi_activate);
        }
        const std::array<double, 5> x{k.E_ACT, k.E_PRE, k.E_COL_IO, k.E_TRANSFER, k.E_MULTI_ACT};
        for (std::size_t j = 0; j < 5; ++j) {
            if (x[j] > 0) CHECK(std::abs(grad[j]) < 1e-6);
            else CHECK(grad[j] > -1e-6);
        }
    }
}

TEST_CASE("calibration failures") {
    CHECK(error_of([] { (void)calibrate_per_command(std::vector<CalibrationRow>{}); }) == ErrorKind::CalibrationFailed);
    std::vector<CalibrationRow> no_transfer;
    for (const auto& key : EnergyTable::comparison_rows()) {
        if (key.second == Mechanism::PsmInterBank || key.second == Mechanism::PsmIntraBank) continue;
        no_transfer.push_back({key, canonical_command_counts(key.first, key.second),
                               EnergyTable::reference().at(key.first, key.second).absolute_uj});
    }
    CHECK(error_of([&] { (void)calibrate_per_command(no_transfer); }) == ErrorKind::CalibrationFailed);
    EnergyTable partial;
    partial.set(OpKind::Copy, Mechanism::Fpm, {0.04, 74.4, std::nullopt, 1, std::nullopt});
    CHECK(error_of([&] { (void)calibrate_per_command(partial); }) == ErrorKind::CalibrationFailed);
}

TEST_CASE("per-command model calibrates when no constants are given") {
    DeviceConfig c = desk_config();
    c.energy.mode = EnergyMode::PerCommand;
    const EnergyModel m(c);
    REQUIRE(m.calibration().has_value());
    CHECK(m.per_command().E_ACT == m.calibration()->constants.E_ACT);
    c.energy.mode = EnergyMode::TableDriven;
    CHECK_FALSE(EnergyModel(c).calibration().has_value());
}

TEST_CASE("measured FPM copy energy in both modes") {
    DeviceConfig c = desk_config();
    for (const auto mode : {EnergyMode::TableDriven, EnergyMode::PerCommand}) {
        c.energy.mode = mode;
        Engine e(c);
        reserved::initialize(e.dram());
        EnergyModel model(c);
        EnergyLedger ledger;
        const CommandCounters before = e.counters();
        e.begin_op();
        fpm_copy(e, {{0, 0, 0}, 0}, {{0, 0, 0}, 1});
        e.end_op();
        model.charge(ledger, OpKind::Copy, Mechanism::Fpm, 4096, e.counters() - before);
        if (mode == EnergyMode::TableDriven) CHECK(ledger.total_uj() == doctest::Approx(0.04).epsilon(1e-12));
        else CHECK(std::abs(ledger.total_uj() - 0.04) / 0.04 <= 0.25);
    }
}
