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


#include "pumsim/energy.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "pumsim/error.hpp"

namespace pumsim {

namespace {

constexpr int kConstants = 5;  // ACT, PRE, COL_IO, TRANSFER, MULTI_ACT

Eigen::Matrix<double, 1, kConstants> features(const CommandCounters& c) {
    Eigen::Matrix<double, 1, kConstants> f;
    f << static_cast<double>(c.activate), static_cast<double>(c.precharge), static_cast<double>(c.read + c.write),
        static_cast<double>(c.transfer), static_cast<double>(c.multi_activate);
    return f;
}

// Lawson-Hanson active-set NNLS.
Eigen::VectorXd nnls(const Eigen::MatrixXd& a, const Eigen::VectorXd& b) {
    const Eigen::Index n = a.cols();
    Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
    std::vector<bool> passive(static_cast<std::size_t>(n), false);
    const double tol = 1e-12 * std::max(1.0, a.norm() * b.norm());

    auto solve_passive = [&]() {
        std::vector<Eigen::Index> idx;
        for (Eigen::Index j = 0; j < n; ++j) {
            if (passive[static_cast<std::size_t>(j)]) idx.push_back(j);
        }
        Eigen::MatrixXd ap(a.rows(), static_cast<Eigen::Index>(idx.size()));
        for (std::size_t k = 0; k < idx.size(); ++k) ap.col(static_cast<Eigen::Index>(k)) = a.col(idx[k]);
        const Eigen::VectorXd sp = ap.colPivHouseholderQr().solve(b);
        Eigen::VectorXd s = Eigen::VectorXd::Zero(n);
        for (std::size_t k = 0; k < idx.size(); ++k) s(idx[k]) = sp(static_cast<Eigen::Index>(k));
        return s;
    };

    for (int outer = 0; outer < 100 * kConstants; ++outer) {
        const Eigen::VectorXd w = a.transpose() * (b - a * x);
        Eigen::Index best = -1;
        for (Eigen::Index j = 0; j < n; ++j) {
            if (!passive[static_cast<std::size_t>(j)] && w(j) > tol && (best < 0 || w(j) > w(best))) best = j;
        }
        if (best < 0) break;
        passive[static_cast<std::size_t>(best)] = true;
        for (int inner = 0; inner < 100 * kConstants; ++inner) {
            const Eigen::VectorXd s = solve_passive();
            bool feasible = true;
            double alpha = 1.0;
            for (Eigen::Index j = 0; j < n; ++j) {
                if (passive[static_cast<std::size_t>(j)] && s(j) <= 0) {
                    feasible = false;
                    alpha = std::min(alpha, x(j) / (x(j) - s(j)));
                }
            }
            if (feasible) {
                x = s;
                break;
            }
            x += alpha * (s - x);
            for (Eigen::Index j = 0; j < n; ++j) {
                if (passive[static_cast<std::size_t>(j)] && x(j) <= 1e-15) {
                    passive[static_cast<std::size_t>(j)] = false;
                    x(j) = 0;
                }
            }
        }
    }
    return x;
}

}  // namespace

std::int64_t EnergyLedger::total_fj() const { return std::accumulate(fj_.begin(), fj_.end(), std::int64_t{0}); }

std::int64_t command_energy_fj(const CommandCounters& c, const PerCommandEnergy& e) {
    auto term = [](std::uint64_t n, double uj) { return static_cast<std::int64_t>(n) * uj_to_fj(uj); };
    return term(c.activate, e.E_ACT) + term(c.precharge, e.E_PRE) + term(c.read + c.write, e.E_COL_IO) +
           term(c.transfer, e.E_TRANSFER) + term(c.multi_activate, e.E_MULTI_ACT);
}

double CalibrationResult::max_abs_relative_residual() const {
    double m = 0.0;
    for (const auto& r : rows) m = std::max(m, std::abs(r.relative_residual));
    return m;
}

CommandCounters canonical_command_counts(OpKind op, Mechanism mech) {
    constexpr std::uint64_t kLines = 64;
    CommandCounters c;
    switch (mech) {
        case Mechanism::Baseline: {
            const std::uint64_t streams = op == OpKind::Copy ? 2 : op == OpKind::AndOr ? 3 : 1;
            c.activate = streams;
            c.precharge = streams;
            if (op == OpKind::Write || op == OpKind::Zero) c.write = kLines;
            else if (op == OpKind::Read) c.read = kLines;
            else if (op == OpKind::Copy) c.read = c.write = kLines;
            else {
                c.read = 2 * kLines;
                c.write = kLines;
            }
            break;
        }
        case Mechanism::Fpm:
            c.activate = 2;
            c.precharge = 1;
            break;
        case Mechanism::PsmInterBank:
            c.activate = 2;
            c.precharge = 2;
            c.transfer = kLines;
            break;
        case Mechanism::PsmIntraBank:
            c.activate = 4;
            c.precharge = 4;
            c.transfer = 2 * kLines;
            break;
        case Mechanism::IdaoConservative:
            c.activate = 7;
            c.precharge = 4;
            c.multi_activate = 1;
            break;
        case Mechanism::IdaoAggressive:
            c.activate = 3;
            c.overlapped_activate = 4;
            c.precharge = 4;
            c.multi_activate = 1;
            break;
    }
    return c;
}

CalibrationResult calibrate_per_command(std::vector<CalibrationRow> rows) {
    const auto m = static_cast<Eigen::Index>(rows.size());
    Eigen::MatrixXd a(m, kConstants);
    Eigen::VectorXd b(m);
    for (Eigen::Index i = 0; i < m; ++i) {
        const auto& r = rows[static_cast<std::size_t>(i)];
        if (!(r.target_uj > 0) || !std::isfinite(r.target_uj)) {
            fail(ErrorKind::CalibrationFailed, "calibration targets must be positive and finite");
        }
        a.row(i) = features(r.counts) / r.target_uj;
        b(i) = 1.0;
    }
    if (m < kConstants || Eigen::FullPivLU<Eigen::MatrixXd>(a).rank() < kConstants) {
        fail(ErrorKind::CalibrationFailed, "command counts do not determine all " +
                                               std::to_string(kConstants) + " per-command energies");
    }
    const Eigen::VectorXd x = nnls(a, b);
    CalibrationResult out;
    out.constants = {x(0), x(1), x(2), x(3), x(4)};
    for (auto& r : rows) {
        r.fitted_uj = (features(r.counts) * x)(0);
        r.relative_residual = (r.fitted_uj - r.target_uj) / r.target_uj;
    }
    out.rows = std::move(rows);
    return out;
}

CalibrationResult calibrate_per_command(const EnergyTable& table) {
    std::vector<CalibrationRow> rows;
    for (const auto& key : EnergyTable::comparison_rows()) {
        const auto* entry = table.find(key.first, key.second);
        if (!entry) {
            fail(ErrorKind::CalibrationFailed, "energy table lacks (" + std::string(to_string(key.first)) + ", " +
                                                   std::string(to_string(key.second)) + ")");
        }
        rows.push_back({key, canonical_command_counts(key.first, key.second), entry->absolute_uj, 0.0, 0.0});
    }
    return calibrate_per_command(std::move(rows));
}

EnergyModel::EnergyModel(const DeviceConfig& cfg) : mode_(cfg.energy.mode), table_(cfg.energy.table) {
    if (cfg.energy.per_command) {
        per_command_ = *cfg.energy.per_command;
    } else if (mode_ == EnergyMode::PerCommand) {
        calibration_ = calibrate_per_command(table_);
        per_command_ = calibration_->constants;
    }
}

std::int64_t EnergyModel::table_fj(OpKind op, Mechanism mech, std::uint64_t bytes) const {
    const std::int64_t per_entry = uj_to_fj(table_.at(op, mech).absolute_uj);
    constexpr auto kEntry = static_cast<std::uint64_t>(EnergyTable::kBytesPerEntry);
    const auto whole = static_cast<std::int64_t>(bytes / kEntry);
    const auto rest = static_cast<std::int64_t>(bytes % kEntry);
    return per_entry * whole + (per_entry * rest + static_cast<std::int64_t>(kEntry) / 2) / static_cast<std::int64_t>(kEntry);
}

void EnergyModel::charge(EnergyLedger& ledger, OpKind op, Mechanism mech, std::uint64_t bytes,
                         const CommandCounters& slice) const {
    if (mode_ == EnergyMode::TableDriven) {
        ledger.add_fj(op, table_fj(op, mech, bytes));
        return;
    }
    (void)table_.at(op, mech);
    ledger.add_fj(op, command_energy_fj(slice, per_command_));
}

}  // namespace pumsim
