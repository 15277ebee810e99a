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

#include <span>

#include "pumsim/config.hpp"

namespace pumsim {

enum class SenseMode { Precharged, DrivingHigh, DrivingLow };

struct CellState {
    bool bit = false;
    double voltage = 0.0;           ///< volts, in [0, vdd]
    Nanoseconds last_refresh = 0.0;
};

/// Bitline deviation from vdd/2 after the given cells share charge with a
/// precharged bitline:
///   (sum(V_i) * Cc + Cb * vdd/2) / (m * Cc + Cb) - vdd/2
/// Throws NumericDomain on empty input or non-finite / out-of-rail values.
double charge_share_deviation(std::span<const double> voltages, double cell_capacitance,
                              double bitline_capacitance, double vdd);

/// Closed form for m = 3 fresh cells, k of them charged.
double triple_deviation_closed_form(int charged, double cell_capacitance, double bitline_capacitance,
                                    double vdd);

/// Positive deviation drives the bitline to vdd, negative to 0. An exact
/// zero is MetastableSense.
SenseMode sense_amplify(double deviation);

/// Cell voltage `elapsed` ns after a full restore, drifting linearly toward
/// vdd/2 and reaching it at `retention_window`. Without decay, the rail.
double cell_voltage(bool bit, Nanoseconds elapsed, const DeviceConfig& cfg);

}  // namespace pumsim
