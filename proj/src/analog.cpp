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

#include "pumsim/analog.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "pumsim/error.hpp"

namespace pumsim {

double charge_share_deviation(std::span<const double> voltages, double cc, double cb, double vdd) {
    if (voltages.empty()) fail(ErrorKind::NumericDomain, "charge sharing needs at least one cell");
    if (!std::isfinite(cc) || !std::isfinite(cb) || !std::isfinite(vdd) || cc <= 0 || cb <= 0 || vdd <= 0) {
        fail(ErrorKind::NumericDomain, "capacitances and vdd must be finite and positive");
    }
    double charge = 0.0;
    for (double v : voltages) {
        if (!std::isfinite(v) || v < 0.0 || v > vdd) {
            fail(ErrorKind::NumericDomain, "cell voltage " + std::to_string(v) + " outside [0, vdd]");
        }
        charge += v;
    }
    const double m = static_cast<double>(voltages.size());
    const double half = vdd / 2.0;
    return (charge * cc + cb * half) / (m * cc + cb) - half;
}

double triple_deviation_closed_form(int charged, double cc, double cb, double vdd) {
    return (2.0 * charged - 3.0) * cc / (6.0 * cc + 2.0 * cb) * vdd;
}

SenseMode sense_amplify(double deviation) {
    if (std::isnan(deviation)) fail(ErrorKind::NumericDomain, "deviation is NaN");
    if (deviation > 0.0) return SenseMode::DrivingHigh;
    if (deviation < 0.0) return SenseMode::DrivingLow;
    fail(ErrorKind::MetastableSense, "bitline deviation is exactly zero");
}

double cell_voltage(bool bit, Nanoseconds elapsed, const DeviceConfig& cfg) {
    const double rail = bit ? cfg.vdd : 0.0;
    if (!cfg.decay_enabled || std::isinf(cfg.retention_window)) return rail;
    const double half = cfg.vdd / 2.0;
    if (elapsed >= cfg.retention_window) return half;
    const double frac = std::max(0.0, elapsed) / cfg.retention_window;
    return rail + (half - rail) * frac;
}

}  // namespace pumsim
