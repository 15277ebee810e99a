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
#include <vector>

#include "pumsim/config.hpp"
#include "pumsim/memctrl.hpp"
#include "pumsim/trace.hpp"

namespace pumsim {

struct Forkbench {
    Trace trace;
    std::vector<Addr> src_pages;
    std::vector<Addr> dst_pages;
    std::uint64_t psm_bound_pages = 0;  ///< copies whose destination left the source subarray
};

/// Parent fills an S-byte array (one random word per cacheline), then the
/// child updates N distinct random pages: a 4 KiB copy-on-write copy into a
/// page from the source's subarray pool, followed by one write.
Forkbench gen_forkbench(const DeviceConfig& cfg, std::uint64_t array_bytes, std::uint64_t pages_updated,
                        std::uint64_t seed);

struct BitmapQuery {
    std::uint32_t bins = 2;
    double or_fraction = 0.31;  ///< share of baseline query time spent in OR
};

/// Range queries over 3..128 bins with their measured OR-time shares.
const std::vector<BitmapQuery>& default_bitmap_queries();

/// Bitmap j occupies local row j of subarrays 0..rows_per_bitmap-1 of bank
/// 0; the running result lives at row `bins`.
struct BitmapLayout {
    const DeviceConfig* cfg = nullptr;
    std::uint32_t rows_per_bitmap = 1;

    /// Contiguous (address, size) runs covering bitmap j.
    [[nodiscard]] std::vector<std::pair<Addr, std::uint64_t>> runs(std::uint32_t j) const;
    [[nodiscard]] std::uint64_t bitmap_bytes() const { return std::uint64_t{rows_per_bitmap} * cfg->row_span(); }
};

BitmapLayout bitmap_layout(const DeviceConfig& cfg, std::uint32_t bins, std::uint32_t rows_per_bitmap);

/// The (bins - 1) pairwise MEMORs of one query.
Trace bitmap_query_ops(const BitmapLayout& layout, std::uint32_t bins);
/// `queries` queries over `bins` bins each.
Trace gen_bitmap(const DeviceConfig& cfg, std::uint32_t bins, std::uint32_t queries, std::uint32_t rows_per_bitmap);

struct BitmapQueryResult {
    std::uint32_t bins = 0;
    double or_fraction = 0.0;
    Nanoseconds baseline_or_ns = 0.0;
    Nanoseconds mechanism_or_ns = 0.0;
    Nanoseconds non_or_ns = 0.0;  ///< baseline_or_ns * (1 - f) / f
    double speedup = 1.0;
    double amdahl_bound = 1.0;  ///< 1 / (1 - f)
    bool result_correct = false;
    std::size_t timing_violations = 0;
};

/// Runs each query on fresh baseline and mechanism controllers over
/// seeded random bitmaps and checks the result against a bitwise OR.
std::vector<BitmapQueryResult> run_bitmap_queries(const DeviceConfig& cfg, const std::vector<BitmapQuery>& queries,
                                                  std::uint32_t rows_per_bitmap, ControllerMode mechanism,
                                                  std::uint64_t seed = 1);

/// (T_non + T_base) / (T_non + T_mech) with T_non = T_base (1 - f) / f.
double bitmap_speedup(double or_fraction, Nanoseconds baseline_or, Nanoseconds mechanism_or);

}  // namespace pumsim
