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


#include "pumsim/workloads.hpp"

#include <random>
#include <string>

#include "pumsim/error.hpp"
#include "pumsim/rowclone.hpp"
#include "pumsim/timing.hpp"

namespace pumsim {

Forkbench gen_forkbench(const DeviceConfig& cfg, std::uint64_t array_bytes, std::uint64_t pages_updated,
                        std::uint64_t seed) {
    if (array_bytes == 0 || array_bytes % kPageBytes != 0) {
        fail(ErrorKind::InvalidWorkload, "array size must be a positive multiple of 4096 bytes");
    }
    const std::uint64_t pages = array_bytes / kPageBytes;
    if (pages_updated > pages) {
        fail(ErrorKind::InvalidWorkload, "cannot update " + std::to_string(pages_updated) + " of " +
                                             std::to_string(pages) + " pages");
    }
    PagePools pools(cfg);
    if (pools.free_pages() < pages + pages_updated) {
        fail(ErrorKind::InvalidWorkload, "device too small for the array and its copies");
    }

    Forkbench fb;
    std::mt19937_64 rng(seed);
    const std::uint32_t line = cfg.cacheline_bytes;
    const std::uint32_t words = line / 8;
    for (std::uint64_t p = 0; p < pages; ++p) fb.src_pages.push_back(pools.alloc_any().page);
    for (Addr page : fb.src_pages) {
        for (Addr l = page; l < page + kPageBytes; l += line) {
            fb.trace.push_back(make_write(l + 8 * (rng() % words), rng()));
        }
    }

    // Partial Fisher-Yates over the source pages.
    std::vector<Addr> order = fb.src_pages;
    for (std::uint64_t i = 0; i < pages_updated; ++i) {
        const std::uint64_t j = i + rng() % (pages - i);
        std::swap(order[i], order[j]);
        const Addr src = order[i];
        const auto alloc = pools.alloc_page_same_subarray(src);
        fb.dst_pages.push_back(alloc.page);
        fb.psm_bound_pages += alloc.psm_bound ? 1 : 0;
        fb.trace.push_back(make_isa({IsaKind::MemCopy, src, 0, alloc.page, kPageBytes, 0}));
        fb.trace.push_back(make_write(alloc.page + 8 * (rng() % (kPageBytes / 8)), rng()));
    }
    return fb;
}

const std::vector<BitmapQuery>& default_bitmap_queries() {
    static const std::vector<BitmapQuery> q = {
        {3, 0.29}, {9, 0.29}, {20, 0.31}, {45, 0.32}, {98, 0.34}, {118, 0.34}, {128, 0.34},
    };
    return q;
}

BitmapLayout bitmap_layout(const DeviceConfig& cfg, std::uint32_t bins, std::uint32_t rows_per_bitmap) {
    if (bins < 2) fail(ErrorKind::InvalidWorkload, "a range query needs at least two bins");
    if (rows_per_bitmap == 0 || rows_per_bitmap > cfg.subarrays_per_bank) {
        fail(ErrorKind::InvalidWorkload, "rows per bitmap must be between 1 and the subarray count");
    }
    if (bins + 1 > cfg.rows_per_subarray - reserved::kPerSubarray - 1) {
        fail(ErrorKind::InvalidWorkload, std::to_string(bins) + " bins do not fit in one subarray");
    }
    return {&cfg, rows_per_bitmap};
}

std::vector<std::pair<Addr, std::uint64_t>> BitmapLayout::runs(std::uint32_t j) const {
    std::vector<std::pair<Addr, std::uint64_t>> out;
    const std::uint64_t span = cfg->row_span();
    for (std::uint32_t s = 0; s < rows_per_bitmap; ++s) {
        const Addr a = address_of({{0, 0, 0}, s * cfg->rows_per_subarray + j}, 0, *cfg);
        if (!out.empty() && out.back().first + out.back().second == a) out.back().second += span;
        else out.emplace_back(a, span);
    }
    return out;
}

Trace bitmap_query_ops(const BitmapLayout& layout, std::uint32_t bins) {
    Trace t;
    const auto result = layout.runs(bins);
    for (std::uint32_t k = 1; k < bins; ++k) {
        const auto a = layout.runs(k == 1 ? 0 : bins);
        const auto b = layout.runs(k);
        for (std::size_t i = 0; i < result.size(); ++i) {
            t.push_back(make_isa({IsaKind::MemOr, a[i].first, b[i].first, result[i].first, result[i].second, 0}));
        }
    }
    return t;
}

Trace gen_bitmap(const DeviceConfig& cfg, std::uint32_t bins, std::uint32_t queries, std::uint32_t rows_per_bitmap) {
    const BitmapLayout layout = bitmap_layout(cfg, bins, rows_per_bitmap);
    const Trace one = bitmap_query_ops(layout, bins);
    Trace t;
    for (std::uint32_t q = 0; q < queries; ++q) t.insert(t.end(), one.begin(), one.end());
    return t;
}

double bitmap_speedup(double or_fraction, Nanoseconds baseline_or, Nanoseconds mechanism_or) {
    if (!(or_fraction > 0.0 && or_fraction < 1.0)) fail(ErrorKind::NumericDomain, "OR fraction must lie in (0, 1)");
    const Nanoseconds non_or = baseline_or * (1.0 - or_fraction) / or_fraction;
    return (non_or + baseline_or) / (non_or + mechanism_or);
}

std::vector<BitmapQueryResult> run_bitmap_queries(const DeviceConfig& cfg, const std::vector<BitmapQuery>& queries,
                                                  std::uint32_t rows_per_bitmap, ControllerMode mechanism,
                                                  std::uint64_t seed) {
    std::vector<BitmapQueryResult> out;
    for (const auto& q : queries) {
        const BitmapLayout layout = bitmap_layout(cfg, q.bins, rows_per_bitmap);
        const Trace ops = bitmap_query_ops(layout, q.bins);

        std::mt19937_64 rng(seed ^ q.bins);
        std::vector<Bytes> bitmaps(q.bins, Bytes(layout.bitmap_bytes()));
        Bytes expected(layout.bitmap_bytes(), 0);
        for (auto& bm : bitmaps) {
            for (auto& b : bm) b = static_cast<std::uint8_t>(rng());
            for (std::size_t i = 0; i < bm.size(); ++i) expected[i] |= bm[i];
        }

        std::size_t violations = 0;
        auto time_ors = [&](ControllerMode mode, bool& correct) {
            MemoryController mc(cfg, {mode});
            for (std::uint32_t j = 0; j < q.bins; ++j) {
                std::uint64_t off = 0;
                for (const auto& [addr, len] : layout.runs(j)) {
                    mc.poke(addr, std::span(bitmaps[j]).subspan(off, len));
                    off += len;
                }
            }
            Nanoseconds t = 0.0;
            for (const auto& op : ops) t += mc.exec_isa(op.isa).latency;
            Bytes got;
            for (const auto& [addr, len] : layout.runs(q.bins)) {
                const Bytes part = mc.coherent_read(addr, len);
                got.insert(got.end(), part.begin(), part.end());
            }
            correct = got == expected;
            violations += validate_schedule(mc.engine().log(), cfg).size();
            return t;
        };

        BitmapQueryResult r;
        r.bins = q.bins;
        r.or_fraction = q.or_fraction;
        bool base_ok = false;
        bool mech_ok = false;
        r.baseline_or_ns = time_ors(ControllerMode::Baseline, base_ok);
        r.mechanism_or_ns = mechanism == ControllerMode::Baseline ? r.baseline_or_ns : time_ors(mechanism, mech_ok);
        if (mechanism == ControllerMode::Baseline) mech_ok = base_ok;
        r.non_or_ns = r.baseline_or_ns * (1.0 - q.or_fraction) / q.or_fraction;
        r.speedup = bitmap_speedup(q.or_fraction, r.baseline_or_ns, r.mechanism_or_ns);
        r.amdahl_bound = 1.0 / (1.0 - q.or_fraction);
        r.result_correct = base_ok && mech_ok;
        r.timing_violations = violations;
        out.push_back(r);
    }
    return out;
}

}  // namespace pumsim
