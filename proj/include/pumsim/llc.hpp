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
#include <optional>
#include <vector>

#include "pumsim/config.hpp"
#include "pumsim/dram_state.hpp"
#include "pumsim/engine.hpp"

namespace pumsim {

struct CacheLine {
    Addr addr = 0;  ///< line-aligned
    Bytes data;
    bool dirty = false;
    TrafficClass origin = TrafficClass::Other;  ///< class of the write that dirtied it
};

/// Set-associative, write-back, LRU last-level cache.
class Llc {
public:
    Llc(std::uint64_t capacity_bytes, std::uint32_t ways, std::uint32_t line_bytes);
    explicit Llc(const DeviceConfig& cfg) : Llc(cfg.llc_bytes, cfg.llc_ways, cfg.cacheline_bytes) {}

    /// Uncounted presence check; does not touch LRU state.
    [[nodiscard]] const CacheLine* probe(Addr line) const;
    /// Counted access: records a hit or miss and refreshes LRU on hit.
    CacheLine* lookup(Addr line);
    /// Inserts or overwrites `line`. Returns the evicted victim, if any.
    std::optional<CacheLine> insert(Addr line, Bytes data, bool dirty, TrafficClass origin);
    /// Drops the line; returns the dropped contents.
    std::optional<CacheLine> invalidate(Addr line);

    /// Cached lines overlapping [begin, end), ascending.
    [[nodiscard]] std::vector<Addr> lines_in(Addr begin, Addr end) const;
    /// Every dirty line, ascending by address.
    [[nodiscard]] std::vector<Addr> dirty_lines() const;

    [[nodiscard]] std::uint64_t hits() const { return hits_; }
    [[nodiscard]] std::uint64_t misses() const { return misses_; }
    [[nodiscard]] std::uint64_t size() const { return occupied_; }
    [[nodiscard]] std::uint32_t line_bytes() const { return line_bytes_; }
    [[nodiscard]] std::uint64_t capacity_lines() const { return sets_ * ways_; }

private:
    struct Way {
        CacheLine line;
        bool valid = false;
        std::uint64_t stamp = 0;
    };

    [[nodiscard]] std::uint64_t set_of(Addr line) const { return (line / line_bytes_) % sets_; }
    Way* find(Addr line);
    [[nodiscard]] const Way* find(Addr line) const;

    std::uint64_t sets_;
    std::uint32_t ways_;
    std::uint32_t line_bytes_;
    std::vector<Way> ways_storage_;
    std::uint64_t clock_ = 0;
    std::uint64_t hits_ = 0;
    std::uint64_t misses_ = 0;
    std::uint64_t occupied_ = 0;
};

}  // namespace pumsim
