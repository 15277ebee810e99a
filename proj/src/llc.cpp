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


#include "pumsim/llc.hpp"

#include <algorithm>
#include <utility>

#include "pumsim/error.hpp"

namespace pumsim {

Llc::Llc(std::uint64_t capacity_bytes, std::uint32_t ways, std::uint32_t line_bytes)
    : sets_(0), ways_(ways), line_bytes_(line_bytes) {
    if (ways == 0 || line_bytes == 0 || capacity_bytes % (std::uint64_t{ways} * line_bytes) != 0 ||
        capacity_bytes == 0) {
        fail(ErrorKind::InvalidConfig, "LLC capacity must be a positive multiple of ways * line size");
    }
    sets_ = capacity_bytes / (std::uint64_t{ways} * line_bytes);
    ways_storage_.resize(sets_ * ways_);
}

Llc::Way* Llc::find(Addr line) { return const_cast<Way*>(std::as_const(*this).find(line)); }

const Llc::Way* Llc::find(Addr line) const {
    const Way* set = &ways_storage_[set_of(line) * ways_];
    for (std::uint32_t w = 0; w < ways_; ++w) {
        if (set[w].valid && set[w].line.addr == line) return &set[w];
    }
    return nullptr;
}

const CacheLine* Llc::probe(Addr line) const {
    const Way* w = find(line);
    return w ? &w->line : nullptr;
}

CacheLine* Llc::lookup(Addr line) {
    Way* w = find(line);
    if (!w) {
        ++misses_;
        return nullptr;
    }
    ++hits_;
    w->stamp = ++clock_;
    return &w->line;
}

std::optional<CacheLine> Llc::insert(Addr line, Bytes data, bool dirty, TrafficClass origin) {
    if (Way* w = find(line)) {
        w->line.data = std::move(data);
        w->line.dirty = dirty;
        w->line.origin = origin;
        w->stamp = ++clock_;
        return std::nullopt;
    }
    Way* set = &ways_storage_[set_of(line) * ways_];
    Way* victim = &set[0];
    for (std::uint32_t w = 0; w < ways_; ++w) {
        if (!set[w].valid) {
            victim = &set[w];
            break;
        }
        if (set[w].stamp < victim->stamp) victim = &set[w];
    }
    std::optional<CacheLine> evicted;
    if (victim->valid) evicted = std::move(victim->line);
    else ++occupied_;
    victim->line = CacheLine{line, std::move(data), dirty, origin};
    victim->valid = true;
    victim->stamp = ++clock_;
    return evicted;
}

std::optional<CacheLine> Llc::invalidate(Addr line) {
    Way* w = find(line);
    if (!w) return std::nullopt;
    w->valid = false;
    --occupied_;
    return std::move(w->line);
}

std::vector<Addr> Llc::lines_in(Addr begin, Addr end) const {
    std::vector<Addr> out;
    if (end <= begin) return out;
    const Addr first = begin / line_bytes_ * line_bytes_;
    if ((end - first) / line_bytes_ <= capacity_lines()) {
        for (Addr a = first; a < end; a += line_bytes_) {
            if (find(a)) out.push_back(a);
        }
        return out;
    }
    for (const auto& w : ways_storage_) {
        if (w.valid && w.line.addr + line_bytes_ > begin && w.line.addr < end) out.push_back(w.line.addr);
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<Addr> Llc::dirty_lines() const {
    std::vector<Addr> out;
    for (const auto& w : ways_storage_) {
        if (w.valid && w.line.dirty) out.push_back(w.line.addr);
    }
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace pumsim
