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


#include "pumsim/memctrl.hpp"

#include <algorithm>
#include <unordered_set>

#include "pumsim/error.hpp"

namespace pumsim {

std::string_view to_string(ControllerMode mode) {
    switch (mode) {
        case ControllerMode::Baseline: return "baseline";
        case ControllerMode::RowClone: return "rowclone";
        case ControllerMode::RowCloneZi: return "rowclone-zi";
        case ControllerMode::Idao: return "idao";
    }
    return "?";
}

ControllerMode parse_controller_mode(std::string_view name) {
    for (auto m : {ControllerMode::Baseline, ControllerMode::RowClone, ControllerMode::RowCloneZi, ControllerMode::Idao}) {
        if (name == to_string(m)) return m;
    }
    fail(ErrorKind::UnknownMechanism, "unknown mechanism '" + std::string(name) + "'");
}

std::string_view to_string(IsaKind kind) {
    switch (kind) {
        case IsaKind::MemCopy: return "memcopy";
        case IsaKind::MemInit: return "meminit";
        case IsaKind::MemAnd: return "memand";
        case IsaKind::MemOr: return "memor";
    }
    return "?";
}

std::uint64_t ExecutionPlan::accelerated_bytes() const {
    std::uint64_t n = 0;
    for (const auto* v : {&fpm_portions, &psm_portions, &idao_portions}) {
        for (const auto& r : *v) n += r.length;
    }
    return n;
}

namespace {

bool overlaps(Addr a, Addr b, std::uint64_t size) { return a < b + size && b < a + size; }

std::vector<RowAddress> chunk_rows(Addr aligned, const DeviceConfig& cfg) {
    if (cfg.interleave == Interleave::Row) return {row_of(decode_address(aligned, cfg), cfg)};
    std::vector<RowAddress> rows;
    rows.reserve(cfg.channels);
    for (std::uint32_t c = 0; c < cfg.channels; ++c) {
        rows.push_back(row_of(decode_address(aligned + std::uint64_t{c} * cfg.cacheline_bytes, cfg), cfg));
    }
    return rows;
}

class Splitter {
public:
    Splitter(const IsaOp& op, const DeviceConfig& cfg, SplitOptions opt, ExecutionPlan& plan)
        : op_(op), cfg_(cfg), opt_(opt), plan_(plan) {}

    void run() {
        const std::uint64_t size = op_.size;
        if (size == 0) return;
        if (!in_dram_allowed()) {
            add(plan_.cpu_remainder, 0, size);
            return;
        }
        const std::uint64_t span = cfg_.row_span();
        const std::uint64_t line = cfg_.cacheline_bytes;
        const bool rows_ok = congruent(span);
        const bool lines_ok = op_.kind == IsaKind::MemCopy ? congruent(line)
                              : op_.kind == IsaKind::MemInit ? op_.val == 0
                                                             : false;
        std::uint64_t o = 0;
        while (o < size) {
            const Addr d = op_.dst + o;
            if (rows_ok && d % span == 0 && o + span <= size) {
                if (!try_row_chunk(o)) {
                    for (std::uint64_t l = 0; l < span; l += line) line_or_cpu(o + l, line, lines_ok);
                }
                o += span;
            } else if (d % line == 0 && o + line <= size) {
                line_or_cpu(o, line, lines_ok);
                o += line;
            } else {
                const std::uint64_t len = std::min(size - o, line - d % line);
                add(plan_.cpu_remainder, o, len);
                o += len;
            }
        }
    }

private:
    bool in_dram_allowed() const {
        switch (op_.kind) {
            case IsaKind::MemCopy: return opt_.rowclone && !overlaps(op_.src1, op_.dst, op_.size);
            case IsaKind::MemInit: return opt_.rowclone;
            case IsaKind::MemAnd:
            case IsaKind::MemOr:
                for (Addr s : {op_.src1, op_.src2}) {
                    if (s != op_.dst && overlaps(s, op_.dst, op_.size)) return false;
                }
                return opt_.idao;
        }
        return false;
    }

    bool congruent(std::uint64_t unit) const {
        const std::uint64_t d = op_.dst % unit;
        if (op_.source_count() >= 1 && op_.src1 % unit != d) return false;
        if (op_.source_count() >= 2 && op_.src2 % unit != d) return false;
        return true;
    }

    static void add(std::vector<ByteRange>& v, std::uint64_t off, std::uint64_t len) {
        if (!v.empty() && v.back().offset + v.back().length == off) v.back().length += len;
        else v.push_back({off, len});
    }

    bool any_reserved(const std::vector<RowAddress>& rows) const {
        return std::any_of(rows.begin(), rows.end(), [&](const RowAddress& r) { return reserved::is_reserved(r, cfg_); });
    }

    bool try_row_chunk(std::uint64_t o) {
        const auto dsts = chunk_rows(op_.dst + o, cfg_);
        if (any_reserved(dsts)) return false;
        std::vector<RowTask> tasks;
        bool all_fpm = true;
        switch (op_.kind) {
            case IsaKind::MemCopy: {
                const auto srcs = chunk_rows(op_.src1 + o, cfg_);
                for (std::size_t i = 0; i < dsts.size(); ++i) {
                    RowTask t;
                    t.dst = dsts[i];
                    t.src_a = srcs[i];
                    try {
                        t.mechanism = classify_copy(srcs[i], dsts[i], cfg_);
                    } catch (const SimError&) {
                        return false;
                    }
                    all_fpm = all_fpm && t.mechanism == Mechanism::Fpm;
                    tasks.push_back(t);
                }
                break;
            }
            case IsaKind::MemInit:
                for (const auto& d : dsts) {
                    RowTask t;
                    t.dst = d;
                    if (op_.val == 0) {
                        t.zero = true;
                        t.mechanism = Mechanism::Fpm;
                    } else {
                        t.staged = true;
                        t.src_a = staging_for(d);
                        try {
                            t.mechanism = classify_copy(t.src_a, d, cfg_);
                        } catch (const SimError&) {
                            return false;
                        }
                    }
                    all_fpm = all_fpm && t.mechanism == Mechanism::Fpm;
                    tasks.push_back(t);
                }
                break;
            case IsaKind::MemAnd:
            case IsaKind::MemOr: {
                const auto as = chunk_rows(op_.src1 + o, cfg_);
                const auto bs = chunk_rows(op_.src2 + o, cfg_);
                const Mechanism mech = cfg_.fpm_latency_mode == FpmLatencyMode::Aggressive
                                           ? Mechanism::IdaoAggressive
                                           : Mechanism::IdaoConservative;
                for (std::size_t i = 0; i < dsts.size(); ++i) {
                    if (!plan_bitwise(as[i], bs[i], dsts[i], cfg_).profitable()) {
                        plan_.fallback_rows += dsts.size();
                        return false;
                    }
                    tasks.push_back({mech, dsts[i], as[i], bs[i], false, false});
                }
                plan_.row_tasks.insert(plan_.row_tasks.end(), tasks.begin(), tasks.end());
                add(plan_.idao_portions, o, cfg_.row_span());
                return true;
            }
        }
        plan_.row_tasks.insert(plan_.row_tasks.end(), tasks.begin(), tasks.end());
        add(all_fpm ? plan_.fpm_portions : plan_.psm_portions, o, cfg_.row_span());
        return true;
    }

    RowAddress staging_for(const RowAddress& dst) {
        const auto key = std::make_pair(dst.bank.channel, dst.bank.rank);
        auto it = staging_.find(key);
        if (it == staging_.end()) {
            it = staging_.emplace(key, reserved::tmp_row_for(dst.bank, cfg_)).first;
            plan_.staging_rows.push_back(it->second);
        }
        return it->second;
    }

    void line_or_cpu(std::uint64_t o, std::uint64_t len, bool lines_ok) {
        if (!(lines_ok && try_line(o))) add(plan_.cpu_remainder, o, len);
    }

    bool try_line(std::uint64_t o) {
        const Location dl = decode_address(op_.dst + o, cfg_);
        const RowAddress dst = row_of(dl, cfg_);
        if (reserved::is_reserved(dst, cfg_)) return false;
        RowAddress src;
        std::uint32_t src_col = 0;
        bool zero = false;
        if (op_.kind == IsaKind::MemCopy) {
            const Location sl = decode_address(op_.src1 + o, cfg_);
            src = row_of(sl, cfg_);
            src_col = sl.column;
        } else {
            if (cfg_.banks_per_chip < 2) return false;
            const BankId host{dst.bank.channel, dst.bank.rank, (dst.bank.bank + 1) % cfg_.banks_per_chip};
            src = reserved::zero_row(host, 0, cfg_);
            src_col = dl.column;
            zero = true;
        }
        if (src.bank == dst.bank || !src.bank.same_rank(dst.bank)) return false;
        const auto key = std::make_pair(src, dst);
        auto it = line_index_.find(key);
        if (it == line_index_.end()) {
            it = line_index_.emplace(key, plan_.line_tasks.size()).first;
            plan_.line_tasks.push_back({src, dst, {}, zero});
        }
        plan_.line_tasks[it->second].columns.emplace_back(src_col, dl.column);
        add(plan_.psm_portions, o, cfg_.cacheline_bytes);
        return true;
    }

    const IsaOp& op_;
    const DeviceConfig& cfg_;
    SplitOptions opt_;
    ExecutionPlan& plan_;
    std::map<std::pair<RowAddress, RowAddress>, std::size_t> line_index_;
    std::map<std::pair<std::uint32_t, std::uint32_t>, RowAddress> staging_;
};

std::vector<Addr> lines_covering(Addr begin, std::uint64_t len, std::uint32_t line) {
    std::vector<Addr> out;
    if (len == 0) return out;
    for (Addr a = begin / line * line; a < begin + len; a += line) out.push_back(a);
    return out;
}

}  // namespace

ExecutionPlan split_region(const IsaOp& op, const DeviceConfig& cfg, SplitOptions options) {
    ExecutionPlan plan;
    plan.op = op;
    Splitter(op, cfg, options, plan).run();
    return plan;
}

std::optional<std::string> verify_partition(const ExecutionPlan& plan) {
    std::vector<ByteRange> all;
    for (const auto* v : {&plan.fpm_portions, &plan.psm_portions, &plan.idao_portions, &plan.cpu_remainder}) {
        for (const auto& r : *v) {
            if (r.length == 0) return "empty portion at offset " + std::to_string(r.offset);
            all.push_back(r);
        }
    }
    std::sort(all.begin(), all.end(), [](const ByteRange& a, const ByteRange& b) { return a.offset < b.offset; });
    std::uint64_t next = 0;
    for (const auto& r : all) {
        if (r.offset < next) return "portions overlap at offset " + std::to_string(r.offset);
        if (r.offset > next) return "gap at offset " + std::to_string(next);
        next = r.offset + r.length;
    }
    if (next != plan.op.size) return "portions cover " + std::to_string(next) + " of " + std::to_string(plan.op.size) + " bytes";
    return std::nullopt;
}

// ---------------------------------------------------------------------------

PagePools::PagePools(const DeviceConfig& cfg) : cfg_(cfg) {
    const std::uint64_t line = cfg.cacheline_bytes;
    for (Addr page = 0; page + kPageBytes <= cfg.capacity(); page += kPageBytes) {
        bool user = true;
        std::optional<RowAddress> last;
        for (Addr a = page; a < page + kPageBytes && user; a += line) {
            const RowAddress r = row_of(decode_address(a, cfg), cfg);
            if (last && *last == r) continue;
            last = r;
            user = !reserved::is_reserved(r, cfg);
        }
        if (!user) continue;
        pools_[pool_key(page)].insert(page);
        ++free_;
    }
}

std::uint64_t PagePools::pool_key(Addr page) const { return subarray_key(decode_address(page, cfg_), cfg_); }

std::size_t PagePools::pool_size(std::uint64_t key) const {
    auto it = pools_.find(key);
    return it == pools_.end() ? 0 : it->second.size();
}

bool PagePools::contains(Addr page) const {
    auto it = pools_.find(pool_key(page));
    return it != pools_.end() && it->second.contains(page);
}

PagePools::Allocation PagePools::alloc_any() {
    std::set<Addr>* best = nullptr;
    for (auto& [key, pool] : pools_) {
        if (!pool.empty() && (!best || *pool.begin() < *best->begin())) best = &pool;
    }
    if (!best) fail(ErrorKind::NoPoolPage, "no free pages left");
    const Addr page = *best->begin();
    best->erase(best->begin());
    --free_;
    return {page, false};
}

PagePools::Allocation PagePools::alloc_page_same_subarray(Addr src_page) {
    auto it = pools_.find(pool_key(src_page));
    if (it != pools_.end() && !it->second.empty()) {
        const Addr page = *it->second.begin();
        it->second.erase(it->second.begin());
        --free_;
        return {page, false};
    }
    Allocation a = alloc_any();
    a.psm_bound = true;
    return a;
}

bool PagePools::take(Addr page) {
    auto it = pools_.find(pool_key(page));
    if (it == pools_.end() || it->second.erase(page) == 0) return false;
    --free_;
    return true;
}

void PagePools::release(Addr page) {
    if (pools_[pool_key(page)].insert(page).second) ++free_;
}

// ---------------------------------------------------------------------------

MemoryController::MemoryController(const DeviceConfig& cfg, ControllerOptions options, EngineOptions engine)
    : cfg_(cfg), options_(options), engine_(cfg, engine), llc_(cfg), energy_model_(cfg) {
    reserved::check_remaps(cfg_);
    reserved::initialize(engine_.dram());
}

template <typename F>
void MemoryController::charged(OpKind op, Mechanism mech, std::uint64_t bytes, F&& body) {
    const CommandCounters before = engine_.counters();
    const Nanoseconds start = engine_.cursor();
    const std::int64_t fj = ledger_.total_fj();
    ++charge_depth_;
    try {
        body();
    } catch (...) {
        --charge_depth_;
        throw;
    }
    --charge_depth_;
    if (charge_depth_ != 0) return;
    energy_model_.charge(ledger_, op, mech, bytes, engine_.counters() - before);
    auto& m = stats_.by_mechanism[std::string(to_string(op)) + "/" + std::string(to_string(mech))];
    ++m.portions;
    m.bytes += bytes;
    m.latency += engine_.cursor() - start;
    m.energy_fj += ledger_.total_fj() - fj;
}

void MemoryController::check_page(Addr page) {
    if (!page_table_ || page_table_->contains(page)) return;
    ++stats_.page_faults;
    if (fault_handler_ && fault_handler_(page)) {
        page_table_->insert(page);
        return;
    }
    fail(ErrorKind::PageFault, "unmapped page " + std::to_string(page));
}

void MemoryController::check_access(Addr addr, std::uint64_t size, bool is_write) {
    if (size == 0) return;
    if (addr >= cfg_.capacity() || size > cfg_.capacity() - addr) {
        fail(ErrorKind::AddressRange, "access [" + std::to_string(addr) + ", +" + std::to_string(size) + ") beyond capacity");
    }
    for (Addr p = addr / kPageBytes * kPageBytes; p < addr + size; p += kPageBytes) check_page(p);
    if (!is_write) return;
    std::optional<RowAddress> last;
    for (Addr a : lines_covering(addr, size, cfg_.cacheline_bytes)) {
        const RowAddress r = row_of(decode_address(a, cfg_), cfg_);
        if (last && *last == r) continue;
        last = r;
        if (reserved::is_reserved(r, cfg_)) fail(ErrorKind::ReservedRowTarget, "write into reserved row " + to_string(r));
    }
}

void MemoryController::check_blocked(Addr addr) const {
    if (blocked_ && addr >= blocked_->first && addr < blocked_->second) {
        fail(ErrorKind::Blocked, "address " + std::to_string(addr) + " is the destination of an operation in flight");
    }
}

std::vector<Bytes> MemoryController::dram_read_lines(std::span<const Addr> lines) {
    std::vector<Bytes> out(lines.size());
    std::vector<std::pair<RowAddress, std::vector<std::size_t>>> groups;
    std::map<RowAddress, std::size_t> index;
    std::vector<std::uint32_t> column_of(lines.size());
    for (std::size_t i = 0; i < lines.size(); ++i) {
        const Location loc = decode_address(lines[i], cfg_);
        const RowAddress r = row_of(loc, cfg_);
        column_of[i] = loc.column;
        auto [it, inserted] = index.try_emplace(r, groups.size());
        if (inserted) groups.push_back({r, {}});
        groups[it->second].second.push_back(i);
    }
    for (const auto& [row, members] : groups) {
        std::vector<std::uint32_t> cols;
        for (auto i : members) cols.push_back(column_of[i]);
        auto data = engine_.read_stream(row, cols);
        for (std::size_t k = 0; k < members.size(); ++k) out[members[k]] = std::move(data[k]);
    }
    return out;
}

void MemoryController::dram_write_lines(std::span<const Addr> lines, std::span<const Bytes> data) {
    std::vector<std::pair<RowAddress, std::vector<std::size_t>>> groups;
    std::map<RowAddress, std::size_t> index;
    std::vector<std::uint32_t> column_of(lines.size());
    for (std::size_t i = 0; i < lines.size(); ++i) {
        const Location loc = decode_address(lines[i], cfg_);
        const RowAddress r = row_of(loc, cfg_);
        column_of[i] = loc.column;
        auto [it, inserted] = index.try_emplace(r, groups.size());
        if (inserted) groups.push_back({r, {}});
        groups[it->second].second.push_back(i);
    }
    for (const auto& [row, members] : groups) {
        std::vector<std::uint32_t> cols;
        std::vector<Bytes> payload;
        for (auto i : members) {
            cols.push_back(column_of[i]);
            payload.push_back(data[i]);
        }
        engine_.write_stream(row, cols, payload);
    }
}

void MemoryController::writeback_line(Addr line, const CacheLine& data, TrafficClass cls) {
    const TrafficClass saved = engine_.traffic_class();
    engine_.set_traffic_class(cls);
    charged(OpKind::Write, Mechanism::Baseline, cfg_.cacheline_bytes, [&] {
        const Addr lines[] = {line};
        dram_write_lines(lines, std::span(&data.data, 1));
    });
    engine_.set_traffic_class(saved);
    ++stats_.writebacks;
}

void MemoryController::handle_eviction(std::optional<CacheLine> victim) {
    if (victim && victim->dirty) writeback_line(victim->addr, *victim, victim->origin);
}

void MemoryController::coherence_prepare(ExecutionPlan& plan) {
    const IsaOp& op = plan.op;
    std::vector<ByteRange> accel;
    for (const auto* v : {&plan.fpm_portions, &plan.psm_portions, &plan.idao_portions}) {
        accel.insert(accel.end(), v->begin(), v->end());
    }
    std::sort(accel.begin(), accel.end(), [](const ByteRange& a, const ByteRange& b) { return a.offset < b.offset; });

    std::vector<Addr> wb_lines;
    std::vector<Bytes> wb_data;
    const bool in_cache = op.kind == IsaKind::MemCopy && options_.in_cache_copy;
    std::vector<Addr> sources;
    if (op.source_count() >= 1) sources.push_back(op.src1);
    if (op.source_count() >= 2 && op.src2 != op.src1) sources.push_back(op.src2);
    for (Addr base : sources) {
        for (const auto& r : accel) {
            for (Addr line : llc_.lines_in(base + r.offset, base + r.offset + r.length)) {
                const CacheLine* cl = llc_.probe(line);
                if (!cl->dirty) continue;
                if (in_cache) {
                    plan.coherence_actions.push_back({CoherenceKind::InCacheCopy, line, op.dst + (line - base)});
                } else {
                    plan.coherence_actions.push_back({CoherenceKind::Writeback, line, 0});
                    wb_lines.push_back(line);
                    wb_data.push_back(cl->data);
                }
            }
        }
    }
    if (!wb_lines.empty()) {
        charged(OpKind::Write, Mechanism::Baseline, wb_lines.size() * cfg_.cacheline_bytes,
                [&] { dram_write_lines(wb_lines, wb_data); });
        for (Addr line : wb_lines) {
            CacheLine* cl = const_cast<CacheLine*>(llc_.probe(line));
            cl->dirty = false;
        }
        stats_.writebacks += wb_lines.size();
    }
    for (const auto& r : accel) {
        for (Addr line : llc_.lines_in(op.dst + r.offset, op.dst + r.offset + r.length)) {
            plan.coherence_actions.push_back({CoherenceKind::Invalidate, line, 0});
        }
    }
    // In-cache copies read their source before the destination is dropped.
    std::vector<std::pair<Addr, Bytes>> copies;
    for (const auto& a : plan.coherence_actions) {
        if (a.kind == CoherenceKind::InCacheCopy) copies.emplace_back(a.target, llc_.probe(a.line)->data);
    }
    for (const auto& a : plan.coherence_actions) {
        if (a.kind == CoherenceKind::Invalidate) {
            llc_.invalidate(a.line);
            ++stats_.invalidations;
        }
    }
    pending_copies_ = std::move(copies);
}

void MemoryController::run_dram_tasks(ExecutionPlan& plan, OpKind category) {
    const std::uint64_t row = cfg_.row_size_bytes;
    if (!plan.staging_rows.empty()) {
        const Bytes value(row, plan.op.val);
        std::vector<std::uint32_t> cols(cfg_.lines_per_row());
        std::vector<Bytes> lines(cfg_.lines_per_row(), Bytes(cfg_.cacheline_bytes, plan.op.val));
        for (std::uint32_t c = 0; c < cols.size(); ++c) cols[c] = c;
        for (const auto& s : plan.staging_rows) {
            charged(category, Mechanism::Baseline, row, [&] { engine_.write_stream(s, cols, lines); });
        }
    }
    const BitwiseOp bop = plan.op.kind == IsaKind::MemAnd ? BitwiseOp::And : BitwiseOp::Or;
    for (const auto& t : plan.row_tasks) {
        if (t.mechanism == Mechanism::IdaoConservative || t.mechanism == Mechanism::IdaoAggressive) {
            BitwiseResult res;
            charged(category, t.mechanism, row, [&] { res = in_dram_bitwise(engine_, bop, t.src_a, t.src_b, t.dst); });
            const int hops = res.plan.total_hops();
            if (hops > 0 && energy_model_.mode() == EnergyMode::TableDriven) {
                const std::int64_t extra = energy_model_.table_fj(OpKind::Copy, Mechanism::PsmInterBank, row * hops);
                ledger_.add_fj(category, extra);
                stats_.by_mechanism[std::string(to_string(category)) + "/" + std::string(to_string(t.mechanism))]
                    .energy_fj += extra;
            }
        } else {
            charged(category, t.mechanism, row, [&] {
                if (t.zero) bulk_zero(engine_, t.dst);
                else bulk_copy(engine_, t.src_a, t.dst);
            });
        }
        ++stats_.rows_by_mechanism[std::string(to_string(t.mechanism))];
    }
    for (const auto& t : plan.line_tasks) {
        charged(category, Mechanism::PsmInterBank, t.columns.size() * cfg_.cacheline_bytes,
                [&] { psm_copy(engine_, t.src, t.dst, t.columns); });
        stats_.psm_lines += t.columns.size();
    }
}

void MemoryController::zi_insert(const ExecutionPlan& plan) {
    const Bytes zeros(cfg_.cacheline_bytes, 0);
    for (const auto* v : {&plan.fpm_portions, &plan.psm_portions}) {
        for (const auto& r : *v) {
            for (Addr line : lines_covering(plan.op.dst + r.offset, r.length, cfg_.cacheline_bytes)) {
                handle_eviction(llc_.insert(line, zeros, false, TrafficClass::Other));
                ++stats_.zi_lines;
            }
        }
    }
}

void MemoryController::run_cpu(const IsaOp& op, std::span<const ByteRange> ranges, bool dma) {
    if (ranges.empty()) return;
    const std::uint32_t line = cfg_.cacheline_bytes;
    std::uint64_t bytes = 0;
    for (const auto& r : ranges) bytes += r.length;
    stats_.cpu_bytes += bytes;
    const OpKind category = op.kind == IsaKind::MemCopy   ? OpKind::Copy
                            : op.kind == IsaKind::MemInit ? OpKind::Zero
                                                          : OpKind::AndOr;
    charged(category, Mechanism::Baseline, bytes, [&] {
        // Read every source line first so overlapping operands see the old data.
        std::vector<Addr> sources;
        if (op.source_count() >= 1) sources.push_back(op.src1);
        if (op.source_count() >= 2) sources.push_back(op.src2);
        std::map<Addr, Bytes> src_lines;
        std::vector<Addr> fetch;
        std::unordered_set<Addr> seen;
        for (Addr base : sources) {
            for (const auto& r : ranges) {
                for (Addr l : lines_covering(base + r.offset, r.length, line)) {
                    if (!seen.insert(l).second) continue;
                    if (dma) {
                        if (const CacheLine* cl = llc_.probe(l); cl && cl->dirty) {
                            src_lines[l] = cl->data;
                            continue;
                        }
                        fetch.push_back(l);
                    } else if (const CacheLine* cl = llc_.lookup(l)) {
                        src_lines[l] = cl->data;
                    } else {
                        fetch.push_back(l);
                    }
                }
            }
        }
        auto fetched = dram_read_lines(fetch);
        for (std::size_t i = 0; i < fetch.size(); ++i) src_lines[fetch[i]] = std::move(fetched[i]);
        auto src_byte = [&](Addr a) { return src_lines.at(a / line * line)[a % line]; };

        // Compute destination bytes per line.
        std::map<Addr, std::vector<std::pair<std::uint32_t, std::uint8_t>>> dst_bytes;
        for (const auto& r : ranges) {
            for (std::uint64_t i = 0; i < r.length; ++i) {
                const std::uint64_t o = r.offset + i;
                std::uint8_t v = op.val;
                switch (op.kind) {
                    case IsaKind::MemCopy: v = src_byte(op.src1 + o); break;
                    case IsaKind::MemInit: break;
                    case IsaKind::MemAnd: v = src_byte(op.src1 + o) & src_byte(op.src2 + o); break;
                    case IsaKind::MemOr: v = src_byte(op.src1 + o) | src_byte(op.src2 + o); break;
                }
                const Addr a = op.dst + o;
                dst_bytes[a / line * line].emplace_back(static_cast<std::uint32_t>(a % line), v);
            }
        }

        std::vector<Addr> full_lines;
        std::vector<Bytes> full_data;
        std::vector<Addr> partial;
        for (auto& [l, entries] : dst_bytes) {
            if (entries.size() == line) {
                Bytes d(line);
                for (auto [off, v] : entries) d[off] = v;
                full_lines.push_back(l);
                full_data.push_back(std::move(d));
                if (llc_.invalidate(l)) ++stats_.invalidations;
            } else {
                partial.push_back(l);
            }
        }
        for (Addr l : partial) {
            CacheLine* cl = llc_.lookup(l);
            if (!cl) {
                const Addr one[] = {l};
                Bytes d = std::move(dram_read_lines(one)[0]);
                handle_eviction(llc_.insert(l, std::move(d), false, engine_.traffic_class()));
                cl = const_cast<CacheLine*>(llc_.probe(l));
            }
            for (auto [off, v] : dst_bytes[l]) cl->data[off] = v;
            cl->dirty = true;
            cl->origin = engine_.traffic_class();
        }
        dram_write_lines(full_lines, full_data);
    });
}

OpOutcome MemoryController::exec_isa(const IsaOp& op) {
    ++stats_.isa_ops;
    OpOutcome out;
    out.plan.op = op;
    if (op.size == 0) return out;
    for (int k = 0; k < op.source_count(); ++k) check_access(k == 0 ? op.src1 : op.src2, op.size, false);
    check_access(op.dst, op.size, true);

    const SplitOptions so{options_.mode != ControllerMode::Baseline, options_.mode == ControllerMode::Idao};
    out.plan = split_region(op, cfg_, so);
    ExecutionPlan& plan = out.plan;
    stats_.fallback_rows += plan.fallback_rows;

    const OpKind category = op.kind == IsaKind::MemCopy   ? OpKind::Copy
                            : op.kind == IsaKind::MemInit ? OpKind::Zero
                                                          : OpKind::AndOr;
    engine_.set_traffic_class(op.kind == IsaKind::MemCopy || op.kind == IsaKind::MemInit ? TrafficClass::Copy
                                                                                        : TrafficClass::Bitwise);
    engine_.begin_op();
    blocked_ = std::make_pair(op.dst, op.dst + op.size);
    try {
        if (plan.accelerated_bytes() > 0) {
            coherence_prepare(plan);
            run_dram_tasks(plan, category);
            for (auto& [target, data] : pending_copies_) {
                handle_eviction(llc_.insert(target, std::move(data), true, TrafficClass::Copy));
                ++stats_.in_cache_copies;
            }
            pending_copies_.clear();
            if (options_.mode == ControllerMode::RowCloneZi && op.kind == IsaKind::MemInit && op.val == 0) {
                zi_insert(plan);
            }
        }
        run_cpu(op, plan.cpu_remainder, options_.mc_dma && op.kind == IsaKind::MemCopy);
    } catch (...) {
        blocked_.reset();
        engine_.end_op();
        engine_.set_traffic_class(TrafficClass::Other);
        throw;
    }
    blocked_.reset();
    out.latency = engine_.end_op();
    engine_.set_traffic_class(TrafficClass::Other);
    stats_.total_latency += out.latency;
    return out;
}

std::uint64_t MemoryController::read(Addr addr) {
    if (addr % 8 != 0) fail(ErrorKind::AddressRange, "READ address must be 8-byte aligned");
    check_access(addr, 8, false);
    check_blocked(addr);
    ++stats_.reads;
    const Addr line = addr / cfg_.cacheline_bytes * cfg_.cacheline_bytes;
    engine_.set_traffic_class(TrafficClass::Other);
    engine_.begin_op();
    const CacheLine* cl = llc_.lookup(line);
    if (!cl) {
        Bytes d;
        charged(OpKind::Read, Mechanism::Baseline, cfg_.cacheline_bytes, [&] {
            const Addr one[] = {line};
            d = std::move(dram_read_lines(one)[0]);
        });
        handle_eviction(llc_.insert(line, std::move(d), false, TrafficClass::Other));
        cl = llc_.probe(line);
    }
    std::uint64_t v = 0;
    for (int i = 7; i >= 0; --i) v = (v << 8) | cl->data[addr % cfg_.cacheline_bytes + static_cast<unsigned>(i)];
    stats_.total_latency += engine_.end_op();
    return v;
}

void MemoryController::write(Addr addr, std::uint64_t value) {
    if (addr % 8 != 0) fail(ErrorKind::AddressRange, "WRITE address must be 8-byte aligned");
    check_access(addr, 8, true);
    check_blocked(addr);
    ++stats_.writes;
    const Addr line = addr / cfg_.cacheline_bytes * cfg_.cacheline_bytes;
    engine_.set_traffic_class(TrafficClass::Other);
    engine_.begin_op();
    CacheLine* cl = llc_.lookup(line);
    if (!cl) {
        Bytes d;
        charged(OpKind::Read, Mechanism::Baseline, cfg_.cacheline_bytes, [&] {
            const Addr one[] = {line};
            d = std::move(dram_read_lines(one)[0]);
        });
        handle_eviction(llc_.insert(line, std::move(d), false, TrafficClass::Other));
        cl = const_cast<CacheLine*>(llc_.probe(line));
    }
    for (unsigned i = 0; i < 8; ++i) cl->data[addr % cfg_.cacheline_bytes + i] = static_cast<std::uint8_t>(value >> (8 * i));
    cl->dirty = true;
    cl->origin = TrafficClass::Other;
    stats_.total_latency += engine_.end_op();
}

void MemoryController::flush() {
    const auto dirty = llc_.dirty_lines();
    if (dirty.empty()) return;
    engine_.begin_op();
    for (TrafficClass cls : {TrafficClass::Copy, TrafficClass::Bitwise, TrafficClass::Other}) {
        std::vector<Addr> lines;
        std::vector<Bytes> data;
        for (Addr l : dirty) {
            const CacheLine* cl = llc_.probe(l);
            if (cl->origin != cls) continue;
            lines.push_back(l);
            data.push_back(cl->data);
        }
        if (lines.empty()) continue;
        engine_.set_traffic_class(cls);
        charged(OpKind::Write, Mechanism::Baseline, lines.size() * cfg_.cacheline_bytes,
                [&] { dram_write_lines(lines, data); });
        for (Addr l : lines) const_cast<CacheLine*>(llc_.probe(l))->dirty = false;
        stats_.writebacks += lines.size();
    }
    engine_.set_traffic_class(TrafficClass::Other);
    stats_.total_latency += engine_.end_op();
}

Bytes MemoryController::coherent_read(Addr addr, std::uint64_t size) const {
    if (addr >= cfg_.capacity() || size > cfg_.capacity() - addr) fail(ErrorKind::AddressRange, "coherent read beyond capacity");
    Bytes out;
    out.reserve(size);
    const std::uint32_t line = cfg_.cacheline_bytes;
    for (Addr l : lines_covering(addr, size, line)) {
        Bytes data;
        if (const CacheLine* cl = llc_.probe(l)) {
            data = cl->data;
        } else {
            const Location loc = decode_address(l, cfg_);
            const RowAddress r = row_of(loc, cfg_);
            const Bytes row = engine_.dram().peek_row(r.bank, r.row);
            data.assign(row.begin() + loc.column * line, row.begin() + (loc.column + 1) * line);
        }
        const Addr from = std::max<Addr>(l, addr);
        const Addr to = std::min<Addr>(l + line, addr + size);
        out.insert(out.end(), data.begin() + (from - l), data.begin() + (to - l));
    }
    return out;
}

void MemoryController::poke(Addr addr, std::span<const std::uint8_t> bytes) {
    if (addr >= cfg_.capacity() || bytes.size() > cfg_.capacity() - addr) fail(ErrorKind::AddressRange, "poke beyond capacity");
    const std::uint32_t line = cfg_.cacheline_bytes;
    std::map<RowAddress, Bytes> rows;
    for (std::size_t i = 0; i < bytes.size(); ++i) {
        const Addr a = addr + i;
        const Location loc = decode_address(a, cfg_);
        const RowAddress r = row_of(loc, cfg_);
        auto it = rows.find(r);
        if (it == rows.end()) it = rows.emplace(r, engine_.dram().peek_row(r.bank, r.row)).first;
        it->second[loc.column * line + loc.byte_offset_in_line] = bytes[i];
        if (auto* cl = const_cast<CacheLine*>(llc_.probe(a / line * line))) cl->data[a % line] = bytes[i];
    }
    for (const auto& [r, data] : rows) engine_.dram().poke_row(r.bank, r.row, data);
}

}  // namespace pumsim
