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
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pumsim/address.hpp"
#include "pumsim/config.hpp"
#include "pumsim/energy.hpp"
#include "pumsim/engine.hpp"
#include "pumsim/idao.hpp"
#include "pumsim/llc.hpp"
#include "pumsim/rowclone.hpp"

namespace pumsim {

enum class ControllerMode { Baseline, RowClone, RowCloneZi, Idao };

std::string_view to_string(ControllerMode mode);
/// "baseline", "rowclone", "rowclone-zi" or "idao"; else UnknownMechanism.
ControllerMode parse_controller_mode(std::string_view name);

enum class IsaKind { MemCopy, MemInit, MemAnd, MemOr };

std::string_view to_string(IsaKind kind);

struct IsaOp {
    IsaKind kind = IsaKind::MemCopy;
    Addr src1 = 0;  ///< memcopy source, first bitwise operand
    Addr src2 = 0;  ///< second bitwise operand
    Addr dst = 0;
    std::uint64_t size = 0;
    std::uint8_t val = 0;  ///< meminit byte value

    [[nodiscard]] int source_count() const {
        return kind == IsaKind::MemInit ? 0 : kind == IsaKind::MemCopy ? 1 : 2;
    }
};

/// Op-relative byte range [offset, offset + length).
struct ByteRange {
    std::uint64_t offset = 0;
    std::uint64_t length = 0;

    bool operator==(const ByteRange&) const = default;
};

/// One row (per channel) of an accelerated row-sized portion.
struct RowTask {
    Mechanism mechanism = Mechanism::Fpm;
    RowAddress dst;
    RowAddress src_a;  ///< copy source, staging row, or first bitwise operand
    RowAddress src_b;  ///< second bitwise operand
    bool zero = false;    ///< meminit 0: source is dst's zero row
    bool staged = false;  ///< meminit != 0: source is the staging row in src_a
};

/// Cacheline-granular PSM transfers between one pair of rows.
struct LineTask {
    RowAddress src;
    RowAddress dst;
    ColumnPairs columns;
    bool zero = false;  ///< source is a zero row
};

enum class CoherenceKind { Writeback, InCacheCopy, Invalidate };

struct CoherenceAction {
    CoherenceKind kind = CoherenceKind::Invalidate;
    Addr line = 0;
    Addr target = 0;  ///< in-cache copy destination line
};

struct ExecutionPlan {
    IsaOp op;
    std::vector<ByteRange> fpm_portions;
    std::vector<ByteRange> psm_portions;
    std::vector<ByteRange> idao_portions;
    std::vector<ByteRange> cpu_remainder;
    std::vector<RowTask> row_tasks;
    std::vector<LineTask> line_tasks;
    std::vector<CoherenceAction> coherence_actions;
    /// Staging rows written before row tasks of a non-zero meminit.
    std::vector<RowAddress> staging_rows;
    /// Row portions rejected from in-DRAM execution and left to the CPU.
    std::uint64_t fallback_rows = 0;

    [[nodiscard]] std::uint64_t accelerated_bytes() const;
};

struct SplitOptions {
    bool rowclone = true;
    bool idao = true;
};

/// Partitions an operation into FPM, PSM, IDAO and CPU portions.
ExecutionPlan split_region(const IsaOp& op, const DeviceConfig& cfg, SplitOptions options = {});

/// Empty when the portions are pairwise disjoint and exactly cover the op.
std::optional<std::string> verify_partition(const ExecutionPlan& plan);

/// Free 4 KiB pages, one pool per subarray.
class PagePools {
public:
    struct Allocation {
        Addr page = 0;
        bool psm_bound = false;  ///< taken from another subarray's pool
    };

    /// Every page whose rows are all user rows of one subarray.
    explicit PagePools(const DeviceConfig& cfg);

    [[nodiscard]] std::uint64_t pool_key(Addr page) const;
    [[nodiscard]] std::uint64_t free_pages() const { return free_; }
    [[nodiscard]] std::size_t pool_count() const { return pools_.size(); }
    [[nodiscard]] std::size_t pool_size(std::uint64_t key) const;
    [[nodiscard]] bool contains(Addr page) const;

    /// Lowest free page in address order.
    Allocation alloc_any();
    /// A page from src_page's pool; any pool when that one is empty.
    Allocation alloc_page_same_subarray(Addr src_page);
    /// Removes a specific page. Returns false when it is not free.
    bool take(Addr page);
    void release(Addr page);

private:
    DeviceConfig cfg_;
    std::map<std::uint64_t, std::set<Addr>> pools_;
    std::uint64_t free_ = 0;
};

struct ControllerOptions {
    ControllerMode mode = ControllerMode::Baseline;
    /// Dirty source lines of a copy are duplicated under the destination
    /// tag instead of being written back.
    bool in_cache_copy = true;
    /// Copy traffic bypasses the LLC (DMA engine in the controller).
    bool mc_dma = false;
};

/// Work attributed to one (op kind, mechanism) pair.
struct MechanismStats {
    std::uint64_t portions = 0;
    std::uint64_t bytes = 0;
    Nanoseconds latency = 0.0;
    std::int64_t energy_fj = 0;
};

struct ControllerStats {
    std::uint64_t isa_ops = 0;
    std::uint64_t reads = 0;
    std::uint64_t writes = 0;
    std::map<std::string, std::uint64_t> rows_by_mechanism;  ///< accelerated row tasks
    std::uint64_t psm_lines = 0;
    std::uint64_t cpu_bytes = 0;
    std::uint64_t fallback_rows = 0;
    std::uint64_t writebacks = 0;
    std::uint64_t in_cache_copies = 0;
    std::uint64_t invalidations = 0;
    std::uint64_t zi_lines = 0;
    std::uint64_t page_faults = 0;
    Nanoseconds total_latency = 0.0;
    /// Keyed "op/mechanism", e.g. "copy/fpm".
    std::map<std::string, MechanismStats> by_mechanism;
};

struct OpOutcome {
    ExecutionPlan plan;
    Nanoseconds latency = 0.0;
};

/// Executes ISA operations and demand traffic against the LLC and DRAM.
class MemoryController {
public:
    explicit MemoryController(const DeviceConfig& cfg, ControllerOptions options = {}, EngineOptions engine = {});

    [[nodiscard]] const DeviceConfig& config() const { return cfg_; }
    [[nodiscard]] const ControllerOptions& options() const { return options_; }
    Engine& engine() { return engine_; }
    [[nodiscard]] const Engine& engine() const { return engine_; }
    Llc& llc() { return llc_; }
    [[nodiscard]] const Llc& llc() const { return llc_; }
    [[nodiscard]] const EnergyModel& energy_model() const { return energy_model_; }
    [[nodiscard]] const EnergyLedger& energy() const { return ledger_; }
    [[nodiscard]] const ControllerStats& stats() const { return stats_; }

    OpOutcome exec_isa(const IsaOp& op);
    /// 8-byte little-endian word at an 8-aligned address, through the LLC.
    std::uint64_t read(Addr addr);
    void write(Addr addr, std::uint64_t value);
    /// Writes back every dirty line.
    void flush();

    /// Cache overlaid on memory, without side effects.
    [[nodiscard]] Bytes coherent_read(Addr addr, std::uint64_t size) const;
    /// Writes memory directly and patches any cached copy of the touched lines.
    void poke(Addr addr, std::span<const std::uint8_t> bytes);

    /// Enables page-table checks: only pages in `mapped` may be touched.
    void set_page_table(std::set<Addr> mapped) { page_table_ = std::move(mapped); }
    /// Called on an unmapped page; returning true maps it and resumes.
    void set_fault_handler(std::function<bool(Addr page)> fn) { fault_handler_ = std::move(fn); }

    /// Destination range locked while an operation runs.
    [[nodiscard]] std::optional<std::pair<Addr, Addr>> blocked_range() const { return blocked_; }

private:
    void check_access(Addr addr, std::uint64_t size, bool is_write);
    void check_page(Addr page);
    void check_blocked(Addr addr) const;

    template <typename F>
    void charged(OpKind op, Mechanism mech, std::uint64_t bytes, F&& body);

    std::vector<Bytes> dram_read_lines(std::span<const Addr> lines);
    void dram_write_lines(std::span<const Addr> lines, std::span<const Bytes> data);
    void handle_eviction(std::optional<CacheLine> victim);
    void writeback_line(Addr line, const CacheLine& data, TrafficClass cls);

    void coherence_prepare(ExecutionPlan& plan);
    void run_dram_tasks(ExecutionPlan& plan, OpKind category);
    void zi_insert(const ExecutionPlan& plan);
    void run_cpu(const IsaOp& op, std::span<const ByteRange> ranges, bool dma);

    DeviceConfig cfg_;
    ControllerOptions options_;
    Engine engine_;
    Llc llc_;
    EnergyModel energy_model_;
    EnergyLedger ledger_;
    ControllerStats stats_;
    std::optional<std::set<Addr>> page_table_;
    std::function<bool(Addr)> fault_handler_;
    std::optional<std::pair<Addr, Addr>> blocked_;
    std::vector<std::pair<Addr, Bytes>> pending_copies_;
    int charge_depth_ = 0;
};

}  // namespace pumsim
