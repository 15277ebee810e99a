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
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "pumsim/memctrl.hpp"

namespace pumsim {

enum class TraceKind { MemCopy, MemInit, MemAnd, MemOr, Read, Write };

/// One trace line:
///   MEMCOPY src dst size | MEMINIT dst size val | MEMAND s1 s2 dst size
///   MEMOR s1 s2 dst size | READ addr | WRITE addr value
struct TraceOp {
    TraceKind kind = TraceKind::Read;
    IsaOp isa;           ///< ISA kinds
    Addr addr = 0;       ///< READ/WRITE
    std::uint64_t value = 0;  ///< WRITE
    std::size_t line = 0;     ///< 1-based source line, 0 when generated

    [[nodiscard]] bool is_isa() const { return kind != TraceKind::Read && kind != TraceKind::Write; }
};

using Trace = std::vector<TraceOp>;

TraceOp make_isa(const IsaOp& op);
TraceOp make_read(Addr addr);
TraceOp make_write(Addr addr, std::uint64_t value);

/// Blank lines and `#` comments are skipped. Malformed lines throw
/// ParseError carrying the line number.
Trace parse_trace(std::string_view text);
Trace load_trace(const std::filesystem::path& path);

/// Canonical form: upper-case keywords, addresses and data as 0x hex,
/// sizes in decimal, one op per line.
std::string format_op(const TraceOp& op);
std::string format_trace(const Trace& trace);

}  // namespace pumsim
