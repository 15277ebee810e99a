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

#include "pumsim/error.hpp"

namespace pumsim {

std::string_view to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::InvalidConfig: return "InvalidConfig";
        case ErrorKind::AddressRange: return "AddressRange";
        case ErrorKind::NumericDomain: return "NumericDomain";
        case ErrorKind::MetastableSense: return "MetastableSense";
        case ErrorKind::CommandDropped: return "CommandDropped";
        case ErrorKind::NoOpenRow: return "NoOpenRow";
        case ErrorKind::SubarrayMismatch: return "SubarrayMismatch";
        case ErrorKind::SameBankTransfer: return "SameBankTransfer";
        case ErrorKind::StaleCell: return "StaleCell";
        case ErrorKind::SameRow: return "SameRow";
        case ErrorKind::ReservedRowTarget: return "ReservedRowTarget";
        case ErrorKind::UnsupportedPlacement: return "UnsupportedPlacement";
        case ErrorKind::UnknownMechanism: return "UnknownMechanism";
        case ErrorKind::CalibrationFailed: return "CalibrationFailed";
        case ErrorKind::FallbackToCpu: return "FallbackToCpu";
        case ErrorKind::RowRequired: return "RowRequired";
        case ErrorKind::PageFault: return "PageFault";
        case ErrorKind::NoPoolPage: return "NoPoolPage";
        case ErrorKind::TimingViolation: return "TimingViolation";
        case ErrorKind::Blocked: return "Blocked";
        case ErrorKind::ParseError: return "ParseError";
        case ErrorKind::InvalidWorkload: return "InvalidWorkload";
    }
    return "Unknown";
}

}  // namespace pumsim
