#pragma once

#include <cstdint>
#include <vector>

namespace qcr {

/// One measurement outcome: the classicalized quantum information.
/// `forced` records whether the outcome was pinned from a transcript
/// rather than sampled.
struct MeasurementEvent {
    long shot_index = 0;
    int op_index = 0;
    int qubit = 0;
    int outcome = 0;
    bool forced = false;
    friend bool operator==(const MeasurementEvent&, const MeasurementEvent&) = default;
};

/// Guarded-instruction decision taken during a shot.
struct ControlFlowEvent {
    int op_index = 0;
    bool taken = false;
    friend bool operator==(const ControlFlowEvent&, const ControlFlowEvent&) = default;
};

using Transcript = std::vector<MeasurementEvent>;

}  // namespace qcr
