#pragma once

#include <stdexcept>
#include <string>

namespace qcr {

/// Base class for all errors raised by the library.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

#define QCR_DEFINE_ERROR(Name)                                  \
    struct Name : Error {                                       \
        explicit Name(const std::string& what) : Error(what) {} \
    }

// Simulator
QCR_DEFINE_ERROR(QubitCountOutOfRange);
QCR_DEFINE_ERROR(UnknownGate);
QCR_DEFINE_ERROR(QubitOutOfRange);
QCR_DEFINE_ERROR(DuplicateQubit);
QCR_DEFINE_ERROR(BadPauliString);

// Recorded outcome has (numerically) zero probability under replay:
// the transcript no longer matches the program being re-executed.
QCR_DEFINE_ERROR(ZeroProbabilityOutcome);
QCR_DEFINE_ERROR(TranscriptOrderMismatch);

// Checkpoint format / store
QCR_DEFINE_ERROR(DigestMismatch);
QCR_DEFINE_ERROR(VersionUnsupported);
QCR_DEFINE_ERROR(SchemaError);
QCR_DEFINE_ERROR(NotFound);
QCR_DEFINE_ERROR(ParentMissing);
QCR_DEFINE_ERROR(StorageIO);

// Restoration
QCR_DEFINE_ERROR(ProgramMismatch);
QCR_DEFINE_ERROR(BoundaryNotFound);
QCR_DEFINE_ERROR(NoCheckpointAvailable);

// Runtime / harness
QCR_DEFINE_ERROR(ConfigError);
QCR_DEFINE_ERROR(SpecOutOfRange);

#undef QCR_DEFINE_ERROR

/// Thrown by the failure-injection harness at the configured kill point.
/// Not a library failure: it models the process dying mid-run.
struct InjectedFailure : Error {
    explicit InjectedFailure(const std::string& what) : Error(what) {}
};

}  // namespace qcr
