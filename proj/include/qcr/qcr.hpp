#pragma once

// Umbrella header for the quantum checkpoint/restore runtime.

#include "qcr/checkpoint.hpp"
#include "qcr/errors.hpp"
#include "qcr/executor.hpp"
#include "qcr/policy.hpp"
#include "qcr/program.hpp"
#include "qcr/report.hpp"
#include "qcr/restoration.hpp"
#include "qcr/rng.hpp"
#include "qcr/runtime.hpp"
#include "qcr/sha256.hpp"
#include "qcr/statevector.hpp"
#include "qcr/store.hpp"
#include "qcr/transcript.hpp"
#include "qcr/workflow.hpp"
