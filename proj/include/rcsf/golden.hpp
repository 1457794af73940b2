#pragma once

#include <string>

namespace rcsf {

/// Writes the conformance vectors (wire-format frames, quantizer table,
/// ratio-chain oracle) into `dir`. The same bytes are shipped in the repo
/// under tests/golden/.
void emit_golden(const std::string& dir);

/// Recomputes every golden vector and byte-compares it against the files
/// in `dir`; throws VerificationError on the first mismatch.
void verify_golden(const std::string& dir);

}  // namespace rcsf
