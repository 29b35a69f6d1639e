#pragma once

#include <iosfwd>

#include "coherence/rng.hpp"

namespace coherence::cli {

enum ExitCode : int {
  kOk = 0,
  kUsage = 1,
  kParse = 2,
  kVerificationFailed = 3,
  kOptimizerFailure = 4,
};

/// Seed used when neither --seed nor COHERENCE_LAB_SEED is given.
inline constexpr RngSeed kDefaultSeed = 0x5eed2024u;

/// Entry point shared by the executable and the tests.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace coherence::cli
