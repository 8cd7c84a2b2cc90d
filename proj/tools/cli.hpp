// cli.hpp
// The `bjo` command line, callable in-process so tests can drive it.
//
// Exit codes: 0 Holds, 1 Fails, 2 Borderline, 3 parse/usage error,
// 4 dimension mismatch, 5 tolerance error, 6 generator precondition,
// 7 property violation.

#pragma once

#include <iosfwd>

namespace bjo::cli {

enum Exit : int {
  kHolds = 0,
  kFails = 1,
  kBorderline = 2,
  kParse = 3,
  kDimension = 4,
  kTolerance = 5,
  kPrecondition = 6,
  kViolation = 7,
};

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace bjo::cli
