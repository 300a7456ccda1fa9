#pragma once

#include <ostream>

namespace rstreg::cli {

// Process exit codes; every error path maps onto one of these.
enum ExitCode : int {
  kOk = 0,
  kInternal = 1,
  kUsage = 2,
  kIo = 3,
  kCodec = 4,
  kBlankImage = 5,
  kNoSignal = 6,
  kOverflow = 7,
  kDegenerateSize = 8,
};

int run(int argc, const char *const *argv, std::ostream &out, std::ostream &err);

}  // namespace rstreg::cli
