#pragma once

#include <string>
#include <vector>

namespace riskmono {

struct SelftestCheck {
  std::string name;
  bool passed = false;
  std::string detail;
};

/// Fast invariant checks over every module; no check takes more than a
/// fraction of a second.
std::vector<SelftestCheck> run_selftest();

}  // namespace riskmono
