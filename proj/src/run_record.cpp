#include "svi/run_record.hpp"

#include <cstdio>

namespace svi {

const char* to_string(StopCause cause) noexcept {
  switch (cause) {
    case StopCause::kCompleted: return "completed";
    case StopCause::kOracleBudget: return "max_oracle_calls";
    case StopCause::kDiverged: return "diverged";
  }
  return "unknown";
}

std::string fnv1a_hex(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace svi
