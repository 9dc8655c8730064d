#include "muscert/parallel.h"

#include <cstdlib>
#include <string>

namespace muscert {

size_t default_workers() {
  const char* env = std::getenv("MUSCERT_WORKERS");
  if (env == nullptr || *env == '\0') return 1;
  try {
    const long long value = std::stoll(env);
    return value >= 1 ? static_cast<size_t>(value) : 1;
  } catch (const std::exception&) {
    return 1;
  }
}

}  // namespace muscert
