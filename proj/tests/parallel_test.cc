#include "muscert/parallel.h"

#include <cstdlib>
#include <stdexcept>

#include <gtest/gtest.h>

namespace muscert {
namespace {

TEST(ParallelMap, IndexOrderForAnyWorkerCount) {
  std::vector<size_t> expect(257);
  for (size_t i = 0; i < expect.size(); ++i) expect[i] = i * i;
  for (size_t workers : {1, 2, 3, 8, 500}) {
    EXPECT_EQ(parallel_map(expect.size(), workers,
                           [](size_t i) { return i * i; }),
              expect);
  }
  EXPECT_TRUE(parallel_map(0, 4, [](size_t i) { return i; }).empty());
}

TEST(ParallelMap, RethrowsLowestFailingIndex) {
  for (size_t workers : {1, 4}) {
    try {
      parallel_map(50, workers, [](size_t i) -> int {
        if (i == 7 || i == 30) throw std::runtime_error(std::to_string(i));
        return 0;
      });
      FAIL();
    } catch (const std::runtime_error& e) {
      EXPECT_STREQ(e.what(), "7");
    }
  }
}

TEST(DefaultWorkers, ReadsEnvironment) {
  setenv("MUSCERT_WORKERS", "3", 1);
  EXPECT_EQ(default_workers(), 3u);
  setenv("MUSCERT_WORKERS", "junk", 1);
  EXPECT_EQ(default_workers(), 1u);
  unsetenv("MUSCERT_WORKERS");
  EXPECT_EQ(default_workers(), 1u);
}

}  // namespace
}  // namespace muscert
