// tests/gradcheck-test.cc

// Copyright 2026  GAZEV-VC Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include "gradcheck-util.h"

namespace gazev {
namespace {

TEST(GradCheck, EveryLossTermMatchesCentralDifferences) {
  auto results = RunGradChecks(11, 1);
  ASSERT_EQ(results.size(), 15u);
  for (const auto &r : results) {
    EXPECT_GT(r.checked, 0) << r.term;
    EXPECT_LT(r.max_rel_error, 1e-3) << r.term << " worst at " << r.worst_param;
  }
}

}  // namespace
}  // namespace gazev
