// tests/gradcheck-util.h

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

#ifndef GAZEV_TESTS_GRADCHECK_UTIL_H_
#define GAZEV_TESTS_GRADCHECK_UTIL_H_

#include <cstdint>
#include <string>
#include <vector>

namespace gazev {

struct GradCheckResult {
  std::string term;
  double max_rel_error = 0;
  std::string worst_param;
  int checked = 0;
};

/// Central differences against backprop for every loss term on a width-4
/// model: samples_per_param random directions through every parameter
/// tensor the term reaches. Needs the double-precision build.
std::vector<GradCheckResult> RunGradChecks(std::uint64_t seed,
                                           int samples_per_param);

}  // namespace gazev

#endif  // GAZEV_TESTS_GRADCHECK_UTIL_H_
