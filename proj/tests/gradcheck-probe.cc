// tests/gradcheck-probe.cc

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

// Prints one line per loss term: name, max relative error, entries checked.

#include <cstdio>
#include <cstdlib>

#include "gradcheck-util.h"

int main(int argc, char **argv) {
  int samples = argc > 1 ? std::atoi(argv[1]) : 3;
  for (const auto &r : gazev::RunGradChecks(11, samples))
    std::printf("%s %.6e %d %s\n", r.term.c_str(), r.max_rel_error, r.checked,
                r.worst_param.c_str());
  return 0;
}
