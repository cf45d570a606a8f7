// Copyright 2026 The rmopt Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


// Runs every acceptance suite and prints one PASS/FAIL line per criterion,
// followed by the suite's measurements. Tolerances live in the suites.
// Usage: acceptance_test [suite]

#include <cstdio>
#include <exception>
#include <string>
#include <vector>

#include "rmopt/selftest.h"

int main(int argc, char** argv) {
  const std::string which = argc > 1 ? argv[1] : "all";
  std::vector<rmopt::SuiteResult> results;
  try {
    results = rmopt::RunSuites(which);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  int failed = 0;
  for (const rmopt::SuiteResult& r : results) {
    std::printf("%s criterion %d %s: %s\n", r.passed ? "PASS" : "FAIL",
                r.criterion, r.name.c_str(), r.summary.c_str());
    for (const std::string& d : r.details) std::printf("    %s\n", d.c_str());
    std::fflush(stdout);
    failed += r.passed ? 0 : 1;
  }
  std::printf("%d/%zu criteria passed\n",
              static_cast<int>(results.size()) - failed, results.size());
  return failed == 0 ? 0 : 1;
}
