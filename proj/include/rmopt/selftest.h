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

#ifndef RMOPT_SELFTEST_H_
#define RMOPT_SELFTEST_H_

#include <string>
#include <vector>

namespace rmopt {

struct SuiteResult {
  std::string name;
  int criterion = 0;
  bool passed = false;
  std::string summary;               // one line
  std::vector<std::string> details;  // failures and key measurements
  double seconds = 0;
};

// regret_bound, monotone_norm, one_step, altern_rm_plus, threshold_init,
// hard_instance, uniform_init, four_cycle, cce, gradient_structure.
const std::vector<std::string>& SuiteNames();
// Throws std::invalid_argument for an unknown name.
SuiteResult RunSuite(const std::string& name);
// "all" expands to every suite in order.
std::vector<SuiteResult> RunSuites(const std::string& name);

}  // namespace rmopt

#endif  // RMOPT_SELFTEST_H_
