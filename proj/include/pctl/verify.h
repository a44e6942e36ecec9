/*
 * Copyright 2026 The pctl Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef PCTL_VERIFY_H_
#define PCTL_VERIFY_H_

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace pctl {

struct VerifyOptions {
  // Multiplies every trial count; tolerances widen accordingly.
  double trials_scale = 1.0;
  std::uint64_t seed = 20240601;
  // Mutation hook: count ties as wins in the single-sample indicator. The
  // unbiasedness suite is expected to fail when set.
  bool ties_as_one = false;
};

struct SuiteResult {
  std::string claim;
  bool passed = false;
  std::string measured;
  std::string tolerance;
  double seconds = 0.0;
};

std::vector<SuiteResult> RunVerify(const VerifyOptions& options);

// Individual suites, exposed for tests.
SuiteResult VerifyUnbiasedness(const VerifyOptions& options);
SuiteResult VerifyVarianceReduction(const VerifyOptions& options);
SuiteResult VerifyLinearity(const VerifyOptions& options);
SuiteResult VerifySoftBceMinimizer(const VerifyOptions& options);
SuiteResult VerifyValueWeightedOptimum(const VerifyOptions& options);
SuiteResult VerifyReservoirUniformity(const VerifyOptions& options);
SuiteResult VerifyGradients(const VerifyOptions& options);

void PrintVerifyTable(std::ostream& out, const std::vector<SuiteResult>& results);

}  // namespace pctl

#endif  // PCTL_VERIFY_H_
