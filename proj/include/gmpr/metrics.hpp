// Copyright 2026 The gmpr Authors
//
// Licensed under the Apache License, Version 2.0 (the "License"); you may not use this file except in compliance with
// the License. You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software distributed under the License is distributed on
// an "AS IS" BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied. See the License for the
// specific language governing permissions and limitations under the License.

// Hard assignment, purity and the repeated-trial harness.

#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "gmpr/em_flat.hpp"
#include "gmpr/init.hpp"

namespace gmpr {

/// Row argmax, ties to the lowest column.
std::vector<int> hard_assign(const Matrix& posteriors);

/// Σ_m max_g |{n : a_n = m, t_n = g}| / N. Throws LengthMismatch, EmptyInput, InvariantViolation (negative id).
double purity(const std::vector<int>& assignments, const std::vector<int>& truth);

struct TrialRecord {
  long long budget = 0;
  int trial_index = 0;
  std::uint64_t seed = 0;
  std::optional<double> purity;  ///< empty when the trial failed
  int iterations = 0;
  bool converged = false;
  std::string error;  ///< "CODE: message" for failed trials
};

struct TrialReport {
  long long budget = 0;
  RelationMode mode = RelationMode::Both;
  std::vector<TrialRecord> trials;
  double mean = 0.0;  ///< over successful trials, NaN when none
  double stddev = 0.0;  ///< population standard deviation over successful trials
  int failed = 0;
};

struct TrialConfig {
  int classes = 2;
  std::vector<int> clusters_per_class;  ///< empty or all ones: flat model
  std::vector<long long> budgets{0};
  RelationMode mode = RelationMode::Both;
  int n_trials = 100;
  std::uint64_t base_seed = 0;
  FitConfig fit;  ///< fit.seed is ignored; fit.threads parallelizes over trials
};

/// Trial t uses seed derive_seed(base_seed, t): its init stream and relation stream are children of that seed and
/// are shared by every budget, so larger budgets extend smaller ones (see sample_relations).
std::vector<TrialReport> run_trials(const Dataset& data, const TrialConfig& config);

/// Runs one pipeline; exposed for tests.
TrialRecord run_single_trial(const Dataset& data, const TrialConfig& config, long long budget, int trial_index);

/// Header `budget,trial_index,seed,purity,iterations,converged`; missing purity is an empty field.
void write_trials_csv(std::ostream& os, const std::vector<TrialReport>& reports);

}  // namespace gmpr
