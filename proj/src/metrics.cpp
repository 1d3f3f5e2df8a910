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

#include "gmpr/metrics.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <map>

#include "gmpr/em_hier.hpp"
#include "gmpr/error.hpp"
#include "parallel.hpp"

namespace gmpr {

std::vector<int> hard_assign(const Matrix& posteriors) {
  std::vector<int> out(static_cast<std::size_t>(posteriors.rows()), 0);
  for (Eigen::Index i = 0; i < posteriors.rows(); ++i) {
    int best = 0;
    for (Eigen::Index m = 1; m < posteriors.cols(); ++m)
      if (posteriors(i, m) > posteriors(i, best)) best = static_cast<int>(m);
    out[static_cast<std::size_t>(i)] = best;
  }
  return out;
}

double purity(const std::vector<int>& assignments, const std::vector<int>& truth) {
  if (assignments.size() != truth.size()) throw Error(ErrorCode::LengthMismatch, "assignment and truth lengths differ");
  if (assignments.empty()) throw Error(ErrorCode::EmptyInput, "purity of zero points");
  std::map<int, std::map<int, long long>> table;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (assignments[i] < 0 || truth[i] < 0) throw Error(ErrorCode::InvariantViolation, "negative class id");
    ++table[assignments[i]][truth[i]];
  }
  long long hits = 0;
  for (const auto& [m, row] : table) {
    long long best = 0;
    for (const auto& [g, c] : row) best = std::max(best, c);
    hits += best;
  }
  return static_cast<double>(hits) / static_cast<double>(truth.size());
}

TrialRecord run_single_trial(const Dataset& data, const TrialConfig& config, long long budget, int trial_index) {
  TrialRecord rec;
  rec.budget = budget;
  rec.trial_index = trial_index;
  rec.seed = derive_seed(config.base_seed, static_cast<std::uint64_t>(trial_index));
  try {
    FitConfig fc = config.fit;
    fc.seed = rec.seed;
    fc.threads = 1;
    RngStream rel_rng(derive_seed(rec.seed, kRelationStream));
    const RelationSet rel = sample_relations(data.labels(), budget, rel_rng, config.mode);
    bool hier = false;
    for (int k : config.clusters_per_class) hier = hier || k != 1;
    Matrix post;
    if (hier) {
      auto res = fit_hier(data, rel, config.classes, config.clusters_per_class, fc);
      post = predict_hier(res.model, data);
      rec.iterations = res.trace.iterations;
      rec.converged = res.trace.converged;
    } else {
      auto res = fit_flat(data, rel, config.classes, fc);
      post = predict_flat(res.model, data);
      rec.iterations = res.trace.iterations;
      rec.converged = res.trace.converged;
    }
    rec.purity = purity(hard_assign(post), data.labels());
  } catch (const Error& e) {
    rec.error = std::string(error_code_name(e.code())) + ": " + e.what();
  }
  return rec;
}

std::vector<TrialReport> run_trials(const Dataset& data, const TrialConfig& config) {
  if (!data.has_labels()) throw Error(ErrorCode::InvariantViolation, "trials need ground-truth labels");
  if (config.n_trials < 1) throw Error(ErrorCode::InvalidConfig, "n_trials must be >= 1");
  validate(config.fit);
  std::vector<TrialReport> out;
  for (long long b : config.budgets) {
    if (b < 0) throw Error(ErrorCode::InvalidConfig, "link budgets must be >= 0");
    TrialReport rep;
    rep.budget = b;
    rep.mode = config.mode;
    rep.trials.resize(static_cast<std::size_t>(config.n_trials));
    detail::parallel_for(rep.trials.size(), config.fit.threads, [&](std::size_t t) {
      rep.trials[t] = run_single_trial(data, config, b, static_cast<int>(t));
    });
    double sum = 0.0;
    int ok = 0;
    for (const auto& r : rep.trials) {
      if (r.purity) {
        sum += *r.purity;
        ++ok;
      } else {
        ++rep.failed;
      }
    }
    rep.mean = ok ? sum / ok : std::numeric_limits<double>::quiet_NaN();
    double ss = 0.0;
    for (const auto& r : rep.trials)
      if (r.purity) ss += (*r.purity - rep.mean) * (*r.purity - rep.mean);
    rep.stddev = ok ? std::sqrt(ss / ok) : std::numeric_limits<double>::quiet_NaN();
    out.push_back(std::move(rep));
  }
  return out;
}

void write_trials_csv(std::ostream& os, const std::vector<TrialReport>& reports) {
  os << "budget,trial_index,seed,purity,iterations,converged\n";
  char buf[64];
  for (const auto& rep : reports)
    for (const auto& r : rep.trials) {
      os << r.budget << ',' << r.trial_index << ',' << r.seed << ',';
      if (r.purity) {
        std::snprintf(buf, sizeof buf, "%.17g", *r.purity);
        os << buf;
      }
      os << ',' << r.iterations << ',' << (r.converged ? 1 : 0) << '\n';
    }
}

}  // namespace gmpr
