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

// Command-line front end. Every output file is written atomically; errors are one line on stderr:
//   error: <Code>: <message>
// Exit codes: 0 ok, 2 usage or configuration, 3 malformed input, 4 numerical failure, 5 I/O.

#include <cstdio>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "gmpr/csv_io.hpp"
#include "gmpr/em_flat.hpp"
#include "gmpr/em_hier.hpp"
#include "gmpr/error.hpp"
#include "gmpr/init.hpp"
#include "gmpr/kernels.hpp"
#include "gmpr/metrics.hpp"
#include "gmpr/model_io.hpp"
#include "gmpr/pca.hpp"
#include "gmpr/synthetic.hpp"

namespace {

using namespace gmpr;

int exit_code(ErrorCode c) {
  switch (c) {
    case ErrorCode::InvalidConfig:
      return 2;
    case ErrorCode::IndexOutOfRange:
    case ErrorCode::SelfPair:
    case ErrorCode::ConflictingPair:
    case ErrorCode::SchemaMismatch:
    case ErrorCode::DimensionMismatch:
    case ErrorCode::EmptyInput:
    case ErrorCode::LengthMismatch:
    case ErrorCode::ParseError:
    case ErrorCode::RaggedRows:
    case ErrorCode::NonNumericFeature:
    case ErrorCode::InvariantViolation:
    case ErrorCode::KTooLarge:
    case ErrorCode::ExhaustedPairs:
      return 3;
    case ErrorCode::Io:
      return 5;
    default:
      return 4;
  }
}

struct FitOptions {
  double tol = 1e-8;
  int max_iters = 500;
  double ridge = 1e-6;
  int mixing_iters = 20;
  bool relation_points_in_unsupervised = false;
};

void add_fit_options(CLI::App* cmd, FitOptions& o) {
  cmd->add_option("--tol", o.tol, "Relative log-likelihood tolerance")->capture_default_str();
  cmd->add_option("--max-iters", o.max_iters, "EM iteration cap")->capture_default_str();
  cmd->add_option("--ridge", o.ridge, "Covariance ridge relative to trace(S)/d")->capture_default_str();
  cmd->add_option("--mixing-iters", o.mixing_iters, "Newton step budget for the class weights")->capture_default_str();
  cmd->add_flag("--relation-points-in-unsupervised", o.relation_points_in_unsupervised,
                "Also count relation endpoints as independent points");
}

FitConfig make_fit_config(const FitOptions& o, std::uint64_t seed, int threads) {
  FitConfig c;
  c.tol = o.tol;
  c.max_iters = o.max_iters;
  c.ridge_floor = o.ridge;
  c.mixing_iters = o.mixing_iters;
  c.relation_points_in_unsupervised = o.relation_points_in_unsupervised;
  c.seed = seed;
  c.threads = threads;
  validate(c);
  return c;
}

std::vector<int> clusters_for(int classes, int clusters, const std::vector<int>& per_class) {
  if (!per_class.empty()) {
    if (static_cast<int>(per_class.size()) != classes)
      throw Error(ErrorCode::InvalidConfig, "--clusters-per-class needs one entry per class");
    return per_class;
  }
  if (clusters < 1) throw Error(ErrorCode::InvalidConfig, "--clusters must be >= 1");
  return std::vector<int>(static_cast<std::size_t>(classes), clusters);
}

bool all_ones(const std::vector<int>& k) {
  for (int v : k)
    if (v != 1) return false;
  return true;
}

std::optional<std::string> label_opt(const std::string& s) {
  return s.empty() ? std::nullopt : std::optional<std::string>(s);
}

std::string posterior_csv(const Matrix& post) {
  std::ostringstream os;
  for (Eigen::Index m = 0; m < post.cols(); ++m) os << (m ? "," : "") << 'p' << m;
  os << '\n';
  for (Eigen::Index i = 0; i < post.rows(); ++i) {
    for (Eigen::Index m = 0; m < post.cols(); ++m) os << (m ? "," : "") << format_double(post(i, m));
    os << '\n';
  }
  return os.str();
}

Matrix posteriors(const AnyModel& model, const Dataset& data) {
  if (const auto* f = std::get_if<FlatModel>(&model)) return predict_flat(*f, data);
  return predict_hier(std::get<HierModel>(model), data);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Semi-supervised Gaussian mixture clustering with must-link / cannot-link pairs"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_config("--config", "", "TOML/INI file with option values; command-line flags win");
  int threads = 1;
  std::string isa = "auto";
  app.add_option("--threads", threads, "Worker threads; 1 gives bit-reproducible output")->capture_default_str();
  app.add_option("--isa", isa, "Kernel set: auto, scalar or avx2")->check(CLI::IsMember({"auto", "scalar", "avx2"}));

  // fit
  auto* fit = app.add_subcommand("fit", "Fit a model and write it with its log-likelihood trace");
  std::string fit_data, fit_label, fit_rel, fit_init, fit_out, fit_trace;
  int fit_M = 2, fit_K = 1;
  std::vector<int> fit_Ks;
  std::uint64_t fit_seed = 0;
  FitOptions fit_opts;
  fit->add_option("--data", fit_data, "Dataset CSV")->required();
  fit->add_option("--label-column", fit_label, "Column to drop from the features (name or 0-based index)");
  fit->add_option("--relations", fit_rel, "Relation file (ml,i,j / cl,a,b)");
  fit->add_option("-M,--classes", fit_M, "Number of classes")->capture_default_str();
  fit->add_option("--clusters", fit_K, "Gaussians per class")->capture_default_str();
  fit->add_option("--clusters-per-class", fit_Ks, "Gaussians for each class");
  fit->add_option("--init-model", fit_init, "Start from this model document instead of k-means++");
  fit->add_option("--seed", fit_seed, "Initialization seed")->capture_default_str();
  fit->add_option("--out", fit_out, "Model document")->required();
  fit->add_option("--trace", fit_trace, "Per-iteration CSV: iteration,log_likelihood,mixing_steps");
  add_fit_options(fit, fit_opts);

  // predict
  auto* pred = app.add_subcommand("predict", "Write per-point class posteriors");
  std::string pred_model, pred_data, pred_label, pred_out;
  pred->add_option("--model", pred_model, "Model document")->required();
  pred->add_option("--data", pred_data, "Dataset CSV")->required();
  pred->add_option("--label-column", pred_label, "Column to drop from the features");
  pred->add_option("--out", pred_out, "Posterior CSV (p0..p{M-1})")->required();

  // evaluate
  auto* eval = app.add_subcommand("evaluate", "Purity of a model's hard assignments");
  std::string eval_model, eval_data, eval_label, eval_out;
  eval->add_option("--model", eval_model, "Model document")->required();
  eval->add_option("--data", eval_data, "Dataset CSV")->required();
  eval->add_option("--label-column", eval_label, "Ground-truth column")->required();
  eval->add_option("--out", eval_out, "CSV with header purity,n");

  // gen-relations
  auto* genrel = app.add_subcommand("gen-relations", "Sample relations from ground-truth labels");
  std::string gr_data, gr_label, gr_mode = "both", gr_out;
  long long gr_pairs = 0;
  std::uint64_t gr_seed = 0;
  genrel->add_option("--data", gr_data, "Dataset CSV")->required();
  genrel->add_option("--label-column", gr_label, "Ground-truth column")->required();
  genrel->add_option("--pairs", gr_pairs, "Number of pairs")->required();
  genrel->add_option("--mode", gr_mode, "both, must or cannot")->capture_default_str();
  genrel->add_option("--seed", gr_seed, "Sampling seed")->capture_default_str();
  genrel->add_option("--out", gr_out, "Relation file")->required();

  // gen-data
  auto* gendata = app.add_subcommand("gen-data", "Write a labeled synthetic dataset");
  std::string gd_kind = "two-cluster", gd_out;
  int gd_n = 200;
  double gd_noise = 0.2;
  std::uint64_t gd_seed = 0;
  gendata->add_option("--kind", gd_kind, "two-cluster or two-moons")->capture_default_str();
  gendata->add_option("--n-per-class", gd_n, "Points per class")->capture_default_str();
  gendata->add_option("--noise", gd_noise, "Noise scale")->capture_default_str();
  gendata->add_option("--seed", gd_seed, "Generator seed")->capture_default_str();
  gendata->add_option("--out", gd_out, "CSV with columns x0,x1,label")->required();

  // trials
  auto* trials = app.add_subcommand("trials", "Repeated init/relations/fit/purity runs per link budget");
  std::string tr_data, tr_label, tr_mode = "both", tr_out;
  int tr_M = 2, tr_K = 1, tr_n = 100;
  std::vector<int> tr_Ks;
  std::vector<long long> tr_budgets{0};
  std::uint64_t tr_seed = 0;
  FitOptions tr_opts;
  trials->add_option("--data", tr_data, "Dataset CSV")->required();
  trials->add_option("--label-column", tr_label, "Ground-truth column")->required();
  trials->add_option("-M,--classes", tr_M, "Number of classes")->capture_default_str();
  trials->add_option("--clusters", tr_K, "Gaussians per class")->capture_default_str();
  trials->add_option("--clusters-per-class", tr_Ks, "Gaussians for each class");
  trials->add_option("--budgets", tr_budgets, "Link budgets")->delimiter(',');
  trials->add_option("--mode", tr_mode, "both, must or cannot")->capture_default_str();
  trials->add_option("--trials", tr_n, "Trials per budget")->capture_default_str();
  trials->add_option("--seed", tr_seed, "Base seed")->capture_default_str();
  trials->add_option("--out", tr_out, "Sweep CSV")->required();
  add_fit_options(trials, tr_opts);

  // pca
  auto* pca = app.add_subcommand("pca", "Project a dataset onto its leading principal components");
  std::string pca_data, pca_label, pca_out, pca_transform;
  int pca_k = 2;
  pca->add_option("--data", pca_data, "Dataset CSV")->required();
  pca->add_option("--label-column", pca_label, "Column carried through unchanged");
  pca->add_option("-k,--components", pca_k, "Number of components")->capture_default_str();
  pca->add_option("--out", pca_out, "Projected CSV")->required();
  pca->add_option("--transform", pca_transform, "Transform document");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::string msg = e.what();
    for (char& c : msg)
      if (c == '\n') c = ' ';
    std::fprintf(stderr, "error: Usage: %s\n", msg.c_str());
    return 2;
  }

  try {
    if (threads < 1) throw Error(ErrorCode::InvalidConfig, "--threads must be >= 1");
    if (isa == "scalar") kernels::select(kernels::Isa::Scalar);
    if (isa == "avx2" && kernels::select(kernels::Isa::Avx2) != kernels::Isa::Avx2)
      throw Error(ErrorCode::InvalidConfig, "AVX2 kernels are not available on this machine");

    if (*fit) {
      const auto csv = load_csv(fit_data, label_opt(fit_label));
      const Dataset& data = csv.dataset;
      const RelationSet rel = fit_rel.empty() ? RelationSet{} : load_relations(fit_rel, data.n());
      const FitConfig cfg = make_fit_config(fit_opts, fit_seed, threads);
      std::string doc;
      FitTrace trace;
      if (!fit_init.empty()) {
        const AnyModel init = deserialize_model(read_file(fit_init));
        if (const auto* f = std::get_if<FlatModel>(&init)) {
          auto r = fit_flat(data, rel, *f, cfg);
          doc = serialize_model(r.model);
          trace = std::move(r.trace);
        } else {
          auto r = fit_hier(data, rel, std::get<HierModel>(init), cfg);
          doc = serialize_model(r.model);
          trace = std::move(r.trace);
        }
      } else {
        const auto ks = clusters_for(fit_M, fit_K, fit_Ks);
        if (all_ones(ks)) {
          auto r = fit_flat(data, rel, fit_M, cfg);
          doc = serialize_model(r.model);
          trace = std::move(r.trace);
        } else {
          auto r = fit_hier(data, rel, fit_M, ks, cfg);
          doc = serialize_model(r.model);
          trace = std::move(r.trace);
        }
      }
      for (const auto& w : trace.warnings) std::fprintf(stderr, "warning: %s\n", w.c_str());
      if (!fit_trace.empty()) {
        std::ostringstream os;
        os << "iteration,log_likelihood,mixing_steps\n";
        for (std::size_t t = 0; t < trace.log_likelihood.size(); ++t) {
          os << t << ',' << format_double(trace.log_likelihood[t]) << ',';
          if (t > 0) os << trace.mixing_steps[t - 1];
          os << '\n';
        }
        atomic_write(fit_trace, os.str());
      }
      atomic_write(fit_out, doc);
      std::printf("iterations %d converged %d log_likelihood %s\n", trace.iterations, trace.converged ? 1 : 0,
                  format_double(trace.log_likelihood.back()).c_str());
    } else if (*pred) {
      const AnyModel model = deserialize_model(read_file(pred_model));
      const auto csv = load_csv(pred_data, label_opt(pred_label));
      atomic_write(pred_out, posterior_csv(posteriors(model, csv.dataset)));
    } else if (*eval) {
      const AnyModel model = deserialize_model(read_file(eval_model));
      const auto csv = load_csv(eval_data, eval_label);
      const double p = purity(hard_assign(posteriors(model, csv.dataset)), csv.dataset.labels());
      if (!eval_out.empty()) atomic_write(eval_out, "purity,n\n" + format_double(p) + "," + std::to_string(csv.dataset.n()) + "\n");
      std::printf("purity %s\n", format_double(p).c_str());
    } else if (*genrel) {
      const auto csv = load_csv(gr_data, gr_label);
      RngStream rng(gr_seed);
      const RelationSet rel = sample_relations(csv.dataset.labels(), gr_pairs, rng, parse_relation_mode(gr_mode));
      std::ostringstream os;
      write_relations(os, rel);
      atomic_write(gr_out, os.str());
      std::printf("must %zu cannot %zu\n", rel.must.size(), rel.cannot.size());
    } else if (*gendata) {
      const Dataset d = gen_synthetic(parse_synthetic_kind(gd_kind), gd_n, gd_noise, gd_seed);
      std::ostringstream os;
      write_points_csv(os, d.points(), &d.labels());
      atomic_write(gd_out, os.str());
    } else if (*trials) {
      const auto csv = load_csv(tr_data, tr_label);
      TrialConfig tc;
      tc.classes = tr_M;
      tc.clusters_per_class = clusters_for(tr_M, tr_K, tr_Ks);
      tc.budgets = tr_budgets;
      tc.mode = parse_relation_mode(tr_mode);
      tc.n_trials = tr_n;
      tc.base_seed = tr_seed;
      tc.fit = make_fit_config(tr_opts, 0, threads);
      const auto reports = run_trials(csv.dataset, tc);
      std::ostringstream os;
      write_trials_csv(os, reports);
      atomic_write(tr_out, os.str());
      for (const auto& r : reports)
        std::printf("budget %lld mean %s std %s failed %d\n", r.budget, format_double(r.mean).c_str(),
                    format_double(r.stddev).c_str(), r.failed);
    } else if (*pca) {
      const auto csv = load_csv(pca_data, label_opt(pca_label));
      const PcaTransform t = fit_pca(csv.dataset, pca_k);
      const RowMatrix proj = apply_pca(t, csv.dataset.points());
      std::vector<std::string> names;
      for (int c = 0; c < pca_k; ++c) names.push_back("pc" + std::to_string(c));
      std::ostringstream os;
      write_points_csv(os, proj, csv.dataset.has_labels() ? &csv.dataset.labels() : nullptr, &names);
      if (!pca_transform.empty()) atomic_write(pca_transform, serialize_pca(t));
      atomic_write(pca_out, os.str());
    }
  } catch (const Error& e) {
    std::string msg = e.what();
    for (char& c : msg)
      if (c == '\n') c = ' ';
    std::fprintf(stderr, "error: %s: %s\n", std::string(error_code_name(e.code())).c_str(), msg.c_str());
    return exit_code(e.code());
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: Internal: %s\n", e.what());
    return 4;
  }
  return 0;
}
