#pragma once

#include <string>
#include <vector>

#include "smart/datagen.hpp"
#include "smart/forward.hpp"
#include "smart/tree.hpp"

namespace smart {

enum class ModelMode { Smart, MarsMode };

struct ExperimentSpec {
  std::string dataset;  // visual | friedman1 | friedman2 | friedman3 |
                        // synthetic | tree
  std::size_t n = 1000;
  std::size_t d = 10;      // friedman1 feature count
  double sigma = 1.0;      // noise level where the generator takes one
  int synthetic_k = 1;     // synthetic equation index, 1..5
  ModelMode model = ModelMode::Smart;
  ForwardConfig forward;
  TreeConfig tree;
  std::size_t replications = 1;
  std::uint64_t seed = 0;
};

struct ExperimentResult {
  double rmse_true = 0.0;  // final model vs noiseless truth at training X
  double rmse_forward = 0.0;
  double rmse_split = 0.0;
  double rmse_pruned = 0.0;
  std::vector<SplitCandidate> splits;
  double wall_time = 0.0;  // seconds
};

/// Generates the spec's dataset and runs the full pipeline (forward pass,
/// tree growth, per-leaf pruning), recording per-stage RMSE against truth.
/// MarsMode disables tree growth via an infinite CV threshold.
ExperimentResult run(const ExperimentSpec& spec);

/// All replications of one spec; replication r uses a seed derived from
/// (spec.seed, r).
std::vector<ExperimentResult> run_replicated(const ExperimentSpec& spec);

struct SuiteRow {
  ExperimentSpec spec;
  std::vector<ExperimentResult> results;
};

enum class ReportFormat { Csv, Markdown };

/// Deterministic table, one row per spec: dataset, n, sigma, model, rmse
/// (mean over replications), n_splits. A standard-error column appears when
/// any row has more than one replication.
std::string report(const std::vector<SuiteRow>& rows, ReportFormat format);

/// Builds the specs of a named suite (friedman1|friedman2|friedman3|
/// synthetic|tree|visual), both SMART and MARS-mode rows.
std::vector<ExperimentSpec> make_suite(const std::string& name,
                                       std::size_t reps, std::uint64_t seed);

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

/// Suite-level sanity assertions for `--check` mode.
std::vector<CheckResult> check_suite(const std::string& name,
                                     std::uint64_t seed);

double rmse_against_truth(const TreeNode& root, const Dataset& data);

}  // namespace smart
