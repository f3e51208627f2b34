#include "smart/bench.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <sstream>

#include "smart/pruning.hpp"
#include "smart/rng.hpp"

namespace smart {

namespace {

Dataset generate(const ExperimentSpec& spec, std::uint64_t seed) {
  if (spec.dataset == "visual") return gen_visual(spec.n, seed);
  if (spec.dataset == "friedman1")
    return gen_friedman1(spec.n, spec.d, spec.sigma, seed);
  if (spec.dataset == "friedman2") return gen_friedman2(spec.n, spec.sigma, seed);
  if (spec.dataset == "friedman3") return gen_friedman3(spec.n, spec.sigma, seed);
  if (spec.dataset == "synthetic")
    return gen_synthetic(spec.synthetic_k, spec.n, seed);
  if (spec.dataset == "tree") return gen_tree_dataset(spec.n, seed);
  throw StructuralError("unknown dataset generator: " + spec.dataset);
}

double rmse_model_vs_truth(const NodeModel& model, const Dataset& data) {
  double acc = 0.0;
  for (std::size_t i = 0; i < data.n; ++i) {
    double r = data.truth[i] - predict(model, data.row(i));
    acc += r * r;
  }
  return std::sqrt(acc / static_cast<double>(data.n));
}

}  // namespace

double rmse_against_truth(const TreeNode& root, const Dataset& data) {
  double acc = 0.0;
  for (std::size_t i = 0; i < data.n; ++i) {
    double r = data.truth[i] - predict_tree(root, data.row(i));
    acc += r * r;
  }
  return std::sqrt(acc / static_cast<double>(data.n));
}

ExperimentResult run(const ExperimentSpec& spec) {
  Dataset data = generate(spec, spec.seed);
  if (!data.has_truth())
    throw StructuralError("run: generator produced no truth column");

  TreeConfig tree_cfg = spec.tree;
  tree_cfg.rng_seed = spec.seed;
  if (spec.model == ModelMode::MarsMode)
    tree_cfg.cv_improvement_threshold = std::numeric_limits<double>::infinity();

  ExperimentResult result;
  auto t0 = std::chrono::steady_clock::now();
  NodeModel forward = forward_pass(data, spec.forward);
  result.rmse_forward = rmse_model_vs_truth(forward, data);
  auto tree = grow(data, forward, tree_cfg);
  result.rmse_split = rmse_against_truth(*tree, data);
  tree = prune_tree(std::move(tree), data, spec.forward);
  result.rmse_pruned = rmse_against_truth(*tree, data);
  auto t1 = std::chrono::steady_clock::now();
  result.rmse_true = result.rmse_pruned;
  result.splits = collect_splits(*tree);
  result.wall_time = std::chrono::duration<double>(t1 - t0).count();
  return result;
}

std::vector<ExperimentResult> run_replicated(const ExperimentSpec& spec) {
  std::vector<ExperimentResult> results;
  for (std::size_t r = 0; r < spec.replications; ++r) {
    ExperimentSpec rep = spec;
    rep.seed = spec.replications == 1 ? spec.seed : Rng::mix(spec.seed, r);
    rep.replications = 1;
    results.push_back(run(rep));
  }
  return results;
}

std::string report(const std::vector<SuiteRow>& rows, ReportFormat format) {
  bool with_se = false;
  for (const auto& row : rows)
    if (row.results.size() > 1) with_se = true;

  std::vector<std::vector<std::string>> cells;
  std::vector<std::string> header = {"dataset", "n", "sigma", "model", "rmse"};
  if (with_se) header.push_back("rmse_se");
  header.push_back("n_splits");

  for (const auto& row : rows) {
    double mean = 0.0;
    double mean_splits = 0.0;
    for (const auto& r : row.results) {
      mean += r.rmse_true;
      mean_splits += static_cast<double>(r.splits.size());
    }
    auto k = static_cast<double>(row.results.size());
    mean /= k;
    mean_splits /= k;
    double se = 0.0;
    if (row.results.size() > 1) {
      double var = 0.0;
      for (const auto& r : row.results)
        var += (r.rmse_true - mean) * (r.rmse_true - mean);
      var /= (k - 1.0);
      se = std::sqrt(var / k);
    }
    std::string name = row.spec.dataset;
    if (row.spec.dataset == "synthetic")
      name += std::to_string(row.spec.synthetic_k);

    std::ostringstream rmse_s, se_s, splits_s;
    rmse_s.precision(6);
    rmse_s << mean;
    se_s.precision(6);
    se_s << se;
    splits_s.precision(6);
    splits_s << mean_splits;

    std::vector<std::string> line = {
        name, std::to_string(row.spec.n), std::to_string(row.spec.sigma),
        row.spec.model == ModelMode::Smart ? "smart" : "mars_mode",
        rmse_s.str()};
    if (with_se) line.push_back(se_s.str());
    line.push_back(splits_s.str());
    cells.push_back(std::move(line));
  }

  std::ostringstream out;
  if (format == ReportFormat::Csv) {
    for (std::size_t c = 0; c < header.size(); ++c)
      out << header[c] << (c + 1 < header.size() ? "," : "\n");
    for (const auto& line : cells)
      for (std::size_t c = 0; c < line.size(); ++c)
        out << line[c] << (c + 1 < line.size() ? "," : "\n");
  } else {
    auto emit = [&out](const std::vector<std::string>& line) {
      out << "|";
      for (const auto& cell : line) out << " " << cell << " |";
      out << "\n";
    };
    emit(header);
    std::vector<std::string> rule(header.size(), "---");
    emit(rule);
    for (const auto& line : cells) emit(line);
  }
  return out.str();
}

std::vector<ExperimentSpec> make_suite(const std::string& name,
                                       std::size_t reps, std::uint64_t seed) {
  std::vector<ExperimentSpec> specs;
  auto add = [&](ExperimentSpec spec) {
    spec.replications = reps;
    spec.seed = seed;
    for (ModelMode mode : {ModelMode::Smart, ModelMode::MarsMode}) {
      spec.model = mode;
      specs.push_back(spec);
    }
  };

  if (name == "visual") {
    ExperimentSpec s;
    s.dataset = "visual";
    s.n = 200;
    s.sigma = 1.0;
    s.forward.max_degree = 2;
    add(s);
  } else if (name == "friedman1") {
    for (std::size_t d : {10, 30, 50})
      for (std::size_t n : {1000, 5000})
        for (double sigma : {5.0, 20.0}) {
          ExperimentSpec s;
          s.dataset = "friedman1";
          s.n = n;
          s.d = d;
          s.sigma = sigma;
          s.forward.max_degree = 2;
          add(s);
        }
  } else if (name == "friedman2" || name == "friedman3") {
    for (std::size_t n : {1000, 5000})
      for (double sigma : {5.0, 20.0}) {
        ExperimentSpec s;
        s.dataset = name;
        s.n = n;
        s.sigma = sigma;
        s.forward.max_degree = 2;
        add(s);
      }
  } else if (name == "synthetic") {
    for (int k = 1; k <= 5; ++k) {
      ExperimentSpec s;
      s.dataset = "synthetic";
      s.synthetic_k = k;
      s.n = 5000;
      s.sigma = 10.0;
      s.forward.max_degree = 3;
      add(s);
    }
  } else if (name == "tree") {
    ExperimentSpec s;
    s.dataset = "tree";
    s.n = 20000;
    s.sigma = 1.0;
    s.forward.max_degree = 1;
    add(s);
  } else {
    throw StructuralError("unknown suite: " + name);
  }
  return specs;
}

std::vector<CheckResult> check_suite(const std::string& name,
                                     std::uint64_t seed) {
  std::vector<CheckResult> checks;
  auto record = [&checks](std::string check_name, bool ok, std::string detail) {
    checks.push_back({std::move(check_name), ok, std::move(detail)});
  };
  auto fmt = [](double v) {
    std::ostringstream s;
    s.precision(4);
    s << v;
    return s.str();
  };

  auto run_pair = [&](ExperimentSpec spec) {
    spec.model = ModelMode::Smart;
    ExperimentResult smart_res = run(spec);
    spec.model = ModelMode::MarsMode;
    ExperimentResult mars_res = run(spec);
    return std::pair{smart_res, mars_res};
  };

  if (name == "visual") {
    ExperimentSpec s;
    s.dataset = "visual";
    s.n = 200;
    s.forward.max_degree = 2;
    s.seed = seed;
    auto [sm, ma] = run_pair(s);
    record("visual: smart beats mars_mode", sm.rmse_true < ma.rmse_true,
           fmt(sm.rmse_true) + " vs " + fmt(ma.rmse_true));
    record("visual: smart rmse <= 1.0", sm.rmse_true <= 1.0, fmt(sm.rmse_true));
  } else if (name == "friedman3") {
    ExperimentSpec s;
    s.dataset = "friedman3";
    s.n = 5000;
    s.sigma = 5.0;
    s.forward.max_degree = 2;
    s.seed = seed;
    s.model = ModelMode::Smart;
    ExperimentResult r = run(s);
    record("friedman3: no splits", r.splits.empty(),
           std::to_string(r.splits.size()) + " splits");
    record("friedman3: rmse <= 0.55", r.rmse_true <= 0.55, fmt(r.rmse_true));
  } else if (name == "friedman2") {
    ExperimentSpec s;
    s.dataset = "friedman2";
    s.n = 5000;
    s.sigma = 20.0;
    s.forward.max_degree = 2;
    s.seed = seed;
    auto [sm, ma] = run_pair(s);
    record("friedman2: smart not worse than mars_mode",
           sm.rmse_true <= ma.rmse_true,
           fmt(sm.rmse_true) + " vs " + fmt(ma.rmse_true));
  } else if (name == "friedman1") {
    ExperimentSpec s;
    s.dataset = "friedman1";
    s.n = 1000;
    s.d = 10;
    s.sigma = 5.0;
    s.forward.max_degree = 2;
    s.seed = seed;
    auto [sm, ma] = run_pair(s);
    double gap = std::abs(sm.rmse_true - ma.rmse_true) /
                 std::max(ma.rmse_true, 1e-12);
    record("friedman1: smart within 25% of mars_mode", gap <= 0.25,
           fmt(sm.rmse_true) + " vs " + fmt(ma.rmse_true));
  } else if (name == "synthetic") {
    double smart_sum = 0.0, mars_sum = 0.0;
    bool switch_ok = true;
    std::string found;
    for (int k = 1; k <= 5; ++k) {
      ExperimentSpec s;
      s.dataset = "synthetic";
      s.synthetic_k = k;
      s.n = 5000;
      s.forward.max_degree = 3;
      s.seed = seed;
      auto [sm, ma] = run_pair(s);
      smart_sum += sm.rmse_true;
      mars_sum += ma.rmse_true;
      auto truth = synthetic_truth(k);
      if (sm.splits.empty() ||
          sm.splits.front().variable != truth.switch_variable ||
          std::abs(sm.splits.front().value - truth.switch_threshold) > 0.8)
        switch_ok = false;
      if (!found.empty()) found += " ";
      found += sm.splits.empty() ? "-" : fmt(sm.splits.front().value);
    }
    record("synthetic: smart average beats mars_mode average",
           smart_sum < mars_sum,
           fmt(smart_sum / 5.0) + " vs " + fmt(mars_sum / 5.0));
    record("synthetic: first split recovers each switch", switch_ok, found);
  } else if (name == "tree") {
    ExperimentSpec s;
    s.dataset = "tree";
    s.n = 20000;
    s.forward.max_degree = 1;
    s.seed = seed;
    s.model = ModelMode::Smart;
    ExperimentResult r = run(s);
    record("tree: three internal splits", r.splits.size() == 3,
           std::to_string(r.splits.size()) + " splits");
    record("tree: rmse <= 0.12", r.rmse_true <= 0.12, fmt(r.rmse_true));
  } else {
    throw StructuralError("unknown suite: " + name);
  }
  return checks;
}

}  // namespace smart
