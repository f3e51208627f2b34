#include <cstdint>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "smart/bench.hpp"
#include "smart/datagen.hpp"
#include "smart/io.hpp"
#include "smart/pruning.hpp"

namespace {

// All randomness flows from --seed; this is the value used when the flag is
// absent.
constexpr std::uint64_t kDefaultSeed = 20240101;

std::vector<std::string> split_list(const std::string& csv) {
  std::vector<std::string> out;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(item);
  return out;
}

struct SharedFlags {
  std::uint64_t seed = kDefaultSeed;
  smart::ForwardConfig forward;
  smart::TreeConfig tree;
  bool no_prune = false;
  std::string categorical;

  void attach(CLI::App* cmd) {
    cmd->add_option("--seed", seed, "Random seed");
    cmd->add_option("--max-terms", forward.max_terms,
                    "Forward-pass coefficient budget");
    cmd->add_option("--max-degree", forward.max_degree,
                    "Maximum interaction degree");
    cmd->add_option("--min-rss-decrease", forward.min_rss_decrease,
                    "Relative RSS-decrease stopping threshold");
    cmd->add_option("--gcv-penalty", forward.gcv_penalty,
                    "GCV cost per knot (negative = auto)");
    cmd->add_option("--cv-threshold", tree.cv_improvement_threshold,
                    "Relative CV improvement required to confirm a split");
    cmd->add_option("--cv-folds", tree.cv_folds, "Cross-validation folds");
    cmd->add_option("--fit-fraction", tree.fit_fraction,
                    "Fraction of node rows used for candidate fitting");
    cmd->add_flag("--no-prune", no_prune, "Skip the backward pruning pass");
    cmd->add_option("--categorical", categorical,
                    "Comma-separated categorical column names");
  }
};

int cmd_train(const std::string& input, const std::string& target,
              const std::string& out_path, const SharedFlags& flags) {
  smart::CsvTable table = smart::read_csv(input);
  smart::Dataset data =
      smart::dataset_from_table(table, target, split_list(flags.categorical));
  data.seed = flags.seed;

  smart::ModelFile file;
  file.seed = flags.seed;
  file.forward_config = flags.forward;
  file.tree_config = flags.tree;
  file.tree_config.rng_seed = flags.seed;
  file.column_names = data.column_names;
  file.column_kinds = data.column_kinds;

  bool constant_target = true;
  for (std::size_t i = 1; i < data.n; ++i)
    if (data.Y[i] != data.Y[0]) {
      constant_target = false;
      break;
    }

  if (constant_target) {
    std::cerr << "warning: target column '" << target
              << "' is constant; emitting an intercept-only model\n";
    auto leaf = std::make_unique<smart::TreeNode>();
    leaf->leaf_model.intercept = data.n > 0 ? data.Y[0] : 0.0;
    file.tree = std::move(leaf);
    smart::save_model(file, out_path);
    std::cout << "terms: 0\nsplits: 0\ntraining rss: 0\n";
    return 0;
  }

  smart::NodeModel forward = smart::forward_pass(data, file.forward_config);
  auto tree = smart::grow(data, forward, file.tree_config);
  if (!flags.no_prune)
    tree = smart::prune_tree(std::move(tree), data, file.forward_config);

  double rss = 0.0;
  for (std::size_t i = 0; i < data.n; ++i) {
    double r = data.Y[i] - smart::predict_tree(*tree, data.row(i));
    rss += r * r;
  }
  std::size_t terms = forward.terms.size();
  std::size_t splits = smart::collect_splits(*tree).size();
  file.tree = std::move(tree);
  smart::save_model(file, out_path);
  std::cout << "terms: " << terms << "\nsplits: " << splits
            << "\ntraining rss: " << rss << "\n";
  return 0;
}

int cmd_predict(const std::string& model_path, const std::string& input,
                const std::string& out_path) {
  smart::ModelFile file = smart::load_model(model_path);
  smart::CsvTable table = smart::read_csv(input);

  std::vector<std::size_t> column_of;
  std::vector<std::string> missing;
  for (const auto& name : file.column_names) {
    std::size_t found = table.header.size();
    for (std::size_t c = 0; c < table.header.size(); ++c)
      if (table.header[c] == name) {
        found = c;
        break;
      }
    if (found == table.header.size())
      missing.push_back(name);
    else
      column_of.push_back(found);
  }
  if (!missing.empty()) {
    std::ostringstream msg;
    msg << "input is missing model columns:";
    for (const auto& name : missing) msg << " " << name;
    throw smart::StructuralError(msg.str());
  }

  std::ofstream file_out;
  std::ostream* out = &std::cout;
  if (!out_path.empty()) {
    file_out.open(out_path);
    if (!file_out) throw smart::StructuralError("cannot open " + out_path);
    out = &file_out;
  }
  out->precision(17);

  for (std::size_t c = 0; c < table.header.size(); ++c)
    *out << table.header[c] << ",";
  *out << "prediction\n";

  std::vector<double> row(file.column_names.size());
  for (const auto& cells : table.rows) {
    for (std::size_t j = 0; j < column_of.size(); ++j)
      row[j] = cells[column_of[j]];
    double y = smart::predict_tree(*file.tree, row);
    for (double cell : cells) *out << cell << ",";
    *out << y << "\n";
  }
  return 0;
}

int cmd_datagen(const std::string& name, std::size_t n, std::size_t d,
                double sigma, int k, std::uint64_t seed,
                const std::string& out_path, bool include_truth) {
  smart::Dataset data;
  if (name == "visual")
    data = smart::gen_visual(n, seed);
  else if (name == "friedman1")
    data = smart::gen_friedman1(n, d, sigma, seed);
  else if (name == "friedman2")
    data = smart::gen_friedman2(n, sigma, seed);
  else if (name == "friedman3")
    data = smart::gen_friedman3(n, sigma, seed);
  else if (name == "synthetic")
    data = smart::gen_synthetic(k, n, seed);
  else if (name == "tree")
    data = smart::gen_tree_dataset(n, seed);
  else
    throw smart::StructuralError("unknown generator: " + name);

  std::ofstream file_out;
  std::ostream* out = &std::cout;
  if (!out_path.empty()) {
    file_out.open(out_path);
    if (!file_out) throw smart::StructuralError("cannot open " + out_path);
    out = &file_out;
  }
  smart::write_dataset_csv(data, *out, include_truth);
  return 0;
}

int cmd_bench(const std::string& suite, std::size_t reps, std::uint64_t seed,
              const std::string& format, bool check) {
  if (check) {
    auto checks = smart::check_suite(suite, seed);
    bool all_ok = true;
    for (const auto& c : checks) {
      std::cout << (c.passed ? "PASS" : "FAIL") << " " << c.name;
      if (!c.detail.empty()) std::cout << " (" << c.detail << ")";
      std::cout << "\n";
      all_ok = all_ok && c.passed;
    }
    return all_ok ? 0 : 1;
  }

  auto specs = smart::make_suite(suite, reps, seed);
  std::vector<smart::SuiteRow> rows;
  for (const auto& spec : specs)
    rows.push_back({spec, smart::run_replicated(spec)});
  smart::ReportFormat fmt = format == "markdown" ? smart::ReportFormat::Markdown
                                                 : smart::ReportFormat::Csv;
  std::cout << smart::report(rows, fmt);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spline models in tree leaves: train, predict, datagen, bench"};
  app.require_subcommand(1);

  SharedFlags flags;

  auto* train = app.add_subcommand("train", "Fit a model on a CSV file");
  std::string train_input, train_target, train_out = "model.json";
  train->add_option("--input,-i", train_input, "Training CSV")->required();
  train->add_option("--target,-t", train_target, "Response column name")
      ->required();
  train->add_option("--out,-o", train_out, "Model output path");
  flags.attach(train);

  auto* predict = app.add_subcommand("predict", "Score a CSV with a model");
  std::string pred_model, pred_input, pred_out;
  predict->add_option("--model,-m", pred_model, "Model file")->required();
  predict->add_option("--input,-i", pred_input, "Input CSV")->required();
  predict->add_option("--out,-o", pred_out, "Output CSV (default stdout)");

  auto* datagen = app.add_subcommand("datagen", "Generate a benchmark dataset");
  std::string gen_name, gen_out;
  std::size_t gen_n = 1000, gen_d = 10;
  double gen_sigma = 1.0;
  int gen_k = 1;
  std::uint64_t gen_seed = kDefaultSeed;
  bool gen_truth = false;
  datagen
      ->add_option("name", gen_name,
                   "visual|friedman1|friedman2|friedman3|synthetic|tree")
      ->required();
  datagen->add_option("--n", gen_n, "Rows");
  datagen->add_option("--d", gen_d, "Features (friedman1)");
  datagen->add_option("--sigma", gen_sigma, "Noise standard deviation");
  datagen->add_option("--k", gen_k, "Synthetic equation index, 1..5");
  datagen->add_option("--seed", gen_seed, "Random seed");
  datagen->add_option("--out", gen_out, "Output CSV (default stdout)");
  datagen->add_flag("--truth", gen_truth, "Include the noiseless truth column");

  auto* bench = app.add_subcommand("bench", "Run a benchmark suite");
  std::string bench_suite, bench_format = "csv";
  std::size_t bench_reps = 1;
  std::uint64_t bench_seed = kDefaultSeed;
  bool bench_check = false;
  bench
      ->add_option("--suite", bench_suite,
                   "visual|friedman1|friedman2|friedman3|synthetic|tree")
      ->required();
  bench->add_option("--reps", bench_reps, "Replications per cell");
  bench->add_option("--seed", bench_seed, "Random seed");
  bench->add_option("--format", bench_format, "csv|markdown");
  bench->add_flag("--check", bench_check,
                  "Run suite assertions; nonzero exit on failure");

  CLI11_PARSE(app, argc, argv);

  try {
    if (train->parsed())
      return cmd_train(train_input, train_target, train_out, flags);
    if (predict->parsed()) return cmd_predict(pred_model, pred_input, pred_out);
    if (datagen->parsed())
      return cmd_datagen(gen_name, gen_n, gen_d, gen_sigma, gen_k, gen_seed,
                         gen_out, gen_truth);
    if (bench->parsed())
      return cmd_bench(bench_suite, bench_reps, bench_seed, bench_format,
                       bench_check);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
