#include "smart/io.hpp"

#include <fstream>
#include <ostream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace smart {

using nlohmann::json;

namespace {

std::string kind_name(FactorKind k) {
  switch (k) {
    case FactorKind::Linear:
      return "linear";
    case FactorKind::HingePos:
      return "hinge_pos";
    case FactorKind::HingeNeg:
      return "hinge_neg";
  }
  return "linear";
}

FactorKind kind_from_name(const std::string& s) {
  if (s == "linear") return FactorKind::Linear;
  if (s == "hinge_pos") return FactorKind::HingePos;
  if (s == "hinge_neg") return FactorKind::HingeNeg;
  throw StructuralError("unknown factor kind: " + s);
}

}  // namespace

json model_to_json(const NodeModel& model) {
  json terms = json::array();
  for (const auto& term : model.terms) {
    json factors = json::array();
    for (const auto& f : term.factors)
      factors.push_back({{"kind", kind_name(f.kind)},
                         {"feature", f.feature},
                         {"knot", f.knot}});
    terms.push_back({{"factors", factors}});
  }
  return {{"intercept", model.intercept},
          {"terms", terms},
          {"coefficients", model.coefficients}};
}

NodeModel model_from_json(const json& j) {
  NodeModel model;
  model.intercept = j.at("intercept").get<double>();
  for (const auto& jt : j.at("terms")) {
    BasisTerm term;
    for (const auto& jf : jt.at("factors"))
      term.factors.push_back({kind_from_name(jf.at("kind").get<std::string>()),
                              jf.at("feature").get<std::size_t>(),
                              jf.at("knot").get<double>()});
    model.terms.push_back(std::move(term));
  }
  model.coefficients = j.at("coefficients").get<std::vector<double>>();
  if (model.coefficients.size() != model.terms.size())
    throw StructuralError("model JSON: coefficients/terms length mismatch");
  return model;
}

json tree_to_json(const TreeNode& root) {
  if (root.is_leaf()) return {{"model", model_to_json(root.leaf_model)}};
  return {{"variable", root.split->variable},
          {"value", root.split->value},
          {"categorical", root.split->categorical},
          {"left", tree_to_json(*root.left)},
          {"right", tree_to_json(*root.right)}};
}

std::unique_ptr<TreeNode> tree_from_json(const json& j) {
  auto node = std::make_unique<TreeNode>();
  if (j.contains("model")) {
    node->leaf_model = model_from_json(j.at("model"));
    return node;
  }
  SplitCandidate split;
  split.variable = j.at("variable").get<std::size_t>();
  split.value = j.at("value").get<double>();
  split.categorical = j.value("categorical", false);
  node->split = split;
  node->left = tree_from_json(j.at("left"));
  node->right = tree_from_json(j.at("right"));
  return node;
}

void save_model(const ModelFile& file, const std::string& path) {
  json columns = json::array();
  for (std::size_t j = 0; j < file.column_names.size(); ++j)
    columns.push_back(
        {{"name", file.column_names[j]},
         {"kind", file.column_kinds[j] == ColumnKind::Categorical
                      ? "categorical"
                      : "continuous"}});
  json j = {
      {"format_version", file.format_version},
      {"seed", file.seed},
      {"forward_config",
       {{"max_terms", file.forward_config.max_terms},
        {"max_degree", file.forward_config.max_degree},
        {"min_rss_decrease", file.forward_config.min_rss_decrease},
        {"gcv_penalty", file.forward_config.gcv_penalty}}},
      {"tree_config",
       {{"cv_improvement_threshold", file.tree_config.cv_improvement_threshold},
        {"cv_folds", file.tree_config.cv_folds},
        {"fit_fraction", file.tree_config.fit_fraction},
        {"small_node_factor", file.tree_config.small_node_factor}}},
      {"columns", columns},
      {"tree", tree_to_json(*file.tree)}};
  std::ofstream out(path, std::ios::binary);
  if (!out) throw StructuralError("cannot open for writing: " + path);
  out << j.dump(2) << "\n";
}

ModelFile load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw StructuralError("cannot open model file: " + path);
  json j = json::parse(in);
  ModelFile file;
  file.format_version = j.at("format_version").get<int>();
  if (file.format_version != 1)
    throw StructuralError("unsupported model format version");
  file.seed = j.at("seed").get<std::uint64_t>();
  const auto& fc = j.at("forward_config");
  file.forward_config.max_terms = fc.at("max_terms").get<std::size_t>();
  file.forward_config.max_degree = fc.at("max_degree").get<std::size_t>();
  file.forward_config.min_rss_decrease = fc.at("min_rss_decrease").get<double>();
  file.forward_config.gcv_penalty = fc.at("gcv_penalty").get<double>();
  const auto& tc = j.at("tree_config");
  file.tree_config.cv_improvement_threshold =
      tc.at("cv_improvement_threshold").get<double>();
  file.tree_config.cv_folds = tc.at("cv_folds").get<std::size_t>();
  file.tree_config.fit_fraction = tc.at("fit_fraction").get<double>();
  file.tree_config.small_node_factor =
      tc.at("small_node_factor").get<std::size_t>();
  file.tree_config.rng_seed = file.seed;
  for (const auto& col : j.at("columns")) {
    file.column_names.push_back(col.at("name").get<std::string>());
    file.column_kinds.push_back(col.at("kind").get<std::string>() ==
                                        "categorical"
                                    ? ColumnKind::Categorical
                                    : ColumnKind::Continuous);
  }
  file.tree = tree_from_json(j.at("tree"));
  return file;
}

CsvTable read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw StructuralError("cannot open CSV file: " + path);
  CsvTable table;
  std::string line;
  std::size_t line_no = 0;
  auto split_line = [](const std::string& l) {
    std::vector<std::string> cells;
    std::string cell;
    std::stringstream ss(l);
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (!l.empty() && l.back() == ',') cells.push_back("");
    return cells;
  };
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    ++line_no;
    if (line.empty()) continue;
    auto cells = split_line(line);
    if (line_no == 1) {
      table.header = cells;
      continue;
    }
    if (cells.size() != table.header.size())
      throw StructuralError("CSV row " + std::to_string(line_no) + " has " +
                            std::to_string(cells.size()) + " cells, expected " +
                            std::to_string(table.header.size()));
    std::vector<double> row(cells.size());
    for (std::size_t c = 0; c < cells.size(); ++c) {
      try {
        std::size_t pos = 0;
        row[c] = std::stod(cells[c], &pos);
        if (pos != cells[c].size()) throw std::invalid_argument("trailing");
      } catch (const std::exception&) {
        throw StructuralError("CSV row " + std::to_string(line_no) +
                              ", column '" + table.header[c] +
                              "': cannot parse '" + cells[c] + "' as a number");
      }
    }
    table.rows.push_back(std::move(row));
  }
  if (table.header.empty()) throw StructuralError("CSV file has no header");
  return table;
}

Dataset dataset_from_table(const CsvTable& table, const std::string& target,
                           const std::vector<std::string>& categorical) {
  std::size_t target_col = table.header.size();
  for (std::size_t c = 0; c < table.header.size(); ++c)
    if (table.header[c] == target) target_col = c;
  if (target_col == table.header.size())
    throw StructuralError("target column '" + target + "' not found");

  Dataset data;
  data.n = table.rows.size();
  data.m = table.header.size() - 1;
  data.column_kinds.assign(data.m, ColumnKind::Continuous);
  std::size_t out_c = 0;
  for (std::size_t c = 0; c < table.header.size(); ++c) {
    if (c == target_col) continue;
    data.column_names.push_back(table.header[c]);
    for (const auto& cat : categorical)
      if (cat == table.header[c])
        data.column_kinds[out_c] = ColumnKind::Categorical;
    ++out_c;
  }
  data.X.resize(data.n * data.m);
  data.Y.resize(data.n);
  for (std::size_t i = 0; i < data.n; ++i) {
    std::size_t oc = 0;
    for (std::size_t c = 0; c < table.header.size(); ++c) {
      if (c == target_col) {
        data.Y[i] = table.rows[i][c];
        continue;
      }
      data.X[i * data.m + oc] = table.rows[i][c];
      ++oc;
    }
  }
  return data;
}

void write_dataset_csv(const Dataset& data, std::ostream& out,
                       bool include_truth) {
  out.precision(17);
  for (std::size_t j = 0; j < data.m; ++j) {
    out << (j < data.column_names.size() ? data.column_names[j]
                                         : "x" + std::to_string(j + 1));
    out << ",";
  }
  out << "y";
  if (include_truth && data.has_truth()) out << ",truth";
  out << "\n";
  for (std::size_t i = 0; i < data.n; ++i) {
    for (std::size_t j = 0; j < data.m; ++j) out << data.x(i, j) << ",";
    out << data.Y[i];
    if (include_truth && data.has_truth()) out << "," << data.truth[i];
    out << "\n";
  }
}

}  // namespace smart
