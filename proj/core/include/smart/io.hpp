#pragma once

#include <iosfwd>
#include <string>

#include <nlohmann/json_fwd.hpp>

#include "smart/basis.hpp"
#include "smart/dataset.hpp"
#include "smart/tree.hpp"

namespace smart {

nlohmann::json model_to_json(const NodeModel& model);
NodeModel model_from_json(const nlohmann::json& j);

nlohmann::json tree_to_json(const TreeNode& root);
std::unique_ptr<TreeNode> tree_from_json(const nlohmann::json& j);

/// Complete persisted artifact: tree, configs, schema, seed, format version.
struct ModelFile {
  int format_version = 1;
  std::uint64_t seed = 0;
  ForwardConfig forward_config;
  TreeConfig tree_config;
  std::vector<std::string> column_names;
  std::vector<ColumnKind> column_kinds;
  std::unique_ptr<TreeNode> tree;
};

void save_model(const ModelFile& file, const std::string& path);
ModelFile load_model(const std::string& path);

/// Strict CSV: header row, '.' decimal, every cell numeric, no missing
/// values. Parse failures name the offending row and column.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};
CsvTable read_csv(const std::string& path);

/// Builds a dataset from a table: `target` names the response column;
/// `categorical` lists categorical feature columns by name.
Dataset dataset_from_table(const CsvTable& table, const std::string& target,
                           const std::vector<std::string>& categorical);

void write_dataset_csv(const Dataset& data, std::ostream& out,
                       bool include_truth);

}  // namespace smart
