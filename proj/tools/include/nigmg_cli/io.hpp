#pragma once

// CSV and JSON plumbing for the command-line tool.

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"
#include "nigmg/nodemodel.hpp"

namespace nigmg::cli {

struct DataTable {
  std::vector<std::string> header;  // empty when the file has none
  std::vector<std::vector<double>> rows;
};

/// One functional observation per row. Throws ErrorKind::parse with the
/// offending line and column on malformed cells.
DataTable read_data_csv(const std::filesystem::path& path, bool header);
DataTable parse_data_csv(const std::string& text, bool header);

struct DesignTable {
  std::vector<std::string> factor_names;
  std::vector<std::vector<std::string>> level_names;  // sorted; [0] is the baseline
  FactorDesign design;
};

DesignTable read_design_csv(const std::filesystem::path& path, bool header, std::size_t rows);
DesignTable parse_design_csv(const std::string& text, bool header, std::size_t rows);

/// Shortest text that reads back to the same double.
std::string format_double(double v);

/// Writes `columns` side by side under `header`; all columns equal length.
void write_columns(const std::filesystem::path& path, const std::vector<std::string>& header,
                   const std::vector<std::vector<double>>& columns);
void write_text(const std::filesystem::path& path, const std::string& text);
std::string read_text(const std::filesystem::path& path);

nlohmann::ordered_json hyperparams_to_json(const HyperParams& hp);
/// Missing keys keep the values of `base`.
HyperParams hyperparams_from_json(const nlohmann::json& j, HyperParams base);

}  // namespace nigmg::cli
