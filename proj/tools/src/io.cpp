#include "nigmg_cli/io.hpp"

#include <algorithm>
#include <cerrno>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "nigmg/error.hpp"

namespace nigmg::cli {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  std::string out(s.substr(b, e - b + 1));
  if (out.size() >= 2 && out.front() == '"' && out.back() == '"') out = out.substr(1, out.size() - 2);
  return out;
}

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> cells;
  std::size_t start = 0;
  for (;;) {
    const auto comma = line.find(',', start);
    cells.push_back(trim(std::string_view(line).substr(start, comma - start)));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return cells;
}

// non-blank lines with their 1-based line numbers
std::vector<std::pair<std::size_t, std::string>> lines_of(const std::string& text) {
  std::vector<std::pair<std::size_t, std::string>> out;
  std::istringstream in(text);
  std::string line;
  std::size_t no = 0;
  while (std::getline(in, line)) {
    ++no;
    if (trim(line).empty()) continue;
    out.emplace_back(no, line);
  }
  return out;
}

bool parse_int(const std::string& s, long& v) {
  const char* b = s.data();
  const char* e = b + s.size();
  const auto r = std::from_chars(b, e, v);
  return r.ec == std::errc() && r.ptr == e;
}

}  // namespace

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  require(static_cast<bool>(in), ErrorKind::parse, "cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  require(static_cast<bool>(out), ErrorKind::parse, "cannot write '" + path.string() + "'");
  out << text;
}

DataTable parse_data_csv(const std::string& text, bool header) {
  DataTable t;
  const auto lines = lines_of(text);
  std::size_t first = 0;
  if (header) {
    require(!lines.empty(), ErrorKind::parse, "data file is empty");
    t.header = split_line(lines.front().second);
    first = 1;
  }
  for (std::size_t i = first; i < lines.size(); ++i) {
    const auto& [no, line] = lines[i];
    const auto cells = split_line(line);
    std::vector<double> row;
    row.reserve(cells.size());
    for (std::size_t c = 0; c < cells.size(); ++c) {
      const std::string& s = cells[c];
      char* end = nullptr;
      errno = 0;
      const double v = std::strtod(s.c_str(), &end);
      require(!s.empty() && end == s.c_str() + s.size() && errno != ERANGE && std::isfinite(v),
              ErrorKind::parse,
              "line " + std::to_string(no) + ", column " + std::to_string(c + 1) +
                  ": '" + s + "' is not a finite number");
      row.push_back(v);
    }
    if (!t.rows.empty())
      require(row.size() == t.rows.front().size(), ErrorKind::shape,
              "line " + std::to_string(no) + " has " + std::to_string(row.size()) +
                  " values, expected " + std::to_string(t.rows.front().size()));
    t.rows.push_back(std::move(row));
  }
  require(!t.rows.empty(), ErrorKind::parse, "data file has no observations");
  if (header)
    require(t.header.size() == t.rows.front().size(), ErrorKind::shape,
            "header has " + std::to_string(t.header.size()) + " labels for " +
                std::to_string(t.rows.front().size()) + " columns");
  return t;
}

DataTable read_data_csv(const std::filesystem::path& path, bool header) {
  return parse_data_csv(read_text(path), header);
}

DesignTable parse_design_csv(const std::string& text, bool header, std::size_t rows) {
  const auto lines = lines_of(text);
  DesignTable t;
  std::size_t first = 0;
  if (header) {
    require(!lines.empty(), ErrorKind::parse, "design file is empty");
    t.factor_names = split_line(lines.front().second);
    first = 1;
  }
  std::vector<std::vector<std::string>> raw;
  for (std::size_t i = first; i < lines.size(); ++i) {
    auto cells = split_line(lines[i].second);
    if (!raw.empty())
      require(cells.size() == raw.front().size(), ErrorKind::design,
              "design line " + std::to_string(lines[i].first) + " has " +
                  std::to_string(cells.size()) + " labels, expected " +
                  std::to_string(raw.front().size()));
    for (const auto& c : cells)
      require(!c.empty(), ErrorKind::design,
              "design line " + std::to_string(lines[i].first) + " has an empty label");
    raw.push_back(std::move(cells));
  }
  require(raw.size() == rows, ErrorKind::design,
          "design has " + std::to_string(raw.size()) + " rows but the data has " +
              std::to_string(rows));
  const std::size_t L = raw.front().size();
  if (header)
    require(t.factor_names.size() == L, ErrorKind::design, "design header does not match its columns");
  else
    for (std::size_t l = 0; l < L; ++l) t.factor_names.push_back("factor" + std::to_string(l + 1));

  std::vector<int> levels(L);
  std::vector<std::vector<int>> labels(L, std::vector<int>(rows));
  t.level_names.resize(L);
  for (std::size_t l = 0; l < L; ++l) {
    std::set<std::string> distinct;
    bool numeric = true;
    for (const auto& r : raw) {
      distinct.insert(r[l]);
      long dummy;
      numeric = numeric && parse_int(r[l], dummy);
    }
    std::vector<std::string> names(distinct.begin(), distinct.end());
    if (numeric)
      std::sort(names.begin(), names.end(), [](const std::string& a, const std::string& b) {
        long x = 0, y = 0;
        parse_int(a, x);
        parse_int(b, y);
        return x < y;
      });
    require(names.size() >= 2, ErrorKind::design,
            "factor '" + t.factor_names[l] + "' has a single level; it cannot be tested");
    std::map<std::string, int> index;
    for (std::size_t g = 0; g < names.size(); ++g) index[names[g]] = static_cast<int>(g);
    for (std::size_t i = 0; i < rows; ++i) labels[l][i] = index[raw[i][l]];
    levels[l] = static_cast<int>(names.size());
    t.level_names[l] = std::move(names);
  }
  t.design = FactorDesign(std::move(levels), std::move(labels));
  return t;
}

DesignTable read_design_csv(const std::filesystem::path& path, bool header, std::size_t rows) {
  return parse_design_csv(read_text(path), header, rows);
}

std::string format_double(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

void write_columns(const std::filesystem::path& path, const std::vector<std::string>& header,
                   const std::vector<std::vector<double>>& columns) {
  require(header.size() == columns.size(), ErrorKind::shape, "header/column count mismatch");
  std::string out;
  for (std::size_t c = 0; c < header.size(); ++c) out += (c ? "," : "") + header[c];
  out += '\n';
  const std::size_t rows = columns.empty() ? 0 : columns.front().size();
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < columns.size(); ++c) {
      if (c) out += ',';
      out += format_double(columns[c][r]);
    }
    out += '\n';
  }
  write_text(path, out);
}

nlohmann::ordered_json hyperparams_to_json(const HyperParams& hp) {
  nlohmann::ordered_json j;
  j["alpha"] = hp.alpha;
  j["tau"] = hp.tau;
  j["upsilon"] = hp.upsilon;
  j["sigma0_sq"] = hp.sigma0_sq;
  j["nu"] = hp.nu;
  j["eta_rho"] = hp.eta_rho;
  j["gamma_rho"] = hp.gamma_rho;
  j["eta_kappa"] = hp.eta_kappa;
  j["gamma_kappa"] = hp.gamma_kappa;
  return j;
}

HyperParams hyperparams_from_json(const nlohmann::json& j, HyperParams base) {
  require(j.is_object(), ErrorKind::parse, "hyperparameters must be a JSON object");
  auto num = [&](const char* key, double& field) {
    if (!j.contains(key)) return;
    require(j[key].is_number(), ErrorKind::parse, std::string("'") + key + "' must be a number");
    field = j[key].get<double>();
  };
  num("alpha", base.alpha);
  num("tau", base.tau);
  num("sigma0_sq", base.sigma0_sq);
  num("nu", base.nu);
  num("eta_rho", base.eta_rho);
  num("gamma_rho", base.gamma_rho);
  num("eta_kappa", base.eta_kappa);
  num("gamma_kappa", base.gamma_kappa);
  if (j.contains("upsilon")) {
    const auto& u = j["upsilon"];
    require(u.is_array(), ErrorKind::parse, "'upsilon' must be an array");
    base.upsilon.clear();
    for (const auto& v : u) {
      require(v.is_number(), ErrorKind::parse, "'upsilon' entries must be numbers");
      base.upsilon.push_back(v.get<double>());
    }
  }
  return base;
}

}  // namespace nigmg::cli
