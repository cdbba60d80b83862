#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <string_view>

#include <fmt/format.h>

#include "attnrank/error.hpp"
#include "attnrank/tabular.hpp"

namespace attnrank {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(',', start);
    if (pos == std::string_view::npos) {
      cells.push_back(trim(line.substr(start)));
      break;
    }
    cells.push_back(trim(line.substr(start, pos - start)));
    start = pos + 1;
  }
  return cells;
}

bool parse_double(std::string_view cell, double& out) {
  if (cell.empty()) return false;
  if (cell.front() == '+') cell.remove_prefix(1);
  const auto* first = cell.data();
  const auto* last = cell.data() + cell.size();
  const auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last && std::isfinite(out);
}

}  // namespace

Dataset load_csv(const std::filesystem::path& path, const ColumnRef& target) {
  std::ifstream in(path);
  if (!in) throw InputError(fmt::format("cannot read '{}'", path.string()));

  std::string line;
  if (!std::getline(in, line)) throw InputError(fmt::format("'{}' is empty; a header row is required", path.string()));
  const auto header = split(line);

  std::size_t target_col = 0;
  if (const auto* name = std::get_if<std::string>(&target)) {
    auto it = std::find(header.begin(), header.end(), std::string_view(*name));
    if (it == header.end()) throw InputError(fmt::format("target column '{}' not found in '{}'", *name, path.string()));
    target_col = static_cast<std::size_t>(it - header.begin());
  } else {
    target_col = std::get<std::size_t>(target);
    if (target_col >= header.size()) {
      throw InputError(fmt::format("target column index {} out of range ({} columns)", target_col, header.size()));
    }
  }

  Dataset data;
  data.target_name = std::string(header[target_col]);
  for (std::size_t j = 0; j < header.size(); ++j) {
    if (j != target_col) data.feature_names.emplace_back(header[j]);
  }
  const std::size_t n_features = data.feature_names.size();

  std::vector<double> values;
  std::map<std::string, int, std::less<>> class_ids;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    ++row;
    const auto cells = split(line);
    if (cells.size() != header.size()) {
      throw InputError(fmt::format("row {} has {} cells, header has {}", row, cells.size(), header.size()));
    }
    for (std::size_t j = 0; j < cells.size(); ++j) {
      if (j == target_col) {
        if (cells[j].empty()) throw InputError(fmt::format("row {}: empty target value", row));
        auto it = class_ids.find(cells[j]);
        if (it == class_ids.end()) {
          it = class_ids.emplace(std::string(cells[j]), static_cast<int>(data.class_names.size())).first;
          data.class_names.emplace_back(cells[j]);
        }
        data.labels.push_back(it->second);
        continue;
      }
      double v = 0.0;
      if (!parse_double(cells[j], v)) {
        throw InputError(fmt::format("row {}, column '{}': cannot parse '{}' as a finite number", row, header[j],
                                     cells[j]));
      }
      values.push_back(v);
    }
  }
  if (row < 2) throw InputError(fmt::format("'{}' has {} instances; at least 2 are required", path.string(), row));
  if (data.class_names.size() < 2) {
    throw InputError(fmt::format("'{}' has {} distinct classes; at least 2 are required", path.string(),
                                 data.class_names.size()));
  }

  data.features.resize(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(n_features));
  for (std::size_t i = 0; i < row; ++i) {
    for (std::size_t j = 0; j < n_features; ++j) {
      data.features(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = values[i * n_features + j];
    }
  }
  data.validate();
  return data;
}

void write_csv(const Dataset& data, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError(fmt::format("cannot write '{}'", path.string()));
  fmt::memory_buffer buf;
  for (const auto& name : data.feature_names) fmt::format_to(std::back_inserter(buf), "{},", name);
  fmt::format_to(std::back_inserter(buf), "{}\n", data.target_name);
  for (Eigen::Index i = 0; i < data.features.rows(); ++i) {
    for (Eigen::Index j = 0; j < data.features.cols(); ++j) {
      fmt::format_to(std::back_inserter(buf), "{},", data.features(i, j));
    }
    fmt::format_to(std::back_inserter(buf), "{}\n", data.class_names[data.labels[i]]);
  }
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
}

void write_mask_csv(const std::vector<bool>& mask, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError(fmt::format("cannot write '{}'", path.string()));
  out << "relevant\n";
  for (bool m : mask) out << (m ? "1\n" : "0\n");
}

std::vector<bool> read_mask_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError(fmt::format("cannot read '{}'", path.string()));
  std::string line;
  if (!std::getline(in, line) || trim(line) != "relevant") {
    throw InputError(fmt::format("'{}' must start with the header 'relevant'", path.string()));
  }
  std::vector<bool> mask;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    const auto cell = trim(line);
    if (cell.empty()) continue;
    ++row;
    if (cell == "1") {
      mask.push_back(true);
    } else if (cell == "0") {
      mask.push_back(false);
    } else {
      throw InputError(fmt::format("'{}' row {}: expected 0 or 1, got '{}'", path.string(), row, cell));
    }
  }
  return mask;
}

}  // namespace attnrank
