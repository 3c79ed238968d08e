#pragma once

// Plain-text artifacts: CSV tables with 17 significant digits, grid functions
// with a JSON sidecar, and a stable content hash for manifests.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "qpot/grid.hpp"

namespace qpot::io {

using json = nlohmann::ordered_json;

class IoError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

inline std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

/// 64-bit FNV-1a digest as 16 hex digits.
inline std::string content_hash(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

inline std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError("cannot open " + path.string());
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw IoError("cannot write " + path.string());
  }
  out << text;
  if (!out) {
    throw IoError("write failed for " + path.string());
  }
}

inline void write_json(const std::filesystem::path& path, const json& j) { write_text(path, j.dump(2) + "\n"); }

/// Accumulates a CSV table; numeric cells use format_double.
class CsvTable {
public:
  explicit CsvTable(std::vector<std::string> header) : columns_(header.size()) { append(header); }

  CsvTable& row(const std::vector<std::string>& cells) {
    if (cells.size() != columns_) {
      throw IoError("csv row has " + std::to_string(cells.size()) + " cells, expected " + std::to_string(columns_));
    }
    append(cells);
    return *this;
  }

  const std::string& text() const { return text_; }

  void save(const std::filesystem::path& path) const { write_text(path, text_); }

private:
  void append(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (cells[i].find_first_of(",\n\"") != std::string::npos) {
        throw IoError("csv cell may not contain ',', '\"' or newlines: " + cells[i]);
      }
      text_ += (i ? "," : "") + cells[i];
    }
    text_ += "\n";
  }

  std::size_t columns_;
  std::string text_;
};

inline json grid_descriptor(const grid::Grid& g) {
  json j;
  j["kind"] = grid::to_string(g.kind());
  j["boundary"] = grid::to_string(g.boundary());
  j["backend"] = grid::to_string(g.backend());
  j["points"] = g.size();
  j["x_min"] = g.x_min();
  if (g.boundary() == grid::Boundary::periodic) {
    j["period"] = g.period();
  } else {
    j["x_max"] = g.x_max();
  }
  return j;
}

inline grid::GridPtr grid_from_descriptor(const json& j) {
  try {
    const std::string kind = j.at("kind");
    const std::size_t n = j.at("points");
    const double lo = j.at("x_min");
    if (kind == "radial-log") {
      return grid::Grid::radial_log(lo, j.at("x_max").get<double>(), n);
    }
    if (kind != "uniform-1d") {
      throw IoError("unknown grid kind '" + kind + "'");
    }
    const auto backend =
        j.at("backend") == "spectral" ? grid::Backend::spectral : grid::Backend::finite_difference;
    if (j.at("boundary") == "periodic") {
      return grid::Grid::periodic(lo, j.at("period").get<double>(), n, backend);
    }
    return grid::Grid::dirichlet(lo, j.at("x_max").get<double>(), n, backend);
  } catch (const json::exception& e) {
    throw IoError(std::string("bad grid descriptor: ") + e.what());
  }
}

inline std::filesystem::path sidecar_path(const std::filesystem::path& csv) {
  auto p = csv;
  p += ".json";
  return p;
}

/// Writes `x,value` rows and a sidecar `<path>.json` describing the grid.
inline void write_grid_function(const std::filesystem::path& path, const grid::GridFunction& f,
                                const std::string& quantity, const std::string& units) {
  CsvTable t({"x", quantity});
  for (std::size_t i = 0; i < f.size(); ++i) {
    t.row({format_double((*f.grid)[i]), format_double(f[i])});
  }
  t.save(path);
  json side;
  side["grid"] = grid_descriptor(*f.grid);
  side["quantity"] = quantity;
  side["units"] = units;
  write_json(sidecar_path(path), side);
}

struct GridFunctionFile {
  grid::GridFunction function;
  std::string quantity;
  std::string units;
};

/// Reads a two-column CSV and its sidecar; coordinates must match the described grid.
inline GridFunctionFile read_grid_function(const std::filesystem::path& path) {
  json side;
  try {
    side = json::parse(read_text(sidecar_path(path)));
  } catch (const json::exception& e) {
    throw IoError(sidecar_path(path).string() + ": " + e.what());
  }
  const auto g = grid_from_descriptor(side.at("grid"));
  std::istringstream in(read_text(path));
  std::string line;
  std::getline(in, line);
  std::vector<double> values;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) {
      continue;
    }
    const auto comma = line.find(',');
    if (comma == std::string::npos) {
      throw IoError(path.string() + ": line " + std::to_string(line_no) + ": expected two columns");
    }
    double x = 0.0, v = 0.0;
    try {
      x = std::stod(line.substr(0, comma));
      v = std::stod(line.substr(comma + 1));
    } catch (const std::exception&) {
      throw IoError(path.string() + ": line " + std::to_string(line_no) + ": not a number");
    }
    const std::size_t i = values.size();
    if (i >= g->size()) {
      throw IoError(path.string() + ": more rows than grid points");
    }
    const double expected = (*g)[i];
    if (std::abs(x - expected) > 1e-9 * std::max(1.0, std::abs(expected))) {
      throw IoError(path.string() + ": line " + std::to_string(line_no) + ": coordinate does not match grid");
    }
    values.push_back(v);
  }
  if (values.size() != g->size()) {
    throw IoError(path.string() + ": expected " + std::to_string(g->size()) + " rows");
  }
  return {grid::GridFunction(g, std::move(values)), side.value("quantity", "value"), side.value("units", "")};
}

}  // namespace qpot::io
