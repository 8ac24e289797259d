#pragma once

// File output for experiments: CSV tables (reals at 17 significant digits),
// JSON manifests, output-directory handling.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace becl::lab {

namespace fs = std::filesystem;
using json = nlohmann::json;

class OutputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Create `dir` (and parents) and make sure a file can be written inside it.
inline void ensure_output_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) {
    throw OutputError("cannot create output directory '" + dir.string() + "': " + ec.message());
  }
  const fs::path probe = dir / ".becl_write_probe";
  {
    std::ofstream f(probe);
    if (!f) throw OutputError("output directory '" + dir.string() + "' is not writable");
  }
  fs::remove(probe, ec);
}

inline void write_text(const fs::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw OutputError("cannot open '" + path.string() + "' for writing");
  f << text;
  if (!f.flush()) throw OutputError("write to '" + path.string() + "' failed");
}

inline std::string read_text(const fs::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw OutputError("cannot open '" + path.string() + "' for reading");
  std::ostringstream os;
  os << f.rdbuf();
  return os.str();
}

inline std::string format17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

/// In-memory table; every cell is a double.
struct CsvTable {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  void add(std::vector<double> row) {
    if (row.size() != columns.size()) throw std::invalid_argument("CsvTable: row width differs from header");
    rows.push_back(std::move(row));
  }

  std::size_t column(const std::string& name) const {
    for (std::size_t i = 0; i < columns.size(); ++i)
      if (columns[i] == name) return i;
    throw std::out_of_range("CsvTable: no column '" + name + "'");
  }

  std::vector<double> values(const std::string& name) const {
    const std::size_t c = column(name);
    std::vector<double> out;
    out.reserve(rows.size());
    for (const auto& r : rows) out.push_back(r[c]);
    return out;
  }

  std::string str() const {
    std::string out;
    for (std::size_t i = 0; i < columns.size(); ++i) out += (i ? "," : "") + columns[i];
    out += "\n";
    for (const auto& r : rows) {
      for (std::size_t i = 0; i < r.size(); ++i) out += (i ? "," : "") + format17(r[i]);
      out += "\n";
    }
    return out;
  }

  void write(const fs::path& path) const { write_text(path, str()); }

  static CsvTable parse(const std::string& text) {
    CsvTable t;
    std::istringstream is(text);
    std::string line;
    if (!std::getline(is, line)) throw std::runtime_error("csv: empty input");
    std::stringstream hs(line);
    std::string cell;
    while (std::getline(hs, cell, ',')) t.columns.push_back(cell);
    std::size_t lineno = 1;
    while (std::getline(is, line)) {
      ++lineno;
      if (line.empty()) continue;
      std::vector<double> row;
      std::stringstream rs(line);
      while (std::getline(rs, cell, ',')) {
        char* end = nullptr;
        const double v = std::strtod(cell.c_str(), &end);
        if (end == cell.c_str()) throw std::runtime_error("csv: non-numeric cell on line " + std::to_string(lineno));
        row.push_back(v);
      }
      if (row.size() != t.columns.size()) throw std::runtime_error("csv: ragged row on line " + std::to_string(lineno));
      t.rows.push_back(std::move(row));
    }
    return t;
  }

  static CsvTable read(const fs::path& path) { return parse(read_text(path)); }
};

inline void write_json(const fs::path& path, const json& j) { write_text(path, j.dump(2) + "\n"); }

}  // namespace becl::lab
