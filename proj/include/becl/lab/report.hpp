#pragma once

// Aggregation over finished runs: every directory below `root` holding a
// manifest.json contributes its checks and per-column CSV ranges to
// summary.json and summary.md. Plots are rebuilt from the CSV files.

#include <algorithm>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "becl/lab/experiments.hpp"
#include "becl/lab/io.hpp"

namespace becl::lab {

struct ReportResult {
  int runs = 0;
  int failed = 0;
  std::vector<fs::path> plots;
};

inline ReportResult build_report(const fs::path& root, bool emit_plots) {
  if (!fs::is_directory(root)) throw OutputError("report: '" + root.string() + "' is not a directory");
  std::vector<fs::path> dirs;
  for (const auto& e : fs::recursive_directory_iterator(root))
    if (e.is_regular_file() && e.path().filename() == "manifest.json") dirs.push_back(e.path().parent_path());
  std::sort(dirs.begin(), dirs.end());

  ReportResult res;
  json runs = json::array();
  std::ostringstream md;
  md << "# Run summary\n\n";
  for (const auto& dir : dirs) {
    const json m = json::parse(read_text(dir / "manifest.json"));
    ++res.runs;
    const bool pass = m.value("status", "fail") == "pass";
    if (!pass) ++res.failed;
    const std::string rel = fs::relative(dir, root).string();
    md << "## " << (rel == "." ? dir.filename().string() : rel) << " (" << m.value("kind", "?") << ", "
       << (pass ? "pass" : "FAIL") << ")\n\n" << m.value("anchor", "") << "\n\n";
    for (const auto& c : m.at("checks")) {
      md << "- " << c.at("name").get<std::string>() << ": " << format17(c.at("value").get<double>()) << " ("
         << c.at("bound").get<std::string>() << ") " << (c.at("pass").get<bool>() ? "ok" : "FAIL") << "\n";
    }
    json tables = json::object();
    for (const auto& f : m.at("files")) {
      const std::string name = f.get<std::string>();
      if (fs::path(name).extension() != ".csv") continue;
      const auto t = CsvTable::read(dir / name);
      json cols = json::object();
      md << "\n| " << name << " | min | max |\n|---|---|---|\n";
      for (const auto& col : t.columns) {
        const auto v = t.values(col);
        const double lo = v.empty() ? std::numeric_limits<double>::quiet_NaN() : *std::min_element(v.begin(), v.end());
        const double hi = v.empty() ? std::numeric_limits<double>::quiet_NaN() : *std::max_element(v.begin(), v.end());
        cols[col] = {{"min", lo}, {"max", hi}};
        md << "| " << col << " | " << format17(lo) << " | " << format17(hi) << " |\n";
      }
      tables[name] = {{"rows", t.rows.size()}, {"columns", cols}};
    }
    md << "\n";
    runs.push_back({{"dir", rel}, {"kind", m.value("kind", "")}, {"status", m.value("status", "")},
                    {"checks", m.at("checks")}, {"tables", tables}});
    if (emit_plots) {
      const auto p = replot_run(dir);
      res.plots.insert(res.plots.end(), p.begin(), p.end());
    }
  }
  write_json(root / "summary.json", {{"runs", runs}, {"failed", res.failed}});
  write_text(root / "summary.md", md.str());
  return res;
}

}  // namespace becl::lab
