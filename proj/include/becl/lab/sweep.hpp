#pragma once

// Parameter sweeps: the [sweep] section lists "section.key = v1, v2, ...";
// every point of the Cartesian product becomes an independent run in
// <out>/run_NNNN. Runs execute on a pool of worker threads and share nothing
// but the read-only base config.

#include <atomic>
#include <cstdio>
#include <exception>
#include <mutex>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "becl/lab/config.hpp"
#include "becl/lab/experiments.hpp"

namespace becl::lab {

struct SweepPoint {
  std::vector<std::pair<std::string, std::string>> assignments;
  ExperimentConfig config;
};

struct SweepOutcome {
  std::string dir;
  std::vector<std::pair<std::string, std::string>> assignments;
  bool ok = false;       // ran to completion
  bool passed = false;   // and every check held
  std::string error;
};

inline std::vector<SweepPoint> expand_sweep(const ExperimentConfig& base) {
  std::vector<std::pair<std::string, std::vector<std::string>>> axes;
  for (const auto& [field, list] : base.sweep) {
    std::vector<std::string> values;
    std::stringstream ss(list);
    std::string item;
    while (std::getline(ss, item, ',')) values.push_back(trim(item));
    if (values.empty()) throw ConfigError("sweep." + field, "empty value list");
    axes.emplace_back(field, std::move(values));
  }
  std::vector<SweepPoint> points;
  std::vector<std::size_t> idx(axes.size(), 0);
  while (true) {
    SweepPoint p;
    p.config = base;
    p.config.sweep.clear();
    for (std::size_t a = 0; a < axes.size(); ++a) {
      p.config.set(axes[a].first, axes[a].second[idx[a]]);
      p.assignments.emplace_back(axes[a].first, axes[a].second[idx[a]]);
    }
    char name[32];
    std::snprintf(name, sizeof name, "run_%04zu", points.size());
    p.config.experiment["out"] = (fs::path(base.out_dir()) / name).string();
    p.config.validate();
    points.push_back(std::move(p));
    std::size_t a = axes.size();
    while (a > 0 && ++idx[a - 1] == axes[a - 1].second.size()) idx[--a] = 0;
    if (a == 0) break;
  }
  return points;
}

inline std::vector<SweepOutcome> run_sweep(const ExperimentConfig& base, int threads) {
  const auto points = expand_sweep(base);
  ensure_output_dir(base.out_dir());
  std::vector<SweepOutcome> out(points.size());
  std::atomic<std::size_t> next{0};
  std::mutex log_mutex;
  auto worker = [&] {
    for (std::size_t i = next++; i < points.size(); i = next++) {
      auto& o = out[i];
      o.dir = points[i].config.out_dir();
      o.assignments = points[i].assignments;
      try {
        const auto r = run_experiment(points[i].config);
        o.ok = true;
        o.passed = r.passed();
      } catch (const std::exception& e) {
        o.error = e.what();
      }
      std::lock_guard lock(log_mutex);
      std::fprintf(stderr, "[sweep] %s %s\n", o.dir.c_str(), o.ok ? (o.passed ? "pass" : "check failed") : o.error.c_str());
    }
  };
  const int n = std::max(1, std::min<int>(threads, static_cast<int>(points.size())));
  std::vector<std::thread> pool;
  for (int t = 1; t < n; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  json index = json::array();
  for (const auto& o : out) {
    json a = json::object();
    for (const auto& [k, v] : o.assignments) a[k] = v;
    index.push_back({{"dir", o.dir}, {"parameters", a}, {"ok", o.ok}, {"passed", o.passed}, {"error", o.error}});
  }
  write_json(fs::path(base.out_dir()) / "sweep_index.json", index);
  return out;
}

}  // namespace becl::lab
