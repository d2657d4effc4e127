#pragma once

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <ostream>
#include <string>
#include <tuple>
#include <vector>

#include <json.hpp>

#include "rdflab/generators.hpp"
#include "rdflab/search.hpp"

namespace rdflab {

inline constexpr const char* kCsvHeader = "generator,K,N,p,q,s,r,ratio,restarts,seed,millis";

inline std::string format_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string csv_row(const ExperimentRecord& r) {
  std::string s = r.generator + "," + std::to_string(r.K) + "," + std::to_string(r.N);
  for (double v : {r.tuple.p, r.tuple.q, r.tuple.s, r.tuple.r, r.ratio}) s += "," + format_g17(v);
  s += "," + std::to_string(r.restarts) + "," + std::to_string(r.seed) + "," + format_g17(r.millis);
  return s;
}

struct GeneratorSweep {
  std::string name;
  std::vector<int> sizes;
};

struct ExperimentConfig {
  SearchConfig search;
  std::vector<std::uint64_t> seeds = {1};
  bool timing = false;  // off keeps the CSV byte-reproducible
  std::vector<GeneratorSweep> generators;
  std::vector<ExponentTuple> tuples;
};

inline ExperimentConfig parse_experiment_config(const nlohmann::json& j) {
  detail::require(j.is_object(), "experiment config must be a JSON object");
  ExperimentConfig c;
  auto& s = c.search;
  s.N = j.value("N", s.N);
  s.restarts = j.value("restarts", s.restarts);
  s.iterations = j.value("iterations", s.iterations);
  s.step0 = j.value("step0", s.step0);
  s.step_min = j.value("step_min", s.step_min);
  s.threads = j.value("threads", s.threads);
  detail::require(is_power_of_two(s.N), "config N must be a power of two");
  detail::require(s.restarts >= 0 && s.iterations >= 0, "restarts and iterations must be non-negative");
  c.timing = j.value("timing", false);
  if (j.contains("seeds")) c.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
  for (const auto& g : j.value("generators", nlohmann::json::array()))
    c.generators.push_back({g.at("name").get<std::string>(), g.at("sizes").get<std::vector<int>>()});
  for (const auto& t : j.value("tuples", nlohmann::json::array())) {
    const double p = t.at("p"), q = t.at("q"), r = t.at("r");
    c.tuples.push_back(t.contains("s") ? ExponentTuple::with_s(p, q, t.at("s").get<double>(), r)
                                       : ExponentTuple::make(p, q, r));
  }
  return c;
}

inline ExperimentConfig load_experiment_config(const std::string& path) {
  std::ifstream in(path);
  detail::require(static_cast<bool>(in), "cannot open config " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError("config " + path + ": " + e.what());
  }
  return parse_experiment_config(j);
}

struct UniformityEntry {
  std::string generator;
  ExponentTuple tuple;
  std::map<int, double> by_K;  // best ratio over seeds at each size
  double max = 0, min = 0, spread = 0;
};

struct ExperimentResult {
  std::vector<ExperimentRecord> records;
  std::vector<std::string> errors;
  std::vector<UniformityEntry> uniformity;
};

/// Max and min over sizes of the per-size best ratio, per (generator, tuple).
/// Failed cells (NaN ratio) are skipped.
inline std::vector<UniformityEntry> uniformity_summary(const std::vector<ExperimentRecord>& rows) {
  using Key = std::tuple<std::string, double, double, double, double>;
  std::map<Key, UniformityEntry> acc;
  std::vector<Key> order;
  for (const auto& r : rows) {
    if (std::isnan(r.ratio)) continue;
    const Key key{r.generator, r.tuple.p, r.tuple.q, r.tuple.s, r.tuple.r};
    auto [it, fresh] = acc.try_emplace(key);
    if (fresh) {
      it->second.generator = r.generator;
      it->second.tuple = r.tuple;
      order.push_back(key);
    }
    auto [slot, first] = it->second.by_K.try_emplace(r.K, r.ratio);
    if (!first) slot->second = std::max(slot->second, r.ratio);
  }
  std::vector<UniformityEntry> out;
  for (const auto& key : order) {
    auto e = acc.at(key);
    e.max = -std::numeric_limits<double>::infinity();
    e.min = std::numeric_limits<double>::infinity();
    for (const auto& [K, v] : e.by_K) {
      e.max = std::max(e.max, v);
      e.min = std::min(e.min, v);
    }
    e.spread = e.min > 0 ? e.max / e.min : std::numeric_limits<double>::infinity();
    out.push_back(std::move(e));
  }
  return out;
}

inline nlohmann::ordered_json summary_json(const ExperimentResult& res) {
  nlohmann::ordered_json j;
  j["cells"] = res.records.size();
  j["errors"] = res.errors;
  auto u = nlohmann::ordered_json::array();
  for (const auto& e : res.uniformity) {
    nlohmann::ordered_json rec;
    rec["generator"] = e.generator;
    rec["p"] = e.tuple.p;
    rec["q"] = e.tuple.q;
    rec["s"] = e.tuple.s;
    rec["r"] = e.tuple.r;
    rec["in_range"] = e.tuple.in_range();
    nlohmann::ordered_json byk;
    for (const auto& [K, v] : e.by_K) byk[std::to_string(K)] = v;
    rec["by_K"] = std::move(byk);
    rec["max"] = e.max;
    rec["min"] = e.min;
    rec["spread"] = std::isinf(e.spread) ? nlohmann::ordered_json(nullptr) : nlohmann::ordered_json(e.spread);
    u.push_back(std::move(rec));
  }
  j["uniformity"] = std::move(u);
  return j;
}

/// Sweeps generators x sizes x tuples x seeds in that nesting order. Each cell
/// writes one CSV row as soon as it finishes; a failing cell writes ratio nan
/// and an entry in errors, and the sweep continues.
inline ExperimentResult run_experiment(const ExperimentConfig& cfg, std::ostream& csv) {
  ExperimentResult res;
  csv << kCsvHeader << '\n';
  for (const auto& gen : cfg.generators)
    for (int K : gen.sizes)
      for (const auto& t : cfg.tuples)
        for (auto seed : cfg.seeds) {
          ExperimentRecord rec;
          try {
            const auto omega = generate(gen.name, K, cfg.search.N, seed);
            auto sc = cfg.search;
            sc.seed = seed;
            rec = estimate_ratio(omega, t, sc, gen.name);
          } catch (const std::exception& e) {
            rec.generator = gen.name;
            rec.K = K;
            rec.N = cfg.search.N;
            rec.tuple = t;
            rec.restarts = cfg.search.restarts;
            rec.seed = seed;
            rec.ratio = std::numeric_limits<double>::quiet_NaN();
            res.errors.push_back(gen.name + " K=" + std::to_string(K) + " seed=" + std::to_string(seed) + ": " +
                                 e.what());
          }
          if (!cfg.timing) rec.millis = 0.0;
          csv << csv_row(rec) << '\n' << std::flush;
          res.records.push_back(std::move(rec));
        }
  res.uniformity = uniformity_summary(res.records);
  return res;
}

/// Rows parsed back from CSV text; used to recompute summaries.
inline std::vector<ExperimentRecord> parse_csv(std::istream& in) {
  std::string line;
  std::getline(in, line);
  detail::require(line == kCsvHeader, "unexpected CSV header: " + line);
  std::vector<ExperimentRecord> out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::size_t pos = 0;
    for (std::size_t c; (c = line.find(',', pos)) != std::string::npos; pos = c + 1) f.push_back(line.substr(pos, c - pos));
    f.push_back(line.substr(pos));
    detail::require(f.size() == 11, "CSV row has " + std::to_string(f.size()) + " fields: " + line);
    ExperimentRecord r;
    r.generator = f[0];
    r.K = std::stoi(f[1]);
    r.N = std::stoi(f[2]);
    r.tuple = {std::stod(f[3]), std::stod(f[4]), std::stod(f[5]), std::stod(f[6])};
    r.ratio = f[7] == "nan" || f[7] == "-nan" ? std::numeric_limits<double>::quiet_NaN() : std::stod(f[7]);
    r.restarts = std::stoi(f[8]);
    r.seed = std::stoull(f[9]);
    r.millis = std::stod(f[10]);
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace rdflab
