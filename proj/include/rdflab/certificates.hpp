#pragma once

#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "rdflab/collection_io.hpp"
#include "rdflab/decompose.hpp"
#include "rdflab/tile_analysis.hpp"

namespace rdflab {

// One JSON object per line. Tiles are referenced by their population id.

inline nlohmann::ordered_json tree_record(const TilePopulation& pop, const TileTree& t) {
  nlohmann::ordered_json rec;
  rec["orientation"] = to_string(t.orientation);
  rec["top"] = pop[t.top].id;
  std::vector<std::size_t> ids;
  for (auto m : t.members) ids.push_back(pop[m].id);
  rec["members"] = ids;
  return rec;
}

inline nlohmann::ordered_json tile_record(const TriTile& t) {
  nlohmann::ordered_json rec = square_record(t.square);
  rec["id"] = t.id;
  rec["pos"] = t.I.n;
  return rec;
}

inline nlohmann::ordered_json certificate_record(const TilePopulation& pop, const EnergyCertificate& c) {
  nlohmann::ordered_json rec;
  rec["kind"] = c.kind;
  rec["mode"] = to_string(c.mode);
  rec["level"] = c.level;
  rec["value"] = c.value;
  rec["top_measure"] = c.top_measure;
  auto fam = nlohmann::ordered_json::array();
  for (const auto& t : c.family) fam.push_back(tree_record(pop, t));
  rec["family"] = std::move(fam);
  return rec;
}

inline void write_certificate(std::ostream& out, const TilePopulation& pop, const EnergyCertificate& c) {
  out << certificate_record(pop, c).dump() << '\n';
}

/// Decomposition records: a "report" line with sizes and energies, a "level"
/// line per level with its rows and columns, a "step" line per iteration and
/// a "residual" line.
inline void write_decomposition(std::ostream& out, const TilePopulation& pop, const GlobalDecomposition& d) {
  const auto& r = d.report;
  nlohmann::ordered_json head;
  head["kind"] = "report";
  head["r0"] = r.r0;
  head["r"] = r.r;
  head["S"] = {r.S1, r.S2, r.S3};
  head["E"] = {r.E1, r.E2, r.E3};
  head["modes"] = {to_string(r.mode1), to_string(r.mode2), to_string(r.mode3)};
  head["sigma"] = r.sigma();
  head["gamma"] = r.gamma();
  head["tiles"] = pop.size();
  out << head.dump() << '\n';
  for (const auto& [n, level] : d.levels) {
    nlohmann::ordered_json rec;
    rec["kind"] = "level";
    rec["level"] = n;
    auto cols = nlohmann::ordered_json::array(), rows = nlohmann::ordered_json::array();
    for (const auto& t : level.columns) cols.push_back(tree_record(pop, t));
    for (const auto& t : level.rows) rows.push_back(tree_record(pop, t));
    rec["columns"] = std::move(cols);
    rec["rows"] = std::move(rows);
    out << rec.dump() << '\n';
  }
  for (const auto& s : d.steps) {
    nlohmann::ordered_json rec;
    rec["kind"] = "step";
    rec["lemma"] = s.lemma;
    rec["level"] = s.level;
    rec["ratio"] = s.ratio;
    rec["extracted"] = s.extracted;
    out << rec.dump() << '\n';
  }
  nlohmann::ordered_json res;
  res["kind"] = "residual";
  std::vector<std::size_t> ids;
  for (auto i : d.residual) ids.push_back(pop[i].id);
  res["members"] = ids;
  out << res.dump() << '\n';
}

inline std::string serialize_decomposition(const TilePopulation& pop, const GlobalDecomposition& d) {
  std::ostringstream os;
  write_decomposition(os, pop, d);
  return os.str();
}

}  // namespace rdflab
