#pragma once

#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "rdflab/dyadic.hpp"

namespace rdflab {

// Line-delimited JSON: a header record {"L": ...} followed by one
// {"k": ..., "nx": ..., "ny": ...} record per square.

inline nlohmann::ordered_json square_record(const DyadicSquare& w) {
  nlohmann::ordered_json rec;
  rec["k"] = w.scale();
  rec["nx"] = w.omega1.n;
  rec["ny"] = w.omega2.n;
  return rec;
}

inline DyadicSquare square_from_record(const nlohmann::json& rec, int L) {
  detail::require(rec.contains("k") && rec.contains("nx") && rec.contains("ny"),
                  "square record needs k, nx, ny: " + rec.dump());
  return make_square(rec.at("k").get<int>(), rec.at("nx").get<int>(), rec.at("ny").get<int>(), L);
}

inline void write_collection(std::ostream& out, const SquareCollection& omega) {
  nlohmann::ordered_json header;
  header["L"] = omega.L();
  out << header.dump() << '\n';
  for (const auto& w : omega) out << square_record(w).dump() << '\n';
}

inline std::string serialize_collection(const SquareCollection& omega) {
  std::ostringstream os;
  write_collection(os, omega);
  return os.str();
}

namespace detail {

inline std::vector<nlohmann::json> read_records(std::istream& in) {
  std::vector<nlohmann::json> records;
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      records.push_back(nlohmann::json::parse(line));
    } catch (const nlohmann::json::parse_error& e) {
      throw ValidationError(std::string("malformed record: ") + e.what());
    }
  }
  require(!records.empty() && records.front().contains("L"), "collection file lacks an {\"L\": ...} header");
  return records;
}

}  // namespace detail

inline SquareCollection read_collection(std::istream& in) {
  const auto records = detail::read_records(in);
  const int L = records.front().at("L").get<int>();
  std::vector<DyadicSquare> squares;
  for (std::size_t i = 1; i < records.size(); ++i) squares.push_back(square_from_record(records[i], L));
  return validate_collection(std::move(squares), L);
}

inline SquareCollection parse_collection(const std::string& text) {
  std::istringstream is(text);
  return read_collection(is);
}

inline SquareCollection load_collection(const std::string& path) {
  std::ifstream in(path);
  detail::require(in.good(), "cannot open " + path);
  return read_collection(in);
}

inline void save_collection(const std::string& path, const SquareCollection& omega) {
  std::ofstream out(path);
  detail::require(out.good(), "cannot write " + path);
  write_collection(out, omega);
}

}  // namespace rdflab
