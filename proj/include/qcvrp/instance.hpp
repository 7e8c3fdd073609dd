#pragma once

// CVRPLIB instance ingestion, Euclidean distances and tightness.

#include <cctype>
#include <cmath>
#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <regex>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <fmt/format.h>
#include <json.hpp>

#include "best_known_table.hpp"
#include "error.hpp"

namespace qcvrp {

struct Point {
  double x = 0.0;
  double y = 0.0;
  bool operator==(const Point&) const = default;
};

// A parsed CVRP problem. Node 0 is always the depot; customers are 1..n.
struct Instance {
  std::string name;
  int n_customers = 0;
  std::int64_t capacity = 0;
  int fleet_size = 0;
  std::vector<Point> coords;          // size n_customers + 1
  std::vector<std::int64_t> demands;  // size n_customers + 1, demands[0] == 0
  std::optional<std::int64_t> best_known;

  int num_nodes() const { return n_customers + 1; }
  std::int64_t total_demand() const {
    std::int64_t s = 0;
    for (auto d : demands) s += d;
    return s;
  }
  bool operator==(const Instance&) const = default;
};

// Dense symmetric integer cost matrix with zero diagonal.
class DistanceMatrix {
public:
  DistanceMatrix() = default;
  explicit DistanceMatrix(int dim) : dim_(dim), costs_(std::size_t(dim) * dim, 0) {}

  int dim() const { return dim_; }
  std::int64_t operator()(int i, int j) const { return costs_[std::size_t(i) * dim_ + j]; }
  void set(int i, int j, std::int64_t c) {
    costs_[std::size_t(i) * dim_ + j] = c;
    costs_[std::size_t(j) * dim_ + i] = c;
  }
  std::int64_t max_cost() const {
    std::int64_t m = 0;
    for (auto c : costs_) m = std::max(m, c);
    return m;
  }

private:
  int dim_ = 0;
  std::vector<std::int64_t> costs_;
};

// ---------------------------------------------------------------------------
// Bundled best-known table

struct BestKnownEntry {
  int customers = 0;
  int vehicles = 0;
  std::int64_t best_known = 0;
  // Tightness values as published. Some instances carry two conflicting
  // published values.
  std::vector<double> published_tau;
};

class BestKnownTable {
public:
  static const BestKnownTable& bundled() {
    static const BestKnownTable table = from_json(resources::kBestKnownJson);
    return table;
  }

  static BestKnownTable from_json(std::string_view text) {
    BestKnownTable t;
    auto doc = nlohmann::json::parse(text);
    t.version_ = doc.at("version").get<int>();
    for (auto& [name, e] : doc.at("instances").items()) {
      BestKnownEntry entry;
      entry.customers = e.at("customers").get<int>();
      entry.vehicles = e.at("vehicles").get<int>();
      entry.best_known = e.at("best_known").get<std::int64_t>();
      entry.published_tau = e.at("published_tau").get<std::vector<double>>();
      t.entries_.emplace(name, std::move(entry));
    }
    return t;
  }

  int version() const { return version_; }
  const BestKnownEntry* find(const std::string& name) const {
    auto it = entries_.find(name);
    return it == entries_.end() ? nullptr : &it->second;
  }
  const std::map<std::string, BestKnownEntry>& entries() const { return entries_; }

private:
  int version_ = 0;
  std::map<std::string, BestKnownEntry> entries_;
};

// ---------------------------------------------------------------------------
// Parsing

namespace detail {

inline std::string trim(std::string_view s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

inline std::optional<int> fleet_from_name(const std::string& name) {
  static const std::regex re(R"(-k(\d+)$)");
  std::smatch m;
  if (std::regex_search(name, m, re)) return std::stoi(m[1].str());
  return std::nullopt;
}

template <typename T>
T parse_number(const std::string& tok, std::size_t line, const char* what) {
  std::istringstream ss(tok);
  T v{};
  ss >> v;
  if (ss.fail() || !ss.eof())
    throw ParseError(fmt::format("expected {} but found '{}'", what, tok), line);
  return v;
}

}  // namespace detail

struct ParseOptions {
  // Wins over the "-k<p>" name suffix when set.
  std::optional<int> fleet_override;
  // Used only when neither the override nor the name suffix is available.
  std::optional<int> fleet_default;
};

// Reads a TSPLIB/CVRPLIB EUC_2D instance. File nodes are 1-indexed; the
// result is 0-indexed with the depot moved to index 0 and the remaining
// nodes in ascending file id order.
inline Instance parse_instance(std::istream& in, const ParseOptions& opts = {}) {
  enum class Section { header, coords, demands, depot, done };
  Section section = Section::header;

  std::string name;
  std::optional<int> dimension;
  std::optional<std::int64_t> capacity;
  std::map<long, Point> coords;
  std::map<long, std::int64_t> demands;
  std::vector<long> depots;
  bool depot_terminated = false;

  std::string raw;
  std::size_t lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    std::string line = detail::trim(raw);
    if (line.empty()) continue;
    if (line == "EOF") {
      section = Section::done;
      break;
    }
    if (line == "NODE_COORD_SECTION") { section = Section::coords; continue; }
    if (line == "DEMAND_SECTION") { section = Section::demands; continue; }
    if (line == "DEPOT_SECTION") { section = Section::depot; continue; }
    if (line.ends_with("_SECTION"))
      throw UnsupportedFormatError(fmt::format("line {}: unsupported section {}", lineno, line));

    auto colon = line.find(':');
    if (colon != std::string::npos && std::isalpha(static_cast<unsigned char>(line[0]))) {
      std::string key = detail::trim(line.substr(0, colon));
      std::string value = detail::trim(line.substr(colon + 1));
      section = Section::header;
      if (key == "NAME") {
        name = value;
      } else if (key == "DIMENSION") {
        dimension = detail::parse_number<int>(value, lineno, "integer DIMENSION");
      } else if (key == "CAPACITY") {
        capacity = detail::parse_number<std::int64_t>(value, lineno, "integer CAPACITY");
      } else if (key == "EDGE_WEIGHT_TYPE") {
        if (value != "EUC_2D")
          throw UnsupportedFormatError(
              fmt::format("line {}: unsupported EDGE_WEIGHT_TYPE {}", lineno, value));
      } else if (key == "TYPE") {
        if (value != "CVRP")
          throw UnsupportedFormatError(fmt::format("line {}: unsupported TYPE {}", lineno, value));
      }
      // COMMENT and unknown keys are ignored.
      continue;
    }

    std::istringstream ss(line);
    std::vector<std::string> tok;
    for (std::string t; ss >> t;) tok.push_back(t);

    switch (section) {
      case Section::header:
        throw ParseError(fmt::format("unexpected content '{}'", line), lineno);
      case Section::coords: {
        if (tok.size() != 3) throw ParseError("coordinate line needs 'id x y'", lineno);
        long id = detail::parse_number<long>(tok[0], lineno, "node id");
        Point p{detail::parse_number<double>(tok[1], lineno, "x coordinate"),
                detail::parse_number<double>(tok[2], lineno, "y coordinate")};
        if (!coords.emplace(id, p).second)
          throw ParseError(fmt::format("duplicate coordinate for node {}", id), lineno);
        break;
      }
      case Section::demands: {
        if (tok.size() != 2) throw ParseError("demand line needs 'id demand'", lineno);
        long id = detail::parse_number<long>(tok[0], lineno, "node id");
        auto d = detail::parse_number<std::int64_t>(tok[1], lineno, "integer demand");
        if (d < 0) throw ValidationError(fmt::format("line {}: negative demand", lineno));
        if (!demands.emplace(id, d).second)
          throw ParseError(fmt::format("duplicate demand for node {}", id), lineno);
        break;
      }
      case Section::depot: {
        for (auto& t : tok) {
          long id = detail::parse_number<long>(t, lineno, "depot id");
          if (id == -1) {
            depot_terminated = true;
          } else if (!depot_terminated) {
            depots.push_back(id);
          }
        }
        break;
      }
      case Section::done:
        break;
    }
  }

  if (!dimension) throw ParseError("missing DIMENSION", lineno);
  if (!capacity) throw ParseError("missing CAPACITY", lineno);
  if (*dimension < 2) throw ValidationError("DIMENSION must be at least 2 (depot + one customer)");
  if (*capacity <= 0) throw ValidationError("CAPACITY must be positive");
  if (coords.size() != std::size_t(*dimension))
    throw ParseError(fmt::format("NODE_COORD_SECTION has {} nodes, DIMENSION is {}",
                                 coords.size(), *dimension),
                     lineno);
  if (demands.size() != std::size_t(*dimension))
    throw ParseError(fmt::format("DEMAND_SECTION has {} nodes, DIMENSION is {}",
                                 demands.size(), *dimension),
                     lineno);
  long depot_id = 1;
  if (depots.size() > 1) throw UnsupportedFormatError("multiple depots are not supported");
  if (depots.size() == 1) depot_id = depots.front();
  if (!coords.contains(depot_id))
    throw ValidationError(fmt::format("depot {} has no coordinates", depot_id));
  for (auto& [id, _] : coords)
    if (!demands.contains(id))
      throw ValidationError(fmt::format("node {} has coordinates but no demand", id));

  Instance inst;
  inst.name = name;
  inst.n_customers = *dimension - 1;
  inst.capacity = *capacity;
  inst.coords.push_back(coords.at(depot_id));
  inst.demands.push_back(demands.at(depot_id));
  if (inst.demands[0] != 0)
    throw ValidationError(fmt::format("depot demand must be 0, found {}", inst.demands[0]));
  for (auto& [id, p] : coords) {
    if (id == depot_id) continue;
    inst.coords.push_back(p);
    inst.demands.push_back(demands.at(id));
    if (demands.at(id) > inst.capacity)
      throw ValidationError(fmt::format("customer {} demand {} exceeds capacity {}", id,
                                        demands.at(id), inst.capacity));
  }

  std::optional<int> fleet = opts.fleet_override;
  if (!fleet) fleet = detail::fleet_from_name(name);
  if (!fleet) fleet = opts.fleet_default;
  if (!fleet) throw ValidationError("fleet size unknown: no -k<p> name suffix and no override");
  if (*fleet < 1) throw ValidationError("fleet size must be at least 1");
  inst.fleet_size = *fleet;

  if (auto* e = BestKnownTable::bundled().find(name)) inst.best_known = e->best_known;
  return inst;
}

inline Instance parse_instance_string(const std::string& text, const ParseOptions& opts = {}) {
  std::istringstream ss(text);
  return parse_instance(ss, opts);
}

// Writes the instance back in CVRPLIB form with the depot as node 1.
inline void write_instance(std::ostream& out, const Instance& inst) {
  out << "NAME : " << inst.name << "\n";
  out << "TYPE : CVRP\n";
  out << "DIMENSION : " << inst.num_nodes() << "\n";
  out << "EDGE_WEIGHT_TYPE : EUC_2D\n";
  out << "CAPACITY : " << inst.capacity << "\n";
  out << "NODE_COORD_SECTION\n";
  for (int i = 0; i < inst.num_nodes(); ++i)
    out << fmt::format(" {} {} {}\n", i + 1, inst.coords[i].x, inst.coords[i].y);
  out << "DEMAND_SECTION\n";
  for (int i = 0; i < inst.num_nodes(); ++i) out << fmt::format("{} {}\n", i + 1, inst.demands[i]);
  out << "DEPOT_SECTION\n 1\n -1\nEOF\n";
}

// TSPLIB EUC_2D: nearest integer, halves rounded up.
inline DistanceMatrix euclid_distance_matrix(const Instance& inst) {
  DistanceMatrix dm(inst.num_nodes());
  for (int i = 0; i < inst.num_nodes(); ++i)
    for (int j = i + 1; j < inst.num_nodes(); ++j) {
      double dx = inst.coords[i].x - inst.coords[j].x;
      double dy = inst.coords[i].y - inst.coords[j].y;
      dm.set(i, j, static_cast<std::int64_t>(std::floor(std::sqrt(dx * dx + dy * dy) + 0.5)));
    }
  return dm;
}

// Total demand over total fleet capacity.
inline double tightness(const Instance& inst) {
  return static_cast<double>(inst.total_demand()) /
         (static_cast<double>(inst.fleet_size) * static_cast<double>(inst.capacity));
}

struct TightnessCheck {
  double computed = 0.0;
  std::vector<double> published;
  bool consistent = true;  // every published value within tolerance
};

// Compares computed tightness against the published values bundled for the
// instance. Mismatches are reported, never fatal.
inline TightnessCheck check_tightness(const Instance& inst, double tolerance = 1e-3) {
  TightnessCheck c;
  c.computed = tightness(inst);
  if (auto* e = BestKnownTable::bundled().find(inst.name)) c.published = e->published_tau;
  for (double p : c.published)
    if (std::abs(p - c.computed) > tolerance) c.consistent = false;
  return c;
}

inline std::string tightness_warning(const Instance& inst, const TightnessCheck& c) {
  if (c.consistent) return {};
  std::string pubs;
  for (double p : c.published) pubs += fmt::format("{}{:.3f}", pubs.empty() ? "" : "/", p);
  return fmt::format("warning: {} tightness computed {:.3f} differs from published {}", inst.name,
                     c.computed, pubs);
}

}  // namespace qcvrp
