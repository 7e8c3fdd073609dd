#pragma once

// Decoding arc assignments into vehicle routes, feasibility checks against
// the business rules, route costs and the CVRPLIB .sol format.

#include <algorithm>
#include <cstdint>
#include <istream>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "error.hpp"
#include "flow_model.hpp"
#include "instance.hpp"

namespace qcvrp {

// One node sequence per truck, each starting and ending at the depot.
// An unused truck has an empty sequence.
struct RouteSet {
  std::vector<std::vector<int>> routes;
  std::vector<std::int64_t> loads;
  std::int64_t total_cost = 0;
  bool operator==(const RouteSet&) const = default;
};

enum class ViolationKind { revisit, missed_customer, capacity_exceeded, subtour, depot_rule };

inline std::string_view to_string(ViolationKind k) {
  switch (k) {
    case ViolationKind::revisit: return "revisit";
    case ViolationKind::missed_customer: return "missed_customer";
    case ViolationKind::capacity_exceeded: return "capacity_exceeded";
    case ViolationKind::subtour: return "subtour";
    case ViolationKind::depot_rule: return "depot_rule";
  }
  return "?";
}

struct Violation {
  ViolationKind kind;
  std::string detail;
};

struct DecodeResult {
  RouteSet routes;  // best-effort reconstruction; authoritative only if ok()
  std::vector<Violation> violations;
  bool ok() const { return violations.empty(); }
  bool has(ViolationKind k) const {
    return std::any_of(violations.begin(), violations.end(),
                       [k](const Violation& v) { return v.kind == k; });
  }
};

inline std::int64_t route_cost(const RouteSet& rs, const DistanceMatrix& dist) {
  std::int64_t c = 0;
  for (auto& r : rs.routes)
    for (std::size_t k = 1; k < r.size(); ++k) c += dist(r[k - 1], r[k]);
  return c;
}

inline std::vector<std::int64_t> route_loads(const RouteSet& rs, const Instance& inst) {
  std::vector<std::int64_t> loads;
  for (auto& r : rs.routes) {
    std::int64_t l = 0;
    for (int v : r) l += inst.demands[v];
    loads.push_back(l);
  }
  return loads;
}

// Reads the arc bits of `x` (any trailing integer or slack bits are
// ignored) and follows each truck's successor arcs from the depot. With
// strictly positive demands, ok() holds exactly when the arcs admit an MTZ
// completion satisfying every model constraint.
inline DecodeResult decode(std::span<const std::uint8_t> x, const VarMap& map,
                           const Instance& inst) {
  const int n = map.customers();
  const int p = map.trucks();
  if (static_cast<int>(x.size()) < map.total_binary())
    throw DimensionError(
        fmt::format("assignment has {} bits, need {} arc bits", x.size(), map.total_binary()));

  DecodeResult out;
  auto flag = [&](ViolationKind k, std::string d) { out.violations.push_back({k, std::move(d)}); };

  std::vector<int> in_total(n + 1, 0);
  out.routes.routes.resize(p);

  for (int r = 0; r < p; ++r) {
    std::vector<std::vector<int>> succ(n + 1);
    std::vector<int> in_deg(n + 1, 0);
    int arcs = 0;
    for (int i = 0; i <= n; ++i)
      for (int j = 0; j <= n; ++j)
        if (i != j && x[map.arc(r, i, j)]) {
          succ[i].push_back(j);
          ++in_deg[j];
          ++arcs;
        }
    for (int j = 1; j <= n; ++j) in_total[j] += in_deg[j];

    std::vector<char> used(n + 1, 0);
    auto& route = out.routes.routes[r];
    int walked = 0;
    if (succ[0].size() != 1) {
      flag(ViolationKind::depot_rule,
           fmt::format("truck {} leaves the depot {} times", r + 1, succ[0].size()));
    } else {
      route.push_back(0);
      int cur = succ[0][0];
      ++walked;
      while (true) {
        route.push_back(cur);
        if (cur == 0) break;
        if (used[cur]) {
          flag(ViolationKind::revisit, fmt::format("truck {} passes customer {} twice", r + 1, cur));
          break;
        }
        used[cur] = 1;
        if (succ[cur].empty()) {
          flag(ViolationKind::depot_rule,
               fmt::format("truck {} stops at customer {} without returning", r + 1, cur));
          break;
        }
        if (succ[cur].size() > 1)
          flag(ViolationKind::revisit,
               fmt::format("truck {} leaves customer {} {} times", r + 1, cur, succ[cur].size()));
        cur = succ[cur][0];
        ++walked;
      }
    }
    if (arcs > walked) {
      // Arcs off the depot walk: closed loops are subtours, the rest are
      // dangling fragments.
      std::vector<char> seen(n + 1, 0);
      for (int s = 1; s <= n; ++s) {
        if (used[s] || seen[s] || succ[s].empty()) continue;
        std::vector<int> path;
        int cur = s;
        while (cur != 0 && !used[cur] && !seen[cur] && !succ[cur].empty()) {
          seen[cur] = 1;
          path.push_back(cur);
          cur = succ[cur][0];
        }
        auto loop = std::find(path.begin(), path.end(), cur);
        if (loop != path.end()) {
          std::string nodes;
          for (auto it = loop; it != path.end(); ++it) nodes += fmt::format(" {}", *it);
          flag(ViolationKind::subtour, fmt::format("truck {} loop not through depot:{}", r + 1, nodes));
        } else {
          flag(ViolationKind::depot_rule,
               fmt::format("truck {} has a path from customer {} off its route", r + 1, s));
        }
      }
    }
  }

  for (int j = 1; j <= n; ++j) {
    if (in_total[j] == 0)
      flag(ViolationKind::missed_customer, fmt::format("customer {} is never visited", j));
    else if (in_total[j] > 1)
      flag(ViolationKind::revisit, fmt::format("customer {} is entered {} times", j, in_total[j]));
  }

  out.routes.loads = route_loads(out.routes, inst);
  for (int r = 0; r < p; ++r)
    if (out.routes.loads[r] > inst.capacity)
      flag(ViolationKind::capacity_exceeded,
           fmt::format("truck {} carries {} > capacity {}", r + 1, out.routes.loads[r],
                       inst.capacity));
  return out;
}

// Inverse of decode. u[r,i] is the cumulative load delivered by truck r up
// to and including customer i, and the lower bound q_i for customers the
// truck does not serve.
inline ModelAssignment encode(const RouteSet& rs, const VarMap& map, const Instance& inst) {
  const int n = map.customers();
  if (static_cast<int>(rs.routes.size()) > map.trucks())
    throw EncodingError(fmt::format("{} routes for {} trucks", rs.routes.size(), map.trucks()));
  ModelAssignment a;
  a.binary.assign(map.total_binary(), 0);
  a.integer.resize(map.total_integer());
  for (int r = 0; r < map.trucks(); ++r)
    for (int i = 1; i <= n; ++i) a.integer[map.u(r, i) - map.total_binary()] = inst.demands[i];

  for (int r = 0; r < static_cast<int>(rs.routes.size()); ++r) {
    const auto& route = rs.routes[r];
    if (route.empty()) continue;
    if (route.size() < 3 || route.front() != 0 || route.back() != 0)
      throw EncodingError(fmt::format("route {} must start and end at the depot", r + 1));
    std::int64_t load = 0;
    for (std::size_t k = 1; k < route.size(); ++k) {
      int i = route[k - 1], j = route[k];
      if (i < 0 || j < 0 || i > n || j > n || i == j)
        throw EncodingError(fmt::format("route {} has invalid step {} -> {}", r + 1, i, j));
      if (k + 1 < route.size() && j == 0)
        throw EncodingError(fmt::format("route {} passes the depot mid-route", r + 1));
      a.binary[map.arc(r, i, j)] = 1;
      if (j != 0) {
        load += inst.demands[j];
        a.integer[map.u(r, j) - map.total_binary()] = std::min(load, inst.capacity);
      }
    }
  }
  return a;
}

// Routes ordered by first customer, unused trucks last.
inline RouteSet canonical(RouteSet rs) {
  std::vector<std::pair<std::vector<int>, std::int64_t>> z;
  for (std::size_t r = 0; r < rs.routes.size(); ++r)
    z.emplace_back(rs.routes[r], r < rs.loads.size() ? rs.loads[r] : 0);
  std::stable_sort(z.begin(), z.end(), [](const auto& a, const auto& b) {
    if (a.first.empty() != b.first.empty()) return b.first.empty();
    if (a.first.empty()) return false;
    return a.first[1] < b.first[1];
  });
  rs.routes.clear();
  rs.loads.clear();
  for (auto& [route, load] : z) {
    rs.routes.push_back(route);
    rs.loads.push_back(load);
  }
  return rs;
}

// CVRPLIB solution format: "Route #k: c1 c2 ..." per non-empty route, then
// "Cost <total>".
inline void write_solution(std::ostream& out, const RouteSet& rs) {
  int k = 0;
  for (auto& r : rs.routes) {
    if (r.size() <= 2) continue;
    out << "Route #" << ++k << ":";
    for (std::size_t i = 1; i + 1 < r.size(); ++i) out << ' ' << r[i];
    out << '\n';
  }
  out << "Cost " << rs.total_cost << '\n';
}

inline RouteSet read_solution(std::istream& in) {
  RouteSet rs;
  std::string line;
  std::size_t lineno = 0;
  bool have_cost = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.starts_with("Route")) {
      auto colon = line.find(':');
      if (colon == std::string::npos) throw ParseError("route line without ':'", lineno);
      std::istringstream ss(line.substr(colon + 1));
      std::vector<int> route{0};
      for (int v; ss >> v;) route.push_back(v);
      route.push_back(0);
      rs.routes.push_back(std::move(route));
    } else if (line.starts_with("Cost")) {
      std::istringstream ss(line.substr(4));
      if (!(ss >> rs.total_cost)) throw ParseError("bad cost line", lineno);
      have_cost = true;
    }
  }
  if (!have_cost) throw ParseError("missing Cost line", lineno);
  return rs;
}

}  // namespace qcvrp
