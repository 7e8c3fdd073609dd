#pragma once

// Flow-based CVRP model: truck-indexed arc variables x[r,i,j], truck-indexed
// MTZ ordering variables u[r,i], five constraint families.

#include <cstdint>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include <fmt/format.h>
#include <json.hpp>

#include "error.hpp"
#include "instance.hpp"

namespace qcvrp {

enum class ConstraintKind { visit_once, depot_leave, flow_conservation, capacity, mtz, custom };
enum class Sense { eq, le, ge };

inline constexpr ConstraintKind kAllKinds[] = {
    ConstraintKind::visit_once, ConstraintKind::depot_leave, ConstraintKind::flow_conservation,
    ConstraintKind::capacity,   ConstraintKind::mtz,         ConstraintKind::custom};

inline std::string_view to_string(ConstraintKind k) {
  switch (k) {
    case ConstraintKind::visit_once: return "visit_once";
    case ConstraintKind::depot_leave: return "depot_leave";
    case ConstraintKind::flow_conservation: return "flow_conservation";
    case ConstraintKind::capacity: return "capacity";
    case ConstraintKind::mtz: return "mtz";
    case ConstraintKind::custom: return "custom";
  }
  return "?";
}

inline std::optional<ConstraintKind> kind_from_string(std::string_view s) {
  for (auto k : kAllKinds)
    if (to_string(k) == s) return k;
  return std::nullopt;
}

inline std::string_view to_string(Sense s) {
  switch (s) {
    case Sense::eq: return "==";
    case Sense::le: return "<=";
    case Sense::ge: return ">=";
  }
  return "?";
}

struct Term {
  int var = 0;
  std::int64_t coef = 0;
};

struct Constraint {
  ConstraintKind kind = ConstraintKind::custom;
  Sense sense = Sense::eq;
  std::vector<Term> terms;
  std::int64_t rhs = 0;
};

struct LinearObjectiveTerm {
  int var = 0;
  double coef = 0.0;
};

struct QuadraticObjectiveTerm {
  int i = 0;
  int j = 0;
  double coef = 0.0;
};

struct IntegerBounds {
  std::int64_t lower = 0;
  std::int64_t upper = 0;
};

// Ordinals 0..num_binary-1 are binary; num_binary.. are bounded integers,
// with integer_bounds[k] describing ordinal num_binary + k.
struct ConstrainedModel {
  int num_binary = 0;
  std::vector<IntegerBounds> integer_bounds;
  std::vector<LinearObjectiveTerm> objective;
  std::vector<QuadraticObjectiveTerm> objective_quadratic;  // binary pairs only
  std::vector<Constraint> constraints;

  int num_integer() const { return static_cast<int>(integer_bounds.size()); }
  int num_variables() const { return num_binary + num_integer(); }
  bool is_integer(int var) const { return var >= num_binary; }
  const IntegerBounds& bounds(int var) const { return integer_bounds[var - num_binary]; }
};

// A point in model space: one 0/1 value per binary, one value per integer.
struct ModelAssignment {
  std::vector<std::uint8_t> binary;
  std::vector<std::int64_t> integer;
};

inline std::int64_t value_of(const ConstrainedModel& m, const ModelAssignment& a, int var) {
  return m.is_integer(var) ? a.integer[var - m.num_binary] : std::int64_t{a.binary[var]};
}

inline std::int64_t lhs_value(const ConstrainedModel& m, const Constraint& c,
                              const ModelAssignment& a) {
  std::int64_t s = 0;
  for (auto& t : c.terms) s += t.coef * value_of(m, a, t.var);
  return s;
}

inline bool satisfied(const ConstrainedModel& m, const Constraint& c, const ModelAssignment& a) {
  auto v = lhs_value(m, c, a);
  switch (c.sense) {
    case Sense::eq: return v == c.rhs;
    case Sense::le: return v <= c.rhs;
    case Sense::ge: return v >= c.rhs;
  }
  return false;
}

inline bool within_bounds(const ConstrainedModel& m, const ModelAssignment& a) {
  for (int k = 0; k < m.num_integer(); ++k)
    if (a.integer[k] < m.integer_bounds[k].lower || a.integer[k] > m.integer_bounds[k].upper)
      return false;
  return true;
}

inline bool feasible(const ConstrainedModel& m, const ModelAssignment& a) {
  if (!within_bounds(m, a)) return false;
  for (auto& c : m.constraints)
    if (!satisfied(m, c, a)) return false;
  return true;
}

inline double objective_value(const ConstrainedModel& m, const ModelAssignment& a) {
  double s = 0.0;
  for (auto& t : m.objective) s += t.coef * static_cast<double>(value_of(m, a, t.var));
  for (auto& q : m.objective_quadratic)
    if (a.binary[q.i] && a.binary[q.j]) s += q.coef;
  return s;
}

// Bijection between (truck, from, to) / (truck, customer) and model ordinals.
// Trucks are 0-based internally; names print them 1-based.
class VarMap {
public:
  VarMap() = default;
  VarMap(int n_customers, int trucks) : n_(n_customers), p_(trucks) {}

  int customers() const { return n_; }
  int trucks() const { return p_; }
  int nodes() const { return n_ + 1; }
  int total_binary() const { return p_ * (n_ + 1) * n_; }
  int total_integer() const { return n_ * p_; }

  // i != j, both in 0..n.
  int arc(int r, int i, int j) const { return (r * (n_ + 1) + i) * n_ + (j < i ? j : j - 1); }
  // i in 1..n.
  int u(int r, int i) const { return total_binary() + r * n_ + (i - 1); }

  bool is_arc(int ordinal) const { return ordinal >= 0 && ordinal < total_binary(); }

  std::tuple<int, int, int> arc_of(int ordinal) const {
    int slot = ordinal % n_;
    int ri = ordinal / n_;
    int i = ri % (n_ + 1);
    int r = ri / (n_ + 1);
    int j = slot < i ? slot : slot + 1;
    return {r, i, j};
  }

  std::pair<int, int> u_of(int ordinal) const {
    int k = ordinal - total_binary();
    return {k / n_, k % n_ + 1};
  }

  std::string name(int ordinal) const {
    if (is_arc(ordinal)) {
      auto [r, i, j] = arc_of(ordinal);
      return fmt::format("x_{}_{}_{}", r + 1, i, j);
    }
    auto [r, i] = u_of(ordinal);
    return fmt::format("u_{}_{}", r + 1, i);
  }

private:
  int n_ = 0;
  int p_ = 0;
};

struct FlowModel {
  ConstrainedModel model;
  VarMap map;
};

inline FlowModel build_model(const Instance& inst, const DistanceMatrix& dist) {
  const int n = inst.n_customers;
  const int p = inst.fleet_size;
  if (n <= 0) throw ModelError("cannot build a model without customers");
  if (p <= 0) throw ModelError("fleet size must be at least 1");
  if (dist.dim() != n + 1)
    throw ModelError(fmt::format("distance matrix has dimension {}, expected {}", dist.dim(), n + 1));
  const std::int64_t Q = inst.capacity;

  FlowModel fm{{}, VarMap(n, p)};
  auto& m = fm.model;
  const auto& vm = fm.map;
  m.num_binary = vm.total_binary();

  // u[r,i] in [q_i, Q]
  m.integer_bounds.reserve(vm.total_integer());
  for (int r = 0; r < p; ++r)
    for (int i = 1; i <= n; ++i) m.integer_bounds.push_back({inst.demands[i], Q});

  // Zero-cost arcs stay in the list.
  m.objective.reserve(m.num_binary);
  for (int r = 0; r < p; ++r)
    for (int i = 0; i <= n; ++i)
      for (int j = 0; j <= n; ++j)
        if (i != j) m.objective.push_back({vm.arc(r, i, j), static_cast<double>(dist(i, j))});

  auto& cs = m.constraints;
  cs.reserve(std::size_t(n) + p + std::size_t(n + 1) * p + p + std::size_t(n) * (n - 1) * p);

  for (int j = 1; j <= n; ++j) {
    Constraint c{ConstraintKind::visit_once, Sense::eq, {}, 1};
    for (int r = 0; r < p; ++r)
      for (int i = 0; i <= n; ++i)
        if (i != j) c.terms.push_back({vm.arc(r, i, j), 1});
    cs.push_back(std::move(c));
  }

  for (int r = 0; r < p; ++r) {
    Constraint c{ConstraintKind::depot_leave, Sense::eq, {}, 1};
    for (int j = 1; j <= n; ++j) c.terms.push_back({vm.arc(r, 0, j), 1});
    cs.push_back(std::move(c));
  }

  // in-degree - out-degree == 0
  for (int j = 0; j <= n; ++j)
    for (int r = 0; r < p; ++r) {
      Constraint c{ConstraintKind::flow_conservation, Sense::eq, {}, 0};
      for (int i = 0; i <= n; ++i)
        if (i != j) c.terms.push_back({vm.arc(r, i, j), 1});
      for (int i = 0; i <= n; ++i)
        if (i != j) c.terms.push_back({vm.arc(r, j, i), -1});
      cs.push_back(std::move(c));
    }

  for (int r = 0; r < p; ++r) {
    Constraint c{ConstraintKind::capacity, Sense::le, {}, Q};
    for (int i = 0; i <= n; ++i)
      for (int j = 1; j <= n; ++j)
        if (i != j) c.terms.push_back({vm.arc(r, i, j), inst.demands[j]});
    cs.push_back(std::move(c));
  }

  // u_j - u_i >= q_j - Q(1 - x_rij)  <=>  u_j - u_i - Q x_rij >= q_j - Q
  for (int r = 0; r < p; ++r)
    for (int i = 1; i <= n; ++i)
      for (int j = 1; j <= n; ++j) {
        if (i == j) continue;
        cs.push_back({ConstraintKind::mtz,
                      Sense::ge,
                      {{vm.u(r, j), 1}, {vm.u(r, i), -1}, {vm.arc(r, i, j), -Q}},
                      inst.demands[j] - Q});
      }
  return fm;
}

struct ModelStats {
  std::int64_t num_variables = 0;
  std::int64_t num_constraints = 0;
  std::int64_t num_biases = 0;
  double tau = 0.0;
};

// Biases: one per variable occurrence in the objective and in every
// constraint, plus one per bounded integer variable.
inline ModelStats model_stats(const ConstrainedModel& m, double tau) {
  ModelStats s;
  s.num_variables = m.num_variables();
  s.num_constraints = static_cast<std::int64_t>(m.constraints.size());
  s.num_biases = static_cast<std::int64_t>(m.objective.size() + m.objective_quadratic.size()) +
                 m.num_integer();
  for (auto& c : m.constraints) s.num_biases += static_cast<std::int64_t>(c.terms.size());
  s.tau = tau;
  return s;
}

inline std::string format_stats_row(const std::string& name, const ModelStats& s) {
  return fmt::format("{} {} {} {} {:.3f}", name, s.num_variables, s.num_constraints, s.num_biases,
                     s.tau);
}

// Closed-form counts for the two subtour elimination families.
enum class SecFormulation { dfj, mtz };

struct SecSize {
  std::uint64_t dominant = 0;     // the leading term: 2^n or n^2
  std::uint64_t constraints = 0;  // exact closed form
  std::uint64_t ancillary_binary = 0;
  std::uint64_t ancillary_continuous = 0;
};

inline SecSize sec_size(SecFormulation f, int n) {
  if (n < 2) throw DomainError("subtour elimination sizes need n >= 2");
  const auto un = static_cast<std::uint64_t>(n);
  SecSize s;
  if (f == SecFormulation::dfj) {
    if (n >= 64)
      throw OverflowError(fmt::format("DFJ constraint count 2^{} does not fit in 64 bits", n));
    s.dominant = std::uint64_t{1} << un;
    s.constraints = s.dominant + 2 * un - 2;
    s.ancillary_binary = un * (un - 1);
  } else {
    s.dominant = un * un;
    s.constraints = un * un - un + 2;
    s.ancillary_binary = un * (un - 1);
    s.ancillary_continuous = un - 1;
  }
  return s;
}

// Thousands separator, e.g. 1,048,576.
inline std::string group_thousands(std::uint64_t v) {
  std::string s = std::to_string(v);
  for (int i = static_cast<int>(s.size()) - 3; i > 0; i -= 3) s.insert(std::size_t(i), ",");
  return s;
}

inline nlohmann::json model_to_json(const ConstrainedModel& m, const VarMap* map = nullptr) {
  using nlohmann::json;
  json vars = json::array();
  for (int v = 0; v < m.num_variables(); ++v) {
    json e = {{"ordinal", v}, {"type", m.is_integer(v) ? "integer" : "binary"}};
    if (map) e["name"] = map->name(v);
    if (m.is_integer(v)) {
      e["lower"] = m.bounds(v).lower;
      e["upper"] = m.bounds(v).upper;
    }
    vars.push_back(std::move(e));
  }
  json obj = json::array();
  for (auto& t : m.objective) obj.push_back({t.var, t.coef});
  json objq = json::array();
  for (auto& q : m.objective_quadratic) objq.push_back({q.i, q.j, q.coef});
  json cons = json::array();
  for (auto& c : m.constraints) {
    json terms = json::array();
    for (auto& t : c.terms) terms.push_back({t.var, t.coef});
    cons.push_back({{"kind", to_string(c.kind)},
                    {"sense", to_string(c.sense)},
                    {"terms", std::move(terms)},
                    {"rhs", c.rhs}});
  }
  return {{"variables", std::move(vars)},
          {"objective", {{"linear", std::move(obj)}, {"quadratic", std::move(objq)}}},
          {"constraints", std::move(cons)}};
}

}  // namespace qcvrp
