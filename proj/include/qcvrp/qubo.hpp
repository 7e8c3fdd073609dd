#pragma once

// Penalty compilation of a ConstrainedModel into an unconstrained binary
// quadratic model, plus energy evaluation and the text exchange format.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <istream>
#include <map>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>
#include <json.hpp>

#include "error.hpp"
#include "flow_model.hpp"

namespace qcvrp {

// Per-kind Lagrange multipliers.
struct PenaltyConfig {
  std::map<ConstraintKind, double> multipliers;

  static PenaltyConfig uniform(double p) {
    PenaltyConfig c;
    for (auto k : kAllKinds) c.multipliers[k] = p;
    return c;
  }

  // 2 * max C_ij * (n + 1) for every kind: any single violation costs more
  // than the largest achievable saving in tour length.
  static PenaltyConfig defaults(const DistanceMatrix& dist, int n_customers) {
    return uniform(2.0 * static_cast<double>(std::max<std::int64_t>(dist.max_cost(), 1)) *
                   (n_customers + 1));
  }

  PenaltyConfig& set(ConstraintKind k, double p) {
    multipliers[k] = p;
    return *this;
  }

  double at(ConstraintKind k) const {
    auto it = multipliers.find(k);
    if (it == multipliers.end())
      throw ConfigError(fmt::format("no penalty multiplier for constraint kind {}", to_string(k)));
    return it->second;
  }
};

// Number of binary slack bits needed to represent every integer in [0, gap].
inline int slack_bits(std::int64_t gap) {
  if (gap <= 0) return 0;
  return std::bit_width(static_cast<std::uint64_t>(gap));
}

// Coefficients 1, 2, 4, ..., with the top one clipped so the maximum
// representable value is exactly `gap`.
inline std::vector<std::int64_t> slack_coefficients(std::int64_t gap) {
  int r = slack_bits(gap);
  std::vector<std::int64_t> coefs;
  coefs.reserve(r);
  for (int k = 0; k + 1 < r; ++k) coefs.push_back(std::int64_t{1} << k);
  if (r > 0) coefs.push_back(gap - ((std::int64_t{1} << (r - 1)) - 1));
  return coefs;
}

// Writes `value` (0 <= value <= sum(coefs)) into bits using coefficients from
// slack_coefficients().
inline void encode_bounded(std::int64_t value, std::span<const std::int64_t> coefs,
                           std::span<std::uint8_t> bits) {
  const int r = static_cast<int>(coefs.size());
  if (r == 0) return;
  const std::int64_t low_sum = (std::int64_t{1} << (r - 1)) - 1;
  bits[r - 1] = value > low_sum;
  if (bits[r - 1]) value -= coefs[r - 1];
  for (int k = 0; k + 1 < r; ++k) bits[k] = (value >> k) & 1;
}

enum class VarOrigin { model_binary, integer_bit, slack_bit };

inline std::string_view to_string(VarOrigin o) {
  switch (o) {
    case VarOrigin::model_binary: return "binary";
    case VarOrigin::integer_bit: return "integer_bit";
    case VarOrigin::slack_bit: return "slack_bit";
  }
  return "?";
}

// `source` is the model ordinal for model_binary / integer_bit and the
// constraint index for slack_bit.
struct LedgerEntry {
  VarOrigin origin = VarOrigin::model_binary;
  int source = 0;
  std::int64_t weight = 1;
  bool operator==(const LedgerEntry&) const = default;
};

// Contiguous run of bits encoding a bounded quantity.
struct BitEncoding {
  int first = 0;
  std::vector<std::int64_t> coefs;
  int size() const { return static_cast<int>(coefs.size()); }
};

struct SlackEncoding : BitEncoding {
  std::int64_t gap = 0;
};

struct QuadEntry {
  int i = 0;
  int j = 0;
  double value = 0.0;
  bool operator==(const QuadEntry&) const = default;
};

// Energy is x^T Q x + offset with Q stored as a diagonal plus a sorted,
// duplicate-free list of upper-triangular (i < j) entries.
struct QuboModel {
  int dim = 0;
  std::vector<double> linear;
  std::vector<QuadEntry> quadratic;
  double offset = 0.0;
  std::vector<LedgerEntry> ledger;

  // Present only for compiled models.
  std::vector<BitEncoding> integer_encodings;  // one per model integer
  std::vector<SlackEncoding> slack;            // one per constraint (possibly empty)
  std::vector<double> constraint_penalty;      // one per constraint

  double max_abs_coefficient() const {
    double m = 0.0;
    for (double v : linear) m = std::max(m, std::abs(v));
    for (auto& q : quadratic) m = std::max(m, std::abs(q.value));
    return m;
  }
};

namespace detail {

// Sorts (i, j) triplets, merges duplicates and drops exact zeros.
inline std::vector<QuadEntry> canonicalize(std::vector<QuadEntry> raw) {
  for (auto& e : raw)
    if (e.i > e.j) std::swap(e.i, e.j);
  std::sort(raw.begin(), raw.end(),
            [](const QuadEntry& a, const QuadEntry& b) { return a.i != b.i ? a.i < b.i : a.j < b.j; });
  std::vector<QuadEntry> out;
  out.reserve(raw.size());
  for (auto& e : raw) {
    if (!out.empty() && out.back().i == e.i && out.back().j == e.j)
      out.back().value += e.value;
    else
      out.push_back(e);
  }
  std::erase_if(out, [](const QuadEntry& e) { return e.value == 0.0; });
  return out;
}

// Linear expression over QUBO bits plus a constant, bits unique.
struct BitExpression {
  std::vector<std::pair<int, std::int64_t>> terms;
  std::int64_t constant = 0;

  std::int64_t min() const {
    std::int64_t s = constant;
    for (auto& [_, a] : terms) s += std::min<std::int64_t>(a, 0);
    return s;
  }
  std::int64_t max() const {
    std::int64_t s = constant;
    for (auto& [_, a] : terms) s += std::max<std::int64_t>(a, 0);
    return s;
  }
  std::int64_t evaluate(std::span<const std::uint8_t> x) const {
    std::int64_t s = constant;
    for (auto& [v, a] : terms)
      if (x[v]) s += a;
    return s;
  }
};

// Substitutes integer encodings into a constraint's left-hand side.
inline BitExpression expand(const ConstrainedModel& m, const std::vector<BitEncoding>& enc,
                            const Constraint& c) {
  std::map<int, std::int64_t> acc;
  BitExpression e;
  for (auto& t : c.terms) {
    if (!m.is_integer(t.var)) {
      acc[t.var] += t.coef;
      continue;
    }
    const auto& b = enc[t.var - m.num_binary];
    e.constant += t.coef * m.bounds(t.var).lower;
    for (int k = 0; k < b.size(); ++k) acc[b.first + k] += t.coef * b.coefs[k];
  }
  for (auto& [v, a] : acc)
    if (a != 0) e.terms.emplace_back(v, a);
  return e;
}

}  // namespace detail

// Compiles with one multiplier per constraint kind. Variable layout:
// model binaries first (same ordinals), then the bits of each bounded
// integer in model order, then the slack bits of each inequality in
// constraint order.
inline QuboModel compile(const ConstrainedModel& model, const PenaltyConfig& config) {
  for (auto& c : model.constraints) config.at(c.kind);
  for (auto& [k, p] : config.multipliers)
    if (!(p > 0.0))
      throw ConfigError(fmt::format("penalty for {} must be positive, got {}", to_string(k), p));

  QuboModel q;
  for (int v = 0; v < model.num_binary; ++v) q.ledger.push_back({VarOrigin::model_binary, v, 1});
  int next = model.num_binary;

  for (int k = 0; k < model.num_integer(); ++k) {
    const auto& b = model.integer_bounds[k];
    if (b.upper < b.lower)
      throw ModelError(fmt::format("integer variable {} has empty bounds", model.num_binary + k));
    BitEncoding enc{next, slack_coefficients(b.upper - b.lower)};
    for (auto w : enc.coefs) q.ledger.push_back({VarOrigin::integer_bit, model.num_binary + k, w});
    next += enc.size();
    q.integer_encodings.push_back(std::move(enc));
  }

  std::vector<detail::BitExpression> exprs;
  exprs.reserve(model.constraints.size());
  for (std::size_t ci = 0; ci < model.constraints.size(); ++ci) {
    const auto& c = model.constraints[ci];
    auto e = detail::expand(model, q.integer_encodings, c);
    SlackEncoding s;
    s.first = next;
    if (c.sense == Sense::le) s.gap = std::max<std::int64_t>(c.rhs - e.min(), 0);
    if (c.sense == Sense::ge) s.gap = std::max<std::int64_t>(e.max() - c.rhs, 0);
    s.coefs = slack_coefficients(s.gap);
    const std::int64_t sign = c.sense == Sense::ge ? -1 : 1;
    for (int k = 0; k < s.size(); ++k) {
      e.terms.emplace_back(next + k, sign * s.coefs[k]);
      q.ledger.push_back({VarOrigin::slack_bit, static_cast<int>(ci), s.coefs[k]});
    }
    next += s.size();
    e.constant -= c.rhs;
    q.slack.push_back(std::move(s));
    q.constraint_penalty.push_back(config.at(c.kind));
    exprs.push_back(std::move(e));
  }

  q.dim = next;
  q.linear.assign(q.dim, 0.0);
  std::vector<QuadEntry> raw;

  for (auto& t : model.objective) {
    if (!model.is_integer(t.var)) {
      q.linear[t.var] += t.coef;
      continue;
    }
    const auto& b = q.integer_encodings[t.var - model.num_binary];
    q.offset += t.coef * static_cast<double>(model.bounds(t.var).lower);
    for (int k = 0; k < b.size(); ++k)
      q.linear[b.first + k] += t.coef * static_cast<double>(b.coefs[k]);
  }
  for (auto& t : model.objective_quadratic) {
    if (t.i == t.j)
      q.linear[t.i] += t.coef;
    else
      raw.push_back({t.i, t.j, t.coef});
  }

  // P (sum a_k z_k + c)^2 with z^2 = z:
  //   diagonal  P (a_k^2 + 2 c a_k), pairs 2 P a_k a_l, constant P c^2
  std::size_t pair_count = 0;
  for (auto& e : exprs) pair_count += e.terms.size() * (e.terms.size() - (e.terms.empty() ? 0 : 1)) / 2;
  raw.reserve(raw.size() + pair_count);
  for (std::size_t ci = 0; ci < exprs.size(); ++ci) {
    const auto& e = exprs[ci];
    const double P = q.constraint_penalty[ci];
    const auto c0 = static_cast<double>(e.constant);
    q.offset += P * c0 * c0;
    for (std::size_t a = 0; a < e.terms.size(); ++a) {
      const auto [va, ca] = e.terms[a];
      const auto fa = static_cast<double>(ca);
      q.linear[va] += P * (fa * fa + 2.0 * c0 * fa);
      for (std::size_t b = a + 1; b < e.terms.size(); ++b) {
        const auto [vb, cb] = e.terms[b];
        raw.push_back({va, vb, 2.0 * P * fa * static_cast<double>(cb)});
      }
    }
  }
  q.quadratic = detail::canonicalize(std::move(raw));
  return q;
}

// One compiled model per configuration, for penalty grid searches.
inline std::vector<QuboModel> compile_sweep(const ConstrainedModel& model,
                                            std::span<const PenaltyConfig> configs) {
  std::vector<QuboModel> out;
  out.reserve(configs.size());
  for (auto& c : configs) out.push_back(compile(model, c));
  return out;
}

inline double energy(const QuboModel& q, std::span<const std::uint8_t> x) {
  if (static_cast<int>(x.size()) != q.dim)
    throw DimensionError(fmt::format("assignment has {} bits, model has {}", x.size(), q.dim));
  double e = q.offset;
  for (int i = 0; i < q.dim; ++i)
    if (x[i]) e += q.linear[i];
  for (auto& t : q.quadratic)
    if (x[t.i] && x[t.j]) e += t.value;
  return e;
}

// Recovers model-space values from QUBO bits.
inline ModelAssignment extract(const QuboModel& q, const ConstrainedModel& model,
                               std::span<const std::uint8_t> x) {
  if (static_cast<int>(x.size()) != q.dim)
    throw DimensionError(fmt::format("assignment has {} bits, model has {}", x.size(), q.dim));
  ModelAssignment a;
  a.binary.assign(x.begin(), x.begin() + model.num_binary);
  for (int k = 0; k < model.num_integer(); ++k) {
    const auto& enc = q.integer_encodings[k];
    std::int64_t v = model.integer_bounds[k].lower;
    for (int b = 0; b < enc.size(); ++b)
      if (x[enc.first + b]) v += enc.coefs[b];
    a.integer.push_back(v);
  }
  return a;
}

// Sets every slack run to the value that minimises its constraint's
// squared residual given the other bits.
inline void complete_slack(const QuboModel& q, const ConstrainedModel& model,
                           std::span<std::uint8_t> x) {
  for (std::size_t ci = 0; ci < model.constraints.size(); ++ci) {
    const auto& s = q.slack[ci];
    if (s.size() == 0) continue;
    const auto& c = model.constraints[ci];
    auto e = detail::expand(model, q.integer_encodings, c);
    const std::int64_t lhs = e.evaluate(x);
    std::int64_t want = c.sense == Sense::le ? c.rhs - lhs : lhs - c.rhs;
    want = std::clamp<std::int64_t>(want, 0, s.gap);
    encode_bounded(want, s.coefs, x.subspan(s.first, s.size()));
  }
}

// Lifts a model-space assignment into QUBO bits with optimal slack.
inline std::vector<std::uint8_t> embed(const QuboModel& q, const ConstrainedModel& model,
                                       const ModelAssignment& a) {
  if (static_cast<int>(a.binary.size()) != model.num_binary ||
      static_cast<int>(a.integer.size()) != model.num_integer())
    throw DimensionError("model assignment does not match the model");
  std::vector<std::uint8_t> x(q.dim, 0);
  std::copy(a.binary.begin(), a.binary.end(), x.begin());
  for (int k = 0; k < model.num_integer(); ++k) {
    const auto& b = model.integer_bounds[k];
    if (a.integer[k] < b.lower || a.integer[k] > b.upper)
      throw EncodingError(fmt::format("integer variable {} = {} outside [{}, {}]",
                                      model.num_binary + k, a.integer[k], b.lower, b.upper));
    const auto& enc = q.integer_encodings[k];
    encode_bounded(a.integer[k] - b.lower, enc.coefs, std::span(x).subspan(enc.first, enc.size()));
  }
  complete_slack(q, model, x);
  return x;
}

struct PenaltyBreakdown {
  double objective = 0.0;
  std::map<ConstraintKind, double> penalties;
  double total_penalty() const {
    double s = 0.0;
    for (auto& [_, v] : penalties) s += v;
    return s;
  }
};

// Splits the energy of `x` into the original objective and one penalty
// total per constraint kind, using the slack bits exactly as given.
inline PenaltyBreakdown penalty_breakdown(const QuboModel& q, const ConstrainedModel& model,
                                          std::span<const std::uint8_t> x) {
  auto a = extract(q, model, x);
  PenaltyBreakdown out;
  out.objective = objective_value(model, a);
  for (auto& c : model.constraints) out.penalties[c.kind] = 0.0;
  for (std::size_t ci = 0; ci < model.constraints.size(); ++ci) {
    const auto& c = model.constraints[ci];
    const auto& s = q.slack[ci];
    std::int64_t slack = 0;
    for (int k = 0; k < s.size(); ++k)
      if (x[s.first + k]) slack += s.coefs[k];
    std::int64_t residual = lhs_value(model, c, a) - c.rhs;
    if (c.sense == Sense::le) residual += slack;
    if (c.sense == Sense::ge) residual -= slack;
    const auto r = static_cast<double>(residual);
    out.penalties[c.kind] += q.constraint_penalty[ci] * r * r;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Text format: "dim offset", then "i i c" diagonal and "i j c" (i < j) lines.

inline void write_qubo(std::ostream& out, const QuboModel& q) {
  out << fmt::format("{} {}\n", q.dim, q.offset);
  for (int i = 0; i < q.dim; ++i)
    if (q.linear[i] != 0.0) out << fmt::format("{} {} {}\n", i, i, q.linear[i]);
  for (auto& t : q.quadratic) out << fmt::format("{} {} {}\n", t.i, t.j, t.value);
}

inline QuboModel read_qubo(std::istream& in) {
  QuboModel q;
  std::string line;
  std::size_t lineno = 0;
  bool have_header = false;
  std::vector<QuadEntry> raw;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos || line[0] == '#') continue;
    std::istringstream ss(line);
    if (!have_header) {
      if (!(ss >> q.dim >> q.offset) || q.dim < 0) throw ParseError("bad QUBO header", lineno);
      q.linear.assign(q.dim, 0.0);
      have_header = true;
      continue;
    }
    int i = 0, j = 0;
    double c = 0.0;
    if (!(ss >> i >> j >> c)) throw ParseError("expected 'i j coeff'", lineno);
    if (i < 0 || j < 0 || i >= q.dim || j >= q.dim)
      throw ParseError(fmt::format("index out of range for dim {}", q.dim), lineno);
    if (i > j) throw ParseError("entries must be upper triangular (i <= j)", lineno);
    if (i == j)
      q.linear[i] += c;
    else
      raw.push_back({i, j, c});
  }
  if (!have_header) throw ParseError("empty QUBO file", lineno);
  q.quadratic = detail::canonicalize(std::move(raw));
  for (int i = 0; i < q.dim; ++i) q.ledger.push_back({VarOrigin::model_binary, i, 1});
  return q;
}

inline nlohmann::json ledger_to_json(const QuboModel& q, const VarMap* map = nullptr) {
  nlohmann::json arr = nlohmann::json::array();
  for (int v = 0; v < static_cast<int>(q.ledger.size()); ++v) {
    const auto& e = q.ledger[v];
    nlohmann::json j = {{"ordinal", v},
                        {"origin", to_string(e.origin)},
                        {"source", e.source},
                        {"weight", e.weight}};
    if (map && e.origin != VarOrigin::slack_bit) j["name"] = map->name(e.source);
    arr.push_back(std::move(j));
  }
  return arr;
}

}  // namespace qcvrp
