#pragma once

// Samplers over a QuboModel: simulated annealing, exhaustive search and a
// JSON-over-HTTP client for an external annealing service.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <regex>
#include <string>
#include <thread>
#include <vector>

#include <fmt/format.h>
#include <httplib.h>
#include <json.hpp>

#include "error.hpp"
#include "qubo.hpp"

namespace qcvrp {

struct Sample {
  std::vector<std::uint8_t> assignment;
  double energy = 0.0;
  double time_us = 0.0;
  int read = 0;
};

struct SampleSet {
  std::vector<Sample> samples;  // ascending energy, ties by read index
  std::string sampler;
  std::uint64_t seed = 0;
  nlohmann::json params = nlohmann::json::object();
  // "local" for wall-clock time measured here, "service" for time reported
  // by a remote solver.
  std::string time_source = "local";
  std::optional<double> service_us;

  const Sample& best() const {
    if (samples.empty()) throw Error("empty sample set");
    return samples.front();
  }
};

inline void sort_samples(SampleSet& s) {
  std::stable_sort(s.samples.begin(), s.samples.end(), [](const Sample& a, const Sample& b) {
    return a.energy != b.energy ? a.energy < b.energy : a.read < b.read;
  });
}

inline std::string to_bitstring(std::span<const std::uint8_t> x) {
  std::string s(x.size(), '0');
  for (std::size_t i = 0; i < x.size(); ++i)
    if (x[i]) s[i] = '1';
  return s;
}

inline std::vector<std::uint8_t> from_bitstring(std::string_view s) {
  std::vector<std::uint8_t> x(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] != '0' && s[i] != '1')
      throw DomainError(fmt::format("bitstring contains '{}' at position {}", s[i], i));
    x[i] = s[i] == '1';
  }
  return x;
}

// splitmix64 finaliser; derives independent stream seeds from (seed, index).
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// Symmetric adjacency of the quadratic part, CSR layout.
class QuboAdjacency {
public:
  explicit QuboAdjacency(const QuboModel& q) : offsets_(q.dim + 1, 0) {
    for (auto& t : q.quadratic) {
      ++offsets_[t.i + 1];
      ++offsets_[t.j + 1];
    }
    for (int i = 0; i < q.dim; ++i) offsets_[i + 1] += offsets_[i];
    neighbors_.resize(offsets_.back());
    weights_.resize(offsets_.back());
    std::vector<std::size_t> fill(offsets_.begin(), offsets_.end() - 1);
    for (auto& t : q.quadratic) {
      neighbors_[fill[t.i]] = t.j;
      weights_[fill[t.i]++] = t.value;
      neighbors_[fill[t.j]] = t.i;
      weights_[fill[t.j]++] = t.value;
    }
  }

  std::size_t begin(int i) const { return offsets_[i]; }
  std::size_t end(int i) const { return offsets_[i + 1]; }
  int neighbor(std::size_t k) const { return neighbors_[k]; }
  double weight(std::size_t k) const { return weights_[k]; }

private:
  std::vector<std::size_t> offsets_;
  std::vector<int> neighbors_;
  std::vector<double> weights_;
};

// ---------------------------------------------------------------------------
// Simulated annealing

struct SamplerParams {
  int num_reads = 100;
  int sweeps = 10000;
  std::optional<double> initial_temperature;  // default: max |coefficient|
  double final_temperature = 0.01;
  double cooling_ratio = 0.97;
  std::uint64_t seed = 0;
  int threads = 1;

  nlohmann::json to_json() const {
    nlohmann::json j = {{"num_reads", num_reads},
                        {"sweeps", sweeps},
                        {"final_temperature", final_temperature},
                        {"cooling_ratio", cooling_ratio},
                        {"seed", seed}};
    if (initial_temperature) j["initial_temperature"] = *initial_temperature;
    return j;
  }
};

namespace detail {

inline double unit_uniform(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline Sample anneal_one(const QuboModel& q, const QuboAdjacency& adj, double t0, double t1,
                         double ratio, int sweeps, std::uint64_t stream_seed, int read) {
  auto start = std::chrono::steady_clock::now();
  std::mt19937_64 rng(stream_seed);
  const int n = q.dim;
  std::vector<std::uint8_t> x(n);
  for (auto& b : x) b = rng() >> 63;

  // field[i] = linear[i] + sum_j Q_ij x_j; flipping i changes energy by
  // (1 - 2 x_i) field[i].
  std::vector<double> field(q.linear);
  for (int i = 0; i < n; ++i)
    if (x[i])
      for (auto k = adj.begin(i); k < adj.end(i); ++k) field[adj.neighbor(k)] += adj.weight(k);

  double e = energy(q, x);
  double best_e = e;
  std::vector<std::uint8_t> best = x;

  const int levels =
      std::max(1, static_cast<int>(std::ceil(std::log(t1 / t0) / std::log(ratio))) + 1);
  for (int s = 0; s < sweeps; ++s) {
    const int level = static_cast<int>(std::int64_t{s} * levels / sweeps);
    const double t = std::max(t1, t0 * std::pow(ratio, level));
    for (int i = 0; i < n; ++i) {
      const double delta = x[i] ? -field[i] : field[i];
      if (delta > 0.0 && unit_uniform(rng) >= std::exp(-delta / t)) continue;
      const double sign = x[i] ? -1.0 : 1.0;
      x[i] ^= 1;
      e += delta;
      for (auto k = adj.begin(i); k < adj.end(i); ++k)
        field[adj.neighbor(k)] += sign * adj.weight(k);
    }
    if (e < best_e) {
      best_e = e;
      best = x;
    }
  }
  Sample out;
  out.energy = energy(q, best);
  out.assignment = std::move(best);
  out.read = read;
  out.time_us = std::chrono::duration<double, std::micro>(std::chrono::steady_clock::now() - start)
                    .count();
  return out;
}

}  // namespace detail

// Metropolis single-bit-flip annealing under a geometric schedule. Each read
// starts from a random assignment drawn from its own stream, so results do
// not depend on `threads`.
inline SampleSet sample_sa(const QuboModel& q, const SamplerParams& params) {
  if (q.dim < 1) throw DimensionError("cannot sample an empty model");
  if (params.num_reads < 1) throw ConfigError("num_reads must be at least 1");
  if (params.sweeps < 1) throw ConfigError("sweeps must be at least 1");
  if (!(params.cooling_ratio > 0.0 && params.cooling_ratio < 1.0))
    throw ConfigError("cooling ratio must lie in (0, 1)");
  const double t1 = params.final_temperature;
  const double t0 = params.initial_temperature.value_or(std::max(q.max_abs_coefficient(), t1));
  if (!(t1 > 0.0) || !(t0 >= t1))
    throw ConfigError("temperatures must be positive with initial >= final");

  QuboAdjacency adj(q);
  SampleSet out;
  out.sampler = "sa";
  out.seed = params.seed;
  out.params = params.to_json();
  out.samples.resize(params.num_reads);

  auto worker = [&](int first, int stride) {
    for (int r = first; r < params.num_reads; r += stride)
      out.samples[r] = detail::anneal_one(q, adj, t0, t1, params.cooling_ratio, params.sweeps,
                                          derive_seed(params.seed, r), r);
  };
  const int threads = std::clamp(params.threads, 1, params.num_reads);
  if (threads == 1) {
    worker(0, 1);
  } else {
    std::vector<std::jthread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker, t, threads);
  }
  sort_samples(out);
  return out;
}

// ---------------------------------------------------------------------------
// Exhaustive search

inline constexpr int kBruteForceMaxDim = 24;

struct BruteForceResult {
  std::vector<std::uint8_t> assignment;
  double energy = 0.0;
};

// Global minimum by Gray-code enumeration. Ties go to the assignment whose
// bitstring (x_0 first) is the smallest binary numeral.
inline BruteForceResult brute_force(const QuboModel& q) {
  if (q.dim > kBruteForceMaxDim)
    throw SizeGuardError(
        fmt::format("brute force limited to {} variables, model has {}", kBruteForceMaxDim, q.dim));
  const int n = q.dim;
  QuboAdjacency adj(q);
  double scale = 1.0 + std::abs(q.offset);
  for (double v : q.linear) scale += std::abs(v);
  for (auto& t : q.quadratic) scale += std::abs(t.value);
  const double tol = 1e-12 * scale;

  auto key_of = [n](const std::vector<std::uint8_t>& x) {
    std::uint64_t k = 0;
    for (int i = 0; i < n; ++i) k = (k << 1) | x[i];
    return k;
  };

  std::vector<std::uint8_t> x(n, 0);
  std::vector<double> field(q.linear);
  double e = q.offset;
  BruteForceResult best{x, e};
  std::uint64_t best_key = 0;

  const std::uint64_t total = std::uint64_t{1} << n;
  for (std::uint64_t k = 1; k < total; ++k) {
    const int i = std::countr_zero(k);
    const double delta = x[i] ? -field[i] : field[i];
    const double sign = x[i] ? -1.0 : 1.0;
    x[i] ^= 1;
    e += delta;
    for (auto a = adj.begin(i); a < adj.end(i); ++a) field[adj.neighbor(a)] += sign * adj.weight(a);
    if (e < best.energy - tol) {
      best = {x, e};
      best_key = key_of(x);
    } else if (e <= best.energy + tol) {
      auto key = key_of(x);
      if (key < best_key) {
        best = {x, e};
        best_key = key;
      }
    }
  }
  best.energy = energy(q, best.assignment);
  return best;
}

inline SampleSet brute_force_sample(const QuboModel& q) {
  auto start = std::chrono::steady_clock::now();
  auto r = brute_force(q);
  SampleSet s;
  s.sampler = "brute";
  Sample smp{std::move(r.assignment), r.energy, 0.0, 0};
  smp.time_us =
      std::chrono::duration<double, std::micro>(std::chrono::steady_clock::now() - start).count();
  s.samples.push_back(std::move(smp));
  return s;
}

// ---------------------------------------------------------------------------
// Remote annealing service

struct RemoteParams {
  int num_reads = 100;
  int time_limit_ms = 5000;
  int connect_timeout_s = 10;
  int read_timeout_s = 300;
};

struct Endpoint {
  std::string base;  // scheme://host[:port]
  std::string path;
};

inline Endpoint parse_endpoint(const std::string& url) {
  static const std::regex re(R"(^(https?)://([^/:]+)(:\d+)?(/.*)?$)");
  std::smatch m;
  if (!std::regex_match(url, m, re)) throw ConfigError(fmt::format("malformed endpoint '{}'", url));
  if (m[1].str() == "https")
    throw ConfigError("https endpoints are not supported; use a local http relay");
  return {m[1].str() + "://" + m[2].str() + m[3].str(), m[4].matched ? m[4].str() : "/"};
}

inline nlohmann::json remote_request(const QuboModel& q, const RemoteParams& p) {
  nlohmann::json quad = nlohmann::json::array();
  for (auto& t : q.quadratic) quad.push_back({t.i, t.j, t.value});
  return {{"format", "qubo"},   {"dim", q.dim},          {"offset", q.offset},
          {"linear", q.linear}, {"quadratic", std::move(quad)}, {"num_reads", p.num_reads},
          {"time_limit_ms", p.time_limit_ms}};
}

// Parses a service response. Energies are recomputed locally and must agree
// with any energy the service reports.
inline SampleSet parse_remote_response(const QuboModel& q, const std::string& body) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(body);
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(fmt::format("body is not JSON ({})", e.what()));
  }
  if (!doc.is_object() || !doc.contains("samples") || !doc["samples"].is_array())
    throw SchemaError("missing 'samples' array");
  SampleSet out;
  out.sampler = "remote";
  out.time_source = "service";
  if (doc.contains("timing")) {
    const auto& t = doc["timing"];
    if (!t.is_object() || !t.contains("service_us") || !t["service_us"].is_number())
      throw SchemaError("'timing.service_us' must be a number");
    out.service_us = t["service_us"].get<double>();
  }
  int read = 0;
  for (const auto& s : doc["samples"]) {
    if (!s.is_object() || !s.contains("assignment") || !s["assignment"].is_string())
      throw SchemaError("sample without string 'assignment'");
    auto bits = s["assignment"].get<std::string>();
    if (static_cast<int>(bits.size()) != q.dim)
      throw SchemaError(fmt::format("assignment has {} bits, expected {}", bits.size(), q.dim));
    std::vector<std::uint8_t> x;
    try {
      x = from_bitstring(bits);
    } catch (const DomainError& e) {
      throw SchemaError(e.what());
    }
    Sample smp;
    smp.energy = energy(q, x);
    if (s.contains("energy")) {
      if (!s["energy"].is_number()) throw SchemaError("'energy' must be a number");
      double reported = s["energy"].get<double>();
      if (std::abs(reported - smp.energy) > 1e-6 * (1.0 + std::abs(smp.energy)))
        throw SchemaError(fmt::format("reported energy {} disagrees with local {}", reported,
                                      smp.energy));
    }
    smp.assignment = std::move(x);
    smp.read = read++;
    smp.time_us = out.service_us.value_or(0.0);
    out.samples.push_back(std::move(smp));
  }
  sort_samples(out);
  return out;
}

inline SampleSet sample_remote(const QuboModel& q, const std::string& url, const RemoteParams& p) {
  auto ep = parse_endpoint(url);
  httplib::Client cli(ep.base);
  cli.set_connection_timeout(p.connect_timeout_s, 0);
  cli.set_read_timeout(p.read_timeout_s, 0);
  auto res = cli.Post(ep.path, remote_request(q, p).dump(), "application/json");
  if (!res) throw TransportError(fmt::format("POST {}: {}", url, httplib::to_string(res.error())));
  if (res->status < 200 || res->status >= 300) throw HttpStatusError(res->status, res->body);
  auto out = parse_remote_response(q, res->body);
  out.params = {{"endpoint", url}, {"num_reads", p.num_reads}, {"time_limit_ms", p.time_limit_ms}};
  return out;
}

}  // namespace qcvrp
