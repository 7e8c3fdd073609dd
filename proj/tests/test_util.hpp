#pragma once

// Shared fixtures and independent oracles for the test suites.

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "qcvrp/qcvrp.hpp"

namespace qcvrp::testing {

inline std::filesystem::path data_dir() { return QCVRP_DATA_DIR; }

inline Instance load_a_series(const std::string& name) {
  std::ifstream f(data_dir() / "A" / (name + ".vrp"));
  if (!f) throw std::runtime_error("missing data file " + name);
  return parse_instance(f);
}

inline std::vector<std::string> a_series_names() {
  std::vector<std::string> names;
  for (auto& e : std::filesystem::directory_iterator(data_dir() / "A"))
    names.push_back(e.path().stem().string());
  std::sort(names.begin(), names.end());
  return names;
}

// Random instance with integer coordinates and demands in [1, max_demand].
inline Instance random_instance(std::mt19937_64& rng, int customers, int trucks,
                                std::int64_t capacity, std::int64_t max_demand) {
  Instance inst;
  inst.name = "rand-n" + std::to_string(customers + 1) + "-k" + std::to_string(trucks);
  inst.n_customers = customers;
  inst.capacity = capacity;
  inst.fleet_size = trucks;
  std::uniform_int_distribution<int> coord(0, 100);
  std::uniform_int_distribution<std::int64_t> dem(1, max_demand);
  for (int i = 0; i <= customers; ++i) {
    inst.coords.push_back({double(coord(rng)), double(coord(rng))});
    inst.demands.push_back(i == 0 ? 0 : dem(rng));
  }
  return inst;
}

// Random feasible route set: shuffles customers and deals them into exactly
// `trucks` non-empty routes without exceeding capacity. Returns false if the
// draw failed (caller retries).
inline bool random_feasible_routes(std::mt19937_64& rng, const Instance& inst, RouteSet& out) {
  const int n = inst.n_customers, p = inst.fleet_size;
  if (n < p) return false;
  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 1);
  std::shuffle(perm.begin(), perm.end(), rng);
  // p - 1 distinct cut points in 1..n-1
  std::vector<int> cuts(n - 1);
  std::iota(cuts.begin(), cuts.end(), 1);
  std::shuffle(cuts.begin(), cuts.end(), rng);
  cuts.resize(p - 1);
  std::sort(cuts.begin(), cuts.end());
  cuts.insert(cuts.begin(), 0);
  cuts.push_back(n);
  out = RouteSet{};
  for (int r = 0; r < p; ++r) {
    std::vector<int> route{0};
    std::int64_t load = 0;
    for (int k = cuts[r]; k < cuts[r + 1]; ++k) {
      route.push_back(perm[k]);
      load += inst.demands[perm[k]];
    }
    if (load > inst.capacity) return false;
    route.push_back(0);
    out.routes.push_back(std::move(route));
    out.loads.push_back(load);
  }
  return true;
}

// Exhaustive CVRP optimum over assignments of customers to exactly `trucks`
// non-empty routes, each route ordered by full permutation. Independent of
// the model/QUBO path.
inline std::int64_t enumerate_optimum(const Instance& inst, const DistanceMatrix& dist) {
  const int n = inst.n_customers, p = inst.fleet_size;
  std::int64_t best = -1;
  std::vector<int> owner(n, 0);
  // owner vector enumerated as base-p digits
  std::int64_t total = 1;
  for (int i = 0; i < n; ++i) total *= p;
  for (std::int64_t code = 0; code < total; ++code) {
    std::int64_t c = code;
    for (int i = 0; i < n; ++i) {
      owner[i] = static_cast<int>(c % p);
      c /= p;
    }
    std::int64_t cost = 0;
    bool ok = true;
    for (int r = 0; r < p && ok; ++r) {
      std::vector<int> members;
      std::int64_t load = 0;
      for (int i = 0; i < n; ++i)
        if (owner[i] == r) {
          members.push_back(i + 1);
          load += inst.demands[i + 1];
        }
      if (members.empty() || load > inst.capacity) {
        ok = false;
        break;
      }
      std::int64_t best_route = -1;
      do {
        std::int64_t rc = dist(0, members.front()) + dist(members.back(), 0);
        for (std::size_t k = 1; k < members.size(); ++k) rc += dist(members[k - 1], members[k]);
        if (best_route < 0 || rc < best_route) best_route = rc;
      } while (std::next_permutation(members.begin(), members.end()));
      cost += best_route;
    }
    if (ok && (best < 0 || cost < best)) best = cost;
  }
  return best;
}

// Dense reference evaluation of x^T Q x + offset.
inline double dense_energy(const QuboModel& q, const std::vector<std::uint8_t>& x) {
  std::vector<std::vector<double>> m(q.dim, std::vector<double>(q.dim, 0.0));
  for (int i = 0; i < q.dim; ++i) m[i][i] = q.linear[i];
  for (auto& t : q.quadratic) m[t.i][t.j] += t.value;
  double e = q.offset;
  for (int i = 0; i < q.dim; ++i)
    for (int j = 0; j < q.dim; ++j) e += x[i] * m[i][j] * x[j];
  return e;
}

// Random QUBO with integer coefficients in [-range, range].
inline QuboModel random_qubo(std::mt19937_64& rng, int dim, int range, double density) {
  QuboModel q;
  q.dim = dim;
  std::uniform_int_distribution<int> coef(-range, range);
  std::bernoulli_distribution keep(density);
  for (int i = 0; i < dim; ++i) q.linear.push_back(coef(rng));
  for (int i = 0; i < dim; ++i)
    for (int j = i + 1; j < dim; ++j)
      if (keep(rng)) {
        int c = coef(rng);
        if (c != 0) q.quadratic.push_back({i, j, double(c)});
      }
  for (int i = 0; i < dim; ++i) q.ledger.push_back({VarOrigin::model_binary, i, 1});
  return q;
}

// Four customers, two trucks; small capacity keeps the compiled model small.
inline Instance tiny_instance() {
  return parse_instance_string(R"(NAME : tiny-n5-k2
TYPE : CVRP
DIMENSION : 5
EDGE_WEIGHT_TYPE : EUC_2D
CAPACITY : 6
NODE_COORD_SECTION
1 0 0
2 10 2
3 12 -3
4 -8 6
5 -10 -2
DEMAND_SECTION
1 0
2 3
3 2
4 3
5 2
DEPOT_SECTION
1
-1
EOF
)");
}

}  // namespace qcvrp::testing
