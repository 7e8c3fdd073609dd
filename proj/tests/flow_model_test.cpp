#include <gtest/gtest.h>

#include <map>
#include <random>
#include <set>

#include "test_util.hpp"

using namespace qcvrp;
using namespace qcvrp::testing;

namespace {

Instance two_customers() {
  Instance inst;
  inst.name = "two";
  inst.n_customers = 2;
  inst.capacity = 5;
  inst.fleet_size = 1;
  inst.coords = {{0, 0}, {3, 4}, {6, 8}};
  inst.demands = {0, 2, 3};
  return inst;
}

std::map<ConstraintKind, int> count_kinds(const ConstrainedModel& m) {
  std::map<ConstraintKind, int> k;
  for (auto& c : m.constraints) ++k[c.kind];
  return k;
}

}  // namespace

TEST(FlowModel, SmallestCase) {
  auto inst = two_customers();
  auto fm = build_model(inst, euclid_distance_matrix(inst));
  EXPECT_EQ(fm.model.num_binary, 6);
  EXPECT_EQ(fm.model.num_integer(), 2);
  EXPECT_EQ(fm.model.constraints.size(), 9u);
  auto k = count_kinds(fm.model);
  EXPECT_EQ(k[ConstraintKind::visit_once], 2);
  EXPECT_EQ(k[ConstraintKind::depot_leave], 1);
  EXPECT_EQ(k[ConstraintKind::flow_conservation], 3);
  EXPECT_EQ(k[ConstraintKind::capacity], 1);
  EXPECT_EQ(k[ConstraintKind::mtz], 2);
  for (auto& b : fm.model.integer_bounds) EXPECT_EQ(b.upper, 5);
  EXPECT_EQ(fm.model.integer_bounds[0].lower, 2);
  EXPECT_EQ(fm.model.integer_bounds[1].lower, 3);
}

TEST(FlowModel, ClosedFormCounts) {
  std::mt19937_64 rng(11);
  for (int n = 1; n <= 8; ++n)
    for (int p = 1; p <= 4; ++p) {
      auto inst = random_instance(rng, n, p, 50, 9);
      auto fm = build_model(inst, euclid_distance_matrix(inst));
      EXPECT_EQ(fm.model.num_binary, p * (n + 1) * n);
      EXPECT_EQ(fm.model.num_integer(), n * p);
      auto k = count_kinds(fm.model);
      EXPECT_EQ(k[ConstraintKind::visit_once], n);
      EXPECT_EQ(k[ConstraintKind::depot_leave], p);
      EXPECT_EQ(k[ConstraintKind::flow_conservation], (n + 1) * p);
      EXPECT_EQ(k[ConstraintKind::capacity], p);
      EXPECT_EQ(k[ConstraintKind::mtz], n * (n - 1) * p);
      EXPECT_EQ(fm.model.objective.size(), std::size_t(fm.model.num_binary));
    }
}

TEST(FlowModel, StatsForBenchmarkInstances) {
  struct Row {
    const char* name;
    std::int64_t v, c, b;
    double tau;
  };
  for (auto row : {Row{"A-n32-k5", 5115, 4851, 38750, 0.820},
                   Row{"A-n60-k9", 32391, 31415, 251694, 0.921},
                   Row{"A-n80-k10", 63990, 62519, 500860, 0.942}}) {
    auto inst = load_a_series(row.name);
    auto fm = build_model(inst, euclid_distance_matrix(inst));
    auto s = model_stats(fm.model, tightness(inst));
    EXPECT_EQ(s.num_variables, row.v) << row.name;
    EXPECT_EQ(s.num_constraints, row.c) << row.name;
    EXPECT_EQ(s.num_biases, row.b) << row.name;
    EXPECT_NEAR(s.tau, row.tau, 5e-4) << row.name;
  }
}

TEST(FlowModel, StatsRowFormat) {
  ModelStats s{5115, 4851, 38750, 0.82};
  EXPECT_EQ(format_stats_row("A-n32-k5", s), "A-n32-k5 5115 4851 38750 0.820");
}

TEST(FlowModel, Errors) {
  auto inst = two_customers();
  auto dist = euclid_distance_matrix(inst);
  inst.fleet_size = 0;
  EXPECT_THROW(build_model(inst, dist), ModelError);
  inst.fleet_size = 1;
  EXPECT_THROW(build_model(inst, DistanceMatrix(2)), ModelError);
  Instance empty;
  empty.fleet_size = 1;
  empty.coords = {{0, 0}};
  empty.demands = {0};
  EXPECT_THROW(build_model(empty, euclid_distance_matrix(empty)), ModelError);
}

TEST(VarMap, OrdinalsAreABijection) {
  for (int n = 1; n <= 6; ++n)
    for (int p = 1; p <= 3; ++p) {
      VarMap m(n, p);
      std::set<int> seen;
      for (int r = 0; r < p; ++r)
        for (int i = 0; i <= n; ++i)
          for (int j = 0; j <= n; ++j) {
            if (i == j) continue;
            int o = m.arc(r, i, j);
            EXPECT_TRUE(seen.insert(o).second);
            EXPECT_EQ(m.arc_of(o), std::make_tuple(r, i, j));
          }
      for (int r = 0; r < p; ++r)
        for (int i = 1; i <= n; ++i) {
          int o = m.u(r, i);
          EXPECT_TRUE(seen.insert(o).second);
          EXPECT_EQ(m.u_of(o), std::make_pair(r, i));
        }
      EXPECT_EQ(static_cast<int>(seen.size()), m.total_binary() + m.total_integer());
      EXPECT_EQ(*seen.rbegin(), m.total_binary() + m.total_integer() - 1);
    }
  VarMap m(3, 2);
  EXPECT_EQ(m.name(m.arc(1, 0, 2)), "x_2_0_2");
  EXPECT_EQ(m.name(m.u(0, 3)), "u_1_3");
}

TEST(FlowModel, ObjectiveMatchesDistances) {
  auto inst = tiny_instance();
  auto dist = euclid_distance_matrix(inst);
  auto fm = build_model(inst, dist);
  for (auto& t : fm.model.objective) {
    auto [r, i, j] = fm.map.arc_of(t.var);
    EXPECT_EQ(t.coef, double(dist(i, j)));
  }
}

TEST(FlowModel, MtzRowsUseCapacityAsBigM) {
  auto inst = tiny_instance();
  auto fm = build_model(inst, euclid_distance_matrix(inst));
  for (auto& c : fm.model.constraints) {
    if (c.kind != ConstraintKind::mtz) continue;
    ASSERT_EQ(c.terms.size(), 3u);
    EXPECT_EQ(c.sense, Sense::ge);
    auto [r, i, j] = fm.map.arc_of(c.terms[2].var);
    EXPECT_EQ(c.terms[2].coef, -inst.capacity);
    EXPECT_EQ(c.terms[0].var, fm.map.u(r, j));
    EXPECT_EQ(c.terms[1].var, fm.map.u(r, i));
    EXPECT_EQ(c.rhs, inst.demands[j] - inst.capacity);
  }
}

TEST(SecSize, Values) {
  auto d = sec_size(SecFormulation::dfj, 20);
  EXPECT_EQ(d.dominant, 1048576u);
  EXPECT_EQ(d.constraints, 1048576u + 38);
  EXPECT_EQ(d.ancillary_binary, 380u);
  EXPECT_EQ(d.ancillary_continuous, 0u);
  auto m = sec_size(SecFormulation::mtz, 20);
  EXPECT_EQ(m.dominant, 400u);
  EXPECT_EQ(m.constraints, 382u);
  EXPECT_EQ(m.ancillary_binary, 380u);
  EXPECT_EQ(m.ancillary_continuous, 19u);
  EXPECT_EQ(group_thousands(d.dominant), "1,048,576");
  EXPECT_EQ(group_thousands(400), "400");
  EXPECT_EQ(group_thousands(1000), "1,000");
  EXPECT_EQ(group_thousands(0), "0");
}

TEST(SecSize, DfjSubsetCountByEnumeration) {
  // every non-empty proper subset, plus in/out degree rows per node
  for (int n = 2; n <= 12; ++n) {
    std::uint64_t subsets = 0;
    for (std::uint64_t mask = 1; mask + 1 < (std::uint64_t{1} << n); ++mask) ++subsets;
    EXPECT_EQ(sec_size(SecFormulation::dfj, n).constraints, subsets + 2 * n);
  }
}

TEST(SecSize, Guards) {
  EXPECT_THROW(sec_size(SecFormulation::dfj, 1), DomainError);
  EXPECT_THROW(sec_size(SecFormulation::dfj, 64), OverflowError);
  EXPECT_NO_THROW(sec_size(SecFormulation::dfj, 63));
  EXPECT_NO_THROW(sec_size(SecFormulation::mtz, 100000));
}

TEST(ModelJson, ListsVariablesAndConstraints) {
  auto inst = two_customers();
  auto fm = build_model(inst, euclid_distance_matrix(inst));
  auto j = model_to_json(fm.model, &fm.map);
  EXPECT_EQ(j["variables"].size(), 8u);
  EXPECT_EQ(j["constraints"].size(), 9u);
}
