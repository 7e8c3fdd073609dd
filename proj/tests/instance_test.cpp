#include <gtest/gtest.h>

#include <fstream>
#include <random>
#include <sstream>

#include "test_util.hpp"

using namespace qcvrp;
using namespace qcvrp::testing;

namespace {

const char* kMinimal = R"(NAME : mini
TYPE : CVRP
DIMENSION : 2
EDGE_WEIGHT_TYPE : EUC_2D
CAPACITY : 10
NODE_COORD_SECTION
1 0 0
2 3 4
DEMAND_SECTION
1 0
2 10
DEPOT_SECTION
1
-1
EOF
)";

std::string replace(std::string s, const std::string& from, const std::string& to) {
  s.replace(s.find(from), from.size(), to);
  return s;
}

}  // namespace

TEST(ParseInstance, ASeriesSmallest) {
  auto inst = load_a_series("A-n32-k5");
  EXPECT_EQ(inst.name, "A-n32-k5");
  EXPECT_EQ(inst.n_customers, 31);
  EXPECT_EQ(inst.fleet_size, 5);
  EXPECT_EQ(inst.capacity, 100);
  ASSERT_TRUE(inst.best_known);
  EXPECT_EQ(*inst.best_known, 784);
  EXPECT_EQ(inst.demands[0], 0);
  EXPECT_EQ(inst.coords[0], (Point{82, 76}));
  EXPECT_EQ(inst.demands[1], 19);
  EXPECT_EQ(inst.total_demand(), 410);
}

TEST(ParseInstance, ASeriesLargest) {
  auto inst = load_a_series("A-n80-k10");
  EXPECT_EQ(inst.n_customers, 79);
  EXPECT_EQ(inst.fleet_size, 10);
  EXPECT_EQ(inst.best_known, 1763);
}

TEST(ParseInstance, MinimalFile) {
  auto inst = parse_instance_string(kMinimal, {.fleet_override = std::nullopt, .fleet_default = 1});
  EXPECT_EQ(inst.n_customers, 1);
  EXPECT_EQ(inst.fleet_size, 1);
  EXPECT_FALSE(inst.best_known);
}

TEST(ParseInstance, FleetSourcePrecedence) {
  auto text = replace(kMinimal, "NAME : mini", "NAME : mini-k3");
  EXPECT_EQ(parse_instance_string(text).fleet_size, 3);
  EXPECT_EQ(parse_instance_string(text, {.fleet_override = 7}).fleet_size, 7);
  EXPECT_THROW(parse_instance_string(kMinimal), ValidationError);
}

TEST(ParseInstance, DepotMovedToFront) {
  auto text = replace(replace(kMinimal, "DEPOT_SECTION\n1\n", "DEPOT_SECTION\n2\n"), "1 0\n2 10",
                      "1 10\n2 0");
  auto inst = parse_instance_string(text, {.fleet_override = 1});
  EXPECT_EQ(inst.coords[0], (Point{3, 4}));
  EXPECT_EQ(inst.coords[1], (Point{0, 0}));
  EXPECT_EQ(inst.demands, (std::vector<std::int64_t>{0, 10}));
}

TEST(ParseInstance, Errors) {
  ParseOptions one{.fleet_override = 1};
  EXPECT_THROW(parse_instance_string(replace(kMinimal, "1 0\n", "1 5\n"), one), ValidationError);
  EXPECT_THROW(parse_instance_string(replace(kMinimal, "EUC_2D", "GEO"), one), UnsupportedFormatError);
  EXPECT_THROW(parse_instance_string(replace(kMinimal, "2 10", "2 11"), one), ValidationError);
  try {
    parse_instance_string(replace(kMinimal, "2 3 4", "2 3 x"), one);
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 8u);
    EXPECT_NE(std::string(e.what()).find("line 8"), std::string::npos);
  }
  EXPECT_THROW(parse_instance_string(replace(kMinimal, "2 3 4\n", ""), one), ParseError);
  EXPECT_THROW(parse_instance_string(replace(kMinimal, "CAPACITY : 10\n", ""), one), ParseError);
  EXPECT_THROW(parse_instance_string(replace(kMinimal, "CAPACITY : 10", "CAPACITY : 0"), one),
               ValidationError);
  EXPECT_THROW(parse_instance_string(replace(kMinimal, "EOF", "EDGE_WEIGHT_SECTION"), one),
               UnsupportedFormatError);
}

TEST(ParseInstance, RoundTripAllASeries) {
  for (auto& name : a_series_names()) {
    auto inst = load_a_series(name);
    std::stringstream ss;
    write_instance(ss, inst);
    EXPECT_EQ(parse_instance(ss), inst) << name;
  }
}

TEST(ParseInstance, RoundTripRandomCoordinates) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-1e3, 1e3);
  for (int trial = 0; trial < 50; ++trial) {
    auto inst = random_instance(rng, 1 + trial % 9, 1, 100, 10);
    for (auto& p : inst.coords) p = {u(rng), u(rng)};
    std::stringstream ss;
    write_instance(ss, inst);
    EXPECT_EQ(parse_instance(ss), inst);
  }
}

TEST(Distance, HandValues) {
  Instance inst;
  inst.n_customers = 3;
  inst.coords = {{0, 0}, {3, 4}, {1, 1}, {0, 0}};
  inst.demands = {0, 1, 1, 1};
  auto d = euclid_distance_matrix(inst);
  EXPECT_EQ(d(0, 1), 5);
  EXPECT_EQ(d(0, 2), 1);  // sqrt(2) rounds down
  EXPECT_EQ(d(0, 3), 0);
  EXPECT_EQ(d(1, 2), 4);  // sqrt(13) = 3.606
}

TEST(Distance, HalfRoundsUp) {
  Instance inst;
  inst.n_customers = 1;
  inst.coords = {{0, 0}, {0.5, 0}};
  inst.demands = {0, 1};
  EXPECT_EQ(euclid_distance_matrix(inst)(0, 1), 1);
  inst.coords[1] = {2.5, 0};
  EXPECT_EQ(euclid_distance_matrix(inst)(0, 1), 3);
}

TEST(Distance, SymmetricZeroDiagonalAllASeries) {
  for (auto& name : a_series_names()) {
    auto inst = load_a_series(name);
    auto d = euclid_distance_matrix(inst);
    ASSERT_EQ(d.dim(), inst.num_nodes());
    for (int i = 0; i < d.dim(); ++i) {
      EXPECT_EQ(d(i, i), 0) << name;
      for (int j = 0; j < d.dim(); ++j) {
        EXPECT_EQ(d(i, j), d(j, i)) << name;
        EXPECT_GE(d(i, j), 0) << name;
      }
    }
  }
}

TEST(Tightness, Values) {
  EXPECT_NEAR(tightness(load_a_series("A-n32-k5")), 0.820, 1e-3);
  EXPECT_DOUBLE_EQ(tightness(load_a_series("A-n32-k5")), 410.0 / 500.0);
  EXPECT_NEAR(tightness(load_a_series("A-n60-k9")), 0.921, 1e-3);
  auto inst = load_a_series("A-n32-k5");
  std::fill(inst.demands.begin(), inst.demands.end(), 0);
  EXPECT_EQ(tightness(inst), 0.0);
}

TEST(Tightness, PublishedMismatchesAreWarnings) {
  // Files whose computed tightness disagrees with the bundled published values.
  std::vector<std::string> mismatched;
  for (auto& name : a_series_names()) {
    auto inst = load_a_series(name);
    auto c = check_tightness(inst);
    ASSERT_FALSE(c.published.empty()) << name;
    if (!c.consistent) {
      mismatched.push_back(name);
      EXPECT_NE(tightness_warning(inst, c).find(name), std::string::npos);
    }
  }
  EXPECT_EQ(mismatched, (std::vector<std::string>{"A-n33-k5", "A-n38-k5", "A-n45-k6", "A-n45-k7",
                                                  "A-n48-k7", "A-n80-k10"}));
  auto big = check_tightness(load_a_series("A-n80-k10"));
  EXPECT_NEAR(big.computed, 0.942, 1e-9);
  EXPECT_EQ(big.published, (std::vector<double>{0.948, 0.941}));
}

TEST(BestKnown, BundledTableMatchesResourceFile) {
  std::ifstream f(data_dir() / "best_known.json");
  std::stringstream ss;
  ss << f.rdbuf();
  EXPECT_EQ(ss.str(), std::string(resources::kBestKnownJson));
  const auto& t = BestKnownTable::bundled();
  EXPECT_EQ(t.version(), 1);
  EXPECT_EQ(t.entries().size(), 27u);
  EXPECT_EQ(t.find("A-n60-k9")->best_known, 1354);
  EXPECT_EQ(t.find("nope"), nullptr);
}

TEST(BestKnown, FileMetadataAgrees) {
  for (auto& name : a_series_names()) {
    auto inst = load_a_series(name);
    auto* e = BestKnownTable::bundled().find(name);
    ASSERT_NE(e, nullptr) << name;
    EXPECT_EQ(e->customers, inst.n_customers) << name;
    EXPECT_EQ(e->vehicles, inst.fleet_size) << name;
    for (auto d : inst.demands) EXPECT_LE(d, inst.capacity);
  }
}
