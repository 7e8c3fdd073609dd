#pragma once

// Generated from data/best_known.json; tests/instance_test.cpp keeps the two
// in sync.

namespace qcvrp::resources {

inline constexpr const char* kBestKnownJson = R"json({
  "version": 1,
  "series": "A (Augerat et al.)",
  "instances": {
    "A-n32-k5": {
      "customers": 31,
      "vehicles": 5,
      "best_known": 784,
      "published_tau": [
        0.82
      ]
    },
    "A-n33-k5": {
      "customers": 32,
      "vehicles": 5,
      "best_known": 661,
      "published_tau": [
        0.948
      ]
    },
    "A-n33-k6": {
      "customers": 32,
      "vehicles": 6,
      "best_known": 742,
      "published_tau": [
        0.901
      ]
    },
    "A-n34-k5": {
      "customers": 33,
      "vehicles": 5,
      "best_known": 778,
      "published_tau": [
        0.92
      ]
    },
    "A-n36-k5": {
      "customers": 35,
      "vehicles": 5,
      "best_known": 799,
      "published_tau": [
        0.884
      ]
    },
    "A-n37-k5": {
      "customers": 36,
      "vehicles": 5,
      "best_known": 669,
      "published_tau": [
        0.814
      ]
    },
    "A-n37-k6": {
      "customers": 36,
      "vehicles": 6,
      "best_known": 949,
      "published_tau": [
        0.95
      ]
    },
    "A-n38-k5": {
      "customers": 37,
      "vehicles": 5,
      "best_known": 730,
      "published_tau": [
        0.967
      ]
    },
    "A-n39-k5": {
      "customers": 38,
      "vehicles": 5,
      "best_known": 822,
      "published_tau": [
        0.95
      ]
    },
    "A-n39-k6": {
      "customers": 38,
      "vehicles": 6,
      "best_known": 831,
      "published_tau": [
        0.876
      ]
    },
    "A-n44-k6": {
      "customers": 43,
      "vehicles": 6,
      "best_known": 937,
      "published_tau": [
        0.95
      ]
    },
    "A-n45-k6": {
      "customers": 44,
      "vehicles": 6,
      "best_known": 944,
      "published_tau": [
        1.05
      ]
    },
    "A-n45-k7": {
      "customers": 44,
      "vehicles": 7,
      "best_known": 1146,
      "published_tau": [
        0.95
      ]
    },
    "A-n46-k7": {
      "customers": 45,
      "vehicles": 7,
      "best_known": 914,
      "published_tau": [
        0.861
      ]
    },
    "A-n48-k7": {
      "customers": 47,
      "vehicles": 7,
      "best_known": 1073,
      "published_tau": [
        0.892
      ]
    },
    "A-n53-k7": {
      "customers": 52,
      "vehicles": 7,
      "best_known": 1010,
      "published_tau": [
        0.948
      ]
    },
    "A-n54-k7": {
      "customers": 53,
      "vehicles": 7,
      "best_known": 1167,
      "published_tau": [
        0.955
      ]
    },
    "A-n55-k9": {
      "customers": 54,
      "vehicles": 9,
      "best_known": 1073,
      "published_tau": [
        0.932
      ]
    },
    "A-n60-k9": {
      "customers": 59,
      "vehicles": 9,
      "best_known": 1354,
      "published_tau": [
        0.921
      ]
    },
    "A-n61-k9": {
      "customers": 60,
      "vehicles": 9,
      "best_known": 1034,
      "published_tau": [
        0.983
      ]
    },
    "A-n62-k8": {
      "customers": 61,
      "vehicles": 8,
      "best_known": 1288,
      "published_tau": [
        0.916
      ]
    },
    "A-n63-k9": {
      "customers": 62,
      "vehicles": 9,
      "best_known": 1616,
      "published_tau": [
        0.97
      ]
    },
    "A-n63-k10": {
      "customers": 62,
      "vehicles": 10,
      "best_known": 1314,
      "published_tau": [
        0.932
      ]
    },
    "A-n64-k9": {
      "customers": 63,
      "vehicles": 9,
      "best_known": 1401,
      "published_tau": [
        0.942
      ]
    },
    "A-n65-k9": {
      "customers": 64,
      "vehicles": 9,
      "best_known": 1174,
      "published_tau": [
        0.974
      ]
    },
    "A-n69-k9": {
      "customers": 68,
      "vehicles": 9,
      "best_known": 1159,
      "published_tau": [
        0.938
      ]
    },
    "A-n80-k10": {
      "customers": 79,
      "vehicles": 10,
      "best_known": 1763,
      "published_tau": [
        0.948,
        0.941
      ]
    }
  }
}
)json";

}  // namespace qcvrp::resources
