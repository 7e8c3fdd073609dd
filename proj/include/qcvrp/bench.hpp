#pragma once

// Repeated-run benchmark protocol: per-run best feasible cost, absolute
// error, running MAPE, aggregates, error histogram, and their persistence.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include <fmt/format.h>
#include <json.hpp>

#include "error.hpp"
#include "flow_model.hpp"
#include "instance.hpp"
#include "qubo.hpp"
#include "routes.hpp"
#include "samplers.hpp"

namespace qcvrp {

inline double absolute_error(double e_qa, double e_best) {
  if (!(e_best > 0.0)) throw DomainError("best-known cost must be positive");
  return std::abs(e_qa - e_best) / e_best;
}

// Mean of the absolute errors of `energies`, one term per entry.
inline double mape(std::span<const double> energies, double e_best) {
  if (energies.empty()) throw DomainError("MAPE of an empty sequence");
  double s = 0.0;
  for (double e : energies) s += absolute_error(e, e_best);
  return s / static_cast<double>(energies.size());
}

struct Histogram {
  std::vector<double> edges;  // bins + 1 entries
  std::vector<std::int64_t> counts;
};

// Equal-width bins over [0, max]. Bins are closed on the right; the first
// bin also holds 0.
inline Histogram histogram(std::span<const double> values, int bins) {
  if (bins < 1) throw DomainError("histogram needs at least one bin");
  Histogram h;
  if (values.empty()) return h;
  const double hi = *std::max_element(values.begin(), values.end());
  for (int k = 0; k < bins; ++k) h.edges.push_back(hi * k / bins);
  h.edges.push_back(hi);
  h.counts.assign(bins, 0);
  for (double v : values) {
    int k = 0;
    while (k + 1 < bins && v > h.edges[k + 1]) ++k;
    ++h.counts[k];
  }
  return h;
}

struct Aggregates {
  double best = 0.0;
  double worst = 0.0;
  double mean = 0.0;
  double stddev = 0.0;  // sample standard deviation (n - 1)
};

inline Aggregates aggregate(std::span<const double> v) {
  if (v.empty()) throw DomainError("aggregate of an empty sequence");
  Aggregates a;
  a.best = *std::min_element(v.begin(), v.end());
  a.worst = *std::max_element(v.begin(), v.end());
  double s = 0.0;
  for (double x : v) s += x;
  a.mean = s / static_cast<double>(v.size());
  if (v.size() > 1) {
    double ss = 0.0;
    for (double x : v) ss += (x - a.mean) * (x - a.mean);
    a.stddev = std::sqrt(ss / static_cast<double>(v.size() - 1));
  }
  return a;
}

struct RunRecord {
  int run = 0;  // 1-based
  std::uint64_t seed = 0;
  bool feasible = false;
  std::optional<std::int64_t> energy;  // route cost of the best feasible sample
  double qubo_energy = 0.0;            // energy of the persisted sample
  std::optional<double> time_us;
  std::string time_source;
  std::string sampler;
  std::string assignment;  // bitstring of the persisted sample
  std::vector<std::string> violations;
  std::optional<std::string> error;  // sampler failure; the run counts as infeasible
};

struct BenchReport {
  std::string instance;
  std::optional<std::int64_t> e_best;
  std::vector<RunRecord> records;
  std::vector<double> mape_curve;  // R_1..R_k over feasible runs in run order
  std::optional<Aggregates> aggregates;
  double feasibility_rate = 0.0;
  Histogram histogram;

  std::vector<double> feasible_energies() const {
    std::vector<double> v;
    for (auto& r : records)
      if (r.energy) v.push_back(static_cast<double>(*r.energy));
    return v;
  }
  std::optional<double> final_mape() const {
    if (mape_curve.empty()) return std::nullopt;
    return mape_curve.back();
  }
};

// Called once per run with the run's derived seed.
using SamplerFn = std::function<SampleSet(const QuboModel&, std::uint64_t)>;

struct BenchConfig {
  int runs = 100;
  std::uint64_t seed = 0;
  int histogram_bins = 10;
  std::optional<std::int64_t> e_best;  // defaults to the instance's best-known
  bool record_wall_time = false;       // local wall time is not reproducible
};

// Folds per-run records (in run order) into the report's derived fields.
inline void finalize_report(BenchReport& rep, int histogram_bins) {
  rep.mape_curve.clear();
  auto energies = rep.feasible_energies();
  std::vector<double> errors;
  if (rep.e_best) {
    double acc = 0.0;
    for (std::size_t k = 0; k < energies.size(); ++k) {
      errors.push_back(absolute_error(energies[k], static_cast<double>(*rep.e_best)));
      acc += errors.back();
      rep.mape_curve.push_back(acc / static_cast<double>(k + 1));
    }
  }
  rep.aggregates.reset();
  if (!energies.empty()) rep.aggregates = aggregate(energies);
  rep.feasibility_rate = rep.records.empty() ? 0.0
                                             : static_cast<double>(energies.size()) /
                                                   static_cast<double>(rep.records.size());
  rep.histogram = histogram(errors, histogram_bins);
}

// Picks the cheapest decode-feasible sample; falls back to the lowest-energy
// sample when none is feasible.
inline RunRecord evaluate_run(const SampleSet& set, const VarMap& map, const Instance& inst,
                              const DistanceMatrix& dist) {
  RunRecord rec;
  rec.sampler = set.sampler;
  rec.time_source = set.time_source;
  const Sample* chosen = nullptr;
  for (auto& s : set.samples) {
    auto d = decode(s.assignment, map, inst);
    if (!d.ok()) continue;
    auto cost = route_cost(d.routes, dist);
    if (!rec.energy || cost < *rec.energy) {
      rec.energy = cost;
      chosen = &s;
    }
  }
  rec.feasible = chosen != nullptr;
  if (!chosen) {
    chosen = &set.best();
    for (auto& v : decode(chosen->assignment, map, inst).violations)
      rec.violations.push_back(std::string(to_string(v.kind)));
  }
  rec.qubo_energy = chosen->energy;
  rec.assignment = to_bitstring(chosen->assignment);
  if (set.service_us) rec.time_us = *set.service_us;
  return rec;
}

inline BenchReport run_benchmark(const Instance& inst, const DistanceMatrix& dist,
                                 const FlowModel& fm, const QuboModel& qubo,
                                 const SamplerFn& sampler, const BenchConfig& cfg) {
  if (cfg.runs < 1) throw ConfigError("benchmark needs at least one run");
  BenchReport rep;
  rep.instance = inst.name;
  rep.e_best = cfg.e_best ? cfg.e_best : inst.best_known;
  for (int k = 1; k <= cfg.runs; ++k) {
    const auto seed = derive_seed(cfg.seed, static_cast<std::uint64_t>(k));
    auto start = std::chrono::steady_clock::now();
    SampleSet set;
    try {
      set = sampler(qubo, seed);
    } catch (const RemoteError& e) {
      RunRecord rec;
      rec.run = k;
      rec.seed = seed;
      rec.error = e.what();
      rep.records.push_back(std::move(rec));
      continue;
    }
    auto elapsed =
        std::chrono::duration<double, std::micro>(std::chrono::steady_clock::now() - start).count();
    auto rec = evaluate_run(set, fm.map, inst, dist);
    rec.run = k;
    rec.seed = seed;
    if (!set.service_us) rec.time_us = cfg.record_wall_time ? std::optional(elapsed) : std::nullopt;
    rep.records.push_back(std::move(rec));
  }
  finalize_report(rep, cfg.histogram_bins);
  return rep;
}

// ---------------------------------------------------------------------------
// Persistence

namespace detail {
inline std::string num(double v) { return fmt::format("{}", v); }
template <typename T>
std::string opt(const std::optional<T>& v) {
  return v ? fmt::format("{}", *v) : std::string{};
}
}  // namespace detail

inline nlohmann::json to_json(const RunRecord& r) {
  nlohmann::json j = {{"run", r.run},
                      {"seed", r.seed},
                      {"feasible", r.feasible},
                      {"qubo_energy", r.qubo_energy},
                      {"sampler", r.sampler},
                      {"time_source", r.time_source},
                      {"assignment", r.assignment}};
  j["energy"] = r.energy ? nlohmann::json(*r.energy) : nlohmann::json(nullptr);
  j["time_us"] = r.time_us ? nlohmann::json(*r.time_us) : nlohmann::json(nullptr);
  if (!r.violations.empty()) j["violations"] = r.violations;
  if (r.error) j["error"] = *r.error;
  return j;
}

inline RunRecord run_record_from_json(const nlohmann::json& j) {
  RunRecord r;
  r.run = j.at("run").get<int>();
  r.seed = j.at("seed").get<std::uint64_t>();
  r.feasible = j.at("feasible").get<bool>();
  r.qubo_energy = j.at("qubo_energy").get<double>();
  r.sampler = j.at("sampler").get<std::string>();
  r.time_source = j.at("time_source").get<std::string>();
  r.assignment = j.at("assignment").get<std::string>();
  if (!j.at("energy").is_null()) r.energy = j["energy"].get<std::int64_t>();
  if (!j.at("time_us").is_null()) r.time_us = j["time_us"].get<double>();
  if (j.contains("violations")) r.violations = j["violations"].get<std::vector<std::string>>();
  if (j.contains("error")) r.error = j["error"].get<std::string>();
  if (r.feasible != r.energy.has_value())
    throw ValidationError(fmt::format("run {}: energy present iff feasible", r.run));
  return r;
}

// First line is a header record carrying the instance and e_best.
inline void write_run_log(std::ostream& out, const BenchReport& rep) {
  nlohmann::json head = {{"instance", rep.instance}};
  head["e_best"] = rep.e_best ? nlohmann::json(*rep.e_best) : nlohmann::json(nullptr);
  out << head.dump() << '\n';
  for (auto& r : rep.records) out << to_json(r).dump() << '\n';
}

inline BenchReport read_run_log(std::istream& in, int histogram_bins = 10) {
  BenchReport rep;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(e.what(), lineno);
    }
    if (lineno == 1) {
      rep.instance = j.at("instance").get<std::string>();
      if (!j.at("e_best").is_null()) rep.e_best = j["e_best"].get<std::int64_t>();
      continue;
    }
    rep.records.push_back(run_record_from_json(j));
  }
  finalize_report(rep, histogram_bins);
  return rep;
}

inline void write_summary_csv(std::ostream& out, const BenchReport& rep) {
  out << "run,energy,feasible,ae,cumulative_mape,time_us\n";
  std::size_t k = 0;
  for (auto& r : rep.records) {
    std::string ae, cm;
    if (r.energy && rep.e_best) {
      ae = detail::num(absolute_error(static_cast<double>(*r.energy), static_cast<double>(*rep.e_best)));
      cm = detail::num(rep.mape_curve[k]);
    } else if (k > 0 && !rep.mape_curve.empty()) {
      cm = detail::num(rep.mape_curve[k - 1]);
    }
    if (r.energy) ++k;
    out << fmt::format("{},{},{},{},{},{}\n", r.run, detail::opt(r.energy), r.feasible ? 1 : 0, ae,
                       cm, r.time_us ? detail::num(*r.time_us) : "");
  }
}

inline void write_histogram_csv(std::ostream& out, const Histogram& h) {
  out << "bin_left,bin_right,count\n";
  for (std::size_t k = 0; k < h.counts.size(); ++k)
    out << fmt::format("{},{},{}\n", detail::num(h.edges[k]), detail::num(h.edges[k + 1]),
                       h.counts[k]);
}

struct BenchArtifacts {
  std::filesystem::path run_log;
  std::filesystem::path summary;
  std::filesystem::path histogram;
};

inline BenchArtifacts write_artifacts(const std::filesystem::path& dir, const BenchReport& rep) {
  std::filesystem::create_directories(dir);
  const std::string stem = rep.instance.empty() ? "bench" : rep.instance;
  BenchArtifacts a{dir / (stem + ".runs.jsonl"), dir / (stem + ".summary.csv"),
                   dir / (stem + ".histogram.csv")};
  auto open = [](const std::filesystem::path& p) {
    std::ofstream f(p, std::ios::binary);
    if (!f) throw Error(fmt::format("cannot write {}", p.string()));
    return f;
  };
  {
    auto f = open(a.run_log);
    write_run_log(f, rep);
  }
  {
    auto f = open(a.summary);
    write_summary_csv(f, rep);
  }
  {
    auto f = open(a.histogram);
    write_histogram_csv(f, rep.histogram);
  }
  return a;
}

// ---------------------------------------------------------------------------
// Results table: one column per instance.

struct ResultsColumn {
  std::string instance;
  std::int64_t best_known = 0;
  std::optional<double> qa_best;
  std::optional<double> qa_worst;
  std::optional<double> qa_average;
  std::optional<double> qa_stddev;
  std::optional<double> mape;
  int runs = 0;
  std::optional<double> min_time_us;
};

inline ResultsColumn results_column(const BenchReport& rep) {
  ResultsColumn c;
  c.instance = rep.instance;
  c.best_known = rep.e_best.value_or(0);
  if (rep.aggregates) {
    c.qa_best = rep.aggregates->best;
    c.qa_worst = rep.aggregates->worst;
    c.qa_average = rep.aggregates->mean;
    c.qa_stddev = rep.aggregates->stddev;
  }
  c.mape = rep.final_mape();
  c.runs = static_cast<int>(rep.records.size());
  for (auto& r : rep.records)
    if (r.time_us) c.min_time_us = std::min(c.min_time_us.value_or(*r.time_us), *r.time_us);
  return c;
}

inline ResultsColumn results_column_from_json(const nlohmann::json& j) {
  auto od = [&](const char* k) -> std::optional<double> {
    if (!j.contains(k) || j[k].is_null()) return std::nullopt;
    return j[k].get<double>();
  };
  ResultsColumn c;
  c.instance = j.at("instance").get<std::string>();
  c.best_known = j.at("best_known").get<std::int64_t>();
  c.qa_best = od("qa_best");
  c.qa_worst = od("qa_worst");
  c.qa_average = od("qa_average");
  c.qa_stddev = od("qa_stddev");
  c.mape = od("mape");
  c.runs = j.at("runs").get<int>();
  c.min_time_us = od("min_time_us");
  return c;
}

inline std::string render_results_table(std::span<const ResultsColumn> cols) {
  constexpr int label_w = 24;
  constexpr int col_w = 12;
  auto row = [&](const std::string& label, auto cell) {
    std::string s = fmt::format("{:<{}}", label, label_w);
    for (auto& c : cols) s += fmt::format("{:>{}}", cell(c), col_w);
    return s + "\n";
  };
  auto integer = [](const std::optional<double>& v) {
    return v ? fmt::format("{:.0f}", *v) : std::string("-");
  };
  const int runs = cols.empty() ? 0 : cols.front().runs;
  std::string out = row("", [](const ResultsColumn& c) { return c.instance; });
  out += row("Best Known Solution", [](const ResultsColumn& c) { return std::to_string(c.best_known); });
  out += row("QA Best Solution", [&](const ResultsColumn& c) { return integer(c.qa_best); });
  out += row("QA Worst Solution", [&](const ResultsColumn& c) { return integer(c.qa_worst); });
  out += row("QA Average", [&](const ResultsColumn& c) { return integer(c.qa_average); });
  out += row("QA Std. Dev.", [&](const ResultsColumn& c) { return integer(c.qa_stddev); });
  out += row(fmt::format("MAPE ({})", runs), [](const ResultsColumn& c) {
    return c.mape ? fmt::format("{:.2f}", *c.mape) : std::string("-");
  });
  out += row("Min time (us)", [&](const ResultsColumn& c) { return integer(c.min_time_us); });
  return out;
}

}  // namespace qcvrp
