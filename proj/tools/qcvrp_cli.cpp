// qcvrp: command-line front end for the CVRP -> constrained model -> QUBO
// pipeline and its benchmark harness.
//
// Exit codes: 0 ok, 1 usage, 2 data error, 3 runtime failure.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>

#include "qcvrp/qcvrp.hpp"

namespace fs = std::filesystem;
using namespace qcvrp;

namespace {

struct Options {
  std::uint64_t seed = 0;
  std::vector<std::string> instances;
  std::optional<int> trucks;
  std::vector<std::string> penalties;
  std::string sampler = "sa";
  int reads = 100;
  int sweeps = 10000;
  int threads = 1;
  int runs = 100;
  int bins = 10;
  std::string endpoint;
  std::string out;
  std::optional<std::int64_t> best_known;
  bool wall_time = false;
  std::vector<int> sec_n;
  std::vector<std::string> logs;
  std::string fixture;
};

Instance load_instance(const std::string& path, const Options& o) {
  std::ifstream f(path);
  if (!f) throw ValidationError(fmt::format("{}: cannot open", path));
  try {
    return parse_instance(f, {o.trucks, std::nullopt});
  } catch (const Error& e) {
    throw ValidationError(fmt::format("{}: {}", path, e.what()));
  }
}

void warn_tightness(const Instance& inst) {
  auto c = check_tightness(inst);
  if (!c.consistent) std::cerr << tightness_warning(inst, c) << '\n';
}

PenaltyConfig make_penalties(const Options& o, const DistanceMatrix& dist, int n) {
  auto cfg = PenaltyConfig::defaults(dist, n);
  for (auto& spec : o.penalties) {
    auto eq = spec.find('=');
    if (eq == std::string::npos) throw ConfigError(fmt::format("--penalty expects kind=P, got '{}'", spec));
    auto kind = spec.substr(0, eq);
    double p = 0.0;
    try {
      p = std::stod(spec.substr(eq + 1));
    } catch (const std::exception&) {
      throw ConfigError(fmt::format("bad penalty value in '{}'", spec));
    }
    if (kind == "all") {
      for (auto k : kAllKinds) cfg.set(k, p);
    } else if (auto k = kind_from_string(kind)) {
      cfg.set(*k, p);
    } else {
      throw ConfigError(fmt::format("unknown constraint kind '{}'", kind));
    }
  }
  return cfg;
}

SamplerFn make_sampler(const Options& o) {
  if (o.sampler == "sa") {
    SamplerParams p;
    p.num_reads = o.reads;
    p.sweeps = o.sweeps;
    p.threads = o.threads;
    return [p](const QuboModel& q, std::uint64_t seed) mutable {
      p.seed = seed;
      return sample_sa(q, p);
    };
  }
  if (o.sampler == "brute") {
    return [](const QuboModel& q, std::uint64_t) { return brute_force_sample(q); };
  }
  if (o.sampler == "remote") {
    std::string url = o.endpoint;
    if (url.empty())
      if (const char* env = std::getenv("QCVRP_ENDPOINT")) url = env;
    if (url.empty()) throw ConfigError("remote sampler needs --endpoint or QCVRP_ENDPOINT");
    RemoteParams p;
    p.num_reads = o.reads;
    return [url, p](const QuboModel& q, std::uint64_t) { return sample_remote(q, url, p); };
  }
  throw ConfigError(fmt::format("unknown sampler '{}'", o.sampler));
}

std::ofstream open_out(const fs::path& p) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream f(p, std::ios::binary);
  if (!f) throw Error(fmt::format("cannot write {}", p.string()));
  return f;
}

int cmd_parse(const Options& o) {
  for (auto& path : o.instances) {
    auto inst = load_instance(path, o);
    warn_tightness(inst);
    std::cout << fmt::format("{} customers={} capacity={} trucks={} tau={:.3f} best_known={}\n",
                             inst.name, inst.n_customers, inst.capacity, inst.fleet_size,
                             tightness(inst),
                             inst.best_known ? std::to_string(*inst.best_known) : "-");
    if (!o.out.empty()) {
      auto f = open_out(fs::path(o.out) / (inst.name + ".vrp"));
      write_instance(f, inst);
    }
  }
  return 0;
}

int cmd_stats(const Options& o) {
  int status = 0;
  std::string csv = "name,variables,constraints,biases,tau\n";
  std::cout << "name variables constraints biases tau\n";
  for (auto& path : o.instances) {
    try {
      auto inst = load_instance(path, o);
      warn_tightness(inst);
      auto dist = euclid_distance_matrix(inst);
      auto fm = build_model(inst, dist);
      auto s = model_stats(fm.model, tightness(inst));
      std::cout << format_stats_row(inst.name, s) << '\n';
      csv += fmt::format("{},{},{},{},{:.3f}\n", inst.name, s.num_variables, s.num_constraints,
                         s.num_biases, s.tau);
    } catch (const Error& e) {
      std::cerr << "error: " << e.what() << '\n';
      status = std::max(status, e.exit_code());
    }
  }
  if (!o.out.empty()) open_out(fs::path(o.out) / "stats.csv") << csv;
  return status;
}

int cmd_sec_table(const Options& o) {
  int status = 0;
  std::string csv = "n,formulation,dominant,constraints,ancillary_binary,ancillary_continuous\n";
  std::cout << fmt::format("{:>4} {:<5} {:>26} {:>26} {:>14} {:>10}\n", "n", "SEC", "dominant",
                           "constraints", "binary", "continuous");
  for (int n : o.sec_n) {
    for (auto [f, label] : {std::pair{SecFormulation::dfj, "DFJ"}, {SecFormulation::mtz, "MTZ"}}) {
      try {
        auto s = sec_size(f, n);
        std::cout << fmt::format("{:>4} {:<5} {:>26} {:>26} {:>14} {:>10}\n", n, label,
                                 group_thousands(s.dominant), group_thousands(s.constraints),
                                 group_thousands(s.ancillary_binary),
                                 group_thousands(s.ancillary_continuous));
        csv += fmt::format("{},{},{},{},{},{}\n", n, label, s.dominant, s.constraints,
                           s.ancillary_binary, s.ancillary_continuous);
      } catch (const Error& e) {
        std::cerr << fmt::format("error: n={} {}: {}\n", n, label, e.what());
        status = std::max(status, e.exit_code());
      }
    }
  }
  if (!o.out.empty()) open_out(fs::path(o.out) / "sec_table.csv") << csv;
  return status;
}

struct Pipeline {
  Instance inst;
  DistanceMatrix dist;
  FlowModel fm;
  QuboModel qubo;
};

Pipeline build_pipeline(const std::string& path, const Options& o) {
  Pipeline p;
  p.inst = load_instance(path, o);
  p.dist = euclid_distance_matrix(p.inst);
  p.fm = build_model(p.inst, p.dist);
  p.qubo = compile(p.fm.model, make_penalties(o, p.dist, p.inst.n_customers));
  return p;
}

int cmd_compile(const Options& o) {
  for (auto& path : o.instances) {
    auto p = build_pipeline(path, o);
    std::cout << fmt::format("{} dim={} quadratic={} offset={}\n", p.inst.name, p.qubo.dim,
                             p.qubo.quadratic.size(), p.qubo.offset);
    if (o.out.empty()) continue;
    fs::path dir(o.out);
    {
      auto f = open_out(dir / (p.inst.name + ".qubo"));
      write_qubo(f, p.qubo);
    }
    open_out(dir / (p.inst.name + ".ledger.json")) << ledger_to_json(p.qubo, &p.fm.map).dump(1) << '\n';
    open_out(dir / (p.inst.name + ".model.json")) << model_to_json(p.fm.model, &p.fm.map).dump() << '\n';
  }
  return 0;
}

int cmd_solve(const Options& o) {
  int status = 0;
  auto sampler = make_sampler(o);
  for (auto& path : o.instances) {
    auto p = build_pipeline(path, o);
    auto set = sampler(p.qubo, derive_seed(o.seed, 0));
    auto rec = evaluate_run(set, p.fm.map, p.inst, p.dist);
    if (!rec.feasible) {
      std::cout << fmt::format("{}: no feasible sample (best energy {}; violations:", p.inst.name,
                               rec.qubo_energy);
      for (auto& v : rec.violations) std::cout << ' ' << v;
      std::cout << ")\n";
      status = 3;
      continue;
    }
    auto d = decode(from_bitstring(rec.assignment), p.fm.map, p.inst);
    d.routes.total_cost = route_cost(d.routes, p.dist);
    std::cout << p.inst.name << '\n';
    write_solution(std::cout, d.routes);
    if (!o.out.empty()) {
      auto f = open_out(fs::path(o.out) / (p.inst.name + ".sol"));
      write_solution(f, d.routes);
    }
  }
  return status;
}

int cmd_bench(const Options& o) {
  if (o.out.empty()) throw ConfigError("bench requires --out");
  auto sampler = make_sampler(o);
  std::vector<ResultsColumn> cols;
  int status = 0;
  for (auto& path : o.instances) {
    auto p = build_pipeline(path, o);
    BenchConfig cfg;
    cfg.runs = o.runs;
    cfg.seed = o.seed;
    cfg.histogram_bins = o.bins;
    cfg.e_best = o.best_known;
    cfg.record_wall_time = o.wall_time;
    auto rep = run_benchmark(p.inst, p.dist, p.fm, p.qubo, sampler, cfg);
    for (auto& r : rep.records)
      if (r.error) {
        std::cerr << fmt::format("error: {} run {}: {}\n", rep.instance, r.run, *r.error);
        status = 3;
      }
    write_artifacts(o.out, rep);
    std::cerr << fmt::format("{}: feasible {}/{} runs\n", rep.instance,
                             static_cast<int>(rep.feasibility_rate * rep.records.size() + 0.5),
                             rep.records.size());
    cols.push_back(results_column(rep));
  }
  if (!cols.empty()) {
    auto table = render_results_table(cols);
    std::cout << table;
    open_out(fs::path(o.out) / "results.txt") << table;
  }
  return status;
}

int cmd_report(const Options& o) {
  std::vector<ResultsColumn> cols;
  if (!o.fixture.empty()) {
    std::ifstream f(o.fixture);
    if (!f) throw ValidationError(fmt::format("{}: cannot open", o.fixture));
    auto doc = nlohmann::json::parse(f);
    for (auto& c : doc.at("columns")) cols.push_back(results_column_from_json(c));
  }
  for (auto& log : o.logs) {
    std::ifstream f(log);
    if (!f) throw ValidationError(fmt::format("{}: cannot open", log));
    cols.push_back(results_column(read_run_log(f, o.bins)));
  }
  if (cols.empty()) throw ConfigError("report needs run logs or --fixture");
  auto table = render_results_table(cols);
  std::cout << table;
  if (!o.out.empty()) open_out(fs::path(o.out) / "results.txt") << table;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"CVRP to QUBO compiler, samplers and benchmark harness"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_config("--config", "", "Key/value config file; command-line flags take precedence");
  Options o;
  app.add_option("--seed", o.seed, "Global random seed");

  auto instance_opts = [&](CLI::App* sub, bool required) {
    auto* opt = sub->add_option("instances,--instance", o.instances, "CVRPLIB .vrp file(s)");
    if (required) opt->required();
    sub->add_option("--trucks", o.trucks, "Fleet size override");
  };
  auto pipeline_opts = [&](CLI::App* sub) {
    sub->add_option("--penalty", o.penalties, "kind=P multiplier (repeatable; kind may be 'all')");
    sub->add_option("--sampler", o.sampler, "sa | brute | remote")
        ->check(CLI::IsMember({"sa", "brute", "remote"}));
    sub->add_option("--reads", o.reads, "Reads per sample set")->check(CLI::PositiveNumber);
    sub->add_option("--sweeps", o.sweeps, "Annealing sweeps per read")->check(CLI::PositiveNumber);
    sub->add_option("--threads", o.threads, "Worker threads for annealing reads");
    sub->add_option("--endpoint", o.endpoint, "Remote sampler URL (default $QCVRP_ENDPOINT)");
  };

  auto* parse = app.add_subcommand("parse", "Parse instances and print a summary");
  instance_opts(parse, true);
  parse->add_option("--out", o.out, "Write normalised copies here");

  auto* stats = app.add_subcommand("stats", "Model size statistics per instance");
  instance_opts(stats, true);
  stats->add_option("--out", o.out, "Directory for stats.csv");

  auto* sec = app.add_subcommand("sec-table", "DFJ vs MTZ subtour elimination sizes");
  sec->add_option("n", o.sec_n, "Node counts")->required();
  sec->add_option("--out", o.out, "Directory for sec_table.csv");

  auto* comp = app.add_subcommand("compile", "Compile instances to QUBO files");
  instance_opts(comp, true);
  comp->add_option("--penalty", o.penalties, "kind=P multiplier (repeatable; kind may be 'all')");
  comp->add_option("--out", o.out, "Output directory");

  auto* solve = app.add_subcommand("solve", "Sample once and print the best feasible routes");
  instance_opts(solve, true);
  pipeline_opts(solve);
  solve->add_option("--out", o.out, "Directory for .sol files");

  auto* bench = app.add_subcommand("bench", "Repeated runs with metrics and artifacts");
  instance_opts(bench, true);
  pipeline_opts(bench);
  bench->add_option("--runs", o.runs, "Repetitions per instance")->check(CLI::PositiveNumber);
  bench->add_option("--bins", o.bins, "Histogram bins")->check(CLI::PositiveNumber);
  bench->add_option("--best-known", o.best_known, "Reference cost override");
  bench->add_flag("--wall-time", o.wall_time, "Record local wall time (breaks byte-identical output)");
  bench->add_option("--out", o.out, "Artifact directory")->required();

  auto* report = app.add_subcommand("report", "Render the results table from run logs or a fixture");
  report->add_option("logs", o.logs, "JSON-lines run logs");
  report->add_option("--fixture", o.fixture, "JSON file with precomputed columns");
  report->add_option("--bins", o.bins, "Histogram bins");
  report->add_option("--out", o.out, "Directory for results.txt");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (parse->parsed()) return cmd_parse(o);
    if (stats->parsed()) return cmd_stats(o);
    if (sec->parsed()) return cmd_sec_table(o);
    if (comp->parsed()) return cmd_compile(o);
    if (solve->parsed()) return cmd_solve(o);
    if (bench->parsed()) return cmd_bench(o);
    if (report->parsed()) return cmd_report(o);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return e.exit_code();
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
  return 1;
}
