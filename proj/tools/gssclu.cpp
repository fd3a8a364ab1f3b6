// gssclu: cluster graph streams with side information.
//
//   gssclu synth   --n-graphs 2000 --out stream.ndjson
//   gssclu cluster stream.ndjson --out-dir run1
//   gssclu compare stream.ndjson --out-dir cmp
//   gssclu eval    --events run1/events.ndjson stream.ndjson

#include <iostream>

#include "CLI11.hpp"
#include "commands.hpp"
#include "gssclu/errors.hpp"
#include "json.hpp"

using namespace gssclu;
using namespace gssclu::cli;

namespace {

void engine_flags(CLI::App* cmd, EngineOptions& o) {
  auto& e = o.engine;
  cmd->add_option("--k", e.k, "number of clusters")->capture_default_str();
  cmd->add_option("--gamma", e.gamma, "graphs between weight refreshes")->capture_default_str();
  cmd->add_option("--p", e.p, "spread factor")->capture_default_str();
  cmd->add_option("--sketch-rows", e.sketch.rows, "hash rows per sketch")->capture_default_str();
  cmd->add_option("--sketch-cols", e.sketch.cols, "cells per row")->capture_default_str();
  cmd->add_option("--seed", e.sketch.seed, "hash family seed")->capture_default_str();
  cmd->add_option("--barrier-t", e.dmo.t, "log-barrier parameter")->capture_default_str();
  cmd->add_option("--dmo-steps", e.dmo.max_steps, "gradient steps per refresh")->capture_default_str();
  cmd->add_option("--dmo-step-size", e.dmo.step_size, "initial line-search step")->capture_default_str();
  cmd->add_option("--weight-floor", e.dmo.weight_floor, "lower bound on every weight")->capture_default_str();
  cmd->add_flag("--no-dmo", [&e](std::int64_t) { e.optimize_weights = false; }, "keep equal weights");
  cmd->add_option("--backend", o.backend, "statistics backend")
      ->check(CLI::IsMember({"sketch", "exact"}))
      ->capture_default_str();
  cmd->add_flag("--strict", o.strict, "abort on the first malformed record");
}

void error(const std::string& kind, const std::string& what, std::size_t line = 0) {
  nlohmann::ordered_json j{{"level", "error"}, {"kind", kind}, {"error", what}};
  if (line) j["line"] = line;
  std::cerr << j.dump() << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Streaming clustering of graphs with side information"};
  app.set_version_flag("--version", GSSCLU_VERSION);
  app.require_subcommand(1);

  ClusterOptions cluster;
  auto* c = app.add_subcommand("cluster", "cluster a stream file");
  c->add_option("stream", cluster.input, "stream file")->required();
  c->add_option("--out-dir", cluster.out_dir, "output directory")->capture_default_str();
  engine_flags(c, cluster.run);
  c->add_option("--resume", cluster.resume, "continue from a checkpoint file");
  c->add_option("--max-graphs", cluster.max_graphs, "stop after this many graphs");
  c->add_flag("--dmo-trace", cluster.dmo_trace, "write dmo_trace.ndjson");
  c->add_flag("--diagnostics", cluster.diagnostics, "include per-cluster distances in events");
  c->add_option("--purity-every", cluster.purity_every, "graphs between purity samples")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  c->add_option("--window", cluster.window_s, "throughput window in seconds")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();

  SynthOptions synth;
  auto* s = app.add_subcommand("synth", "write a labeled synthetic stream");
  auto& sc = synth.config;
  s->add_option("--out", synth.out, "output file, - for stdout")->capture_default_str();
  s->add_option("--n-graphs", sc.n_graphs)->capture_default_str();
  s->add_option("--n-clusters", sc.n_clusters)->capture_default_str();
  s->add_option("--nodes-per-community", sc.nodes_per_community)->capture_default_str();
  s->add_option("--edges-per-graph", sc.edges_per_graph)->capture_default_str();
  s->add_option("--cross-edge-rate", sc.cross_edge_rate)->capture_default_str();
  s->add_option("--vocab-per-class", sc.vocab_per_class)->capture_default_str();
  s->add_option("--n-informative", synth.n_informative, "informative side types")->capture_default_str();
  s->add_option("--fidelity", sc.informative_types[0].fidelity)->capture_default_str();
  s->add_option("--informative-draws", sc.informative_types[0].draws)->capture_default_str();
  s->add_option("--n-noise", synth.n_noise, "noise side types")->capture_default_str();
  s->add_option("--noise-vocabulary", sc.noise_types[0].vocabulary)->capture_default_str();
  s->add_option("--noise-draws", sc.noise_types[0].draws)->capture_default_str();
  s->add_option("--seed", sc.seed)->capture_default_str();

  CompareOptions compare;
  auto* m = app.add_subcommand("compare", "run a backend against the exact backend");
  m->add_option("stream", compare.input, "stream file")->required();
  m->add_option("--out-dir", compare.out_dir, "output directory")->capture_default_str();
  engine_flags(m, compare.run);
  m->add_option("--purity-every", compare.purity_every)->check(CLI::PositiveNumber)->capture_default_str();

  EvalOptions eval;
  auto* v = app.add_subcommand("eval", "purity of an events file against stream labels");
  v->add_option("stream", eval.input, "labeled stream file")->required();
  v->add_option("--events", eval.events, "events.ndjson from a cluster run")->required();
  v->add_option("--csv", eval.csv, "also write the purity series here");
  v->add_option("--purity-every", eval.purity_every)->check(CLI::PositiveNumber)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*c) return run_cluster(cluster);
    if (*s) return run_synth(synth);
    if (*m) return run_compare(compare);
    return run_eval(eval);
  } catch (const ParseError& e) {
    error("input", e.what(), e.line());
    return kBadInput;
  } catch (const SchemaMismatch& e) {
    error("input", e.what());
    return kBadInput;
  } catch (const FormatError& e) {
    error("input", e.what());
    return kBadInput;
  } catch (const InvalidArgument& e) {
    error("usage", e.what());
    return kUsage;
  } catch (const std::exception& e) {
    error("runtime", e.what());
    return kRuntime;
  }
}
