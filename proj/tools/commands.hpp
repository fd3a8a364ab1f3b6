#pragma once

// Subcommands of the gssclu tool. Each returns the process exit code and
// reports problems on stderr; main() maps escaped exceptions to codes.

#include <cstdint>
#include <optional>
#include <string>

#include "gssclu/engine.hpp"
#include "gssclu/synth.hpp"

namespace gssclu::cli {

enum ExitCode : int { kOk = 0, kUsage = 1, kBadInput = 2, kRuntime = 3 };

struct EngineOptions {
  EngineConfig engine;
  std::string backend = "sketch";
  bool strict = false;
};

struct ClusterOptions {
  std::string input;
  std::string out_dir = "gssclu-out";
  EngineOptions run;
  std::optional<std::string> resume;
  std::optional<std::uint64_t> max_graphs;
  bool dmo_trace = false;
  bool diagnostics = false;
  std::size_t purity_every = 100;
  double window_s = 1.0;
};

struct SynthOptions {
  SynthConfig config;
  std::size_t n_informative = 1;
  std::size_t n_noise = 1;
  std::string out = "-";
};

struct CompareOptions {
  std::string input;
  std::string out_dir = "gssclu-compare";
  EngineOptions run;
  std::size_t purity_every = 100;
};

struct EvalOptions {
  std::string events;
  std::string input;
  std::optional<std::string> csv;
  std::size_t purity_every = 100;
};

int run_cluster(const ClusterOptions& opt);
int run_synth(const SynthOptions& opt);
int run_compare(const CompareOptions& opt);
int run_eval(const EvalOptions& opt);

}  // namespace gssclu::cli
