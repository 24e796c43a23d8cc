// Copyright 2026 The FFPDG Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// ffpdg: fair and private synthetic data generation.
//
//   ffpdg generate --input train.csv --schema s.schema --output synth.csv
//   ffpdg evaluate --input train.csv --test test.csv --synthetic synth.csv \
//                  --schema s.schema
//   ffpdg bench    --input train.csv --schema s.schema
//   ffpdg inspect  --input synth.csv
//
// Exit codes: 0 success, 1 runtime or data error, 2 usage error.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "ffpdg/error.h"
#include "ffpdg/generate.h"
#include "ffpdg/metrics.h"
#include "ffpdg/random.h"

namespace {

using ffpdg::Dataset;

constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

struct Options {
  std::string input;
  std::string schema;
  std::string output;
  std::string test;
  std::string synthetic;
  std::string report;
  double epsilon = 1.0;
  std::string epsilon_split = "0.3:0.7";
  int p = 0;
  size_t n_out = 0;
  int bins = 1;
  std::string mode;
  std::string target;
  uint64_t seed = 0;
  int folds = 5;
  bool include_protected = false;
  size_t min_rows = 1000;
  int repeats = 3;
};

ffpdg::PipelineConfig MakeConfig(const Options& o, const ffpdg::Schema& schema) {
  ffpdg::PipelineConfig config;
  config.bins = o.bins;
  config.generation.p = o.p;
  config.generation.n_out = o.n_out;
  config.generation.seed = o.seed;
  config.generation.budget =
      ffpdg::PrivacyBudget::FromSplit(o.epsilon, o.epsilon_split);
  if (!o.mode.empty()) {
    config.generation.mode = ffpdg::ParseGenerationMode(o.mode);
  }
  if (!o.target.empty()) {
    const auto idx = schema.Find(o.target);
    if (!idx) throw ffpdg::InvalidArgument("unknown target column " + o.target);
    config.generation.target_column = *idx;
  }
  return config;
}

void WriteText(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ffpdg::Error("cannot write " + path);
  out << text;
  if (!out) throw ffpdg::Error("write failed: " + path);
}

std::string ReadText(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ffpdg::Error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int RunGenerate(const Options& o) {
  const ffpdg::Schema schema = ffpdg::LoadSchema(o.schema);
  const Dataset data = ffpdg::LoadCsv(o.input, schema);
  const ffpdg::PipelineConfig config = MakeConfig(o, schema);
  const auto start = std::chrono::steady_clock::now();
  const ffpdg::PipelineResult result = ffpdg::Generate(data, config);
  const double seconds = std::chrono::duration<double>(
                             std::chrono::steady_clock::now() - start)
                             .count();
  ffpdg::SaveCsv(result.synthetic, o.output);
  ffpdg::SaveModel(result.model, o.output + ".model.txt");
  WriteText(o.output + ".audit.txt", ffpdg::FormatAudit(result));
  std::printf("rows=%zu\n", result.synthetic.rows());
  std::printf("generate_seconds=%.3f\n", seconds);
  return 0;
}

int RunEvaluate(const Options& o) {
  const ffpdg::Schema schema = ffpdg::LoadSchema(o.schema);
  const Dataset train = ffpdg::LoadCsv(o.input, schema);
  const Dataset test = ffpdg::LoadCsv(o.test, schema);
  const Dataset synthetic = ffpdg::LoadCsv(o.synthetic, schema);
  ffpdg::EvalOptions options;
  options.folds = o.folds;
  options.seed = o.seed;
  options.include_protected = o.include_protected;
  const ffpdg::EvalReport report =
      ffpdg::Evaluate(train, test, synthetic, options);
  const std::string kv = ffpdg::FormatKeyValues(report);
  std::cout << kv;
  if (!o.report.empty()) {
    WriteText(o.report, ffpdg::FormatTable(report) + kv);
  }
  return 0;
}

int RunBench(const Options& o) {
  const ffpdg::Schema schema = ffpdg::LoadSchema(o.schema);
  const Dataset data = ffpdg::LoadCsv(o.input, schema);
  ffpdg::PipelineConfig config = MakeConfig(o, schema);
  config.generation.n_out = 0;
  // Nested subsamples: every size takes a prefix of one seeded permutation.
  std::vector<size_t> order(data.rows());
  std::iota(order.begin(), order.end(), size_t{0});
  ffpdg::Rng rng(o.seed);
  for (size_t i = order.size(); i > 1; --i) {
    std::swap(order[i - 1], order[rng.UniformInt(i)]);
  }
  std::vector<size_t> sizes;
  for (size_t n = o.min_rows; n < data.rows(); n *= 2) sizes.push_back(n);
  sizes.push_back(data.rows());

  std::printf("%10s %12s\n", "rows", "seconds");
  std::vector<double> log_n, log_t;
  for (size_t n : sizes) {
    const std::vector<size_t> rows(order.begin(),
                                   order.begin() + static_cast<long>(n));
    const Dataset subset = data.Select(rows);
    double best = 1e300;
    for (int r = 0; r < std::max(1, o.repeats); ++r) {
      const auto start = std::chrono::steady_clock::now();
      ffpdg::Generate(subset, config);
      best = std::min(best, std::chrono::duration<double>(
                                std::chrono::steady_clock::now() - start)
                                .count());
    }
    std::printf("%10zu %12.4f\n", n, best);
    log_n.push_back(std::log(static_cast<double>(n)));
    log_t.push_back(std::log(std::max(best, 1e-6)));
  }
  double exponent = 0.0;
  if (log_n.size() >= 2) {
    const double mx = std::accumulate(log_n.begin(), log_n.end(), 0.0) /
                      static_cast<double>(log_n.size());
    const double my = std::accumulate(log_t.begin(), log_t.end(), 0.0) /
                      static_cast<double>(log_t.size());
    double sxy = 0.0, sxx = 0.0;
    for (size_t i = 0; i < log_n.size(); ++i) {
      sxy += (log_n[i] - mx) * (log_t[i] - my);
      sxx += (log_n[i] - mx) * (log_n[i] - mx);
    }
    exponent = sxy / sxx;
  }
  const bool ok = exponent <= 2.5;
  std::printf("growth_exponent=%.3f\n", exponent);
  std::printf("growth_exponent<=2.5 %s\n", ok ? "PASS" : "FAIL");
  return ok ? 0 : kExitRuntime;
}

int RunInspect(const Options& o, const std::vector<std::string>& positional) {
  std::vector<std::string> prefixes = positional;
  if (!o.input.empty()) prefixes.insert(prefixes.begin(), o.input);
  if (prefixes.empty()) {
    throw CLI::ValidationError("inspect needs --input <synthetic.csv>");
  }
  for (const std::string& prefix : prefixes) {
    const std::string audit = ReadText(prefix + ".audit.txt");
    const ffpdg::RonGaussModel model =
        ffpdg::LoadModel(prefix + ".model.txt");
    std::printf("== %s\n", prefix.c_str());
    std::fputs(audit.c_str(), stdout);
    std::printf("model mode=%s train_rows=%zu d_eff=%zu p=%ld\n",
                std::string(ffpdg::ToString(model.mode)).c_str(),
                model.train_rows, model.encoding.width,
                static_cast<long>(model.projection.p()));
    for (size_t c = 0; c < model.components.size(); ++c) {
      std::printf("component %zu label=%g weight=%.4f\n", c,
                  model.components[c].label, model.components[c].weight);
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fair and differentially private synthetic data generation"};
  app.require_subcommand(1);
  Options o;
  std::vector<std::string> positional;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--input", o.input, "Input CSV")->required();
    cmd->add_option("--schema", o.schema, "Schema file")->required();
    cmd->add_option("--seed", o.seed, "Random seed")->capture_default_str();
  };
  auto add_generation = [&](CLI::App* cmd) {
    cmd->add_option("--epsilon", o.epsilon, "Total privacy budget")
        ->capture_default_str();
    cmd->add_option("--epsilon-split", o.epsilon_split,
                    "Mean:covariance budget weights")
        ->capture_default_str();
    cmd->add_option("--p", o.p, "Projected dimension (0: min(d_eff-1, 8))")
        ->capture_default_str();
    cmd->add_option("--bins", o.bins, "Bits per continuous column")
        ->capture_default_str();
    cmd->add_option("--mode", o.mode,
                    "unsupervised | classification | regression");
    cmd->add_option("--target", o.target,
                    "Continuous target column for regression mode");
  };

  CLI::App* gen = app.add_subcommand("generate", "Generate a synthetic CSV");
  add_common(gen);
  add_generation(gen);
  gen->add_option("--output", o.output, "Synthetic CSV path")->required();
  gen->add_option("--n-out", o.n_out, "Rows to generate (0: input rows)")
      ->capture_default_str();

  CLI::App* eval = app.add_subcommand("evaluate", "Score synthetic data");
  add_common(eval);
  eval->add_option("--test", o.test, "Real held-out CSV")->required();
  eval->add_option("--synthetic", o.synthetic, "Synthetic CSV")->required();
  eval->add_option("--folds", o.folds, "Discriminator folds")
      ->capture_default_str();
  eval->add_option("--report", o.report, "Write the full report here");
  eval->add_flag("--include-protected", o.include_protected,
                 "Use the protected column as a model feature");

  CLI::App* bench = app.add_subcommand("bench", "Time generate over sizes");
  add_common(bench);
  add_generation(bench);
  bench->add_option("--min-rows", o.min_rows, "Smallest subsample")
      ->capture_default_str();
  bench->add_option("--repeats", o.repeats, "Runs per size (min is kept)")
      ->capture_default_str();

  CLI::App* inspect = app.add_subcommand("inspect", "Print generate audits");
  inspect->add_option("--input", o.input, "Synthetic CSV written by generate");
  inspect->add_option("paths", positional, "More synthetic CSV paths");

  if (argc <= 1) {
    std::cout << app.help();
    return kExitUsage;
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*gen) return RunGenerate(o);
    if (*eval) return RunEvaluate(o);
    if (*bench) return RunBench(o);
    if (*inspect) return RunInspect(o, positional);
  } catch (const CLI::ValidationError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitUsage;
}
