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

#include "ffpdg/generate.h"

#include <chrono>
#include <cstdio>
#include <sstream>
#include <utility>

#include "ffpdg/error.h"

namespace ffpdg {
namespace {

constexpr uint64_t kStreamSampleCodes = 1;
constexpr uint64_t kStreamInverseMap = 2;
constexpr uint64_t kStreamFit = 3;
constexpr uint64_t kStreamSample = 5;

uint64_t SubSeed(uint64_t seed, uint64_t stream) {
  return Rng(seed).Fork(stream).NextU64();
}

// Runs `fn`, rethrowing failures prefixed with the step tag.
template <typename Fn>
auto Step(const char* tag, Fn&& fn) -> decltype(fn()) {
  const std::string prefix = std::string(tag) + ": ";
  try {
    return fn();
  } catch (const NotConverged& e) {
    throw NotConverged(prefix + e.what());
  } catch (const InvalidArgument& e) {
    throw InvalidArgument(prefix + e.what());
  } catch (const std::exception& e) {
    throw Error(prefix + e.what());
  }
}

class Stopwatch {
 public:
  double Lap() {
    const auto now = std::chrono::steady_clock::now();
    const double s = std::chrono::duration<double>(now - last_).count();
    last_ = now;
    return s;
  }

 private:
  std::chrono::steady_clock::time_point last_ =
      std::chrono::steady_clock::now();
};

std::string Fmt(const char* format, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), format, v);
  return buf;
}

}  // namespace

double PipelineResult::total_seconds() const {
  double t = 0.0;
  for (const StageTiming& s : timings) t += s.seconds;
  return t;
}

PipelineResult Generate(const Dataset& dataset, const PipelineConfig& config) {
  const Schema& schema = dataset.schema();
  const uint64_t seed = config.generation.seed;
  std::vector<StageTiming> timings;
  Stopwatch watch;

  Binarized bin = Step("step 1 (binarize)", [&] {
    if (!schema.label_index()) {
      throw InvalidArgument("the fairness stage needs a label column");
    }
    return BuildCodebook(dataset, config.bins);
  });
  const size_t pbit = bin.codebook.BitOf(schema.protected_index());
  const size_t lbit = bin.codebook.BitOf(*schema.label_index());
  timings.push_back({"binarize", watch.Lap()});

  ConstraintSet constraints;
  MaxEntSolution solution = Step("step 2 (fair max-ent)", [&] {
    const DiscreteDistribution prior = EmpiricalPrior(bin.table, config.smooth);
    constraints = FairMarginals(bin.table, pbit, lbit, config.tau);
    return SolveMaxEnt(prior, constraints, config.maxent);
  });
  timings.push_back({"maxent", watch.Lap()});

  const size_t n = dataset.rows();
  std::vector<BinaryCode> codes = Step("step 2 (sample codes)", [&] {
    return SampleCodes(solution.distribution, n,
                       SubSeed(seed, kStreamSampleCodes));
  });
  const GroupRates before = ComputeGroupRates(bin.table.codes, pbit, lbit);
  const GroupRates after = ComputeGroupRates(codes, pbit, lbit);
  timings.push_back({"sample_codes", watch.Lap()});

  Dataset fair = Step("step 3 (inverse map)", [&] {
    return InverseMapAll(codes, bin.codebook,
                         SubSeed(seed, kStreamInverseMap));
  });
  timings.push_back({"inverse_map", watch.Lap()});

  RonGaussModel model = Step("steps 4-8 (RON-Gauss fit)", [&] {
    GenerationConfig gen = config.generation;
    gen.seed = SubSeed(seed, kStreamFit);
    return Fit(fair, gen);
  });
  timings.push_back({"fit", watch.Lap()});

  Dataset synthetic = Step("step 9 (sample)", [&] {
    const size_t n_out =
        config.generation.n_out > 0 ? config.generation.n_out : n;
    return Sample(model, n_out, SubSeed(seed, kStreamSample));
  });
  timings.push_back({"sample", watch.Lap()});

  return PipelineResult{
      .synthetic = std::move(synthetic),
      .fair = std::move(fair),
      .codebook = std::move(bin.codebook),
      .constraints = std::move(constraints),
      .solution = std::move(solution),
      .rates_before = before,
      .rates_after = after,
      .model = std::move(model),
      .timings = std::move(timings),
  };
}

std::string BudgetLine(const PrivacyBudget& budget) {
  std::ostringstream out;
  out << "dp_reported=eps_mu+eps_sigma=" << Fmt("%.6g", budget.epsilon_total)
      << " (eps_mu=" << Fmt("%.6g", budget.epsilon_mu)
      << ", eps_sigma=" << Fmt("%.6g", budget.epsilon_sigma)
      << "; caveat: the fair max-ent stage reads the raw data and its "
         "Lipschitz constant is not privatized, so the guarantee covers the "
         "RON-Gauss stage only)";
  return out.str();
}

std::string FormatAudit(const PipelineResult& result) {
  std::ostringstream out;
  out << DescribeCodeBook(result.codebook);
  out << "maxent iterations=" << result.solution.iterations
      << " converged=" << (result.solution.converged ? "true" : "false")
      << " residual=" << Fmt("%.3e", result.solution.residual) << "\n";
  out << "maxent lambda=";
  for (size_t i = 0; i < result.solution.lambda.size(); ++i) {
    out << (i ? "," : "") << Fmt("%.6g", result.solution.lambda[i]);
  }
  out << "\n";
  const auto rates = [&](const char* name, const GroupRates& r) {
    out << name << " p_y1_c0=" << Fmt("%.4f", r.positive_rate_unprivileged)
        << " p_y1_c1=" << Fmt("%.4f", r.positive_rate_privileged)
        << " p_c1=" << Fmt("%.4f", r.protected_rate)
        << " gap=" << Fmt("%.4f", r.gap()) << "\n";
  };
  rates("rates_before", result.rates_before);
  rates("rates_after", result.rates_after);
  out << "mode=" << ToString(result.model.mode)
      << " d_eff=" << result.model.encoding.width
      << " p=" << result.model.projection.p() << "\n";
  out << BudgetLine(result.model.budget) << "\n";
  for (const StageTiming& t : result.timings) {
    out << "timing " << t.stage << "=" << Fmt("%.4f", t.seconds) << "\n";
  }
  return out.str();
}

}  // namespace ffpdg
