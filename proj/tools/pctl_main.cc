/*
 * Copyright 2026 The pctl Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

// pctl: simulate / train / eval / verify.

#include <cstdint>
#include <exception>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "pctl/errors.h"
#include "pctl/experiment.h"
#include "pctl/verify.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitRuntime = 2;
constexpr int kExitVerify = 3;

int ReportError(const std::string& kind, const std::string& message, int code) {
  nlohmann::ordered_json record;
  record["error"] = kind;
  record["message"] = message;
  record["exit_code"] = code;
  std::cerr << record.dump() << std::endl;
  return code;
}

struct CommonFlags {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
};

void AddCommon(CLI::App* cmd, CommonFlags& flags) {
  cmd->add_option("-c,--config", flags.config_path, "experiment config (JSON)");
  cmd->add_option("--seed", flags.seed, "override the config seed");
  cmd->add_option("-o,--out", flags.out, "override the output directory");
}

pctl::ExperimentConfig Resolve(const CommonFlags& flags) {
  pctl::ExperimentConfig config = flags.config_path.empty()
                                      ? pctl::ParseConfig(nlohmann::json::object())
                                      : pctl::LoadConfig(flags.config_path);
  if (flags.seed) config.SetSeed(*flags.seed);
  if (flags.out) config.output_dir = *flags.out;
  return config;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Streaming percentile-label training engine"};
  app.require_subcommand(1);

  CommonFlags sim_flags;
  CLI::App* simulate = app.add_subcommand("simulate", "generate a synthetic stream");
  AddCommon(simulate, sim_flags);

  CommonFlags train_flags;
  std::string train_stream;
  CLI::App* train = app.add_subcommand("train", "train on a JSONL stream");
  AddCommon(train, train_flags);
  train->add_option("-s,--stream", train_stream, "stream JSONL")->required();

  CommonFlags eval_flags;
  std::string checkpoint, eval_stream;
  std::optional<std::string> baseline;
  CLI::App* eval = app.add_subcommand("eval", "score a stream and write reports");
  AddCommon(eval, eval_flags);
  eval->add_option("-m,--checkpoint", checkpoint, "model checkpoint")->required();
  eval->add_option("-s,--stream", eval_stream, "stream JSONL to score")->required();
  eval->add_option("-b,--baseline", baseline, "baseline checkpoint for deltas");

  pctl::VerifyOptions verify_opts;
  std::string mutate;
  CLI::App* verify = app.add_subcommand("verify", "run the statistical check suites");
  verify->add_option("--trials-scale", verify_opts.trials_scale,
                     "multiply trial counts; tolerances widen to match")
      ->check(CLI::PositiveNumber);
  verify->add_option("--seed", verify_opts.seed, "suite seed");
  verify->add_option("--mutate", mutate, "")->group("")->check(
      CLI::IsMember({"ties-as-one"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return ReportError("usage", e.what(), kExitValidation);
  }

  try {
    if (simulate->parsed()) {
      const pctl::ExperimentConfig config = Resolve(sim_flags);
      pctl::CmdSimulate(config, config.output_dir, std::cout);
    } else if (train->parsed()) {
      const pctl::ExperimentConfig config = Resolve(train_flags);
      pctl::CmdTrain(config, train_stream, config.output_dir, std::cout);
    } else if (eval->parsed()) {
      const pctl::ExperimentConfig config = Resolve(eval_flags);
      pctl::CmdEval(config, checkpoint, eval_stream, baseline, config.output_dir,
                    std::cout);
    } else if (verify->parsed()) {
      verify_opts.ties_as_one = mutate == "ties-as-one";
      const auto results = pctl::RunVerify(verify_opts);
      pctl::PrintVerifyTable(std::cout, results);
      for (const auto& r : results) {
        if (!r.passed) return kExitVerify;
      }
    }
  } catch (const pctl::ValidationError& e) {
    return ReportError("validation", e.what(), kExitValidation);
  } catch (const pctl::DecodeError& e) {
    return ReportError("decode", e.what(), kExitRuntime);
  } catch (const pctl::IoError& e) {
    return ReportError("io", e.what(), kExitRuntime);
  } catch (const std::exception& e) {
    return ReportError("runtime", e.what(), kExitRuntime);
  }
  return kExitOk;
}
