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

#include "pctl/experiment.h"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

#include "pctl/binary_io.h"
#include "pctl/errors.h"
#include "pctl/rng.h"

namespace pctl {

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

namespace {

// Reads fields of one JSON object and rejects keys nobody asked for.
class ObjectReader {
 public:
  ObjectReader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ValidationError(Where("") + "must be an object");
  }

  template <typename T>
  void Get(const std::string& key, T& out) {
    seen_.insert(key);
    if (!j_.contains(key)) return;
    try {
      out = j_.at(key).get<T>();
    } catch (const json::exception& e) {
      throw ValidationError(Where(key) + "has the wrong type");
    }
  }

  const json* Child(const std::string& key) {
    seen_.insert(key);
    return j_.contains(key) ? &j_.at(key) : nullptr;
  }

  void Finish() const {
    for (const auto& [key, value] : j_.items()) {
      if (!seen_.count(key)) throw ValidationError("unknown config key '" + Where(key) + "'");
    }
  }

  std::string Where(const std::string& key) const {
    if (key.empty()) return path_.empty() ? "config " : path_ + " ";
    return path_.empty() ? key : path_ + "." + key;
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

std::string Hex(std::uint64_t v) {
  std::ostringstream s;
  s << std::hex << std::setw(16) << std::setfill('0') << v;
  return s.str();
}

void WriteSidecar(const ExperimentConfig& config, const std::string& path,
                  const std::string& command) {
  ordered_json meta;
  meta["file"] = fs::path(path).filename().string();
  meta["command"] = command;
  meta["config_hash"] = Hex(config.Hash());
  meta["seed"] = config.seed;
  std::ofstream out(path + ".meta.json");
  if (!out) throw IoError("cannot write sidecar for '" + path + "'");
  out << meta.dump(2) << '\n';
}

void EnsureDir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory '" + dir + "': " + ec.message());
}

std::ofstream OpenOut(const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  return out;
}

std::string Join(const std::string& dir, const std::string& name) {
  return (fs::path(dir) / name).string();
}

const char* ScoreHeadName(ScoreHead h) {
  switch (h) {
    case ScoreHead::kAuto:
      return "auto";
    case ScoreHead::kRegression:
      return "regression";
    case ScoreHead::kPercentile:
      return "percentile";
  }
  return "auto";
}

}  // namespace

void ExperimentConfig::SetSeed(std::uint64_t s) {
  seed = s;
  population.seed = s;
  train.seed = s;
}

ordered_json ExperimentConfig::ToJson() const {
  ordered_json pop;
  pop["users"] = population.users;
  pop["items"] = population.items;
  pop["beta"] = population.beta;
  pop["mu_jitter"] = population.mu_jitter;
  pop["shared_taste"] = population.shared_taste;
  pop["taste_dims"] = population.taste_dims;
  pop["stream_length"] = population.stream_length;
  pop["holdout_items"] = population.holdout_items;
  pop["context_period"] = population.context_period;
  ordered_json cohorts = ordered_json::array();
  for (const Cohort& c : population.cohorts) {
    ordered_json k;
    k["name"] = c.name;
    k["weight"] = c.weight;
    k["mu"] = c.mu;
    k["sigma"] = c.sigma;
    k["activity"] = c.activity;
    k["positive_rate"] = c.positive_rate;
    k["taste_axis"] = c.taste_axis;
    cohorts.push_back(std::move(k));
  }
  pop["cohorts"] = std::move(cohorts);

  ordered_json tr;
  tr["variant"] = VariantName(train.variant);
  tr["target"] = TargetName(train.target);
  tr["pool_capacity"] = train.pool_capacity;
  tr["gate_threshold"] = train.gate_threshold;
  tr["lambda"] = train.lambda;
  tr["learning_rate"] = train.learning_rate;
  tr["epochs"] = train.epochs;
  tr["clamp_eps"] = train.clamp_eps;
  tr["raw_scale"] = train.raw_scale;
  tr["hidden"] = train.hidden;

  ordered_json ev;
  ev["pairs_per_user"] = eval.pairs_per_user;
  ev["oracle_draws"] = eval.oracle_draws;
  ev["score_head"] = ScoreHeadName(eval.score_head);

  ordered_json doc;
  doc["seed"] = seed;
  doc["output_dir"] = output_dir;
  doc["baseline"] = baseline;
  doc["baseline_variant"] = VariantName(baseline_variant);
  doc["baseline_learning_rate"] = baseline_learning_rate;
  doc["population"] = std::move(pop);
  doc["train"] = std::move(tr);
  doc["eval"] = std::move(ev);
  return doc;
}

std::uint64_t ExperimentConfig::Hash() const { return Fnv1a64(ToJson().dump()); }

ExperimentConfig ParseConfig(const json& doc) {
  ExperimentConfig c;
  ObjectReader top(doc, "");
  std::uint64_t seed = c.seed;
  top.Get("seed", seed);
  top.Get("output_dir", c.output_dir);
  top.Get("baseline", c.baseline);
  std::string baseline_variant(VariantName(c.baseline_variant));
  top.Get("baseline_variant", baseline_variant);
  top.Get("baseline_learning_rate", c.baseline_learning_rate);

  if (const json* p = top.Child("population")) {
    ObjectReader r(*p, "population");
    PopulationConfig& pc = c.population;
    r.Get("users", pc.users);
    r.Get("items", pc.items);
    r.Get("beta", pc.beta);
    r.Get("mu_jitter", pc.mu_jitter);
    r.Get("shared_taste", pc.shared_taste);
    r.Get("taste_dims", pc.taste_dims);
    r.Get("stream_length", pc.stream_length);
    r.Get("holdout_items", pc.holdout_items);
    r.Get("context_period", pc.context_period);
    if (const json* cs = r.Child("cohorts")) {
      if (!cs->is_array()) throw ValidationError("population.cohorts must be an array");
      pc.cohorts.clear();
      for (std::size_t i = 0; i < cs->size(); ++i) {
        ObjectReader k((*cs)[i], "population.cohorts[" + std::to_string(i) + "]");
        Cohort cohort;
        k.Get("name", cohort.name);
        k.Get("weight", cohort.weight);
        k.Get("mu", cohort.mu);
        k.Get("sigma", cohort.sigma);
        k.Get("activity", cohort.activity);
        k.Get("positive_rate", cohort.positive_rate);
        k.Get("taste_axis", cohort.taste_axis);
        k.Finish();
        pc.cohorts.push_back(std::move(cohort));
      }
    }
    r.Finish();
  }

  if (const json* t = top.Child("train")) {
    ObjectReader r(*t, "train");
    TrainConfig& tc = c.train;
    std::string variant(VariantName(tc.variant));
    std::string target(TargetName(tc.target));
    r.Get("variant", variant);
    r.Get("target", target);
    r.Get("pool_capacity", tc.pool_capacity);
    r.Get("gate_threshold", tc.gate_threshold);
    r.Get("lambda", tc.lambda);
    r.Get("learning_rate", tc.learning_rate);
    r.Get("epochs", tc.epochs);
    r.Get("clamp_eps", tc.clamp_eps);
    r.Get("raw_scale", tc.raw_scale);
    r.Get("hidden", tc.hidden);
    r.Finish();
    const auto v = ParseVariant(variant);
    if (!v) throw ValidationError("train.variant: unknown variant '" + variant + "'");
    tc.variant = *v;
    const auto tg = ParseTarget(target);
    if (!tg) throw ValidationError("train.target: unknown target '" + target + "'");
    tc.target = *tg;
  }

  if (const json* e = top.Child("eval")) {
    ObjectReader r(*e, "eval");
    std::string head = "auto";
    r.Get("pairs_per_user", c.eval.pairs_per_user);
    r.Get("oracle_draws", c.eval.oracle_draws);
    r.Get("score_head", head);
    r.Finish();
    if (head == "auto") {
      c.eval.score_head = ScoreHead::kAuto;
    } else if (head == "regression") {
      c.eval.score_head = ScoreHead::kRegression;
    } else if (head == "percentile") {
      c.eval.score_head = ScoreHead::kPercentile;
    } else {
      throw ValidationError("eval.score_head: unknown head '" + head + "'");
    }
  }
  top.Finish();
  const auto bv = ParseVariant(baseline_variant);
  if (!bv || (*bv != Variant::kRegression && *bv != Variant::kRawRegression)) {
    throw ValidationError("baseline_variant must be regression or raw_regression, got '" +
                          baseline_variant + "'");
  }
  c.baseline_variant = *bv;
  if (!(c.baseline_learning_rate > 0.0)) {
    throw ValidationError("baseline_learning_rate must be > 0");
  }

  c.SetSeed(seed);
  c.population.Validate();
  c.train.input_dim = c.population.feature_dim();
  c.train.Validate();
  if (c.eval.oracle_draws == 0) throw ValidationError("eval.oracle_draws must be >= 1");
  return c;
}

ExperimentConfig LoadConfig(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config '" + path + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw ValidationError("config '" + path + "' is not valid JSON: " + e.what());
  }
  return ParseConfig(doc);
}

std::vector<Interaction> LoadStream(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open stream '" + path + "'");
  return ReadJsonl(in);
}

SimulateSummary CmdSimulate(const ExperimentConfig& config,
                            const std::string& out_dir, std::ostream& log) {
  EnsureDir(out_dir);
  const Population population(config.population);
  const std::vector<Interaction> stream = GenerateStream(population);
  const std::vector<Interaction> holdout = GenerateHoldout(population);

  const std::string stream_path = Join(out_dir, "stream.jsonl");
  const std::string holdout_path = Join(out_dir, "holdout.jsonl");
  const std::string oracle_path = Join(out_dir, "oracle.csv");
  {
    auto out = OpenOut(stream_path);
    WriteJsonl(out, stream);
    if (!out) throw IoError("write failed for '" + stream_path + "'");
  }
  {
    auto out = OpenOut(holdout_path);
    WriteJsonl(out, holdout);
    if (!out) throw IoError("write failed for '" + holdout_path + "'");
  }
  {
    auto out = OpenOut(oracle_path);
    out << "user_id,cohort,quantile,magnitude\n";
    // One user at a time keeps memory flat at 10^5 draws per user.
    for (const UserProfile& u : population.users()) {
      const UserId id = u.id;
      const PercentileOracle oracle =
          PercentileOracle::Build(population, std::span<const UserId>(&id, 1),
                                  config.eval.oracle_draws);
      std::ostringstream rows;
      WriteOracleCsv(rows, population, oracle);
      const std::string text = rows.str();
      out << text.substr(text.find('\n') + 1);
    }
    if (!out) throw IoError("write failed for '" + oracle_path + "'");
  }
  for (const auto& p : {stream_path, holdout_path, oracle_path}) {
    WriteSidecar(config, p, "simulate");
  }

  SimulateSummary summary;
  summary.interactions = stream.size();
  summary.holdout = holdout.size();
  std::map<std::string, std::size_t> index;
  for (const Cohort& c : config.population.cohorts) {
    index[c.name] = summary.cohorts.size();
    summary.cohorts.push_back({c.name});
  }
  for (const UserProfile& u : population.users()) ++summary.cohorts[u.cohort].users;
  for (const Interaction& r : stream) {
    CohortSummary& c = summary.cohorts[index.at(r.cohort)];
    ++c.interactions;
    c.mean_magnitude += r.y;
    c.positive_rate += r.b;
  }
  log << "simulated " << summary.interactions << " interactions, "
      << summary.holdout << " holdout rows\n";
  log << "cohort        users  interactions  mean_y     positive_rate\n";
  for (CohortSummary& c : summary.cohorts) {
    if (c.interactions > 0) {
      c.mean_magnitude /= static_cast<double>(c.interactions);
      c.positive_rate /= static_cast<double>(c.interactions);
    }
    log << std::left << std::setw(12) << c.name << "  " << std::right
        << std::setw(5) << c.users << "  " << std::setw(12) << c.interactions
        << "  " << std::fixed << std::setprecision(3) << std::setw(9)
        << c.mean_magnitude << "  " << std::setw(13) << c.positive_rate << '\n';
  }
  return summary;
}

TrainSummary CmdTrain(const ExperimentConfig& config,
                      const std::string& stream_path, const std::string& out_dir,
                      std::ostream& log) {
  const std::vector<Interaction> stream = LoadStream(stream_path);
  if (stream.empty()) throw ValidationError("empty stream");
  EnsureDir(out_dir);

  const TrainResult result = Train(stream, config.train);
  const std::string model_path = Join(out_dir, "model.ckpt");
  const std::string state_path = Join(out_dir, "state.snap");
  const std::string log_path = Join(out_dir, "train_log.jsonl");
  io::WriteFile(model_path, SaveModel(result.model));
  io::WriteFile(state_path, SnapshotStore(result.store));
  {
    auto out = OpenOut(log_path);
    WriteTrainLog(out, result.log);
    if (!out) throw IoError("write failed for '" + log_path + "'");
  }
  for (const auto& p : {model_path, state_path, log_path}) {
    WriteSidecar(config, p, "train");
  }

  if (config.baseline) {
    TrainConfig twin = config.train;
    twin.variant = config.baseline_variant;
    twin.learning_rate = config.baseline_learning_rate;
    const TrainResult base = Train(stream, twin);
    const std::string base_path = Join(out_dir, "baseline.ckpt");
    io::WriteFile(base_path, SaveModel(base.model));
    WriteSidecar(config, base_path, "train");
  }

  TrainSummary summary;
  summary.steps = result.log.size();
  for (const TrainRecord& r : result.log) summary.gated_steps += !r.gate_open;
  summary.final_running_loss = result.log.back().running_loss;
  log << "trained " << VariantName(config.train.variant) << " on "
      << summary.steps << " steps (" << summary.gated_steps
      << " without percentile gradient), final running loss "
      << summary.final_running_loss << '\n';
  return summary;
}

ScoreHead ResolveScoreHead(const ExperimentConfig& config) {
  if (config.eval.score_head != ScoreHead::kAuto) return config.eval.score_head;
  switch (config.train.variant) {
    case Variant::kRegression:
    case Variant::kRawRegression:
    case Variant::kCotrain:
      return ScoreHead::kRegression;
    default:
      return ScoreHead::kPercentile;
  }
}

namespace {

std::vector<double> Score(const DualHeadModel& model, ScoreHead head,
                          const std::vector<Interaction>& stream) {
  std::vector<double> out;
  out.reserve(stream.size());
  for (const Interaction& r : stream) {
    const Prediction p = model.Forward(r.features);
    out.push_back(head == ScoreHead::kPercentile ? p.p_hat : p.y_hat);
  }
  return out;
}

// 1 for slate items whose hidden affinity is above the user's median.
std::vector<double> AffinityLabels(const std::vector<Interaction>& stream) {
  std::map<UserId, std::vector<double>> per_user;
  for (const Interaction& r : stream) per_user[r.user_id].push_back(r.affinity);
  std::map<UserId, double> median;
  for (auto& [user, v] : per_user) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    median[user] = n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
  }
  std::vector<double> labels;
  labels.reserve(stream.size());
  for (const Interaction& r : stream) {
    labels.push_back(r.affinity > median.at(r.user_id) ? 1.0 : 0.0);
  }
  return labels;
}

TargetRun MakeRun(const std::string& target, MetricKind metric,
                  const std::vector<Interaction>& stream,
                  const std::vector<double>& scores,
                  const std::vector<double>& truth) {
  TargetRun run{target, metric, {}};
  run.records.reserve(stream.size());
  for (std::size_t i = 0; i < stream.size(); ++i) {
    run.records.push_back({stream[i].user_id, scores[i], truth[i], stream[i].cohort});
  }
  return run;
}

}  // namespace

EvalReport BuildReport(const ExperimentConfig& config, const DualHeadModel& model,
                       ScoreHead head, const DualHeadModel* baseline,
                       const std::vector<Interaction>& stream) {
  for (const DualHeadModel* m : {&model, baseline}) {
    if (m == nullptr) continue;
    for (std::size_t i = 0; i < stream.size(); ++i) {
      if (stream[i].features.size() != m->input_dim()) {
        throw ValidationError("checkpoint expects " + std::to_string(m->input_dim()) +
                              " features but stream row " + std::to_string(i) +
                              " has " + std::to_string(stream[i].features.size()));
      }
    }
  }
  const std::vector<double> scores = Score(model, head, stream);
  std::vector<double> base_scores;
  if (baseline != nullptr) base_scores = Score(*baseline, ScoreHead::kRegression, stream);

  std::vector<double> y, b;
  for (const Interaction& r : stream) {
    y.push_back(r.y);
    b.push_back(r.b);
  }
  const std::vector<double> aff = AffinityLabels(stream);

  std::vector<std::string> cohorts;
  for (const Cohort& c : config.population.cohorts) cohorts.push_back(c.name);
  EvalOptions options{config.eval.pairs_per_user, config.seed};

  EvalReport report;
  const std::tuple<const char*, MetricKind, const std::vector<double>*> targets[] = {
      {"y", MetricKind::kURegAuc, &y},
      {"b", MetricKind::kUauc, &b},
      {"affinity", MetricKind::kUauc, &aff},
  };
  for (const auto& [name, metric, truth] : targets) {
    const TargetRun run = MakeRun(name, metric, stream, scores, *truth);
    std::optional<TargetRun> base;
    if (baseline != nullptr) base = MakeRun(name, metric, stream, base_scores, *truth);
    auto rows = CohortReport(run, base ? &*base : nullptr, cohorts, options);
    report.rows.insert(report.rows.end(), rows.begin(), rows.end());
  }
  return report;
}

EvalReport CmdEval(const ExperimentConfig& config, const std::string& checkpoint,
                   const std::string& stream_path,
                   const std::optional<std::string>& baseline_checkpoint,
                   const std::string& out_dir, std::ostream& log) {
  const DualHeadModel model = LoadModel(io::ReadFile(checkpoint));
  std::optional<DualHeadModel> baseline;
  if (baseline_checkpoint) baseline = LoadModel(io::ReadFile(*baseline_checkpoint));
  const std::vector<Interaction> stream = LoadStream(stream_path);
  if (stream.empty()) throw ValidationError("empty stream");

  const EvalReport report = BuildReport(config, model, ResolveScoreHead(config),
                                        baseline ? &*baseline : nullptr, stream);
  EnsureDir(out_dir);
  const std::string csv_path = Join(out_dir, "report.csv");
  const std::string json_path = Join(out_dir, "report.json");
  {
    auto out = OpenOut(csv_path);
    report.WriteCsv(out);
  }
  {
    auto out = OpenOut(json_path);
    report.WriteJson(out);
  }
  for (const auto& p : {csv_path, json_path}) WriteSidecar(config, p, "eval");
  report.WriteCsv(log);
  return report;
}

}  // namespace pctl
