/*
 * Copyright 2026 The ctxkgc Authors.
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

#include "commands.h"

#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/ostream.h>
#include <json.hpp>

#include "ctxkgc/errors.h"
#include "ctxkgc/evaluator.h"
#include "ctxkgc/ingest.h"
#include "ctxkgc/mock_models.h"
#include "ctxkgc/parallel.h"
#include "ctxkgc/random.h"
#include "ctxkgc/remote_model.h"
#include "ctxkgc/selector.h"
#include "ctxkgc/snapshot.h"
#include "ctxkgc/synthetic.h"
#include "ctxkgc/verbalizer.h"

namespace ctxkgc::cli {

using json = nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct CommonFlags {
  std::string config_path;
  std::string ablation;
};

RunConfig LoadEffectiveConfig(const CommonFlags& flags) {
  RunConfig config = LoadRunConfig(flags.config_path);
  if (!flags.ablation.empty()) {
    const auto strategy = ParseStrategy(flags.ablation);
    if (!strategy) throw ConfigError(fmt::format("unknown ablation '{}'", flags.ablation));
    config.selector.strategy = *strategy;
  }
  return config;
}

void WriteText(const fs::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << text;
  if (!out) throw Error(fmt::format("cannot write {}", path.string()));
}

void WriteJson(const fs::path& path, const json& j) { WriteText(path, j.dump(2) + "\n"); }

// Creates the output directory and records the effective config in it.
void PrepareOutput(const RunConfig& config) {
  std::error_code ec;
  fs::create_directories(config.output_dir, ec);
  if (ec) {
    throw ConfigError(
        fmt::format("cannot create output dir {}: {}", config.output_dir.string(), ec.message()));
  }
  WriteJson(config.output_dir / "run_config.json", RunConfigToJson(config));
}

KnowledgeGraph LoadGraph(const RunConfig& config, IngestReport* report = nullptr) {
  const DatasetPaths& d = config.dataset;
  if (d.train.empty() || d.valid.empty() || d.test.empty()) {
    throw ConfigError("dataset.train, dataset.valid and dataset.test are required");
  }
  for (const fs::path* p : {&d.train, &d.valid, &d.test}) {
    if (!fs::is_regular_file(*p)) {
      throw ConfigError(fmt::format("dataset file {} does not exist", p->string()));
    }
  }
  IngestOptions options;
  options.reciprocal_prefix = config.reciprocal_prefix;
  return Ingest(d, options, report);
}

VerbalizerOptions MakeVerbalizerOptions(const RunConfig& config, SequenceModel* model) {
  VerbalizerOptions v;
  v.use_descriptions = config.verbalizer.use_descriptions;
  v.budget = config.verbalizer.budget;
  v.separator = config.verbalizer.separator;
  if (config.verbalizer.token_counter == "backend") {
    if (model == nullptr) throw ConfigError("token_counter 'backend' needs a backend");
    v.counter = [model](std::string_view text) { return model->CountTokens(text); };
  }
  return v;
}

std::string Hex(std::uint64_t v) { return fmt::format("{:016x}", v); }

json CountsJson(const KnowledgeGraph& kg) {
  return json{{"entities", kg.entity_count()},
              {"relations", kg.relation_count()},
              {"train", kg.split(Split::kTrain).size()},
              {"valid", kg.split(Split::kValid).size()},
              {"test", kg.split(Split::kTest).size()}};
}

void PrintCounts(const KnowledgeGraph& kg, std::ostream& out) {
  fmt::print(out, "entities: {}\nrelations: {}\n", kg.entity_count(), kg.relation_count());
  for (Split s : kAllSplits) fmt::print(out, "{}: {}\n", SplitName(s), kg.split(s).size());
}

json CardinalityJson(const KnowledgeGraph& kg, double threshold) {
  std::map<std::string, std::size_t> classes;
  for (std::size_t r = 0; r < kg.relation_count(); ++r) {
    const RelationId rel = RelationId::Base(static_cast<std::uint32_t>(r));
    if (RelationStats(kg, rel).triples == 0) {
      ++classes["unseen"];
    } else {
      ++classes[std::string(CardinalityName(ClassifyCardinality(kg, rel, threshold)))];
    }
  }
  return classes;
}

int CmdIngest(const CommonFlags& flags, std::ostream& out) {
  const RunConfig config = LoadEffectiveConfig(flags);
  IngestReport report;
  const KnowledgeGraph kg = LoadGraph(config, &report);
  PrepareOutput(config);
  const std::string bytes = SerializeGraph(kg.data());
  const fs::path snapshot = config.output_dir / "graph.snapshot";
  WriteText(snapshot, bytes);
  json stats = CountsJson(kg);
  stats["duplicates"] = {{"train", report.duplicates[0]},
                         {"valid", report.duplicates[1]},
                         {"test", report.duplicates[2]}};
  stats["overlaps"] = {{"train_valid", report.train_valid_overlap},
                       {"train_test", report.train_test_overlap},
                       {"valid_test", report.valid_test_overlap}};
  stats["descriptions"] = report.descriptions;
  stats["fingerprint"] = Hex(Fingerprint(bytes));
  WriteJson(config.output_dir / "stats.json", stats);
  PrintCounts(kg, out);
  fmt::print(out, "snapshot: {}\nfingerprint: {}\n", snapshot.string(),
             stats["fingerprint"].get<std::string>());
  return kExitOk;
}

int CmdStats(const CommonFlags& flags, std::ostream& out) {
  const RunConfig config = LoadEffectiveConfig(flags);
  const KnowledgeGraph kg = LoadGraph(config);
  PrepareOutput(config);
  json stats = CountsJson(kg);
  stats["cardinality"] = CardinalityJson(kg, config.selector.cardinality_threshold);
  WriteJson(config.output_dir / "stats.json", stats);
  PrintCounts(kg, out);
  for (const auto& [name, count] : stats["cardinality"].items()) {
    fmt::print(out, "relations {}: {}\n", name, count.get<std::size_t>());
  }
  return kExitOk;
}

int CmdEmitTrain(const CommonFlags& flags, std::ostream& out) {
  const RunConfig config = LoadEffectiveConfig(flags);
  const KnowledgeGraph kg = LoadGraph(config);
  PrepareOutput(config);
  std::unique_ptr<SequenceModel> model;
  if (config.verbalizer.token_counter == "backend") {
    model = MakeModel(config.backend, config.verbalizer, kg);
  }
  const VerbalizerOptions verbalizer = MakeVerbalizerOptions(config, model.get());
  const std::vector<Query> queries = DirectedQueries(kg, Split::kTrain);
  const fs::path path = config.output_dir / "train_corpus.jsonl";
  std::ofstream corpus(path, std::ios::binary | std::ios::trunc);
  if (!corpus) throw Error(fmt::format("cannot write {}", path.string()));

  std::size_t truncated = 0;
  OrderedParallelFor<std::pair<std::string, bool>>(
      queries.size(), config.workers,
      [&](std::size_t i) {
        Rng rng(DeriveSeed(config.selector.seed, SeedStream::kTrainEmission,
                           static_cast<std::uint64_t>(Split::kTrain), i));
        const TrainingPair pair =
            RenderTrainingPair(kg, queries[i], config.selector, verbalizer, rng);
        if (BundleLeaksTarget(queries[i], pair.bundle)) {
          throw DataError(fmt::format("training record {} leaks its target", i));
        }
        return std::pair(json{{"input", pair.input}, {"output", pair.output}}.dump(),
                         pair.verbalized.truncated);
      },
      [&](std::size_t, std::pair<std::string, bool> record) {
        corpus << record.first << '\n';
        truncated += record.second ? 1 : 0;
      });
  corpus.close();
  if (!corpus) throw Error(fmt::format("cannot write {}", path.string()));
  fmt::print(out, "records: {}\ntruncated: {}\nleak check: pass\ncorpus: {}\n", queries.size(),
             truncated, path.string());
  return kExitOk;
}

struct ExplainFlags {
  std::string head;
  std::string relation;
  bool reciprocal = false;
  std::string gold;
};

int CmdExplain(const CommonFlags& flags, const ExplainFlags& ex, std::ostream& out) {
  const RunConfig config = LoadEffectiveConfig(flags);
  const KnowledgeGraph kg = LoadGraph(config);
  PrepareOutput(config);
  const auto source = kg.find_entity(ex.head);
  if (!source) throw DataError(fmt::format("unknown entity '{}'", ex.head));
  auto relation = kg.find_relation(ex.relation);
  if (!relation) throw DataError(fmt::format("unknown relation '{}'", ex.relation));
  if (ex.reciprocal) relation = relation->reciprocal();
  Query query{*source, *relation, std::nullopt};
  if (!ex.gold.empty()) {
    query.gold = kg.find_entity(ex.gold);
    if (!query.gold) throw DataError(fmt::format("unknown entity '{}'", ex.gold));
  }

  std::unique_ptr<SequenceModel> model;
  if (config.verbalizer.token_counter == "backend") {
    model = MakeModel(config.backend, config.verbalizer, kg);
  }
  const VerbalizerOptions verbalizer = MakeVerbalizerOptions(config, model.get());
  Rng rng(DeriveSeed(config.selector.seed, SeedStream::kExplain, 0, 0));
  const ContextBundle bundle = SelectContext(kg, query, config.selector, rng);
  const VerbalizedInput input = Verbalize(kg, query, bundle, verbalizer);

  fmt::print(out, "query: {} | {}\n", kg.entity_mention(query.source),
             kg.relation_mention(query.relation));
  fmt::print(out, "source: {} (entity {})\n", kg.entity_key(query.source), query.source.value);
  fmt::print(out, "relation: {} (relation {}, {} prediction)\n",
             kg.relation_key(query.relation), query.relation.base(),
             query.relation.is_reciprocal() ? "head" : "tail");
  if (query.gold) {
    fmt::print(out, "gold: {} (entity {})\n", kg.entity_key(*query.gold), query.gold->value);
  }
  fmt::print(out, "strategy: {}\n", StrategyName(config.selector.strategy));
  const CardinalityStats stats = RelationStats(kg, query.relation);
  if (stats.triples == 0) {
    fmt::print(out, "cardinality: unseen in train\n");
  } else {
    fmt::print(out, "cardinality: {} (tails per head {:.3f}, heads per tail {:.3f})\n",
               CardinalityName(ClassifyCardinality(kg, query.relation,
                                                   config.selector.cardinality_threshold)),
               stats.tails_per_head(), stats.heads_per_tail());
  }
  fmt::print(out, "entity neighborhood: {} items\n", bundle.neighborhood.size());
  for (const NeighborhoodItem& n : bundle.neighborhood) {
    fmt::print(out, "  [relation {}{}, entity {}] {} | {}\n", n.relation.base(),
               n.relation.is_reciprocal() ? "^-1" : "", n.entity.value, n.relation_mention,
               n.entity_mention);
  }
  fmt::print(out, "relation context: {} items\n", bundle.relation_context.size());
  for (const RelationContextItem& c : bundle.relation_context) {
    fmt::print(out, "  [triple {} {} {}] {} | {}\n", kg.entity_key(c.triple.head),
               kg.relation_key(c.triple.relation), kg.entity_key(c.triple.tail),
               c.head_mention, c.tail_mention);
  }
  fmt::print(out, "verbalized input: {} tokens{}\n", input.token_count,
             input.truncated ? ", truncated" : "");
  fmt::print(out, "{}\n", input.text);
  return kExitOk;
}

struct EvaluateFlags {
  bool resume = false;
};

json MetricsJson(const Metrics& m) {
  json j{{"mrr", m.mrr},
         {"query_count", m.query_count},
         {"no_candidate_queries", m.no_candidate_queries}};
  for (std::size_t k = 0; k < kHitsAt.size(); ++k) {
    j[fmt::format("hits@{}", kHitsAt[k])] = m.hits[k];
  }
  return j;
}

int CmdEvaluate(const CommonFlags& flags, const EvaluateFlags& ev, std::ostream& out) {
  const RunConfig config = LoadEffectiveConfig(flags);
  const KnowledgeGraph kg = LoadGraph(config);
  const fs::path log_path = config.output_dir / "eval_log.jsonl";
  const fs::path checkpoint = config.output_dir / "eval_config.json";
  const json affecting = ResultAffectingJson(config);
  if (ev.resume && fs::exists(log_path)) {
    std::ifstream in(checkpoint);
    const json previous = json::parse(in, nullptr, false);
    if (!in || previous.is_discarded()) {
      throw ConfigError(fmt::format("cannot resume: {} is missing", checkpoint.string()));
    }
    if (previous != affecting) {
      throw ConfigError("cannot resume: the config differs from the interrupted run");
    }
  }
  PrepareOutput(config);
  WriteJson(checkpoint, affecting);

  std::unique_ptr<SequenceModel> model = MakeModel(config.backend, config.verbalizer, kg);
  EvaluationOptions options;
  options.split = config.evaluation.split;
  options.selector = config.selector;
  options.verbalizer = MakeVerbalizerOptions(config, model.get());
  options.candidates.samples = config.evaluation.sample_n;
  options.candidates.max_new_tokens = config.backend.max_new_tokens;
  options.candidates.length_normalize = config.backend.length_normalize;
  options.workers = config.workers;
  options.aggregation = config.evaluation.aggregation;
  options.log_path = log_path;
  options.resume = ev.resume;
  options.max_queries = config.evaluation.max_queries;
  const EvaluationResult result = Evaluate(kg, *model, options);

  json report{
      {"header",
       {{"strategy", StrategyName(config.selector.strategy)},
        {"ablation", flags.ablation.empty() ? json(nullptr) : json(flags.ablation)},
        {"backend", BackendName(config.backend.kind)},
        {"model", model->name()},
        {"split", SplitName(config.evaluation.split)},
        {"seed", config.selector.seed},
        {"sample_n", config.evaluation.sample_n},
        {"neighborhood_cap", config.selector.neighborhood_cap},
        {"relation_cap", config.selector.relation_cap},
        {"aggregation", AggregationName(config.evaluation.aggregation)}}},
      {"metrics", MetricsJson(result.metrics)},
      {"tail_prediction", MetricsJson(result.tail_metrics)},
      {"head_prediction", MetricsJson(result.head_metrics)},
      {"resumed_queries", result.resumed_queries},
  };
  WriteJson(config.output_dir / "metrics.json", report);
  fmt::print(out, "strategy: {}\nbackend: {}\nsplit: {}\nqueries: {}\n",
             StrategyName(config.selector.strategy), BackendName(config.backend.kind),
             SplitName(config.evaluation.split), result.metrics.query_count);
  if (result.resumed_queries > 0) fmt::print(out, "resumed: {}\n", result.resumed_queries);
  fmt::print(out, "mrr: {:.6f}\n", result.metrics.mrr);
  for (std::size_t k = 0; k < kHitsAt.size(); ++k) {
    fmt::print(out, "hits@{}: {:.6f}\n", kHitsAt[k], result.metrics.hits[k]);
  }
  return kExitOk;
}

int CmdServeCheck(const CommonFlags& flags, std::ostream& out) {
  const RunConfig config = LoadEffectiveConfig(flags);
  PrepareOutput(config);
  if (config.backend.kind != BackendKind::kRemote) {
    fmt::print(out, "backend: {} (in-process)\nstatus: ok\n", BackendName(config.backend.kind));
    return kExitOk;
  }
  RemoteModelOptions options;
  options.endpoint = config.backend.url;
  options.timeout = std::chrono::milliseconds(config.backend.timeout_ms);
  options.max_attempts = 1;
  RemoteModel model(options);
  const HealthStatus health = model.Health();
  fmt::print(out, "backend: {}\nstatus: {}\nmodel: {}\n", config.backend.url, health.status,
             health.model);
  if (health.status != "ok") throw BackendError(fmt::format("backend reports '{}'", health.status));
  return kExitOk;
}

struct SynthFlags {
  std::string out_dir;
  SyntheticSpec spec;
};

int CmdSynth(const SynthFlags& flags, std::ostream& out) {
  const fs::path dir = fs::absolute(flags.out_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw ConfigError(fmt::format("cannot create {}: {}", dir.string(), ec.message()));
  const DatasetPaths paths = WriteDataset(GenerateSynthetic(flags.spec), dir);
  RunConfig config;
  config.dataset = paths;
  config.selector.seed = flags.spec.seed;
  config.output_dir = dir / "out";
  WriteJson(dir / "config.json", RunConfigToJson(config));
  fmt::print(out, "dataset: {}\nconfig: {}\n", dir.string(), (dir / "config.json").string());
  return kExitOk;
}

}  // namespace

std::unique_ptr<SequenceModel> MakeModel(const BackendConfig& backend,
                                         const VerbalizerConfig& verbalizer,
                                         const KnowledgeGraph& kg) {
  switch (backend.kind) {
    case BackendKind::kNeighborCopy:
      return std::make_unique<MockNeighborCopyModel>(kg, verbalizer.separator);
    case BackendKind::kUniform:
      return std::make_unique<UniformRandomModel>(kg);
    case BackendKind::kOracle:
      return std::make_unique<GoldOracleModel>(kg, verbalizer.separator);
    case BackendKind::kRemote: {
      RemoteModelOptions options;
      options.endpoint = backend.url;
      options.timeout = std::chrono::milliseconds(backend.timeout_ms);
      options.max_batch = backend.max_batch;
      return std::make_unique<RemoteModel>(options);
    }
  }
  throw ConfigError("unknown backend");
}

int RunCli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Context-aware knowledge graph completion toolkit"};
  app.name(args.empty() ? "ctxkgc" : args[0]);
  app.require_subcommand(1);

  CommonFlags common;
  auto add_common = [&](CLI::App* sub, bool ablation) {
    sub->add_option("-c,--config", common.config_path, "Run config (JSON)")
        ->required()
        ->check(CLI::ExistingFile);
    if (ablation) {
      sub->add_option("--ablation", common.ablation, "Override the sampling strategy")
          ->check(CLI::IsMember({"no-relation-context", "random-sampling"}));
    }
  };

  auto* ingest = app.add_subcommand("ingest", "Ingest the dataset, write snapshot and stats");
  add_common(ingest, false);
  auto* stats = app.add_subcommand("stats", "Print dataset and relation cardinality stats");
  add_common(stats, false);
  auto* emit = app.add_subcommand("emit-train", "Write the training corpus");
  add_common(emit, true);

  ExplainFlags explain_flags;
  auto* explain = app.add_subcommand("explain", "Show the sampled context for one query");
  add_common(explain, true);
  explain->add_option("--head", explain_flags.head, "Source entity id")->required();
  explain->add_option("--relation", explain_flags.relation, "Relation id")->required();
  explain->add_flag("--reciprocal", explain_flags.reciprocal,
                    "Use the reciprocal relation (head prediction)");
  explain->add_option("--gold", explain_flags.gold, "Target entity id to exclude");

  EvaluateFlags evaluate_flags;
  auto* evaluate = app.add_subcommand("evaluate", "Run filtered ranking evaluation");
  add_common(evaluate, true);
  evaluate->add_flag("--resume", evaluate_flags.resume, "Continue an interrupted run");

  auto* serve_check = app.add_subcommand("serve-check", "Ping the model backend");
  add_common(serve_check, false);

  SynthFlags synth_flags;
  auto* synth = app.add_subcommand("synth", "Generate a synthetic dataset and config");
  synth->add_option("--out", synth_flags.out_dir, "Output directory")->required();
  synth->add_option("--entities", synth_flags.spec.entities);
  synth->add_option("--relations", synth_flags.spec.relations);
  synth->add_option("--train", synth_flags.spec.train);
  synth->add_option("--valid", synth_flags.spec.valid);
  synth->add_option("--test", synth_flags.spec.test);
  synth->add_option("--seed", synth_flags.spec.seed);
  synth->add_flag("--descriptions", synth_flags.spec.descriptions);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  if (!reversed.empty()) reversed.pop_back();
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (ingest->parsed()) return CmdIngest(common, out);
    if (stats->parsed()) return CmdStats(common, out);
    if (emit->parsed()) return CmdEmitTrain(common, out);
    if (explain->parsed()) return CmdExplain(common, explain_flags, out);
    if (evaluate->parsed()) return CmdEvaluate(common, evaluate_flags, out);
    if (serve_check->parsed()) return CmdServeCheck(common, out);
    if (synth->parsed()) return CmdSynth(synth_flags, out);
  } catch (const ConfigError& e) {
    fmt::print(err, "config error: {}\n", e.what());
    return kExitConfig;
  } catch (const DataError& e) {
    fmt::print(err, "data error: {}\n", e.what());
    return kExitData;
  } catch (const BackendError& e) {
    fmt::print(err, "backend error: {}\n", e.what());
    return kExitBackend;
  } catch (const std::exception& e) {
    fmt::print(err, "error: {}\n", e.what());
    return kExitFailure;
  }
  return kExitConfig;
}

}  // namespace ctxkgc::cli
