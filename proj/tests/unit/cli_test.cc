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

#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>
#include <json.hpp>

#include "commands.h"
#include "ctxkgc/errors.h"
#include "ctxkgc/mock_models.h"
#include "ctxkgc/synthetic.h"
#include "run_config.h"
#include "stub_server.h"
#include "test_util.h"

namespace ctxkgc::cli {
namespace {

using json = nlohmann::json;
using testing::ReadFile;
using testing::TempDir;
using testing::WriteFile;

struct RunResult {
  int code;
  std::string out;
  std::string err;
};

RunResult RunTool(std::vector<std::string> args) {
  args.insert(args.begin(), "ctxkgc");
  std::ostringstream out, err;
  const int code = RunCli(args, out, err);
  return {code, out.str(), err.str()};
}

std::vector<std::string> Lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

// Synthetic dataset under dir/data plus a config at dir/config.json that
// refers to it with relative paths.
class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    SyntheticSpec spec;
    WriteDataset(GenerateSynthetic(spec), dir_ / "data");
    config_ = {
        {"dataset",
         {{"train", "data/train.txt"},
          {"valid", "data/valid.txt"},
          {"test", "data/test.txt"},
          {"entity_mentions", "data/entity_mentions.txt"},
          {"relation_mentions", "data/relation_mentions.txt"}}},
        {"seed", 3},
        {"selector", {{"neighborhood_cap", 10}, {"relation_cap", 20}}},
        {"evaluation", {{"sample_n", 40}, {"max_queries", 30}}},
        {"workers", 2},
        {"output_dir", "out"},
    };
  }

  std::string WriteConfig(const json& j, const std::string& name = "config.json") {
    WriteFile(dir_ / name, j.dump(2));
    return (dir_ / name).string();
  }
  std::string Config() { return WriteConfig(config_); }
  std::filesystem::path Out() const { return dir_ / "out"; }

  TempDir dir_;
  json config_;
};

TEST_F(CliTest, ConfigRoundTripAndRelativePaths) {
  const RunConfig c = LoadRunConfig(Config());
  EXPECT_EQ(c.dataset.train, dir_ / "data/train.txt");
  EXPECT_EQ(c.output_dir, dir_ / "out");
  EXPECT_EQ(c.selector.neighborhood_cap, 10u);
  EXPECT_EQ(c.selector.seed, 3u);
  EXPECT_EQ(c.evaluation.max_queries, std::optional<std::size_t>(30));
  const json j = RunConfigToJson(c);
  const RunConfig back = RunConfigFromJson(j, "/elsewhere");
  EXPECT_EQ(RunConfigToJson(back), j);
}

TEST_F(CliTest, ConfigErrors) {
  json bad = config_;
  bad["selector"]["neighbourhood_cap"] = 5;
  EXPECT_THROW(LoadRunConfig(WriteConfig(bad)), ConfigError);
  bad = config_;
  bad["selector"]["relation_cap"] = "many";
  EXPECT_THROW(LoadRunConfig(WriteConfig(bad)), ConfigError);
  bad = config_;
  bad["backend"] = {{"kind", "remote"}};
  EXPECT_THROW(LoadRunConfig(WriteConfig(bad)), ConfigError);
  bad = config_;
  bad["selector"]["strategy"] = "greedy";
  EXPECT_THROW(LoadRunConfig(WriteConfig(bad)), ConfigError);
  WriteFile(dir_ / "broken.json", "{ not json");
  EXPECT_THROW(LoadRunConfig(dir_ / "broken.json"), ConfigError);

  EXPECT_EQ(RunTool({}).code, kExitConfig);
  EXPECT_EQ(RunTool({"frobnicate"}).code, kExitConfig);
  EXPECT_EQ(RunTool({"--help"}).code, kExitOk);
  EXPECT_EQ(RunTool({"ingest", "--config", (dir_ / "missing.json").string()}).code, kExitConfig);
  EXPECT_EQ(RunTool({"ingest", "--config", WriteConfig(bad)}).code, kExitConfig);
  EXPECT_EQ(RunTool({"evaluate", "--config", Config(), "--ablation", "bogus"}).code, kExitConfig);
}

TEST_F(CliTest, EmptyDatasetConfigIsAUsageError) {
  json empty = config_;
  empty.erase("dataset");
  const RunResult r = RunTool({"ingest", "-c", WriteConfig(empty)});
  EXPECT_EQ(r.code, kExitConfig);
  EXPECT_NE(r.err.find("config error"), std::string::npos);
}

TEST_F(CliTest, MalformedDataIsADataError) {
  WriteFile(dir_ / "data/train.txt", "a\tb\n");
  EXPECT_EQ(RunTool({"ingest", "-c", Config()}).code, kExitData);
}

TEST_F(CliTest, IngestPrintsCountsAndIsReproducible) {
  const RunResult r = RunTool({"ingest", "-c", Config()});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const auto lines = Lines(r.out);
  EXPECT_EQ(lines[0], "entities: 100");
  EXPECT_EQ(lines[1], "relations: 8");
  EXPECT_EQ(lines[2], "train: 400");
  EXPECT_EQ(lines[3], "valid: 50");
  EXPECT_EQ(lines[4], "test: 50");
  const std::string snapshot = ReadFile(Out() / "graph.snapshot");
  EXPECT_FALSE(snapshot.empty());
  EXPECT_TRUE(std::filesystem::exists(Out() / "run_config.json"));
  const json stats = json::parse(ReadFile(Out() / "stats.json"));
  EXPECT_EQ(stats["entities"], 100);

  const RunResult again = RunTool({"ingest", "-c", Config()});
  EXPECT_EQ(again.out, r.out);
  EXPECT_EQ(ReadFile(Out() / "graph.snapshot"), snapshot);
}

TEST_F(CliTest, Stats) {
  const RunResult r = RunTool({"stats", "-c", Config()});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_NE(r.out.find("relations 1-n: 2"), std::string::npos);
  EXPECT_TRUE(std::filesystem::exists(Out() / "run_config.json"));
}

TEST_F(CliTest, EmitTrainSingleTriple) {
  WriteFile(dir_ / "one.txt", "a\tr\tb\n");
  WriteFile(dir_ / "empty.txt", "");
  const json c = {{"dataset", {{"train", "one.txt"}, {"valid", "empty.txt"}, {"test", "empty.txt"}}}};
  const RunResult r = RunTool({"emit-train", "-c", WriteConfig(c)});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const auto lines = Lines(ReadFile(Out() / "train_corpus.jsonl"));
  ASSERT_EQ(lines.size(), 2u);
  EXPECT_EQ(json::parse(lines[0]), json({{"input", "query: a | r"}, {"output", "b"}}));
  EXPECT_EQ(json::parse(lines[1]), json({{"input", "query: b | reverse of r"}, {"output", "a"}}));
}

TEST_F(CliTest, EmitTrainCountsAndAblation) {
  RunResult r = RunTool({"emit-train", "-c", Config()});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  auto lines = Lines(ReadFile(Out() / "train_corpus.jsonl"));
  EXPECT_EQ(lines.size(), 800u);
  std::size_t with_context = 0;
  for (const auto& l : lines) {
    with_context += json::parse(l)["input"].get<std::string>().find("relation context:") !=
                    std::string::npos;
  }
  EXPECT_GT(with_context, 0u);
  const std::string first = ReadFile(Out() / "train_corpus.jsonl");

  r = RunTool({"emit-train", "-c", Config(), "--ablation", "no-relation-context"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  lines = Lines(ReadFile(Out() / "train_corpus.jsonl"));
  EXPECT_EQ(lines.size(), 800u);
  for (const auto& l : lines) {
    EXPECT_EQ(l.find("relation context:"), std::string::npos);
  }
  const json effective = json::parse(ReadFile(Out() / "run_config.json"));
  EXPECT_EQ(effective["selector"]["strategy"], "no-relation-context");

  // Deterministic across runs and worker counts.
  RunTool({"emit-train", "-c", Config()});
  EXPECT_EQ(ReadFile(Out() / "train_corpus.jsonl"), first);
  config_["workers"] = 1;
  RunTool({"emit-train", "-c", Config()});
  EXPECT_EQ(ReadFile(Out() / "train_corpus.jsonl"), first);
}

TEST_F(CliTest, Explain) {
  const RunResult r = RunTool({"explain", "-c", Config(), "--head", "e3", "--relation", "r1"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_EQ(r.out.rfind("query: entity 3 | relation 1\n", 0), 0u);
  EXPECT_NE(r.out.find("cardinality: 1-n"), std::string::npos);
  EXPECT_NE(r.out.find("verbalized input: "), std::string::npos);
  EXPECT_EQ(RunTool({"explain", "-c", Config(), "--head", "e3", "--relation", "r1"}).out, r.out);

  const RunResult rev =
      RunTool({"explain", "-c", Config(), "--head", "e3", "--relation", "r1", "--reciprocal"});
  EXPECT_EQ(rev.out.rfind("query: entity 3 | reverse of relation 1\n", 0), 0u);
  EXPECT_NE(rev.out.find("cardinality: n-1"), std::string::npos);

  EXPECT_EQ(RunTool({"explain", "-c", Config(), "--head", "nope", "--relation", "r1"}).code, kExitData);
}

TEST_F(CliTest, ExplainIsolatedEntity) {
  WriteFile(dir_ / "train.txt", "a\tr\tb\n");
  WriteFile(dir_ / "test.txt", "x\tr\ty\n");
  WriteFile(dir_ / "empty.txt", "");
  const json c = {{"dataset", {{"train", "train.txt"}, {"valid", "empty.txt"}, {"test", "test.txt"}}}};
  const RunResult r = RunTool({"explain", "-c", WriteConfig(c), "--head", "x", "--relation", "r"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_NE(r.out.find("entity neighborhood: 0 items"), std::string::npos);
  // The relation's only train triple is unrelated to x, so it is context.
  EXPECT_NE(r.out.find("relation context: 1 items"), std::string::npos);
  const RunResult lonely = RunTool({"explain", "-c", WriteConfig(c), "--head", "x", "--relation", "r",
                                "--ablation", "no-relation-context"});
  EXPECT_NE(lonely.out.find("relation context: 0 items"), std::string::npos);
  EXPECT_NE(lonely.out.find("\nquery: x | r\n"), std::string::npos);
}

TEST_F(CliTest, EvaluateWithOracleScoresOne) {
  config_["backend"] = {{"kind", "mock-oracle"}};
  const RunResult r = RunTool({"evaluate", "-c", Config()});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const json m = json::parse(ReadFile(Out() / "metrics.json"));
  EXPECT_EQ(m["metrics"]["mrr"], 1.0);
  EXPECT_EQ(m["metrics"]["hits@1"], 1.0);
  EXPECT_EQ(m["header"]["backend"], "mock-oracle");
  EXPECT_EQ(Lines(ReadFile(Out() / "eval_log.jsonl")).size(), 30u);
}

TEST_F(CliTest, AblationsShowInTheReportHeader) {
  std::set<std::string> strategies;
  std::set<std::string> logs;
  for (const std::string ablation : {"", "no-relation-context", "random-sampling"}) {
    std::vector<std::string> args = {"evaluate", "-c", Config()};
    if (!ablation.empty()) {
      args.push_back("--ablation");
      args.push_back(ablation);
    }
    const RunResult r = RunTool(args);
    ASSERT_EQ(r.code, kExitOk) << r.err;
    const json m = json::parse(ReadFile(Out() / "metrics.json"));
    strategies.insert(m["header"]["strategy"].get<std::string>());
    logs.insert(ReadFile(Out() / "eval_log.jsonl"));
  }
  EXPECT_EQ(strategies, (std::set<std::string>{"customized", "no-relation-context", "random"}));
  EXPECT_EQ(logs.size(), 3u);
}

TEST_F(CliTest, ResumedEvaluationMatchesUninterrupted) {
  config_["evaluation"].erase("max_queries");
  ASSERT_EQ(RunTool({"evaluate", "-c", Config()}).code, kExitOk);
  const std::string metrics = ReadFile(Out() / "metrics.json");
  const std::string log = ReadFile(Out() / "eval_log.jsonl");

  // Keep 37 complete lines and a torn one, as after a kill.
  const auto lines = Lines(log);
  std::string partial;
  for (std::size_t i = 0; i < 37; ++i) partial += lines[i] + "\n";
  partial += lines[37].substr(0, 20);
  WriteFile(Out() / "eval_log.jsonl", partial);

  const RunResult r = RunTool({"evaluate", "-c", Config(), "--resume"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_NE(r.out.find("resumed: 37"), std::string::npos);
  EXPECT_EQ(ReadFile(Out() / "eval_log.jsonl"), log);
  json a = json::parse(metrics), b = json::parse(ReadFile(Out() / "metrics.json"));
  EXPECT_EQ(a["metrics"], b["metrics"]);

  // A result-affecting change refuses to resume.
  config_["seed"] = 4;
  EXPECT_EQ(RunTool({"evaluate", "-c", Config(), "--resume"}).code, kExitConfig);
}

TEST_F(CliTest, PersistedConfigReproducesOutputs) {
  ASSERT_EQ(RunTool({"evaluate", "-c", Config(), "--ablation", "random-sampling"}).code, kExitOk);
  json persisted = json::parse(ReadFile(Out() / "run_config.json"));
  persisted["output_dir"] = (dir_ / "replay").string();
  ASSERT_EQ(RunTool({"evaluate", "-c", WriteConfig(persisted, "replay.json")}).code, kExitOk);
  EXPECT_EQ(ReadFile(dir_ / "replay/eval_log.jsonl"), ReadFile(Out() / "eval_log.jsonl"));
}

TEST_F(CliTest, ServeCheck) {
  EXPECT_EQ(RunTool({"serve-check", "-c", Config()}).code, kExitOk);

  const KnowledgeGraph kg = Ingest(LoadRunConfig(Config()).dataset);
  MockNeighborCopyModel model(kg);
  int dead_port = 0;
  {
    testing::StubServer server([&](httplib::Server& s) { testing::ServeModel(s, model, "stub-t5"); });
    dead_port = server.port();
    config_["backend"] = {{"kind", "remote"}, {"url", server.url()}};
    const RunResult r = RunTool({"serve-check", "-c", Config()});
    ASSERT_EQ(r.code, kExitOk) << r.err;
    EXPECT_NE(r.out.find("model: stub-t5"), std::string::npos);
    // The remote backend drives a full evaluation too.
    const RunResult e = RunTool({"evaluate", "-c", Config()});
    ASSERT_EQ(e.code, kExitOk) << e.err;
  }
  config_["backend"] = {{"kind", "remote"},
                        {"url", "http://127.0.0.1:" + std::to_string(dead_port)},
                        {"timeout_ms", 500}};
  const RunResult r = RunTool({"serve-check", "-c", Config()});
  EXPECT_EQ(r.code, kExitBackend);
  EXPECT_NE(r.err.find("backend error"), std::string::npos);
  EXPECT_EQ(RunTool({"evaluate", "-c", Config()}).code, kExitBackend);
}

TEST_F(CliTest, BackendTokenCounterSetsTheBudget) {
  // A tokenizer that counts characters, so the budget is checkable here.
  testing::StubServer server([](httplib::Server& s) {
    s.Post("/v1/tokenize", [](const httplib::Request& req, httplib::Response& res) {
      testing::StubServer::Reply(res, {{"count", json::parse(req.body)["text"].get<std::string>().size()}});
    });
  });
  config_["verbalizer"] = {{"budget", 120}};
  ASSERT_EQ(RunTool({"emit-train", "-c", Config()}).code, kExitOk);
  std::size_t over = 0;
  for (const auto& l : Lines(ReadFile(Out() / "train_corpus.jsonl"))) {
    over += json::parse(l)["input"].get<std::string>().size() > 120;
  }
  EXPECT_GT(over, 0u);

  config_["verbalizer"] = {{"budget", 120}, {"token_counter", "backend"}};
  config_["backend"] = {{"kind", "remote"}, {"url", server.url()}};
  const RunResult r = RunTool({"emit-train", "-c", Config()});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const auto lines = Lines(ReadFile(Out() / "train_corpus.jsonl"));
  EXPECT_EQ(lines.size(), 800u);
  for (const auto& l : lines) {
    EXPECT_LE(json::parse(l)["input"].get<std::string>().size(), 120u);
  }
}

TEST_F(CliTest, SynthWritesAUsableConfig) {
  const RunResult r = RunTool({"synth", "--out", (dir_ / "gen").string(), "--entities", "30",
                           "--relations", "4", "--train", "80", "--valid", "10", "--test", "10"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const RunResult s = RunTool({"ingest", "-c", (dir_ / "gen/config.json").string()});
  ASSERT_EQ(s.code, kExitOk) << s.err;
  EXPECT_EQ(Lines(s.out)[0], "entities: 30");
  EXPECT_EQ(RunTool({"synth", "--out", (dir_ / "bad").string(), "--entities", "1"}).code,
            kExitConfig);
}

}  // namespace
}  // namespace ctxkgc::cli
