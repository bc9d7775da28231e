// tests/test_cli.cc


// Copyright 2026  The ldadnn Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.


#include <string>
#include <vector>

#include "cli_runner.h"
#include "doctest.h"
#include "ldadnn/io.h"
#include "oracles.h"

namespace {

const std::string kCli = LDADNN_CLI_PATH;

oracle::CliResult Cli(const oracle::TempDir &dir, const std::vector<std::string> &args) {
  return oracle::RunCli(kCli, args, dir.path().string());
}

// Small labelled corpus plus its bags.
void Prepare(const oracle::TempDir &dir) {
  REQUIRE(Cli(dir, {"synth", "--out", "feat.jsonl", "--docs", "40", "--seed", "5"}).status == 0);
  REQUIRE(Cli(dir, {"train-gmm", "--features", "feat.jsonl", "--components", "16", "--out",
                    "gmm.json"})
              .status == 0);
  REQUIRE(Cli(dir, {"quantize", "--gmm", "gmm.json", "--features", "feat.jsonl", "--bags-out",
                    "bags.jsonl"})
              .status == 0);
}

}  // namespace

TEST_CASE("train-lda is byte-identical on rerun") {
  oracle::TempDir dir;
  Prepare(dir);
  const std::vector<std::string> args = {"train-lda", "--bags", "bags.jsonl", "--k", "4",
                                         "--seed", "7", "--out", "lda4.json"};
  REQUIRE(Cli(dir, args).status == 0);
  const std::string first = oracle::Slurp(dir.File("lda4.json"));
  REQUIRE(Cli(dir, args).status == 0);
  CHECK(oracle::Slurp(dir.File("lda4.json")) == first);
  const auto json = ldadnn::Json::parse(first);
  CHECK(json["meta"]["seed"] == 7);
  CHECK(json["meta"]["stage"] == "train-lda");
}

TEST_CASE("entropy of a one-hot corpus prints 0.0") {
  oracle::TempDir dir;
  ldadnn::WriteFileAtomic(
      dir.File("lda.json"),
      R"({"K":2,"V":4,"alpha":0.5,"log_beta":[[-0.6931471805599453,-0.6931471805599453,null,null],)"
      R"([null,null,-0.6931471805599453,-0.6931471805599453]]})");
  ldadnn::WriteFileAtomic(dir.File("bags.jsonl"),
                          "{\"id\":\"a\",\"counts\":[3,1,0,0]}\n"
                          "{\"id\":\"b\",\"counts\":[0,0,2,5]}\n");
  const auto r = Cli(dir, {"entropy", "--model", "lda.json", "--bags", "bags.jsonl",
                           "--theta-excludes-prior"});
  CHECK(r.status == 0);
  CHECK(r.out == "0.0\n");
  // The default theta keeps the prior mass and is never exactly one-hot.
  const auto d = Cli(dir, {"entropy", "--model", "lda.json", "--bags", "bags.jsonl"});
  CHECK(d.status == 0);
  CHECK(std::stod(d.out) > 0.0);
}

TEST_CASE("flag errors exit 2, data errors exit 1, one line each") {
  oracle::TempDir dir;
  Prepare(dir);
  auto one_line = [](const std::string &err) {
    const auto json = ldadnn::Json::parse(err);
    return err.find('\n') == err.size() - 1 && json.contains("error");
  };
  const auto missing = Cli(dir, {"train-lda", "--bags", "bags.jsonl", "--out", "x.json"});
  CHECK(missing.status == 2);
  CHECK(one_line(missing.err));
  const auto unknown = Cli(dir, {"train-lda", "--bags", "bags.jsonl", "--k", "2", "--out",
                                 "x.json", "--no-such-flag"});
  CHECK(unknown.status == 2);
  const auto bad_data = Cli(dir, {"train-lda", "--bags", "feat.jsonl", "--k", "2", "--out", "x.json"});
  CHECK(bad_data.status == 1);
  CHECK(one_line(bad_data.err));
  CHECK(ldadnn::Json::parse(bad_data.err)["error"] == "parse");
  const auto absent = Cli(dir, {"assign", "--model", "none.json", "--bags", "bags.jsonl", "--out", "a.jsonl"});
  CHECK(absent.status == 1);
  CHECK_FALSE(std::filesystem::exists(dir.File("x.json")));
}

TEST_CASE("no stage writes one of its inputs") {
  oracle::TempDir dir;
  Prepare(dir);
  const std::string before = oracle::Slurp(dir.File("bags.jsonl"));
  const auto r = Cli(dir, {"train-lda", "--bags", "bags.jsonl", "--k", "2", "--out", "./bags.jsonl"});
  CHECK(r.status == 2);
  CHECK(oracle::Slurp(dir.File("bags.jsonl")) == before);
  CHECK(Cli(dir, {"quantize", "--gmm", "gmm.json", "--features", "feat.jsonl", "--bags-out",
                  "b.jsonl", "--symbols-out", "b.jsonl"})
            .status == 2);
}

TEST_CASE("flags override the manifest, which overrides defaults") {
  oracle::TempDir dir;
  Prepare(dir);
  ldadnn::WriteFileAtomic(dir.File("m.json"),
                          R"({"seed": 11, "stages": {"train-lda": {"k": 3, "max-em-iters": 2}}})");
  REQUIRE(Cli(dir, {"train-lda", "--bags", "bags.jsonl", "--out", "m.json.out", "--manifest",
                    "m.json"})
              .status == 0);
  auto model = ldadnn::ReadJsonFile(dir.File("m.json.out"));
  CHECK(model["K"] == 3);
  CHECK(model["meta"]["seed"] == 11);
  REQUIRE(Cli(dir, {"train-lda", "--bags", "bags.jsonl", "--out", "k5.json", "--k", "5",
                    "--seed", "2", "--manifest", "m.json"})
              .status == 0);
  model = ldadnn::ReadJsonFile(dir.File("k5.json"));
  CHECK(model["K"] == 5);
  CHECK(model["meta"]["seed"] == 2);
}

TEST_CASE("pipeline runs every stage and network stages train") {
  oracle::TempDir dir;
  ldadnn::WriteFileAtomic(dir.File("manifest.json"), R"({
    "seed": 3,
    "stages": {"augment-train": {"epochs": 3, "hidden": [16]}},
    "steps": [
      {"command": "synth", "args": {"out": "feat.jsonl", "docs": 40}},
      {"command": "train-gmm", "args": {"features": "feat.jsonl", "components": 8, "out": "gmm.json"}},
      {"command": "quantize", "args": {"gmm": "gmm.json", "features": "feat.jsonl", "bags-out": "bags.jsonl"}},
      {"command": "train-lda", "args": {"bags": "bags.jsonl", "k": 2, "out": "lda2.json"}},
      {"command": "train-lda", "args": {"bags": "bags.jsonl", "k": 4, "out": "lda4.json"}},
      {"command": "assign", "args": {"model": "lda2.json", "bags": "bags.jsonl", "out": "a2.jsonl"}},
      {"command": "assign", "args": {"model": "lda4.json", "bags": "bags.jsonl", "out": "a4.jsonl"}},
      {"command": "entropy", "args": {"assign": "a4.jsonl", "out": "entropy4.json"}},
      {"command": "filter", "args": {"assign-a": "a2.jsonl", "assign-b": "a4.jsonl", "target-frac": 0.6, "out": "filter.jsonl"}},
      {"command": "stats", "args": {"assign": "a4.jsonl", "groups-from": "feat.jsonl", "top-n": 2, "out": "dist.csv"}},
      {"command": "augment-train", "args": {"features": "feat.jsonl", "out": "base.json", "metrics-out": "base.csv"}},
      {"command": "augment-train", "args": {"features": "feat.jsonl", "assign": "a4.jsonl", "baseline": "base.json", "out": "ldat.json"}},
      {"command": "eval", "args": {"net": "ldat.json", "features": "feat.jsonl", "assign": "a4.jsonl", "out": "eval.json"}}
    ]})");
  const auto r = oracle::RunCli(kCli, {"pipeline", "--manifest", "manifest.json"}, dir.path().string());
  CHECK(r.status == 0);
  for (const auto *f : {"gmm.json", "bags.jsonl", "lda2.json", "a4.jsonl", "filter.jsonl",
                        "dist.csv", "base.json", "ldat.json", "eval.json", "entropy4.json"})
    CHECK(std::filesystem::exists(dir.File(f)));
  const auto net = ldadnn::ReadJsonFile(dir.File("ldat.json"));
  CHECK(net["domain_dim"] == 4);
  CHECK(net["hidden_dims"] == ldadnn::Json::array({16}));
  CHECK(oracle::Slurp(dir.File("dist.csv")).rfind("# {\"seed\":3", 0) == 0);

  ldadnn::WriteFileAtomic(dir.File("bad.json"),
                          R"({"steps": [{"command": "train-lda", "args": {"bags": "bags.jsonl"}}]})");
  CHECK(oracle::RunCli(kCli, {"pipeline", "--manifest", "bad.json"}, dir.path().string()).status == 2);
}
