// gazev.cc

// Copyright 2026  GAZEV-VC Authors

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

// Command-line front end: make-corpus, prep, train, convert, eval, report.

#include <cstdio>
#include <filesystem>
#include <map>
#include <optional>

#include "CLI11.hpp"
#include "gazev/binary-io.h"
#include "gazev/eval.h"
#include "gazev/pipeline.h"
#include "json.hpp"

namespace fs = std::filesystem;
using namespace gazev;

namespace {

std::string ResolveCheckpoint(const std::string &given, const Config &config) {
  if (!given.empty()) return given;
  std::string latest = LatestCheckpoint(config.GetString("train.out_dir"));
  if (latest.empty())
    GAZEV_ERR << "No checkpoint given and none found in "
              << config.GetString("train.out_dir");
  return latest;
}

void PrintSummary(const EvalReport &report) {
  std::printf("%-7s %-4s %5s %9s %9s %8s %8s %8s %8s\n", "group", "cat", "n",
              "mcd_id", "mcd_cyc", "sim_tgt", "sim_src", "gen_acc", "tgt_win");
  for (const CategorySummary &s : report.Summaries())
    std::printf("%-7s %-4s %5d %9.3f %9.3f %8.4f %8.4f %8.3f %8.3f\n",
                s.grouping.c_str(), s.category.c_str(), s.count, s.mcd_identity,
                s.mcd_cycle, s.emb_sim_target, s.emb_sim_source,
                s.gender_accuracy, s.target_wins);
  std::printf("held-out gender accuracy %.4f over %d utterances\n",
              report.heldout_gender_accuracy, report.heldout_utterances);
  std::printf("prior diversity (mean L1) %.6g\n", report.diversity);
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"Zero-shot voice conversion: corpus, training and evaluation"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path, checkpoint;
  std::optional<std::uint64_t> seed;
  app.add_option("--config", config_path, "Key-value configuration file")
      ->check(CLI::ExistingFile);
  app.add_option("--seed", seed, "Overrides the global seed key");
  app.add_option("--checkpoint", checkpoint,
                 "Checkpoint to resume or evaluate (default: latest in train.out_dir)");

  std::map<std::string, std::string> overrides;
  for (const Config::Entry &e : Config::Table()) {
    if (e.key == "seed") continue;  // --seed above
    app.add_option_function<std::string>(
        "--" + e.key,
        [&overrides, key = e.key](const std::string &v) { overrides[key] = v; },
        e.help + " [" + e.value + "]");
  }

  auto *make_corpus = app.add_subcommand("make-corpus", "Generate the synthetic corpus");
  auto *prep = app.add_subcommand("prep", "Fill the feature cache and compute statistics");
  auto *train = app.add_subcommand("train", "Train (resumes from --checkpoint if given)");

  auto *convert = app.add_subcommand("convert", "Convert one utterance");
  std::string source, out, target_gender, target_speaker;
  std::vector<std::string> target_refs;
  std::optional<std::uint64_t> prior_seed;
  convert->add_option("--source", source, "Source wav")->required()->check(CLI::ExistingFile);
  auto *refs_opt = convert->add_option("--target-ref", target_refs,
                                       "Reference wavs of the target speaker")
                       ->check(CLI::ExistingFile);
  auto *prior_opt = convert->add_option("--target-prior-seed", prior_seed,
                                        "Sample the target embedding from the prior");
  refs_opt->excludes(prior_opt);
  convert->add_option("--target-gender", target_gender, "Target gender")
      ->required()
      ->check(CLI::IsMember({"m", "f"}));
  convert->add_option("--target-speaker", target_speaker,
                      "Target speaker id (F0 statistics; required in baseline mode)");
  convert->add_option("--out", out, "Output wav")->required();

  auto *eval = app.add_subcommand("eval", "Run the evaluation protocol");
  auto *report = app.add_subcommand("report", "Re-emit summary and charts from eval rows");
  std::string format = "all";
  eval->add_option("--format", format, "csv, svg or all");
  report->add_option("--format", format, "csv, svg or all");

  CLI11_PARSE(app, argc, argv);

  try {
    Config config = Config::Defaults();
    if (!config_path.empty()) config.ReadFile(config_path);
    for (const auto &[k, v] : overrides) config.Set(k, v);
    if (seed) config.Set("seed", std::to_string(*seed));

    if (make_corpus->parsed()) {
      CorpusIndex index = MakeCorpus(config);
      std::printf("wrote %d speakers to %s\n", index.n(),
                  config.GetString("corpus.root").c_str());
    } else if (prep->parsed()) {
      Workspace ws = Prepare(config);
      std::printf("%d train, %zu seen, %zu unseen speakers; cache in %s\n",
                  ws.speakers.size(), ws.plan.seen_test.size(),
                  ws.plan.unseen_test.size(), ws.cache->dir().c_str());
    } else if (train->parsed()) {
      Workspace ws = Prepare(config);
      TrainResult r = RunTraining(ws, checkpoint);
      std::printf("final checkpoint %s\nmetrics %s\n", r.final_checkpoint.c_str(),
                  r.metrics_path.c_str());
    } else if (convert->parsed()) {
      TrainState state = LoadCheckpoint(ResolveCheckpoint(checkpoint, config));
      ConversionRequest req;
      req.source_path = source;
      req.target_refs = target_refs;
      req.target_prior_seed = prior_seed;
      req.target_gender = ParseGender(target_gender);
      req.target_speaker = target_speaker;
      Waveform wave = Convert(state, req, AnalysisParams::FromConfig(config));
      WriteWav(out, wave);
      std::printf("wrote %s (%.3f s)\n", out.c_str(), wave.Seconds());
    } else if (eval->parsed()) {
      TrainState state = LoadCheckpoint(ResolveCheckpoint(checkpoint, config));
      Workspace ws = Prepare(config);
      EvalConfig ec = EvalConfig::FromConfig(config);
      EvalReport r = RunEval(state, ws.index, ws.plan, ws.cache.get(), ec);
      for (const std::string &f : EmitReport(r, ec.out_dir, format))
        std::printf("wrote %s\n", f.c_str());
      PrintSummary(r);
    } else if (report->parsed()) {
      EvalConfig ec = EvalConfig::FromConfig(config);
      fs::path dir = ec.out_dir;
      auto bytes = ReadFileBytes((dir / "eval_rows.csv").string());
      EvalReport r;
      r.rows = RowsFromCsv(std::string(bytes.begin(), bytes.end()));
      if (fs::exists(dir / "eval_probes.json")) {
        auto pb = ReadFileBytes((dir / "eval_probes.json").string());
        auto j = nlohmann::json::parse(pb.begin(), pb.end());
        r.heldout_gender_accuracy = j.at("heldout_gender_accuracy");
        r.heldout_utterances = j.at("heldout_utterances");
        r.diversity = j.at("diversity");
      }
      for (const std::string &f : EmitReport(r, ec.out_dir, format))
        std::printf("wrote %s\n", f.c_str());
      PrintSummary(r);
    }
  } catch (const std::exception &e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
