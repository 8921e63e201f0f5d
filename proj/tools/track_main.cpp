#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "trackrel/benchmark.hpp"
#include "trackrel/dataset.hpp"
#include "trackrel/synth.hpp"
#include "trackrel/verify.hpp"

using namespace trackrel;
namespace fs = std::filesystem;

namespace {

std::string read_text(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw FormatError("cannot open " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void print_summary(const BenchmarkResult& res) {
  for (const auto& w : res.warnings) std::fprintf(stderr, "warning: %s\n", w.c_str());
  std::printf("%-24s %8s %8s %8s %8s\n", "sequence", "CLE", "DP@20", "OP@0.5", "AUC");
  for (const auto& o : res.sequences) {
    if (!o.ok()) continue;
    const auto& r = o.report;
    std::printf("%-24s %8.2f %8.3f %8.3f %8.3f\n", o.run.sequence.c_str(), r.mean_center_error,
                r.distance_precision, r.overlap_precision, r.auc);
  }
  const auto& a = res.aggregate;
  std::printf("%-24s %8.2f %8.3f %8.3f %8.3f\n", "mean", a.mean_center_error, a.distance_precision,
              a.overlap_precision, a.auc);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Correlation filter and structured output tracker benchmark"};
  app.require_subcommand(1);
  int threads = 0;
  app.add_option("-j,--threads", threads, "Worker threads (0: all cores)")->check(CLI::NonNegativeNumber);

  auto* run = app.add_subcommand("run", "Track every sequence of a dataset and write results");
  std::string dataset, tracker = "srdcf", config_file, attributes_file, out = "out";
  run->add_option("--dataset", dataset, "OTB-layout dataset root or single sequence")->required();
  run->add_option("--tracker", tracker, "srdcf, cflbmc or struck");
  run->add_option("--config", config_file, "Tracker config JSON");
  run->add_option("--attributes", attributes_file, "Attribute tags JSON");
  run->add_option("--out", out, "Output directory");

  auto* eval = app.add_subcommand("eval", "Recompute metrics from saved runs");
  std::string runs, eval_out = "eval";
  eval->add_option("--runs", runs, "Directory written by run")->required();
  eval->add_option("--out", eval_out, "Output directory");

  auto* synth = app.add_subcommand("synth", "Write a synthetic sequence");
  std::string synth_case = "translate", synth_out = "synth";
  std::uint64_t seed = 1;
  SynthParams params;
  synth->add_option("--case", synth_case, "translate, zoom or static");
  synth->add_option("--out", synth_out, "Sequence directory");
  synth->add_option("--seed", seed, "Generator seed");
  synth->add_option("--frames", params.frames, "Frame count")->check(CLI::PositiveNumber);

  auto* verify = app.add_subcommand("verify", "Run the equivalence suites");
  std::string cases_file, report_file;
  verify->add_option("--cases", cases_file, "JSON array of cases (default: full suite)");
  verify->add_option("--report", report_file, "Write the JSON report here");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      const TrackerKind kind = parse_tracker_kind(tracker);
      const PipelineConfig cfg = config_file.empty() ? PipelineConfig::defaults(kind)
                                                     : config_from_json(read_text(config_file), kind);
      const auto sequences = load_dataset(dataset, attributes_file);
      const fs::path dir = fs::path(out) / to_string(cfg.kind);
      const BenchmarkResult res = run_benchmark(sequences, cfg, dir, threads);
      print_summary(res);
      std::printf("results in %s\n", dir.string().c_str());
    } else if (*eval) {
      print_summary(evaluate_runs(runs, eval_out));
    } else if (*synth) {
      const SynthSequence seq = synth_sequence(parse_synth_case(synth_case), seed, params);
      write_sequence(seq, synth_out);
      std::printf("%zu frames in %s\n", seq.frames.size(), synth_out.c_str());
    } else if (*verify) {
      const auto cases = cases_file.empty() ? default_cases() : cases_from_json(read_text(cases_file));
      const VerifyReport report = run_verify(cases, {}, threads);
      std::fputs(report_table(report).c_str(), stdout);
      if (!report_file.empty()) std::ofstream(report_file) << report_to_json(report);
      return report.pass ? 0 : 1;
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "track: %s\n", e.what());
    return 2;
  }
  return 0;
}
