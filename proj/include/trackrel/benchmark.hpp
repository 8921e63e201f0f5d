#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "trackrel/dataset.hpp"
#include "trackrel/metrics.hpp"
#include "trackrel/pipeline.hpp"

namespace trackrel {

inline constexpr int kSchemaVersion = 1;

/// 64-bit FNV-1a of `text`, as 16 lowercase hex digits.
std::string fnv1a_hex(const std::string& text);
std::string config_hash(const PipelineConfig& cfg);

struct TrackRun {
  std::string sequence;
  std::string tracker;
  std::string config_hash;
  std::vector<BBox> boxes;
  std::vector<BBox> truth;
  std::set<std::string> attributes;
  /// Wall time per frame; kept out of track.json so result files are reproducible.
  std::vector<double> seconds;
};

std::string run_to_json(const TrackRun& run);
TrackRun run_from_json(const std::string& text);
std::string report_to_json(const MetricReport& report, const std::string& sequence,
                           const std::string& tracker, const std::string& hash);
std::string plot_csv(const std::vector<double>& thresholds, const std::vector<double>& values);

/// Frame 0 initializes at the first ground-truth box; returns one box per frame.
TrackRun track_sequence(const SequenceSpec& seq, const PipelineConfig& cfg);

struct SequenceOutcome {
  TrackRun run;
  MetricReport report;
  std::string error;
  bool ok() const { return error.empty(); }
};

struct BenchmarkResult {
  std::vector<SequenceOutcome> sequences;
  MetricReport aggregate;
  std::map<std::string, MetricReport> per_attribute;
  std::map<std::string, int> attribute_counts;
  std::vector<std::string> warnings;
};

/// Mean over successful sequences, plus per-attribute means.
BenchmarkResult aggregate_outcomes(std::vector<SequenceOutcome> outcomes);

/// Writes <out>/<sequence>/{track.json, report.json, precision.csv,
/// success.csv, timing.json} and <out>/{aggregate.json, config.json}.
void write_results(const BenchmarkResult& result, const PipelineConfig* cfg,
                   const std::filesystem::path& out);

/// Tracks every sequence in a pool of `threads` workers (0: hardware
/// concurrency). A failing sequence is recorded and the rest continue.
BenchmarkResult run_benchmark(const std::vector<SequenceSpec>& sequences, const PipelineConfig& cfg,
                              const std::filesystem::path& out, int threads = 0);

/// Recomputes reports and the aggregate from track.json files below `runs`.
BenchmarkResult evaluate_runs(const std::filesystem::path& runs, const std::filesystem::path& out);

}  // namespace trackrel
