#include "trackrel/benchmark.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "trackrel/parallel.hpp"

namespace trackrel {
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

json box_json(const BBox& b) { return json::array({b.left, b.top, b.width, b.height}); }

BBox box_from(const json& j) {
  if (!j.is_array() || j.size() != 4) throw FormatError("box must be [left, top, width, height]");
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>(), j[3].get<double>()};
}

json boxes_json(const std::vector<BBox>& v) {
  json a = json::array();
  for (const auto& b : v) a.push_back(box_json(b));
  return a;
}

std::vector<BBox> boxes_from(const json& j) {
  std::vector<BBox> out;
  for (const auto& b : j) out.push_back(box_from(b));
  return out;
}

json metrics_json(const MetricReport& r) {
  json j;
  j["mean_center_error"] = r.mean_center_error;
  j["distance_precision_20"] = r.distance_precision;
  j["precision_plot"] = r.precision_plot;
  j["mean_overlap"] = r.mean_overlap;
  j["overlap_precision_05"] = r.overlap_precision;
  j["success_plot"] = r.success_plot;
  j["auc"] = r.auc;
  return j;
}

void write_file(const fs::path& file, const std::string& text) {
  std::ofstream out(file, std::ios::binary);
  out << text;
  if (!out) throw Error("cannot write " + file.string());
}

std::string read_file(const fs::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw FormatError("cannot open " + file.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<double> thresholds(int n, double step) {
  std::vector<double> t;
  for (int i = 0; i < n; ++i) t.push_back(step == 1.0 ? i : success_threshold(i));
  return t;
}

}  // namespace

std::string fnv1a_hex(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string config_hash(const PipelineConfig& cfg) { return fnv1a_hex(config_to_json(cfg)); }

std::string run_to_json(const TrackRun& run) {
  json j;
  j["schema_version"] = kSchemaVersion;
  j["sequence"] = run.sequence;
  j["tracker"] = run.tracker;
  j["config_hash"] = run.config_hash;
  j["boxes"] = boxes_json(run.boxes);
  j["groundtruth"] = boxes_json(run.truth);
  j["attributes"] = run.attributes;
  return j.dump(1) + "\n";
}

TrackRun run_from_json(const std::string& text) {
  try {
    const json j = json::parse(text);
    if (j.at("schema_version").get<int>() != kSchemaVersion) {
      throw FormatError("track.json: unsupported schema_version");
    }
    TrackRun r;
    r.sequence = j.at("sequence").get<std::string>();
    r.tracker = j.at("tracker").get<std::string>();
    r.config_hash = j.at("config_hash").get<std::string>();
    r.boxes = boxes_from(j.at("boxes"));
    r.truth = boxes_from(j.at("groundtruth"));
    r.attributes = j.at("attributes").get<std::set<std::string>>();
    return r;
  } catch (const json::exception& e) {
    throw FormatError(std::string("track.json: ") + e.what());
  }
}

std::string report_to_json(const MetricReport& report, const std::string& sequence,
                           const std::string& tracker, const std::string& hash) {
  json j;
  j["schema_version"] = kSchemaVersion;
  j["sequence"] = sequence;
  j["tracker"] = tracker;
  j["config_hash"] = hash;
  j["metrics"] = metrics_json(report);
  return j.dump(1) + "\n";
}

std::string plot_csv(const std::vector<double>& t, const std::vector<double>& v) {
  std::string out = "threshold,value\n";
  char buf[80];
  for (std::size_t i = 0; i < v.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", t.at(i), v[i]);
    out += buf;
  }
  return out;
}

TrackRun track_sequence(const SequenceSpec& seq, const PipelineConfig& cfg) {
  TrackRun run;
  run.sequence = seq.name;
  run.tracker = to_string(cfg.kind);
  run.config_hash = config_hash(cfg);
  run.truth = seq.truth;
  run.attributes = seq.attributes;
  using clock = std::chrono::steady_clock;
  TrackerState state;
  for (std::size_t t = 0; t < seq.frames.size(); ++t) {
    const auto t0 = clock::now();
    const ImageFrame frame = load_frame(seq.frames[t], int(t));
    if (t == 0) {
      state = init(frame, seq.truth.front(), cfg);
      run.boxes.push_back(seq.truth.front());
    } else {
      run.boxes.push_back(step(state, frame));
    }
    run.seconds.push_back(std::chrono::duration<double>(clock::now() - t0).count());
  }
  return run;
}

BenchmarkResult aggregate_outcomes(std::vector<SequenceOutcome> outcomes) {
  BenchmarkResult res;
  res.sequences = std::move(outcomes);
  std::vector<MetricReport> all;
  std::map<std::string, std::vector<MetricReport>> by_attr;
  for (const auto& o : res.sequences) {
    if (!o.ok()) {
      res.warnings.push_back(o.run.sequence + ": " + o.error);
      continue;
    }
    all.push_back(o.report);
    for (const auto& a : o.run.attributes) by_attr[a].push_back(o.report);
  }
  if (res.sequences.empty()) res.warnings.push_back("no sequences to evaluate");
  res.aggregate = average(all);
  for (const auto& [a, reports] : by_attr) {
    res.per_attribute[a] = average(reports);
    res.attribute_counts[a] = int(reports.size());
  }
  return res;
}

void write_results(const BenchmarkResult& res, const PipelineConfig* cfg, const fs::path& out) {
  fs::create_directories(out);
  json agg;
  agg["schema_version"] = kSchemaVersion;
  std::string tracker;
  std::string hash;
  json names = json::array();
  json failed = json::object();
  for (const auto& o : res.sequences) {
    if (tracker.empty()) tracker = o.run.tracker, hash = o.run.config_hash;
    if (!o.ok()) {
      failed[o.run.sequence] = o.error;
      continue;
    }
    names.push_back(o.run.sequence);
    const fs::path dir = out / o.run.sequence;
    fs::create_directories(dir);
    write_file(dir / "track.json", run_to_json(o.run));
    write_file(dir / "report.json", report_to_json(o.report, o.run.sequence, o.run.tracker, o.run.config_hash));
    write_file(dir / "precision.csv", plot_csv(thresholds(kPrecisionPoints, 1.0), o.report.precision_plot));
    write_file(dir / "success.csv", plot_csv(thresholds(kSuccessPoints, 0.05), o.report.success_plot));
    if (!o.run.seconds.empty()) {
      json timing;
      timing["seconds_per_frame"] = o.run.seconds;
      double total = 0.0;
      for (double s : o.run.seconds) total += s;
      timing["fps"] = total > 0.0 ? double(o.run.seconds.size()) / total : 0.0;
      write_file(dir / "timing.json", timing.dump(1) + "\n");
    }
  }
  if (cfg) {
    tracker = to_string(cfg->kind);
    hash = config_hash(*cfg);
    write_file(out / "config.json", config_to_json(*cfg) + "\n");
  }
  agg["tracker"] = tracker;
  agg["config_hash"] = hash;
  agg["sequences"] = names;
  agg["failed"] = failed;
  agg["warnings"] = res.warnings;
  agg["mean"] = metrics_json(res.aggregate);
  json attrs = json::object();
  for (const auto& [a, r] : res.per_attribute) {
    json e = metrics_json(r);
    e["count"] = res.attribute_counts.at(a);
    attrs[a] = e;
  }
  agg["attributes"] = attrs;
  write_file(out / "aggregate.json", agg.dump(1) + "\n");
  write_file(out / "precision.csv", plot_csv(thresholds(kPrecisionPoints, 1.0), res.aggregate.precision_plot));
  write_file(out / "success.csv", plot_csv(thresholds(kSuccessPoints, 0.05), res.aggregate.success_plot));
}

BenchmarkResult run_benchmark(const std::vector<SequenceSpec>& sequences, const PipelineConfig& cfg,
                              const fs::path& out, int threads) {
  cfg.validate();
  std::vector<SequenceOutcome> outcomes(sequences.size());
  parallel_for(sequences.size(), threads, [&](std::size_t i) {
    SequenceOutcome& o = outcomes[i];
    o.run.sequence = sequences[i].name;
    o.run.tracker = to_string(cfg.kind);
    o.run.config_hash = config_hash(cfg);
    try {
      o.run = track_sequence(sequences[i], cfg);
      o.report = evaluate(o.run.boxes, o.run.truth);
    } catch (const std::exception& e) {
      o.error = e.what();
    }
  });
  BenchmarkResult res = aggregate_outcomes(std::move(outcomes));
  write_results(res, &cfg, out);
  return res;
}

BenchmarkResult evaluate_runs(const fs::path& runs, const fs::path& out) {
  if (!fs::is_directory(runs)) throw FormatError(runs.string() + " is not a directory");
  std::vector<fs::path> files;
  for (const auto& e : fs::recursive_directory_iterator(runs))
    if (e.is_regular_file() && e.path().filename() == "track.json") files.push_back(e.path());
  std::sort(files.begin(), files.end());
  std::vector<SequenceOutcome> outcomes;
  for (const auto& f : files) {
    SequenceOutcome o;
    try {
      o.run = run_from_json(read_file(f));
      o.report = evaluate(o.run.boxes, o.run.truth);
    } catch (const std::exception& e) {
      o.run.sequence = f.parent_path().filename().string();
      o.error = e.what();
    }
    outcomes.push_back(std::move(o));
  }
  BenchmarkResult res = aggregate_outcomes(std::move(outcomes));
  write_results(res, nullptr, out);
  return res;
}

}  // namespace trackrel
