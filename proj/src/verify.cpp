#include "trackrel/verify.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <json.hpp>

#include "trackrel/cflbmc.hpp"
#include "trackrel/parallel.hpp"
#include "trackrel/rng.hpp"
#include "trackrel/srdcf.hpp"
#include "trackrel/struck.hpp"
#include "trackrel/synth.hpp"

namespace trackrel {
namespace {

using nlohmann::json;

constexpr CaseKind kKinds[] = {CaseKind::cflbmc_srdcf, CaseKind::struck_srdcf,
                               CaseKind::label_substitution, CaseKind::loss_substitution};

Texture parse_texture(const std::string& s) {
  if (s == "noise") return Texture::noise;
  if (s == "flat") return Texture::flat;
  if (s == "zero") return Texture::zero;
  throw FormatError("unknown texture '" + s + "' (noise, flat, zero)");
}

const char* texture_name(Texture t) {
  switch (t) {
    case Texture::noise: return "noise";
    case Texture::flat: return "flat";
    case Texture::zero: return "zero";
  }
  return "noise";
}

Grid2 texture_image(Texture t, int size, Rng& rng, int period) {
  if (t == Texture::noise) return value_noise(size, size, rng, period, 3);
  return Grid2(size, size, t == Texture::flat ? 0.5 : 0.0);
}

ImageFrame shifted(const ImageFrame& f, int dx, int dy) {
  return extract_patch(f, BBox{double(-dx), double(-dy), double(f.width()), double(f.height())});
}

// T = 8x8 with the active block and channel count varying by seed.
void relation_case(const CaseSpec& spec, const SuiteManifest& m, CaseResult& out) {
  static constexpr int kActive[][2] = {{4, 4}, {3, 5}, {5, 3}, {4, 2}, {2, 4}, {3, 3}, {5, 5}, {4, 3}};
  Rng rng(spec.seed);
  const int channels = 1 + int(spec.seed % 3);
  const auto& a = kActive[spec.seed % std::size(kActive)];
  ChannelPatch base;
  for (int l = 0; l < channels; ++l) {
    Grid2 g(8, 8);
    if (spec.texture == Texture::noise)
      for (double& v : g.storage()) v = rng.uniform(-1.0, 1.0);
    else if (spec.texture == Texture::flat)
      g = Grid2(8, 8, 0.5);
    base.channels.push_back(std::move(g));
  }
  const LabelMap labels = gaussian_labels(8, 8, {0, 0}, label_sigma(a[1], a[0], 0.25));
  const MaskSpec mask(8, 8, a[0], a[1]);
  const double lambda = spec.lambda.value_or(m.relation_lambda);
  const double tol = spec.tolerance.value_or(m.relation_tolerance);
  bool decreasing = true;
  for (double big : m.relation_bigs) {
    const RelationReport r = masked_relation_check(base, labels, mask, big, lambda);
    if (!out.curve.empty() && !(r.relation_error < out.curve.back()) && out.curve.back() > 0.0)
      decreasing = false;
    out.curve.push_back(r.relation_error);
    out.values["annulus_energy"] = r.annulus_energy;
  }
  const double final_error = out.curve.back();
  out.values["relation_error"] = final_error;
  out.values["channels"] = channels;
  out.values["active_h"] = a[0];
  out.values["active_w"] = a[1];
  // A zero-signal case has both filters identically zero, so the sweep is flat at 0.
  out.pass = final_error <= tol && decreasing;
}

void gap_case(const CaseSpec& spec, const SuiteManifest& m, CaseResult& out) {
  Rng rng(spec.seed);
  const ImageFrame frame(texture_image(spec.texture, 512, rng, 8));
  const BBox box = BBox::from_center(256, 256, 32, 32);
  const auto points = asymptotic_gap(frame, box, spec.lambda.value_or(m.gap_lambda), m.gap_multiples);
  const double tol = spec.tolerance.value_or(m.gap_tolerance);
  bool non_increasing = true;
  bool ratios_exact = true;
  double prev = INFINITY;
  for (const GapPoint& p : points) {
    out.curve.push_back(p.gap);
    out.ratios.push_back(p.ratio_w);
    ratios_exact = ratios_exact && p.ratio_w == double(p.region_w - 8 + 1) / p.region_w;
    if (p.multiple == 1) continue;  // no translation freedom
    if (p.gap > prev) non_increasing = false;
    prev = p.gap;
  }
  out.values["final_gap"] = points.back().gap;
  out.values["non_increasing"] = non_increasing;
  out.values["ratios_exact"] = ratios_exact;
  out.pass = non_increasing && ratios_exact && points.back().gap <= tol;
  out.informative = spec.texture != Texture::noise;
}

void label_case(const CaseSpec& spec, const SuiteManifest& m, CaseResult& out) {
  Rng rng(spec.seed);
  const ImageFrame frame(texture_image(spec.texture, 160, rng, 8));
  const int dx = rng.integer(-8, 8);
  const int dy = rng.integer(-8, 8);
  const ImageFrame test = shifted(frame, dx, dy);
  const BBox box = BBox::from_center(80, 80, 32, 32);
  const SampleSet set = build_sample_set(frame, box, 2.5, 1);
  const double sigma = label_sigma(set.object_w, set.object_h);
  const auto weights = SampleWeights::dense(set.region_w(), set.region_h(), set.object_w, set.object_h);
  const double lambda = spec.lambda.value_or(m.struck_lambda);
  const auto gauss = solve_struck_square(set, sample_labels(set, LabelKind::gaussian, sigma), lambda, weights);
  const auto iou = solve_struck_square(set, sample_labels(set, LabelKind::iou, sigma), lambda, weights);
  const CellIndex a = locate(gauss, test, box).peak;
  const CellIndex b = locate(iou, test, box).peak;
  const int d = std::max(std::abs(a.row - b.row), std::abs(a.col - b.col));
  out.values["displacement"] = d;
  out.values["shift_x"] = dx;
  out.values["shift_y"] = dy;
  out.pass = d <= m.label_displacement;
  out.informative = spec.texture != Texture::noise;
}

// Oracle scale: 4x4-cell object in a 10x10-cell region, 49 windows.
void loss_case(const CaseSpec& spec, const SuiteManifest& m, CaseResult& out) {
  Rng rng(spec.seed ^ 0x9e3779b97f4a7c15ULL);
  const ImageFrame frame(texture_image(spec.texture, 160, rng, 8));
  const int dx = rng.integer(-4, 4);
  const int dy = rng.integer(-4, 4);
  const BBox box = BBox::from_center(80, 80, 16, 16);
  const SampleSet set = build_sample_set(frame, box, 2.5, 1);
  const auto labels = sample_labels(set, LabelKind::gaussian, label_sigma(set.object_w, set.object_h));
  const auto weights = SampleWeights::dense(set.region_w(), set.region_h(), set.object_w, set.object_h);
  const double lambda = spec.lambda.value_or(m.struck_lambda);
  const StruckModel square = solve_struck_square(set, labels, lambda, weights);
  const HingeResult hinge = solve_struck_hinge_small(set, labels, lambda, spec.seed);
  const ImageFrame test = shifted(frame, dx, dy);
  const CellIndex a = locate(square, test, box).peak;
  const CellIndex b = locate(hinge.model, test, box).peak;
  out.values["displacement"] = std::max(std::abs(a.row - b.row), std::abs(a.col - b.col));
  out.values["samples"] = set.count();
  out.values["hinge_epochs"] = hinge.epochs;
  out.values["hinge_converged"] = hinge.converged;
  out.values["shift_x"] = dx;
  out.values["shift_y"] = dy;
  out.pass = a == b;
  out.informative = spec.texture != Texture::noise;
}

json case_json(const CaseResult& c) {
  json j;
  j["id"] = c.id;
  j["kind"] = to_string(c.kind);
  j["seed"] = c.seed;
  j["pass"] = c.pass;
  j["informative"] = c.informative;
  j["values"] = c.values;
  if (!c.curve.empty()) j["curve"] = c.curve;
  if (!c.ratios.empty()) j["sample_ratios"] = c.ratios;
  if (!c.error.empty()) j["error"] = c.error;
  j["seconds"] = c.seconds;
  return j;
}

}  // namespace

CaseKind parse_case_kind(const std::string& name) {
  for (CaseKind k : kKinds)
    if (to_string(k) == name) return k;
  throw FormatError("unknown case kind '" + name + "'");
}

std::string to_string(CaseKind kind) {
  switch (kind) {
    case CaseKind::cflbmc_srdcf: return "cflbmc_srdcf";
    case CaseKind::struck_srdcf: return "struck_srdcf";
    case CaseKind::label_substitution: return "label_substitution";
    case CaseKind::loss_substitution: return "loss_substitution";
  }
  return "?";
}

std::string CaseSpec::id() const {
  std::string s = to_string(kind) + "/" + std::to_string(seed);
  if (texture != Texture::noise) s += std::string("/") + texture_name(texture);
  return s;
}

std::vector<CaseSpec> default_cases(const SuiteManifest& m) {
  std::vector<CaseSpec> cases;
  auto one = [&](CaseKind k, std::uint64_t seed, Texture t) {
    CaseSpec c;
    c.kind = k;
    c.seed = seed;
    c.texture = t;
    cases.push_back(c);
  };
  auto add = [&](CaseKind k, int seeds) {
    for (int s = 1; s <= seeds; ++s) one(k, std::uint64_t(s), Texture::noise);
  };
  add(CaseKind::cflbmc_srdcf, m.relation_seeds);
  one(CaseKind::cflbmc_srdcf, 1, Texture::zero);
  add(CaseKind::struck_srdcf, m.gap_seeds);
  add(CaseKind::label_substitution, m.label_seeds);
  one(CaseKind::label_substitution, 1, Texture::flat);
  add(CaseKind::loss_substitution, m.loss_seeds);
  return cases;
}

std::vector<CaseSpec> cases_from_json(const std::string& text) {
  std::vector<CaseSpec> cases;
  try {
    const json j = json::parse(text);
    if (!j.is_array()) throw FormatError("cases file must hold a JSON array");
    for (const json& e : j) {
      for (const auto& [key, value] : e.items()) {
        if (key != "kind" && key != "seed" && key != "texture" && key != "lambda" && key != "tolerance")
          throw FormatError("unknown case key '" + key + "'");
      }
      CaseSpec c;
      c.kind = parse_case_kind(e.at("kind").get<std::string>());
      c.seed = e.value("seed", std::uint64_t{1});
      if (e.contains("texture")) c.texture = parse_texture(e["texture"].get<std::string>());
      if (e.contains("lambda")) c.lambda = e["lambda"].get<double>();
      if (e.contains("tolerance")) c.tolerance = e["tolerance"].get<double>();
      cases.push_back(c);
    }
  } catch (const json::exception& e) {
    throw FormatError(std::string("cases: ") + e.what());
  }
  return cases;
}

CaseResult run_case(const CaseSpec& spec, const SuiteManifest& m) {
  CaseResult out;
  out.id = spec.id();
  out.kind = spec.kind;
  out.seed = spec.seed;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    switch (spec.kind) {
      case CaseKind::cflbmc_srdcf: relation_case(spec, m, out); break;
      case CaseKind::struck_srdcf: gap_case(spec, m, out); break;
      case CaseKind::label_substitution: label_case(spec, m, out); break;
      case CaseKind::loss_substitution: loss_case(spec, m, out); break;
    }
  } catch (const std::exception& e) {
    out.pass = false;
    out.error = e.what();
  }
  out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return out;
}

std::vector<SuiteResult> summarize(const std::vector<CaseResult>& cases, const SuiteManifest& m) {
  std::vector<SuiteResult> suites;
  for (CaseKind k : kKinds) {
    SuiteResult s;
    s.kind = k;
    s.threshold = (k == CaseKind::label_substitution || k == CaseKind::loss_substitution) ? m.agreement_rate : 1.0;
    bool any = false;
    for (const CaseResult& c : cases) {
      if (c.kind != k) continue;
      any = true;
      if (c.informative) continue;
      ++s.counted;
      s.passed += c.pass;
    }
    if (!any) continue;
    s.rate = s.counted ? double(s.passed) / s.counted : 0.0;
    s.pass = s.counted > 0 && s.rate >= s.threshold;
    suites.push_back(s);
  }
  return suites;
}

VerifyReport run_verify(const std::vector<CaseSpec>& cases, const SuiteManifest& m, int threads) {
  VerifyReport report;
  report.manifest = m;
  report.cases.resize(cases.size());
  parallel_for(cases.size(), threads, [&](std::size_t i) { report.cases[i] = run_case(cases[i], m); });
  report.suites = summarize(report.cases, m);
  report.pass = !report.suites.empty();
  for (const auto& s : report.suites) report.pass = report.pass && s.pass;
  return report;
}

std::string report_to_json(const VerifyReport& r) {
  json j;
  j["schema_version"] = 1;
  const SuiteManifest& m = r.manifest;
  j["manifest"] = {{"relation_tolerance", m.relation_tolerance},
                   {"relation_bigs", m.relation_bigs},
                   {"relation_lambda", m.relation_lambda},
                   {"gap_tolerance", m.gap_tolerance},
                   {"gap_multiples", m.gap_multiples},
                   {"gap_lambda", m.gap_lambda},
                   {"agreement_rate", m.agreement_rate},
                   {"struck_lambda", m.struck_lambda},
                   {"label_displacement", m.label_displacement}};
  j["pass"] = r.pass;
  json suites = json::array();
  for (const auto& s : r.suites) {
    suites.push_back({{"kind", to_string(s.kind)},
                      {"counted", s.counted},
                      {"passed", s.passed},
                      {"rate", s.rate},
                      {"threshold", s.threshold},
                      {"pass", s.pass}});
  }
  j["suites"] = suites;
  json cases = json::array();
  for (const auto& c : r.cases) cases.push_back(case_json(c));
  j["cases"] = cases;
  return j.dump(1) + "\n";
}

std::string report_table(const VerifyReport& r) {
  std::string out;
  char buf[200];
  std::snprintf(buf, sizeof buf, "%-20s %8s %8s %9s  %s\n", "suite", "passed", "rate", "threshold", "verdict");
  out += buf;
  for (const auto& s : r.suites) {
    std::snprintf(buf, sizeof buf, "%-20s %4d/%-3d %8.3f %9.3f  %s\n", to_string(s.kind).c_str(), s.passed,
                  s.counted, s.rate, s.threshold, s.pass ? "PASS" : "FAIL");
    out += buf;
  }
  for (const auto& c : r.cases) {
    if (c.pass && c.error.empty()) continue;
    std::snprintf(buf, sizeof buf, "  %s %s%s%s\n", c.id.c_str(), c.informative ? "(informative) " : "",
                  c.pass ? "pass" : "fail", c.error.empty() ? "" : (": " + c.error).c_str());
    out += buf;
  }
  out += r.pass ? "verify: PASS\n" : "verify: FAIL\n";
  return out;
}

}  // namespace trackrel
