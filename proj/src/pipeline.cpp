#include "trackrel/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <json.hpp>

namespace trackrel {
namespace {

using nlohmann::json;

int signed_shift(int i, int n) { return i > n / 2 ? i - n : i; }
double signed_shift(double x, int n) { return x > n / 2.0 ? x - n : x; }

bool is_cf(TrackerKind k) { return k != TrackerKind::struck; }

FilterBank train_cf(const TrackerState& s, const ChannelPatch& patch) {
  const PipelineConfig& cfg = s.config;
  if (cfg.kind == TrackerKind::srdcf) {
    const auto reg = SpatialRegularizer::quadratic(s.region_h, s.region_w, s.object_h, s.object_w,
                                                   cfg.reg_mu, cfg.reg_eta);
    SrdcfOptions opt;
    if (s.filter.count() == patch.count()) opt.warm_start = &s.filter;
    return solve_srdcf(patch, s.labels, reg, cfg.lambda, SampleWeights::uniform(), opt);
  }
  const MaskSpec mask(s.region_h, s.region_w, s.object_h, s.object_w);
  AlmConfig alm = cfg.alm;
  alm.lambda = cfg.lambda;
  const FilterBank active = solve_cflbmc(patch, s.labels, mask, alm);
  FilterBank out;
  for (const auto& w : active.weights) out.weights.push_back(mask.pad(w));
  return out;
}

void train_struck(TrackerState& s, const ChannelPatch& patch) {
  const PipelineConfig& cfg = s.config;
  const SampleSet set = sample_set_from_region(patch, s.object_h, s.object_w, cfg.struck_stride);
  const auto labels =
      sample_labels(set, LabelKind::gaussian, cfg.sigma_factor * std::sqrt(double(s.object_w) * s.object_h));
  SampleWeights w;
  w.pair_count = set.count();
  s.history.push_back(struck_gram(set, labels, w));
  while (static_cast<int>(s.history.size()) > cfg.struck_window) s.history.pop_front();
  const Eigen::VectorXd central =
      solve_struck_square(std::vector<StruckGram>(s.history.begin(), s.history.end()), cfg.lambda);
  s.struck = make_struck_model(central, patch.count(), s.region_h, s.region_w, s.object_h,
                               s.object_w, cfg.lambda);
}

double peak_value(const Grid2& g) {
  const CellIndex p = argmax(g);
  return g(p.row, p.col);
}

const char* feature_name(FeatureKind k) { return k == FeatureKind::hog ? "hog" : "gray"; }

}  // namespace

TrackerKind parse_tracker_kind(const std::string& name) {
  if (name == "srdcf") return TrackerKind::srdcf;
  if (name == "cflbmc") return TrackerKind::cflbmc;
  if (name == "struck" || name == "struck_linear") return TrackerKind::struck;
  throw Error("unknown tracker '" + name + "' (expected srdcf, cflbmc or struck)");
}

std::string to_string(TrackerKind kind) {
  switch (kind) {
    case TrackerKind::srdcf: return "srdcf";
    case TrackerKind::cflbmc: return "cflbmc";
    case TrackerKind::struck: return "struck";
  }
  return "unknown";
}

PipelineConfig PipelineConfig::defaults(TrackerKind kind) {
  PipelineConfig c;
  c.kind = kind;
  switch (kind) {
    case TrackerKind::srdcf: c.lambda = 1.0; break;
    case TrackerKind::cflbmc: c.lambda = 10.0; break;
    case TrackerKind::struck:
      c.search_area_factor = 2.5;
      c.lambda = 100.0;
      break;
  }
  c.alm.lambda = c.lambda;
  return c;
}

void PipelineConfig::validate() const {
  auto fail = [](const std::string& field, const std::string& why) {
    throw Error("config: " + field + " " + why);
  };
  if (!(search_area_factor >= 1.0)) fail("search_area_factor", "must be >= 1");
  if (!(update_rate >= 0.0 && update_rate <= 1.0)) fail("update_rate", "must lie in [0, 1]");
  if (scale_count < 1 || scale_count % 2 == 0) fail("scale_count", "must be odd and positive");
  if (!(scale_step >= 1.0)) fail("scale_step", "must be >= 1");
  if (cell < 1) fail("cell", "must be positive");
  if (!(sigma_factor > 0.0)) fail("sigma_factor", "must be positive");
  if (!(lambda > 0.0)) fail("lambda", "must be positive");
  if (!(template_area_cells >= 1.0)) fail("template_area_cells", "must be >= 1");
  if (!(reg_mu > 0.0) || !(reg_eta >= 0.0)) fail("reg_mu/reg_eta", "must be positive");
  if (struck_window < 1) fail("struck_window", "must be positive");
  if (struck_stride < 1) fail("struck_stride", "must be positive");
  alm.validate();
}

PipelineConfig config_from_json(const std::string& text, TrackerKind kind) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw FormatError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw FormatError("config must be a JSON object");
  if (j.contains("tracker")) kind = parse_tracker_kind(j["tracker"].get<std::string>());
  PipelineConfig c = PipelineConfig::defaults(kind);
  try {
    for (const auto& [key, v] : j.items()) {
      if (key == "tracker") continue;
      else if (key == "search_area_factor") c.search_area_factor = v.get<double>();
      else if (key == "update_rate") c.update_rate = v.get<double>();
      else if (key == "scale_count") c.scale_count = v.get<int>();
      else if (key == "scale_step") c.scale_step = v.get<double>();
      else if (key == "cell") c.cell = v.get<int>();
      else if (key == "sigma_factor") c.sigma_factor = v.get<double>();
      else if (key == "lambda") c.lambda = v.get<double>();
      else if (key == "features") {
        const auto f = v.get<std::string>();
        if (f != "hog" && f != "gray") throw FormatError("config: features must be hog or gray");
        c.features = f == "hog" ? FeatureKind::hog : FeatureKind::gray;
      }
      else if (key == "template_area_cells") c.template_area_cells = v.get<double>();
      else if (key == "subcell") c.subcell = v.get<bool>();
      else if (key == "reg_mu") c.reg_mu = v.get<double>();
      else if (key == "reg_eta") c.reg_eta = v.get<double>();
      else if (key == "alm_iterations") c.alm.iterations = v.get<int>();
      else if (key == "alm_mu0") c.alm.mu0 = v.get<double>();
      else if (key == "alm_beta") c.alm.beta = v.get<double>();
      else if (key == "alm_mu_max") c.alm.mu_max = v.get<double>();
      else if (key == "struck_window") c.struck_window = v.get<int>();
      else if (key == "struck_stride") c.struck_stride = v.get<int>();
      else if (key == "struck_pixel_search") c.struck_pixel_search = v.get<bool>();
      else throw FormatError("config: unknown key '" + key + "'");
    }
  } catch (const json::exception& e) {
    throw FormatError(std::string("config: wrong value type: ") + e.what());
  }
  c.alm.lambda = c.lambda;
  c.validate();
  return c;
}

PipelineConfig config_from_json(const std::string& text) {
  return config_from_json(text, TrackerKind::srdcf);
}

std::string config_to_json(const PipelineConfig& c) {
  json j;
  j["tracker"] = to_string(c.kind);
  j["search_area_factor"] = c.search_area_factor;
  j["update_rate"] = c.update_rate;
  j["scale_count"] = c.scale_count;
  j["scale_step"] = c.scale_step;
  j["cell"] = c.cell;
  j["sigma_factor"] = c.sigma_factor;
  j["lambda"] = c.lambda;
  j["features"] = feature_name(c.features);
  j["template_area_cells"] = c.template_area_cells;
  j["subcell"] = c.subcell;
  j["reg_mu"] = c.reg_mu;
  j["reg_eta"] = c.reg_eta;
  j["alm_iterations"] = c.alm.iterations;
  j["alm_mu0"] = c.alm.mu0;
  j["alm_beta"] = c.alm.beta;
  j["alm_mu_max"] = c.alm.mu_max;
  j["struck_window"] = c.struck_window;
  j["struck_stride"] = c.struck_stride;
  j["struck_pixel_search"] = c.struck_pixel_search;
  return j.dump(2);
}

ChannelPatch search_features(const TrackerState& s, const ImageFrame& frame, double cx, double cy,
                             double scale) {
  const int cell = s.config.cell;
  const BBox region = BBox::from_center(cx, cy, s.region_w * s.cell_px * scale,
                                        s.region_h * s.cell_px * scale);
  const ImageFrame crop = extract_resampled(frame, region, s.region_w * cell, s.region_h * cell);
  ChannelPatch patch = featurize(to_gray(crop), s.config.features, cell);
  patch.origin = region;
  if (is_cf(s.config.kind)) patch = apply_window(patch, s.window);
  return patch;
}

Grid2 model_response(const TrackerState& s, const ChannelPatch& patch) {
  if (is_cf(s.config.kind)) return response_map(s.filter, patch);
  return locate_in_region(s.struck, patch).response;
}

Grid2 struck_pixel_response(const TrackerState& s, const ImageFrame& frame, double cx, double cy,
                            double scale) {
  const int cell = s.config.cell;
  const double px = s.cell_px * scale / cell;
  Grid2 fine;
  for (int py = 0; py < cell; ++py) {
    for (int pxl = 0; pxl < cell; ++pxl) {
      const ChannelPatch patch = search_features(s, frame, cx + pxl * px, cy + py * px, scale);
      const Grid2 coarse = locate_in_region(s.struck, patch).response;
      if (fine.size() == 0) fine = Grid2(coarse.height() * cell, coarse.width() * cell);
      for (int i = 0; i < coarse.height(); ++i)
        for (int j = 0; j < coarse.width(); ++j) fine(i * cell + py, j * cell + pxl) = coarse(i, j);
    }
  }
  return fine;
}

TrackerState init(const ImageFrame& frame, const BBox& box, const PipelineConfig& cfg) {
  cfg.validate();
  if (!box.valid()) throw ShapeError("init: degenerate box");
  if (frame.planes.empty()) throw ShapeError("init: empty frame");
  TrackerState s;
  s.config = cfg;
  s.box = box;
  s.frame_index = frame.frame_index;
  s.base_w = box.width;
  s.base_h = box.height;

  const double area_cells = box.width * box.height / double(cfg.cell * cfg.cell);
  const double shrink = area_cells > cfg.template_area_cells ? std::sqrt(area_cells / cfg.template_area_cells) : 1.0;
  s.cell_px = cfg.cell * shrink;
  s.object_w = std::max(1, static_cast<int>(std::lround(box.width / s.cell_px)));
  s.object_h = std::max(1, static_cast<int>(std::lround(box.height / s.cell_px)));

  if (is_cf(cfg.kind)) {
    const double side = std::sqrt(cfg.search_area_factor * box.width * box.height) / s.cell_px;
    const int r = std::max({s.object_w, s.object_h, static_cast<int>(std::lround(side))});
    s.region_h = s.region_w = r;
    s.window = hann2(r, r);
    s.labels = gaussian_labels(r, r, {0, 0},
                               cfg.sigma_factor * std::sqrt(double(s.object_w) * s.object_h));
    s.filter = train_cf(s, search_features(s, frame, box.center_x(), box.center_y(), 1.0));
  } else {
    s.region_w = region_cells(s.object_w, cfg.search_area_factor);
    s.region_h = region_cells(s.object_h, cfg.search_area_factor);
    train_struck(s, search_features(s, frame, box.center_x(), box.center_y(), 1.0));
  }
  return s;
}

double estimate_scale(const TrackerState& s, const ImageFrame& frame) {
  const int half = (s.config.scale_count - 1) / 2;
  double best = -std::numeric_limits<double>::infinity();
  double best_m = 1.0;
  // Visit 0, -1, +1, -2, +2, ... so a strict improvement is needed to move away from 1.
  for (int i = 0; i <= 2 * half; ++i) {
    const int k = (i % 2 == 1) ? -(i + 1) / 2 : i / 2;
    const double m = std::pow(s.config.scale_step, k);
    double v = 0.0;
    if (s.config.kind == TrackerKind::struck && s.config.struck_pixel_search) {
      v = peak_value(struck_pixel_response(s, frame, s.box.center_x(), s.box.center_y(), s.scale * m));
    } else {
      const ChannelPatch patch =
          search_features(s, frame, s.box.center_x(), s.box.center_y(), s.scale * m);
      v = peak_value(model_response(s, patch));
    }
    if (v > best) {
      best = v;
      best_m = m;
    }
  }
  return best_m;
}

BBox step(TrackerState& s, const ImageFrame& frame) {
  const PipelineConfig& cfg = s.config;
  const double unit = s.cell_px * s.scale;
  double dr = 0.0;
  double dc = 0.0;
  if (is_cf(cfg.kind)) {
    const ChannelPatch patch = search_features(s, frame, s.box.center_x(), s.box.center_y(), s.scale);
    const Grid2 resp = response_map(s.filter, patch);
    const CellIndex peak = argmax(resp);
    if (cfg.kind == TrackerKind::srdcf && cfg.subcell) {
      const SubcellPeak p = subcell_refine(resp, peak);
      dr = signed_shift(p.row, s.region_h);
      dc = signed_shift(p.col, s.region_w);
    } else {
      dr = signed_shift(peak.row, s.region_h);
      dc = signed_shift(peak.col, s.region_w);
    }
  } else if (cfg.struck_pixel_search) {
    const CellIndex peak = argmax(struck_pixel_response(s, frame, s.box.center_x(), s.box.center_y(), s.scale));
    dr = double(peak.row) / cfg.cell - centered_offset(s.region_h, s.object_h);
    dc = double(peak.col) / cfg.cell - centered_offset(s.region_w, s.object_w);
  } else {
    const ChannelPatch patch = search_features(s, frame, s.box.center_x(), s.box.center_y(), s.scale);
    const LocateResult loc = locate_in_region(s.struck, patch);
    dr = loc.peak.row - centered_offset(s.region_h, s.object_h);
    dc = loc.peak.col - centered_offset(s.region_w, s.object_w);
  }
  const double cx = s.box.center_x() + dc * unit;
  const double cy = s.box.center_y() + dr * unit;
  s.box = BBox::from_center(cx, cy, s.base_w * s.scale, s.base_h * s.scale);

  if (cfg.scale_count > 1) s.scale *= estimate_scale(s, frame);
  s.box = BBox::from_center(cx, cy, s.base_w * s.scale, s.base_h * s.scale);
  s.frame_index = frame.frame_index;

  if (cfg.update_rate > 0.0) {
    const ChannelPatch sample = search_features(s, frame, cx, cy, s.scale);
    if (is_cf(cfg.kind)) {
      s.filter = s.filter.blended(train_cf(s, sample), cfg.update_rate);
    } else {
      train_struck(s, sample);
    }
  }
  return s.box;
}

}  // namespace trackrel
