#include <cmath>

#include "doctest.h"
#include "trackrel/pipeline.hpp"
#include "trackrel/synth.hpp"

using namespace trackrel;

namespace {

ImageFrame texture(std::uint64_t seed, int size = 192) {
  Rng rng(seed);
  return ImageFrame(value_noise(size, size, rng, 16, 3));
}

ImageFrame shifted(const ImageFrame& f, int dx, int dy) {
  return extract_patch(f, BBox{double(-dx), double(-dy), double(f.width()), double(f.height())});
}

const TrackerKind kAll[] = {TrackerKind::srdcf, TrackerKind::cflbmc, TrackerKind::struck};

}  // namespace

TEST_CASE("config defaults and JSON") {
  const auto s = PipelineConfig::defaults(TrackerKind::struck);
  CHECK(s.search_area_factor == 2.5);
  CHECK(s.update_rate == 0.025);
  CHECK(s.scale_count == 7);
  CHECK(PipelineConfig::defaults(TrackerKind::srdcf).search_area_factor == 16.0);
  CHECK(PipelineConfig::defaults(TrackerKind::cflbmc).lambda == 10.0);

  for (TrackerKind k : kAll) {
    const auto c = PipelineConfig::defaults(k);
    const auto back = config_from_json(config_to_json(c));
    CHECK(config_to_json(back) == config_to_json(c));
    CHECK(back.kind == k);
  }
  const auto c = config_from_json(R"({"tracker": "cflbmc", "lambda": 3, "alm_iterations": 9})");
  CHECK(c.kind == TrackerKind::cflbmc);
  CHECK(c.lambda == 3.0);
  CHECK(c.alm.lambda == 3.0);
  CHECK(c.alm.iterations == 9);
  CHECK(config_from_json("{}", TrackerKind::struck).lambda == 100.0);

  CHECK_THROWS_AS(config_from_json(R"({"lamda": 3})"), FormatError);
  CHECK_THROWS_AS(config_from_json(R"({"lambda": "x"})"), FormatError);
  CHECK_THROWS_AS(config_from_json("[1]"), FormatError);
  CHECK_THROWS_AS(config_from_json("{"), FormatError);
  CHECK_THROWS_AS(config_from_json(R"({"scale_count": 4})"), Error);
  CHECK_THROWS_AS(config_from_json(R"({"update_rate": 1.5})"), Error);
  CHECK_THROWS_AS(config_from_json(R"({"tracker": "kcf"})"), Error);
}

TEST_CASE("init") {
  const ImageFrame frame = texture(1);
  const BBox box = BBox::from_center(96, 96, 32, 32);
  for (TrackerKind k : kAll) {
    CAPTURE(to_string(k));
    const auto cfg = PipelineConfig::defaults(k);
    const TrackerState a = init(frame, box, cfg);
    const TrackerState b = init(frame, box, cfg);
    CHECK(a.filter == b.filter);
    CHECK(a.struck.weights == b.struck.weights);
    CHECK(a.object_w == 8);
    const ChannelPatch patch = search_features(a, frame, 96, 96, 1.0);
    const CellIndex peak = argmax(model_response(a, patch));
    if (k == TrackerKind::struck) {
      CHECK(a.region_w == 20);
      CHECK(peak == CellIndex{6, 6});
    } else {
      CHECK(a.region_w == 32);
      CHECK(peak == CellIndex{0, 0});
    }
    CHECK_NOTHROW(init(frame, BBox{-6, -6, 24, 24}, cfg));
    CHECK_THROWS_AS(init(frame, BBox{10, 10, 0, 5}, cfg), ShapeError);
  }
}

TEST_CASE("large targets are tracked on a coarser grid") {
  const ImageFrame frame = texture(2, 400);
  auto cfg = PipelineConfig::defaults(TrackerKind::srdcf);
  const TrackerState s = init(frame, BBox::from_center(200, 200, 80, 80), cfg);
  CHECK(s.cell_px == doctest::Approx(8.0));
  CHECK(s.object_w == 10);
  CHECK(s.region_w == 40);
}

TEST_CASE("step fixed point and translation") {
  const ImageFrame frame = texture(3);
  const BBox box = BBox::from_center(96, 96, 32, 32);
  for (TrackerKind k : kAll) {
    CAPTURE(to_string(k));
    auto cfg = PipelineConfig::defaults(k);
    TrackerState s = init(frame, box, cfg);
    const BBox same = step(s, frame);
    // Parabola refinement of a not quite symmetric peak moves SRDCF by a hair.
    const double tol = k == TrackerKind::srdcf ? 0.01 : 0.0;
    CHECK(std::abs(same.center_x() - 96.0) <= tol);
    CHECK(std::abs(same.center_y() - 96.0) <= tol);
    if (k == TrackerKind::srdcf) CHECK(s.scale == 1.0);

    cfg.subcell = false;
    TrackerState t = init(frame, box, cfg);
    const BBox moved = step(t, shifted(frame, 4, 0));
    CHECK(moved.center_x() == 100.0);
    CHECK(moved.center_y() == 96.0);
  }
  // With parabola refinement the SRDCF estimate is no longer cell-quantized.
  TrackerState r = init(frame, box, PipelineConfig::defaults(TrackerKind::srdcf));
  const BBox moved = step(r, shifted(frame, 4, 0));
  CHECK(std::abs(moved.center_x() - 100.0) <= 0.5);
  CHECK(std::abs(moved.center_y() - 96.0) <= 0.5);
  TrackerState st = init(frame, box, PipelineConfig::defaults(TrackerKind::struck));
  const BBox fine = step(st, shifted(frame, 3, -2));
  CHECK(fine.center_x() == 99.0);
  CHECK(fine.center_y() == 94.0);
}

TEST_CASE("frozen model") {
  const ImageFrame frame = texture(4);
  const BBox box = BBox::from_center(96, 96, 32, 32);
  for (TrackerKind k : kAll) {
    CAPTURE(to_string(k));
    auto cfg = PipelineConfig::defaults(k);
    cfg.update_rate = 0.0;
    TrackerState s = init(frame, box, cfg);
    const TrackerState before = s;
    step(s, shifted(frame, 4, 4));
    step(s, shifted(frame, 8, 4));
    CHECK(s.filter == before.filter);
    CHECK(s.struck.weights == before.struck.weights);
  }
}

TEST_CASE("estimate_scale") {
  const ImageFrame frame = texture(5);
  const BBox box = BBox::from_center(96, 96, 32, 32);
  for (TrackerKind k : kAll) {
    CAPTURE(to_string(k));
    const TrackerState s = init(frame, box, PipelineConfig::defaults(k));
    CHECK(estimate_scale(s, frame) == 1.0);
    const ImageFrame flat(Grid2(192, 192));
    CHECK(estimate_scale(s, flat) == 1.0);
  }
  // Zoom by two ladder steps about the box center.
  const double z = 1.02 * 1.02;
  const ImageFrame zoomed = extract_resampled(frame, BBox::from_center(96, 96, 192 / z, 192 / z), 192, 192);
  const TrackerState s = init(frame, box, PipelineConfig::defaults(TrackerKind::srdcf));
  CHECK(estimate_scale(s, zoomed) == doctest::Approx(z));
}

TEST_CASE("static sequence gives a constant trajectory") {
  SynthParams p;
  p.frames = 6;
  const auto seq = synth_sequence(SynthCase::still, 9, p);
  for (TrackerKind k : kAll) {
    CAPTURE(to_string(k));
    TrackerState s = init(seq.frames[0], seq.truth[0], PipelineConfig::defaults(k));
    for (std::size_t t = 1; t < seq.frames.size(); ++t) {
      const BBox b = step(s, seq.frames[t]);
      const double tol = k == TrackerKind::srdcf ? 0.02 : 0.0;
      CHECK(std::abs(b.center_x() - seq.truth[0].center_x()) <= tol);
      CHECK(std::abs(b.center_y() - seq.truth[0].center_y()) <= tol);
      CHECK(b.width == seq.truth[0].width);
    }
  }
}

// Object-sized linear templates can score a 2% zoomed crop above the training
// crop itself, so the scale fixed point is not guaranteed for these kinds.
TEST_CASE("scale fixed point for object-sized templates" * doctest::may_fail()) {
  const BBox box = BBox::from_center(96, 96, 32, 32);
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const ImageFrame frame = texture(seed);
    for (TrackerKind k : {TrackerKind::cflbmc, TrackerKind::struck}) {
      CAPTURE(to_string(k));
      CAPTURE(seed);
      TrackerState s = init(frame, box, PipelineConfig::defaults(k));
      step(s, frame);
      CHECK(s.scale == 1.0);
    }
  }
}
