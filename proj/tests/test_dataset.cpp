#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "trackrel/dataset.hpp"

using namespace trackrel;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("trackrel_test_dataset_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

void write_text(const fs::path& p, const std::string& text) { std::ofstream(p) << text; }

}  // namespace

TEST_CASE("ground truth lines are 1-indexed") {
  const auto boxes = parse_groundtruth("10,20,30,40\n");
  REQUIRE(boxes.size() == 1);
  CHECK(boxes[0] == BBox{9, 19, 30, 40});
  CHECK(parse_groundtruth("10\t20\t30\t40\r\n\n11 21 30 40\n") ==
        std::vector<BBox>{{9, 19, 30, 40}, {10, 20, 30, 40}});
}

TEST_CASE("malformed ground truth names the line") {
  try {
    parse_groundtruth("1,1,5,5\n1,2,3\n");
    FAIL("expected FormatError");
  } catch (const FormatError& e) {
    CHECK(std::string(e.what()).find("line 2") != std::string::npos);
  }
  CHECK_THROWS_AS(parse_groundtruth("1,1,x,5\n"), FormatError);
  CHECK_THROWS_AS(parse_groundtruth("1,1,0,5\n"), FormatError);
}

TEST_CASE("format and parse round trip exactly") {
  // Values whose +1/-1 index shift is exact in binary.
  const std::vector<BBox> boxes{{0.125, 2.5, 30.25, 4.0625}, {-3, 7, 1, 1}, {1e6 + 0.5, 3.75, 12.5, 99}};
  CHECK(parse_groundtruth(format_groundtruth(boxes)) == boxes);
}

TEST_CASE("synthetic sequence write and load") {
  SynthParams p;
  p.frames = 4;
  p.size = 64;
  p.object = 16;
  const SynthSequence seq = synth_sequence(SynthCase::translate, 7, p);
  const fs::path root = scratch("roundtrip");
  write_sequence(seq, root / "seq_a");
  write_text(root / "attributes.json", R"({"seq_a": ["IV", "SV"]})");

  const auto data = load_dataset(root);
  REQUIRE(data.size() == 1);
  const SequenceSpec& s = data[0];
  CHECK(s.name == "seq_a");
  CHECK(s.frames.size() == 4);
  CHECK(s.frames[0].filename() == "0001.png");
  REQUIRE(s.truth.size() == 4);
  for (int i = 0; i < 4; ++i) CHECK(s.truth[i] == seq.truth[i]);
  CHECK(s.attributes == std::set<std::string>{"IV", "SV"});

  const ImageFrame f = load_frame(s.frames[2]);
  const Grid2& ref = seq.frames[2].planes.front();
  REQUIRE(f.height() == ref.height());
  double worst = 0.0;
  for (std::size_t i = 0; i < ref.size(); ++i)
    worst = std::max(worst, std::abs(f.planes.front().storage()[i] - ref.storage()[i]));
  CHECK(worst <= 0.5 / 255.0 + 1e-12);

  // A root that is itself a sequence loads as one sequence.
  CHECK(load_dataset(root / "seq_a").size() == 1);
}

TEST_CASE("dataset errors") {
  const fs::path root = scratch("errors");
  fs::create_directories(root / "bad" / "img");
  write_text(root / "bad" / "groundtruth_rect.txt", "1,1,5,5\n1,1,5,5\n");
  CHECK_THROWS_AS(load_sequence(root / "bad"), FormatError);  // no frames for two boxes

  write_text(root / "attrs.json", R"({"bad": ["XX"]})");
  CHECK_THROWS_AS(load_attributes(root / "attrs.json"), FormatError);
  CHECK(otb_attributes().size() == 11);
  CHECK_THROWS_AS(load_frame(root / "missing.png"), FormatError);
}
