#include "trackrel/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <json.hpp>
#include <opencv2/imgcodecs.hpp>
#include <sstream>

namespace trackrel {
namespace fs = std::filesystem;

namespace {

std::string read_text(const fs::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw FormatError("cannot open " + file.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

bool is_image(const fs::path& p) {
  std::string ext = p.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  return ext == ".jpg" || ext == ".jpeg" || ext == ".png" || ext == ".bmp" || ext == ".pgm" ||
         ext == ".ppm" || ext == ".tif" || ext == ".tiff";
}

std::string number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

const std::set<std::string>& otb_attributes() {
  static const std::set<std::string> codes{"IV", "SV", "OCC", "DEF", "MB", "FM",
                                           "IPR", "OPR", "OV", "BC", "LR"};
  return codes;
}

std::vector<BBox> parse_groundtruth(const std::string& text) {
  std::vector<BBox> out;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    for (char& c : line)
      if (c == ',' || c == '\t' || c == '\r' || c == ';') c = ' ';
    std::istringstream fields(line);
    std::vector<double> v;
    std::string tok;
    while (fields >> tok) {
      try {
        std::size_t used = 0;
        v.push_back(std::stod(tok, &used));
        if (used != tok.size()) throw std::invalid_argument(tok);
      } catch (const std::exception&) {
        throw FormatError("groundtruth line " + std::to_string(line_no) + ": '" + tok +
                          "' is not a number");
      }
    }
    if (v.empty()) continue;
    if (v.size() != 4) {
      throw FormatError("groundtruth line " + std::to_string(line_no) + ": expected 4 fields, got " +
                        std::to_string(v.size()));
    }
    if (!(v[2] > 0.0) || !(v[3] > 0.0)) {
      throw FormatError("groundtruth line " + std::to_string(line_no) + ": width and height must be positive");
    }
    out.push_back({v[0] - 1.0, v[1] - 1.0, v[2], v[3]});
  }
  return out;
}

std::string format_groundtruth(const std::vector<BBox>& boxes) {
  std::string out;
  for (const BBox& b : boxes) {
    out += number(b.left + 1.0) + "," + number(b.top + 1.0) + "," + number(b.width) + "," +
           number(b.height) + "\n";
  }
  return out;
}

SequenceSpec load_sequence(const fs::path& dir) {
  SequenceSpec s;
  s.name = dir.filename().string();
  if (s.name.empty()) s.name = dir.parent_path().filename().string();
  s.image_dir = dir / "img";
  const fs::path gt = dir / "groundtruth_rect.txt";
  if (!fs::is_directory(s.image_dir)) throw FormatError(dir.string() + ": missing img/ directory");
  if (!fs::is_regular_file(gt)) throw FormatError(dir.string() + ": missing groundtruth_rect.txt");
  for (const auto& e : fs::directory_iterator(s.image_dir))
    if (e.is_regular_file() && is_image(e.path())) s.frames.push_back(e.path());
  std::sort(s.frames.begin(), s.frames.end());
  s.truth = parse_groundtruth(read_text(gt));
  if (s.truth.size() != s.frames.size()) {
    throw FormatError(dir.string() + ": " + std::to_string(s.frames.size()) + " images but " +
                      std::to_string(s.truth.size()) + " ground-truth lines");
  }
  if (s.frames.empty()) throw FormatError(dir.string() + ": empty sequence");
  return s;
}

std::map<std::string, std::set<std::string>> load_attributes(const fs::path& file) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_text(file));
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(file.string() + ": " + e.what());
  }
  if (!j.is_object()) throw FormatError(file.string() + ": expected an object of sequence -> codes");
  std::map<std::string, std::set<std::string>> out;
  for (const auto& [name, codes] : j.items()) {
    if (!codes.is_array()) throw FormatError(file.string() + ": '" + name + "' must map to a list");
    for (const auto& c : codes) {
      const auto code = c.get<std::string>();
      if (!otb_attributes().count(code)) {
        throw FormatError(file.string() + ": unknown attribute '" + code + "' for " + name);
      }
      out[name].insert(code);
    }
  }
  return out;
}

std::vector<SequenceSpec> load_dataset(const fs::path& root, const fs::path& attributes_file) {
  if (!fs::is_directory(root)) throw FormatError(root.string() + " is not a directory");
  std::vector<fs::path> dirs;
  if (fs::is_regular_file(root / "groundtruth_rect.txt")) {
    dirs.push_back(root);
  } else {
    for (const auto& e : fs::directory_iterator(root))
      if (e.is_directory() && fs::is_regular_file(e.path() / "groundtruth_rect.txt")) dirs.push_back(e.path());
    std::sort(dirs.begin(), dirs.end());
  }
  std::map<std::string, std::set<std::string>> attrs;
  if (!attributes_file.empty()) {
    attrs = load_attributes(attributes_file);
  } else if (fs::is_regular_file(root / "attributes.json")) {
    attrs = load_attributes(root / "attributes.json");
  }
  std::vector<SequenceSpec> out;
  for (const auto& d : dirs) {
    SequenceSpec s = load_sequence(d);
    if (auto it = attrs.find(s.name); it != attrs.end()) s.attributes = it->second;
    out.push_back(std::move(s));
  }
  return out;
}

ImageFrame load_frame(const fs::path& file, int index) {
  const cv::Mat m = cv::imread(file.string(), cv::IMREAD_UNCHANGED);
  if (m.empty()) throw FormatError("cannot decode image " + file.string());
  if (m.depth() != CV_8U) throw FormatError(file.string() + ": only 8-bit images are supported");
  const int h = m.rows;
  const int w = m.cols;
  auto plane = [&](int ch) {
    Grid2 g(h, w);
    for (int r = 0; r < h; ++r) {
      const std::uint8_t* row = m.ptr<std::uint8_t>(r);
      for (int c = 0; c < w; ++c) g(r, c) = row[c * m.channels() + ch] / 255.0;
    }
    return g;
  };
  switch (m.channels()) {
    case 1: return ImageFrame(plane(0), index);
    case 3:
    case 4: return ImageFrame(plane(2), plane(1), plane(0), index);  // stored BGR(A)
    default: throw FormatError(file.string() + ": unsupported channel count");
  }
}

void write_sequence(const SynthSequence& seq, const fs::path& dir) {
  fs::create_directories(dir / "img");
  for (std::size_t t = 0; t < seq.frames.size(); ++t) {
    const Grid2& g = seq.frames[t].planes.front();
    if (seq.frames[t].channels() != 1) throw Error("write_sequence: synthetic frames are gray");
    cv::Mat m(g.height(), g.width(), CV_8UC1);
    for (int r = 0; r < g.height(); ++r)
      for (int c = 0; c < g.width(); ++c)
        m.at<std::uint8_t>(r, c) =
            static_cast<std::uint8_t>(std::lround(std::clamp(g(r, c), 0.0, 1.0) * 255.0));
    char name[32];
    std::snprintf(name, sizeof name, "%04zu.png", t + 1);
    if (!cv::imwrite((dir / "img" / name).string(), m)) {
      throw Error("cannot write " + (dir / "img" / name).string());
    }
  }
  std::ofstream gt(dir / "groundtruth_rect.txt", std::ios::binary);
  gt << format_groundtruth(seq.truth);
  if (!gt) throw Error("cannot write " + (dir / "groundtruth_rect.txt").string());
}

}  // namespace trackrel
