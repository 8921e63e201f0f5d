#pragma once

#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "trackrel/features.hpp"
#include "trackrel/synth.hpp"

namespace trackrel {

/// The eleven OTB attribute codes.
const std::set<std::string>& otb_attributes();

struct SequenceSpec {
  std::string name;
  std::filesystem::path image_dir;
  std::vector<std::filesystem::path> frames;
  std::vector<BBox> truth;
  std::set<std::string> attributes;
};

/// One "l,t,w,h" box per non-empty line, comma, tab or space separated,
/// 1-indexed pixel coordinates shifted to 0-indexed. Throws FormatError naming
/// the offending line.
std::vector<BBox> parse_groundtruth(const std::string& text);

/// Inverse of parse_groundtruth.
std::string format_groundtruth(const std::vector<BBox>& boxes);

/// `dir` holds img/ (numbered stills) and groundtruth_rect.txt.
SequenceSpec load_sequence(const std::filesystem::path& dir);

/// Every subdirectory of `root` that holds a groundtruth_rect.txt, sorted by
/// name. Attribute tags come from `attributes_file` (JSON object mapping
/// sequence name to a list of codes) or root/attributes.json if present.
std::vector<SequenceSpec> load_dataset(const std::filesystem::path& root,
                                       const std::filesystem::path& attributes_file = {});

std::map<std::string, std::set<std::string>> load_attributes(const std::filesystem::path& file);

/// 8-bit gray or color still, intensities scaled to [0, 1]. Throws FormatError
/// for unreadable or non-8-bit images.
ImageFrame load_frame(const std::filesystem::path& file, int index = 0);

/// Writes img/0001.png ... and groundtruth_rect.txt.
void write_sequence(const SynthSequence& seq, const std::filesystem::path& dir);

}  // namespace trackrel
