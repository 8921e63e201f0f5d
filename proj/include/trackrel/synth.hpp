#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "trackrel/features.hpp"
#include "trackrel/rng.hpp"

namespace trackrel {

/// Smooth value noise in [0, 1]: random lattice values every `period` pixels,
/// smoothstep-interpolated, summed over `octaves` halving periods.
Grid2 value_noise(int height, int width, Rng& rng, int period = 16, int octaves = 3);

enum class SynthCase { translate, zoom, still };

struct SynthParams {
  int frames = 100;
  int size = 256;
  int object = 32;
  int max_speed = 8;
  int segment = 10;
  int max_level = 10;
  double scale_step = 1.02;
  double background_contrast = 0.3;
};

struct SynthSequence {
  std::string name;
  std::vector<ImageFrame> frames;
  std::vector<BBox> truth;
  /// Zoom case: scale ladder index k of each frame (scale = step^k); zeros otherwise.
  std::vector<int> levels;
  double scale_step = 1.02;
};

SynthSequence synth_sequence(SynthCase kind, std::uint64_t seed, const SynthParams& params = {});

SynthCase parse_synth_case(const std::string& name);
std::string to_string(SynthCase kind);

}  // namespace trackrel
