#pragma once

#include <vector>

#include "trackrel/geometry.hpp"
#include "trackrel/grid.hpp"

namespace trackrel {

/// Decoded frame with one (gray) or three (RGB) planes, intensities in [0, 1].
struct ImageFrame {
  std::vector<Grid2> planes;
  int frame_index = 0;

  ImageFrame() = default;
  explicit ImageFrame(Grid2 gray, int index = 0);
  ImageFrame(Grid2 r, Grid2 g, Grid2 b, int index = 0);

  int height() const { return planes.empty() ? 0 : planes.front().height(); }
  int width() const { return planes.empty() ? 0 : planes.front().width(); }
  int channels() const { return static_cast<int>(planes.size()); }
};

/// L feature channels on a common cell lattice.
struct ChannelPatch {
  std::vector<Grid2> channels;
  int cell_size = 4;
  BBox origin;

  int height() const { return channels.empty() ? 0 : channels.front().height(); }
  int width() const { return channels.empty() ? 0 : channels.front().width(); }
  int count() const { return static_cast<int>(channels.size()); }

  /// Throws ShapeError unless there is at least one channel and all share dims.
  void validate() const;
};

/// Luminance 0.299 R + 0.587 G + 0.114 B; gray frames pass through.
Grid2 to_gray(const ImageFrame& frame);

/// Integer crop of round(region) with out-of-frame pixels replicated from the
/// nearest border pixel.
ImageFrame extract_patch(const ImageFrame& frame, const BBox& region);

/// Bilinear resampling of `region` onto an out_h x out_w pixel grid, with
/// border replication. Pixel centers sit at integer + 0.5.
ImageFrame extract_resampled(const ImageFrame& frame, const BBox& region, int out_w, int out_h);

/// 9 unsigned orientation bins per cell, each cell averaged over the L2
/// normalizations of the four 2x2 cell blocks that contain it.
ChannelPatch hog_channels(const Grid2& gray, int cell = 4);

inline constexpr int kHogBins = 9;

/// Single channel of per-cell mean intensity, centered by subtracting 0.5.
ChannelPatch gray_cells(const Grid2& gray, int cell = 4);

ChannelPatch apply_window(const ChannelPatch& patch, const Grid2& win);

enum class FeatureKind { hog, gray };

ChannelPatch featurize(const Grid2& gray, FeatureKind kind, int cell = 4);

}  // namespace trackrel
