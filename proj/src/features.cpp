#include "trackrel/features.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace trackrel {
namespace {

int clamp_index(int i, int n) { return std::clamp(i, 0, n - 1); }

double bilinear(const Grid2& g, double y, double x) {
  const int h = g.height();
  const int w = g.width();
  const double fy = std::floor(y);
  const double fx = std::floor(x);
  const double ay = y - fy;
  const double ax = x - fx;
  const int r0 = clamp_index(static_cast<int>(fy), h);
  const int r1 = clamp_index(static_cast<int>(fy) + 1, h);
  const int c0 = clamp_index(static_cast<int>(fx), w);
  const int c1 = clamp_index(static_cast<int>(fx) + 1, w);
  const double top = (1.0 - ax) * g(r0, c0) + ax * g(r0, c1);
  const double bottom = (1.0 - ax) * g(r1, c0) + ax * g(r1, c1);
  return (1.0 - ay) * top + ay * bottom;
}

void require_frame(const ImageFrame& frame) {
  if (frame.planes.empty()) throw ShapeError("empty image frame");
}

}  // namespace

ImageFrame::ImageFrame(Grid2 gray, int index) : frame_index(index) {
  planes.push_back(std::move(gray));
}

ImageFrame::ImageFrame(Grid2 r, Grid2 g, Grid2 b, int index) : frame_index(index) {
  if (!r.same_shape(g) || !r.same_shape(b)) throw ShapeError("RGB planes differ in shape");
  planes = {std::move(r), std::move(g), std::move(b)};
}

void ChannelPatch::validate() const {
  if (channels.empty()) throw ShapeError("channel patch has no channels");
  for (const auto& ch : channels) {
    if (!ch.same_shape(channels.front())) {
      throw ShapeError("channel shapes differ: " + ch.shape_string() + " vs " +
                       channels.front().shape_string());
    }
  }
}

Grid2 to_gray(const ImageFrame& frame) {
  require_frame(frame);
  if (frame.channels() == 1) return frame.planes.front();
  if (frame.channels() != 3) throw ShapeError("frames must have 1 or 3 planes");
  Grid2 out(frame.height(), frame.width());
  const auto& r = frame.planes[0].storage();
  const auto& g = frame.planes[1].storage();
  const auto& b = frame.planes[2].storage();
  for (std::size_t i = 0; i < out.size(); ++i) {
    out.storage()[i] = 0.299 * r[i] + 0.587 * g[i] + 0.114 * b[i];
  }
  return out;
}

ImageFrame extract_patch(const ImageFrame& frame, const BBox& region) {
  require_frame(frame);
  const int w = static_cast<int>(std::lround(region.width));
  const int h = static_cast<int>(std::lround(region.height));
  if (w < 1 || h < 1) throw ShapeError("extract_patch: degenerate region");
  const int left = static_cast<int>(std::lround(region.left));
  const int top = static_cast<int>(std::lround(region.top));
  ImageFrame out;
  out.frame_index = frame.frame_index;
  for (const Grid2& plane : frame.planes) {
    Grid2 crop(h, w);
    for (int r = 0; r < h; ++r) {
      const int sr = clamp_index(top + r, plane.height());
      for (int c = 0; c < w; ++c) crop(r, c) = plane(sr, clamp_index(left + c, plane.width()));
    }
    out.planes.push_back(std::move(crop));
  }
  return out;
}

ImageFrame extract_resampled(const ImageFrame& frame, const BBox& region, int out_w, int out_h) {
  require_frame(frame);
  if (out_w < 1 || out_h < 1 || !region.valid()) {
    throw ShapeError("extract_resampled: degenerate region or output size");
  }
  const double sx = region.width / out_w;
  const double sy = region.height / out_h;
  ImageFrame out;
  out.frame_index = frame.frame_index;
  for (const Grid2& plane : frame.planes) {
    Grid2 crop(out_h, out_w);
    for (int r = 0; r < out_h; ++r) {
      const double y = region.top + (r + 0.5) * sy - 0.5;
      for (int c = 0; c < out_w; ++c) {
        crop(r, c) = bilinear(plane, y, region.left + (c + 0.5) * sx - 0.5);
      }
    }
    out.planes.push_back(std::move(crop));
  }
  return out;
}

ChannelPatch hog_channels(const Grid2& gray, int cell) {
  if (cell < 1) throw ShapeError("hog cell size must be positive");
  const int h = gray.height();
  const int w = gray.width();
  const int ch = h / cell;
  const int cw = w / cell;
  if (ch < 1 || cw < 1) {
    throw ShapeError("hog_channels: patch " + gray.shape_string() + " smaller than one cell");
  }

  std::vector<Grid2> hist(kHogBins, Grid2(ch, cw));
  const double bin_width = 180.0 / kHogBins;
  for (int r = 0; r < ch * cell; ++r) {
    for (int c = 0; c < cw * cell; ++c) {
      const double gx = gray(r, clamp_index(c + 1, w)) - gray(r, clamp_index(c - 1, w));
      const double gy = gray(clamp_index(r + 1, h), c) - gray(clamp_index(r - 1, h), c);
      const double mag = std::hypot(gx, gy);
      if (mag == 0.0) continue;
      double angle = std::atan2(gy, gx) * 180.0 / std::numbers::pi;
      if (angle < 0.0) angle += 180.0;
      if (angle >= 180.0) angle -= 180.0;
      const double pos = angle / bin_width;
      const int b0 = static_cast<int>(std::floor(pos)) % kHogBins;
      const int b1 = (b0 + 1) % kHogBins;
      const double frac = pos - std::floor(pos);
      hist[b0](r / cell, c / cell) += mag * (1.0 - frac);
      hist[b1](r / cell, c / cell) += mag * frac;
    }
  }

  Grid2 energy(ch, cw);
  for (const auto& b : hist)
    for (std::size_t i = 0; i < energy.size(); ++i) energy.storage()[i] += b.storage()[i] * b.storage()[i];

  constexpr double eps = 1e-12;
  Grid2 scale(ch, cw);
  for (int i = 0; i < ch; ++i) {
    for (int j = 0; j < cw; ++j) {
      double acc = 0.0;
      for (int bi = i - 1; bi <= i; ++bi) {
        for (int bj = j - 1; bj <= j; ++bj) {
          double block = 0.0;
          for (int di = 0; di < 2; ++di)
            for (int dj = 0; dj < 2; ++dj)
              block += energy(clamp_index(bi + di, ch), clamp_index(bj + dj, cw));
          acc += 1.0 / std::sqrt(block + eps);
        }
      }
      scale(i, j) = 0.25 * acc;
    }
  }

  ChannelPatch out;
  out.cell_size = cell;
  out.origin = BBox{0.0, 0.0, double(w), double(h)};
  for (auto& b : hist) {
    for (std::size_t i = 0; i < b.size(); ++i) b.storage()[i] *= scale.storage()[i];
    out.channels.push_back(std::move(b));
  }
  return out;
}

ChannelPatch gray_cells(const Grid2& gray, int cell) {
  if (cell < 1) throw ShapeError("cell size must be positive");
  const int ch = gray.height() / cell;
  const int cw = gray.width() / cell;
  if (ch < 1 || cw < 1) throw ShapeError("gray_cells: patch smaller than one cell");
  Grid2 g(ch, cw);
  const double inv = 1.0 / (cell * cell);
  for (int r = 0; r < ch * cell; ++r)
    for (int c = 0; c < cw * cell; ++c) g(r / cell, c / cell) += gray(r, c) * inv;
  for (double& v : g.storage()) v -= 0.5;
  ChannelPatch out;
  out.cell_size = cell;
  out.origin = BBox{0.0, 0.0, double(gray.width()), double(gray.height())};
  out.channels.push_back(std::move(g));
  return out;
}

ChannelPatch apply_window(const ChannelPatch& patch, const Grid2& win) {
  patch.validate();
  if (!win.same_shape(patch.channels.front())) {
    throw ShapeError("apply_window: window " + win.shape_string() + " vs patch " +
                     patch.channels.front().shape_string());
  }
  ChannelPatch out = patch;
  for (auto& ch : out.channels)
    for (std::size_t i = 0; i < ch.size(); ++i) ch.storage()[i] *= win.storage()[i];
  return out;
}

ChannelPatch featurize(const Grid2& gray, FeatureKind kind, int cell) {
  return kind == FeatureKind::hog ? hog_channels(gray, cell) : gray_cells(gray, cell);
}

}  // namespace trackrel
