#include "trackrel/synth.hpp"

#include <algorithm>
#include <cmath>

namespace trackrel {
namespace {

double smoothstep(double t) { return t * t * (3.0 - 2.0 * t); }

// Value noise as a function of continuous coordinates, so a scene can be
// rendered at any zoom without resampling a raster.
class NoiseField {
 public:
  NoiseField(int height, int width, Rng& rng, int period, int octaves) {
    double amplitude = 1.0;
    for (int o = 0; o < octaves; ++o) {
      Octave oct{period, amplitude, Grid2(height / period + 2, width / period + 2)};
      for (double& v : oct.lattice.storage()) v = rng.uniform();
      total_ += amplitude;
      octaves_.push_back(std::move(oct));
      amplitude *= 0.5;
      period = std::max(1, period / 2);
    }
  }

  /// Outside [0, height) x [0, width) the nearest edge value is used.
  double operator()(double y, double x) const {
    double v = 0.0;
    for (const Octave& o : octaves_) {
      const double gy = std::clamp(y / o.period, 0.0, o.lattice.height() - 1.000001);
      const double gx = std::clamp(x / o.period, 0.0, o.lattice.width() - 1.000001);
      const int i = static_cast<int>(gy);
      const int j = static_cast<int>(gx);
      const double ty = smoothstep(gy - i);
      const double tx = smoothstep(gx - j);
      const Grid2& l = o.lattice;
      const double top = (1 - tx) * l(i, j) + tx * l(i, j + 1);
      const double bot = (1 - tx) * l(i + 1, j) + tx * l(i + 1, j + 1);
      v += o.amplitude * ((1 - ty) * top + ty * bot);
    }
    return v / total_;
  }

  Grid2 raster(int height, int width) const {
    Grid2 out(height, width);
    for (int r = 0; r < height; ++r)
      for (int c = 0; c < width; ++c) out(r, c) = (*this)(r, c);
    return out;
  }

 private:
  struct Octave {
    int period;
    double amplitude;
    Grid2 lattice;
  };
  std::vector<Octave> octaves_;
  double total_ = 0.0;
};

double faded(double v, double contrast) { return 0.5 + contrast * (v - 0.5); }

Grid2 background(const SynthParams& p, Rng& rng) {
  Grid2 bg = NoiseField(p.size, p.size, rng, 32, 3).raster(p.size, p.size);
  for (double& v : bg.storage()) v = faded(v, p.background_contrast);
  return bg;
}

void paste(Grid2& frame, const Grid2& patch, int top, int left) {
  for (int r = 0; r < patch.height(); ++r)
    for (int c = 0; c < patch.width(); ++c) frame(top + r, left + c) = patch(r, c);
}

SynthSequence translate_case(Rng& rng, const SynthParams& p) {
  SynthSequence seq;
  const Grid2 bg = background(p, rng);
  const Grid2 object = NoiseField(p.object, p.object, rng, 16, 3).raster(p.object, p.object);
  const int lo = p.object;
  const int hi = p.size - 2 * p.object;
  int x = rng.integer(lo, hi);
  int y = rng.integer(lo, hi);
  int vx = 0;
  int vy = 0;
  for (int t = 0; t < p.frames; ++t) {
    if (t > 0 && (t - 1) % p.segment == 0) {
      do {
        vx = rng.integer(-p.max_speed, p.max_speed);
        vy = rng.integer(-p.max_speed, p.max_speed);
      } while (vx * vx + vy * vy > p.max_speed * p.max_speed);
    }
    if (t > 0) {
      if (x + vx < lo || x + vx > hi) vx = -vx;
      if (y + vy < lo || y + vy > hi) vy = -vy;
      x += vx;
      y += vy;
    }
    Grid2 frame = bg;
    paste(frame, object, y, x);
    seq.frames.emplace_back(std::move(frame), t);
    seq.truth.push_back({double(x), double(y), double(p.object), double(p.object)});
    seq.levels.push_back(0);
  }
  return seq;
}

SynthSequence zoom_case(Rng& rng, const SynthParams& p) {
  SynthSequence seq;
  const NoiseField bg(p.size, p.size, rng, 32, 3);
  const NoiseField object(p.object, p.object, rng, 16, 3);
  const double lo = (p.size - p.object) / 2;
  const double hi = lo + p.object;
  const double c = 0.5 * p.size;
  // 2x2 supersampled render of the scene magnified by s about its center.
  auto render = [&](double s) {
    Grid2 frame(p.size, p.size);
    for (int r = 0; r < p.size; ++r)
      for (int col = 0; col < p.size; ++col) {
        double acc = 0.0;
        for (double oy : {0.25, 0.75})
          for (double ox : {0.25, 0.75}) {
            const double y = c + (r + oy - c) / s;
            const double x = c + (col + ox - c) / s;
            const bool inside = y >= lo && y < hi && x >= lo && x < hi;
            acc += inside ? object(y - lo - 0.5, x - lo - 0.5)
                          : faded(bg(y - 0.5, x - 0.5), p.background_contrast);
          }
        frame(r, col) = 0.25 * acc;
      }
    return frame;
  };
  int k = 0;
  for (int t = 0; t < p.frames; ++t) {
    if (t > 0) {
      int d = rng.integer(-2, 2);
      if (std::abs(k + d) > p.max_level) d = -d;
      k += d;
    }
    const double s = std::pow(p.scale_step, k);
    seq.frames.emplace_back(render(s), t);
    seq.truth.push_back(BBox::from_center(c, c, p.object * s, p.object * s));
    seq.levels.push_back(k);
  }
  return seq;
}

SynthSequence still_case(Rng& rng, const SynthParams& p) {
  SynthSequence seq;
  Grid2 frame = background(p, rng);
  const int corner = (p.size - p.object) / 2;
  paste(frame, NoiseField(p.object, p.object, rng, 16, 3).raster(p.object, p.object), corner, corner);
  for (int t = 0; t < p.frames; ++t) {
    seq.frames.emplace_back(frame, t);
    seq.truth.push_back({double(corner), double(corner), double(p.object), double(p.object)});
    seq.levels.push_back(0);
  }
  return seq;
}

}  // namespace

Grid2 value_noise(int height, int width, Rng& rng, int period, int octaves) {
  if (height < 1 || width < 1 || period < 1 || octaves < 1) throw Error("value_noise: bad parameters");
  return NoiseField(height, width, rng, period, octaves).raster(height, width);
}

SynthSequence synth_sequence(SynthCase kind, std::uint64_t seed, const SynthParams& params) {
  if (params.frames < 1 || params.object < 4 || params.size < 4 * params.object) {
    throw Error("synth_sequence: need frames >= 1 and size >= 4 * object");
  }
  Rng rng(seed);
  SynthSequence seq;
  switch (kind) {
    case SynthCase::translate: seq = translate_case(rng, params); break;
    case SynthCase::zoom: seq = zoom_case(rng, params); break;
    case SynthCase::still: seq = still_case(rng, params); break;
  }
  seq.name = to_string(kind) + "_" + std::to_string(seed);
  seq.scale_step = params.scale_step;
  return seq;
}

SynthCase parse_synth_case(const std::string& name) {
  if (name == "translate") return SynthCase::translate;
  if (name == "zoom") return SynthCase::zoom;
  if (name == "static" || name == "still") return SynthCase::still;
  throw Error("unknown synthetic case '" + name + "' (expected translate, zoom or static)");
}

std::string to_string(SynthCase kind) {
  switch (kind) {
    case SynthCase::translate: return "translate";
    case SynthCase::zoom: return "zoom";
    case SynthCase::still: return "static";
  }
  return "unknown";
}

}  // namespace trackrel
