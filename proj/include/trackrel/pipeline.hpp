#pragma once

#include <deque>
#include <string>

#include "trackrel/cflbmc.hpp"
#include "trackrel/srdcf.hpp"
#include "trackrel/struck.hpp"

namespace trackrel {

enum class TrackerKind { srdcf, cflbmc, struck };

TrackerKind parse_tracker_kind(const std::string& name);
std::string to_string(TrackerKind kind);

struct PipelineConfig {
  TrackerKind kind = TrackerKind::srdcf;
  /// CF kinds: search area as a multiple of the box area. Struck: per-axis
  /// multiple of the box sides.
  double search_area_factor = 16.0;
  double update_rate = 0.025;
  int scale_count = 7;
  double scale_step = 1.02;
  int cell = 4;
  double sigma_factor = 1.0 / 16.0;
  double lambda = 1.0;
  FeatureKind features = FeatureKind::hog;
  /// Targets larger than this many cells are tracked on a downsampled grid.
  double template_area_cells = 100.0;
  bool subcell = true;
  /// SRDCF quadratic regularizer.
  double reg_mu = 0.1;
  double reg_eta = 3.0;
  AlmConfig alm;
  int struck_window = 10;
  int struck_stride = 1;
  /// Struck: score every pixel offset by interleaving the cell-stride
  /// responses of cell x cell phase-shifted crops.
  bool struck_pixel_search = true;

  /// Defaults for `kind`: area factor 16 and lambda 1 (srdcf) or 10 (cflbmc);
  /// per-axis factor 2.5 and lambda 100 (struck).
  static PipelineConfig defaults(TrackerKind kind);

  /// Throws Error naming the first offending field.
  void validate() const;
};

/// Reads a JSON object on top of defaults(kind). A "tracker" key, when
/// present, selects the kind first. Unknown keys are rejected.
PipelineConfig config_from_json(const std::string& text, TrackerKind kind);
PipelineConfig config_from_json(const std::string& text);
std::string config_to_json(const PipelineConfig& cfg);

struct TrackerState {
  PipelineConfig config;
  BBox box;
  /// Current box size over the initial one.
  double scale = 1.0;
  int frame_index = 0;

  /// Initial box size and the pixel size of one model cell at scale 1.
  double base_w = 0.0;
  double base_h = 0.0;
  double cell_px = 4.0;
  /// Model region and object extents in cells.
  int region_h = 0;
  int region_w = 0;
  int object_h = 0;
  int object_w = 0;

  /// CF kinds: region-sized filter, interpolated at update_rate.
  FilterBank filter;
  Grid2 window;
  LabelMap labels;

  /// Struck kind: model plus the Gram blocks of the last struck_window frames.
  StruckModel struck;
  std::deque<StruckGram> history;
};

TrackerState init(const ImageFrame& frame, const BBox& box, const PipelineConfig& cfg);

/// Locate, refine, pick the scale, update the model. Returns the new box.
BBox step(TrackerState& state, const ImageFrame& frame);

/// Scale multiplier among scale_step^k, k in [-(n-1)/2, (n-1)/2], whose crop
/// around the current box center gives the largest response. Ties go to the
/// candidate closest to 1.
double estimate_scale(const TrackerState& state, const ImageFrame& frame);

/// Region-sized features of the state's search window centered on `center`
/// at scale `scale`.
ChannelPatch search_features(const TrackerState& state, const ImageFrame& frame,
                             double center_x, double center_y, double scale);

/// Response of the current model on a search patch.
Grid2 model_response(const TrackerState& state, const ChannelPatch& patch);

/// Struck response at pixel stride around (center_x, center_y). Entry
/// (i, j) is the window displaced by (i, j) template pixels from the region's
/// top-left window; the centered window sits at cell * centered_offset.
Grid2 struck_pixel_response(const TrackerState& state, const ImageFrame& frame, double center_x,
                            double center_y, double scale);

}  // namespace trackrel
