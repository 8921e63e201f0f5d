#include "trackrel/struck.hpp"

#include <algorithm>
#include <cmath>

#include "trackrel/linalg.hpp"
#include "trackrel/rng.hpp"

namespace trackrel {

std::vector<int> lattice_positions(int slots, int stride) {
  if (slots < 1 || stride < 1) throw ShapeError("lattice needs at least one slot and stride >= 1");
  const int k = (slots - 1) / stride + 1;
  const int start = (slots - 1 - (k - 1) * stride) / 2;
  std::vector<int> out(k);
  for (int i = 0; i < k; ++i) out[i] = start + i * stride;
  return out;
}

CellIndex SampleSet::center_offset() const {
  return {centered_offset(region_h(), object_h), centered_offset(region_w(), object_w)};
}

Eigen::VectorXd SampleSet::feature(int i) const {
  const CellIndex o = offsets.at(i);
  Eigen::VectorXd v(dims());
  Eigen::Index k = 0;
  for (const auto& ch : region.channels)
    for (int r = 0; r < object_h; ++r)
      for (int c = 0; c < object_w; ++c) v[k++] = ch(o.row + r, o.col + c);
  return v;
}

Eigen::MatrixXd SampleSet::design() const {
  Eigen::MatrixXd a(count(), dims());
  for (int i = 0; i < count(); ++i) a.row(i) = feature(i).transpose();
  return a;
}

SampleSet sample_set_from_region(ChannelPatch region, int object_h, int object_w, int stride) {
  region.validate();
  if (object_h < 1 || object_w < 1 || object_h > region.height() || object_w > region.width()) {
    throw ShapeError("sample set: object " + std::to_string(object_h) + "x" +
                     std::to_string(object_w) + " must fit in region " +
                     region.channels.front().shape_string());
  }
  SampleSet set;
  set.object_h = object_h;
  set.object_w = object_w;
  set.stride = stride;
  const auto rows = lattice_positions(region.height() - object_h + 1, stride);
  const auto cols = lattice_positions(region.width() - object_w + 1, stride);
  for (int r : rows)
    for (int c : cols) set.offsets.push_back({r, c});
  set.region = std::move(region);
  return set;
}

int object_cells(double pixels, int cell) {
  return std::max(1, static_cast<int>(std::lround(pixels / cell)));
}

int region_cells(int object, double scale) {
  return object + 2 * static_cast<int>(std::lround((scale - 1.0) * object / 2.0));
}

BBox region_box(const BBox& box, int region_h, int region_w, int cell) {
  return BBox::from_center(box.center_x(), box.center_y(), double(region_w) * cell,
                           double(region_h) * cell);
}

SampleSet build_sample_set(const ImageFrame& frame, const BBox& box, double region_scale,
                           int stride, int cell, FeatureKind kind) {
  if (!box.valid()) throw ShapeError("build_sample_set: degenerate box");
  const int h = object_cells(box.height, cell);
  const int w = object_cells(box.width, cell);
  const int rh = region_cells(h, region_scale);
  const int rw = region_cells(w, region_scale);
  const BBox region = region_box(box, rh, rw, cell);
  const ImageFrame crop = extract_resampled(frame, region, rw * cell, rh * cell);
  ChannelPatch feat = featurize(to_gray(crop), kind, cell);
  feat.origin = region;
  return sample_set_from_region(std::move(feat), h, w, stride);
}

std::vector<double> sample_labels(const SampleSet& set, LabelKind kind, double sigma) {
  const CellIndex c = set.center_offset();
  std::vector<double> out;
  out.reserve(set.offsets.size());
  const BBox anchor{0.0, 0.0, double(set.object_w), double(set.object_h)};
  for (const CellIndex& o : set.offsets) {
    const double dr = o.row - c.row;
    const double dc = o.col - c.col;
    if (kind == LabelKind::gaussian) {
      out.push_back(std::exp(-(dr * dr + dc * dc) / (2.0 * sigma * sigma)));
    } else {
      out.push_back(overlap_score(BBox{dc, dr, anchor.width, anchor.height}, anchor));
    }
  }
  return out;
}

FilterBank StruckModel::central() const {
  FilterBank out;
  for (const auto& w : weights.weights) out.weights.push_back(crop_centered(w, object_h, object_w));
  return out;
}

Eigen::VectorXd StruckModel::central_vector() const {
  const FilterBank c = central();
  Eigen::VectorXd v(c.count() * object_h * object_w);
  Eigen::Index k = 0;
  for (const auto& w : c.weights)
    for (double x : w.values()) v[k++] = x;
  return v;
}

Eigen::VectorXd StruckModel::scores(const SampleSet& set) const {
  if (set.object_h != object_h || set.object_w != object_w || set.region.count() != weights.count()) {
    throw ShapeError("struck scores: sample set does not match the model");
  }
  return set.design() * central_vector();
}

StruckModel make_struck_model(const Eigen::VectorXd& central, int channels, int region_h,
                              int region_w, int object_h, int object_w, double lambda) {
  if (central.size() != channels * object_h * object_w) throw ShapeError("struck model size mismatch");
  StruckModel m;
  m.lambda = lambda;
  m.object_h = object_h;
  m.object_w = object_w;
  m.regularizer = SpatialRegularizer::indicator_st(region_h, region_w, object_h, object_w);
  Eigen::Index k = 0;
  for (int l = 0; l < channels; ++l) {
    Grid2 block(object_h, object_w);
    for (double& x : block.storage()) x = central[k++];
    m.weights.weights.push_back(pad_centered(block, region_h, region_w));
  }
  return m;
}

StruckGram struck_gram(const SampleSet& set, const std::vector<double>& labels,
                       const SampleWeights& weights) {
  if (static_cast<int>(labels.size()) != set.count() || set.count() == 0) {
    throw ShapeError("struck_gram: need one label per sample and at least one sample");
  }
  const Eigen::MatrixXd a = set.design();
  const Eigen::Map<const Eigen::VectorXd> g(labels.data(), static_cast<Eigen::Index>(labels.size()));
  StruckGram out;
  out.ata = Eigen::MatrixXd::Zero(a.cols(), a.cols());
  out.ata.selfadjointView<Eigen::Lower>().rankUpdate(a.transpose());
  out.ata = out.ata.selfadjointView<Eigen::Lower>();
  out.aty = a.transpose() * g;
  out.alpha = weights.alpha();
  return out;
}

Eigen::VectorXd solve_struck_square(const std::vector<StruckGram>& frames, double lambda) {
  if (frames.empty()) throw Error("solve_struck_square: no training frames");
  if (!(lambda > 0.0)) throw Error("solve_struck_square: lambda must be positive");
  const auto n = frames.front().aty.size();
  Eigen::MatrixXd m = Eigen::MatrixXd::Identity(n, n);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(n);
  for (const auto& f : frames) {
    if (f.aty.size() != n) throw ShapeError("solve_struck_square: frames differ in dimension");
    m.noalias() += (lambda * f.alpha) * f.ata;
    b.noalias() += (lambda * f.alpha) * f.aty;
  }
  return solve_spd(std::move(m), b);
}

StruckModel solve_struck_square(const SampleSet& set, const std::vector<double>& labels,
                                double lambda, const SampleWeights& weights) {
  const Eigen::VectorXd w = solve_struck_square({struck_gram(set, labels, weights)}, lambda);
  return make_struck_model(w, set.region.count(), set.region_h(), set.region_w(), set.object_h,
                           set.object_w, lambda);
}

double struck_square_objective(const StruckModel& model, const SampleSet& set,
                               const std::vector<double>& labels, const SampleWeights& weights) {
  const Eigen::VectorXd s = model.scores(set);
  double loss = 0.0;
  for (int i = 0; i < set.count(); ++i) loss += (s[i] - labels[i]) * (s[i] - labels[i]);
  double reg = 0.0;
  for (int l = 0; l < model.weights.count(); ++l) {
    const Grid2& w = model.weights.weights[l];
    for (std::size_t p = 0; p < w.size(); ++p) {
      const double v = model.regularizer.grid.storage()[p] * w.storage()[p];
      reg += v * v;
    }
  }
  return 0.5 * reg + 0.5 * model.lambda * weights.alpha() * loss;
}

namespace {

int center_index(const SampleSet& set) {
  const CellIndex c = set.center_offset();
  for (int i = 0; i < set.count(); ++i)
    if (set.offsets[i] == c) return i;
  throw ShapeError("hinge solver: the centered window is not among the samples");
}

}  // namespace

double struck_hinge_objective(const Eigen::VectorXd& w, const SampleSet& set,
                              const std::vector<double>& labels, double lambda) {
  const Eigen::VectorXd s = set.design() * w;
  const int c = center_index(set);
  double loss = 0.0;
  for (int i = 0; i < set.count(); ++i) {
    if (i == c) continue;
    loss += std::max(0.0, (1.0 - labels[i]) - (s[c] - s[i]));
  }
  return 0.5 * w.squaredNorm() + 0.5 * lambda / set.count() * loss;
}

HingeResult solve_struck_hinge_small(const SampleSet& set, const std::vector<double>& labels,
                                     double lambda, std::uint64_t seed, double tolerance,
                                     int max_epochs) {
  if (set.count() > 200) throw Error("hinge oracle is limited to 200 samples");
  if (static_cast<int>(labels.size()) != set.count()) throw ShapeError("hinge: one label per sample");
  const int c = center_index(set);
  const Eigen::MatrixXd a = set.design();
  const int n = set.count();
  const double cap = lambda / (2.0 * n);

  // Dual of the hinge problem: max sum a_y D_y - 1/2 ||sum a_y psi_y||^2, 0 <= a_y <= cap.
  Eigen::MatrixXd psi(n, a.cols());
  Eigen::VectorXd delta(n), q(n), alpha = Eigen::VectorXd::Zero(n);
  for (int i = 0; i < n; ++i) {
    psi.row(i) = a.row(c) - a.row(i);
    delta[i] = 1.0 - labels[i];
    q[i] = psi.row(i).squaredNorm();
  }
  Eigen::VectorXd w = Eigen::VectorXd::Zero(a.cols());
  Rng rng(seed);
  HingeResult out;
  for (out.epochs = 1; out.epochs <= max_epochs; ++out.epochs) {
    for (int i : rng.permutation(n)) {
      if (i == c || q[i] == 0.0) continue;
      const double next = std::clamp(alpha[i] + (delta[i] - psi.row(i).dot(w)) / q[i], 0.0, cap);
      if (next != alpha[i]) {
        w += (next - alpha[i]) * psi.row(i).transpose();
        alpha[i] = next;
      }
    }
    const double primal = struck_hinge_objective(w, set, labels, lambda);
    const double dual = alpha.dot(delta) - 0.5 * w.squaredNorm();
    out.objective = primal;
    if (primal - dual <= tolerance * std::max(std::abs(primal), 1e-300)) {
      out.converged = true;
      break;
    }
  }
  out.epochs = std::min(out.epochs, max_epochs);
  out.model = make_struck_model(w, set.region.count(), set.region_h(), set.region_w(), set.object_h,
                                set.object_w, lambda);
  return out;
}

LocateResult locate_in_region(const StruckModel& model, const ChannelPatch& region) {
  region.validate();
  if (region.count() != model.weights.count() || region.height() < model.object_h ||
      region.width() < model.object_w) {
    throw ShapeError("locate: region does not fit the model");
  }
  const FilterBank central = model.central();
  const int rows = region.height() - model.object_h + 1;
  const int cols = region.width() - model.object_w + 1;
  LocateResult out;
  out.response = Grid2(rows, cols);
  for (int l = 0; l < region.count(); ++l) {
    const Grid2& w = central.weights[l];
    const Grid2& x = region.channels[l];
    for (int i = 0; i < rows; ++i)
      for (int j = 0; j < cols; ++j) {
        double acc = 0.0;
        for (int r = 0; r < model.object_h; ++r)
          for (int c = 0; c < model.object_w; ++c) acc += w(r, c) * x(i + r, j + c);
        out.response(i, j) += acc;
      }
  }
  out.peak = argmax(out.response);
  out.box = BBox{double(out.peak.col), double(out.peak.row), double(model.object_w),
                 double(model.object_h)};
  return out;
}

LocateResult locate(const StruckModel& model, const ImageFrame& frame, const BBox& search_center,
                    int cell, FeatureKind kind) {
  const int rh = model.weights.height();
  const int rw = model.weights.width();
  const BBox region = region_box(search_center, rh, rw, cell);
  const ImageFrame crop = extract_resampled(frame, region, rw * cell, rh * cell);
  LocateResult out = locate_in_region(model, featurize(to_gray(crop), kind, cell));
  const double dr = out.peak.row - centered_offset(rh, model.object_h);
  const double dc = out.peak.col - centered_offset(rw, model.object_w);
  out.box = BBox::from_center(search_center.center_x() + dc * cell,
                              search_center.center_y() + dr * cell, search_center.width,
                              search_center.height);
  return out;
}

double sample_ratio(int region, int object) {
  if (object < 1 || region < object) throw ShapeError("sample_ratio: need 1 <= object <= region");
  return double(region - object + 1) / region;
}

std::vector<GapPoint> asymptotic_gap(const ImageFrame& frame, const BBox& box, double lambda,
                                     const std::vector<int>& multiples, int cell, FeatureKind kind,
                                     double big) {
  const int h = object_cells(box.height, cell);
  const int w = object_cells(box.width, cell);
  const Grid2 gray = to_gray(frame);
  const ImageFrame gray_frame(gray);
  const double sigma = label_sigma(w, h);
  std::vector<GapPoint> out;
  for (int k : multiples) {
    if (k < 1) throw Error("asymptotic_gap: multiples must be >= 1");
    GapPoint p;
    p.multiple = k;
    p.region_h = k * h;
    p.region_w = k * w;
    p.ratio_w = sample_ratio(p.region_w, w);
    p.ratio_h = sample_ratio(p.region_h, h);
    const BBox region = region_box(box, p.region_h, p.region_w, cell);
    const ImageFrame crop = extract_resampled(gray_frame, region, p.region_w * cell, p.region_h * cell);
    ChannelPatch feat = featurize(crop.planes.front(), kind, cell);

    const SampleWeights weights = SampleWeights::dense(p.region_w, p.region_h, w, h);
    const SampleSet set = sample_set_from_region(feat, h, w, 1);
    const StruckModel s = solve_struck_square(set, sample_labels(set, LabelKind::gaussian, sigma),
                                              lambda, weights);

    const LabelMap labels = gaussian_labels(p.region_h, p.region_w, {0, 0}, sigma);
    const auto reg = SpatialRegularizer::indicator_st(p.region_h, p.region_w, h, w, big);
    const FilterBank d = solve_srdcf(feat, labels, reg, 1.0 / lambda, weights);
    FilterBank d_central;
    for (const auto& x : d.weights) d_central.weights.push_back(crop_centered(x, h, w));
    p.gap = relative_error(d_central, s.central());
    out.push_back(p);
  }
  return out;
}

}  // namespace trackrel
