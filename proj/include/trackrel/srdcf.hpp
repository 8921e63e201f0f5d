#pragma once

#include "trackrel/cflbmc.hpp"
#include "trackrel/features.hpp"
#include "trackrel/filter_bank.hpp"
#include "trackrel/geometry.hpp"

namespace trackrel {

enum class RegularizerKind { constant, quadratic, indicator_s0, indicator_st };

/// Per-position penalty weights; every value positive and finite.
struct SpatialRegularizer {
  RegularizerKind kind = RegularizerKind::constant;
  Grid2 grid;

  static SpatialRegularizer constant(int height, int width, double value = 1.0);
  /// mu_reg + eta ((c / target_w)^2 + (r / target_h)^2), coordinates taken
  /// from the grid center.
  static SpatialRegularizer quadratic(int height, int width, double target_h, double target_w,
                                      double mu_reg = 0.1, double eta = 3.0);
  /// 1 on the mask's active block, `big` elsewhere.
  static SpatialRegularizer indicator_s0(const MaskSpec& mask, double big = 1e4);
  /// 1 on a centered box_h x box_w block, `big` elsewhere.
  static SpatialRegularizer indicator_st(int height, int width, int box_h, int box_w,
                                         double big = 1e4);

  void validate() const;
};

struct SrdcfOptions {
  int dense_limit = 4096;
  double cg_tolerance = 1e-6;
  int cg_max_iterations = 500;
  const FilterBank* warm_start = nullptr;
};

struct SrdcfSolveInfo {
  bool dense = false;
  int iterations = 0;
  double relative_residual = 0.0;
};

/// Full-grid filter minimizing
///   alpha/2 sum_s (y_s - sum_l <w_l, shift_s x_l>)^2 + lambda/2 sum_l ||reg . w_l||^2.
FilterBank solve_srdcf(const ChannelPatch& base, const LabelMap& labels,
                       const SpatialRegularizer& reg, double lambda,
                       const SampleWeights& weights = SampleWeights::uniform(),
                       const SrdcfOptions& options = {}, SrdcfSolveInfo* info = nullptr);

double srdcf_objective(const ChannelPatch& base, const LabelMap& labels,
                       const SpatialRegularizer& reg, double lambda, const SampleWeights& weights,
                       const FilterBank& filter);

/// Masked ridge filter of active-block dims, by dense normal equations.
FilterBank solve_cflb_dense(const ChannelPatch& base, const LabelMap& labels, const MaskSpec& mask,
                            double lambda);

struct RelationReport {
  double relation_error = 0.0;
  double annulus_energy = 0.0;
};

/// Compares P w_d (indicator regularizer with `big` outside the mask) against
/// the masked ridge filter w_g.
RelationReport masked_relation_check(const ChannelPatch& base, const LabelMap& labels,
                                     const MaskSpec& mask, double big, double lambda);

struct SubcellPeak {
  double row = 0.0;
  double col = 0.0;
};

/// Separable three-point parabola fit around `peak` with cyclic neighbors.
/// Axes without a concave fit keep the integer coordinate.
SubcellPeak subcell_refine(const Grid2& resp, CellIndex peak);

/// Row-major first maximum.
CellIndex argmax(const Grid2& g);

}  // namespace trackrel
