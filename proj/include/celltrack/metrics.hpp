#pragma once

#include <utility>
#include <vector>

#include "celltrack/densities.hpp"
#include "celltrack/tracks.hpp"

namespace celltrack {

/// OSPA from a pairwise base-distance matrix (rows: X, cols: Y).
double ospa_from_distances(const Mat& dist, double p, double c);

/// OSPA between point sets with Euclidean base distance.
double ospa(const std::vector<Vec>& X, const std::vector<Vec>& Y, double p = 1.0, double c = 25.0);

struct FrameValue {
  int frame = 0;
  double value = 0.0;
};

/// OSPA between the points of both track sets at every frame of their joint range.
std::vector<FrameValue> ospa_per_frame(const TrackSet& est, const TrackSet& truth, double p = 1.0, double c = 25.0);

/// Sliding-window OSPA on tracks. The base distance of two track segments is the
/// order-p mean over window frames where either exists of min(c, d), with c
/// standing in for frames where only one of them exists.
std::vector<FrameValue> ospa2(const TrackSet& est, const TrackSet& truth, int window = 20, double p = 1.0,
                              double c = 25.0);

struct TraWeights {
  double fn_node = 1.0;
  double fp_node = 1.0;
  double split_node = 1.0;
  double fn_edge = 1.0;
  double fp_edge = 1.0;
  double semantic_edge = 1.0;
};

struct TraResult {
  double score = 1.0;
  int fn_nodes = 0;
  int fp_nodes = 0;
  int split_nodes = 0;
  int fn_edges = 0;
  int fp_edges = 0;
  int semantic_edges = 0;
  double aogm = 0.0;
  double aogm_empty = 0.0;
};

/// Graph-matching lineage score with per-frame Euclidean matching inside `radius`.
TraResult tra_score(const TrackSet& est, const TrackSet& truth, double radius = 25.0, const TraWeights& w = {});

/// Division events per frame: distinct parents of daughter labels created at that frame.
std::vector<FrameValue> division_counts(const TrackSet& tracks, int first, int last);

struct MitoticError {
  std::vector<FrameValue> per_frame;  // estimated minus true
  double mean_abs = 0.0;
};

MitoticError mitotic_event_error(const TrackSet& est, const TrackSet& truth);

/// Per-frame |est| - |truth|.
std::vector<FrameValue> cardinality_error(const TrackSet& est, const TrackSet& truth);

}  // namespace celltrack
