#pragma once

#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "celltrack/densities.hpp"
#include "celltrack/labels.hpp"

namespace celltrack {

/// Labeled trajectories: per label, a frame-indexed position series.
struct TrackSet {
  std::map<Label, std::map<int, Vec>> tracks;

  void add(const Label& l, int frame, Vec position);
  bool empty() const { return tracks.empty(); }
  std::size_t size() const { return tracks.size(); }

  LineageForest lineage() const;
  /// (label, position) pairs present at `frame`, in label order.
  std::vector<std::pair<Label, Vec>> at(int frame) const;
  std::vector<Vec> points_at(int frame) const;
  /// Inclusive frame range covered by any track; nullopt when empty.
  std::optional<std::pair<int, int>> frame_range() const;
};

}  // namespace celltrack
