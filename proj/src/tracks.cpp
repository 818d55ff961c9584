#include "celltrack/tracks.hpp"

#include <algorithm>

namespace celltrack {

void TrackSet::add(const Label& l, int frame, Vec position) { tracks[l][frame] = std::move(position); }

LineageForest TrackSet::lineage() const {
  std::set<Label> ls;
  for (const auto& [l, _] : tracks) ls.insert(l);
  return build_lineage_forest(ls);
}

std::vector<std::pair<Label, Vec>> TrackSet::at(int frame) const {
  std::vector<std::pair<Label, Vec>> out;
  for (const auto& [l, series] : tracks) {
    const auto it = series.find(frame);
    if (it != series.end()) out.emplace_back(l, it->second);
  }
  return out;
}

std::vector<Vec> TrackSet::points_at(int frame) const {
  std::vector<Vec> out;
  for (auto& [l, p] : at(frame)) out.push_back(std::move(p));
  return out;
}

std::optional<std::pair<int, int>> TrackSet::frame_range() const {
  std::optional<std::pair<int, int>> r;
  for (const auto& [l, series] : tracks) {
    if (series.empty()) continue;
    const int a = series.begin()->first, b = series.rbegin()->first;
    if (!r)
      r = {a, b};
    else
      r = {std::min(r->first, a), std::max(r->second, b)};
  }
  return r;
}

}  // namespace celltrack
