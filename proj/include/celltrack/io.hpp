#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <nlohmann/json.hpp>
#include <string>
#include <vector>

#include "celltrack/filters.hpp"
#include "celltrack/measurement.hpp"
#include "celltrack/metrics.hpp"
#include "celltrack/simulator.hpp"
#include "celltrack/tracks.hpp"

namespace celltrack {

/// One JSON object per line: {"frame": k, "detections": [{"x":, "y":, "features": [...]}]}.
/// Blank lines are skipped. Errors name the source and line number.
std::vector<DetectionFrame> parse_detections(std::istream& in, const std::string& source = "<input>");
std::vector<DetectionFrame> read_detections(const std::filesystem::path& path);
void write_detections(std::ostream& out, const std::vector<DetectionFrame>& frames);
void write_detections(const std::filesystem::path& path, const std::vector<DetectionFrame>& frames);

/// {"tracks": [{"label", "parent", "points": [{"frame", "x", "y"}]}], "lineage": {...}}.
nlohmann::json tracks_to_json(const TrackSet& ts);
TrackSet tracks_from_json(const nlohmann::json& j);

nlohmann::json read_json(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, const std::string& text);

/// Per-frame filter statistics as CSV.
std::string stats_csv(const RunResult& r);
std::string frame_values_csv(const std::vector<FrameValue>& v, const std::string& column);

}  // namespace celltrack
