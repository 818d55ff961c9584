#include "celltrack/io.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "celltrack/errors.hpp"

namespace celltrack {

using nlohmann::json;

namespace {

double number(const json& j, const char* key, const std::string& where) {
  const auto it = j.find(key);
  if (it == j.end() || !it->is_number()) throw ParseError(where + ": missing numeric field '" + key + "'");
  return it->get<double>();
}

std::string fmt(double v) {
  if (std::isnan(v)) return "nan";
  std::ostringstream os;
  os << std::setprecision(10) << v;
  return os.str();
}

}  // namespace

std::vector<DetectionFrame> parse_detections(std::istream& in, const std::string& source) {
  std::vector<DetectionFrame> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string where = source + ":" + std::to_string(lineno);
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      throw ParseError(where + ": " + e.what());
    }
    if (!j.is_object()) throw ParseError(where + ": expected a JSON object");
    for (const auto& [k, _] : j.items())
      if (k != "frame" && k != "detections") throw ParseError(where + ": unknown key '" + k + "'");
    const auto fit = j.find("frame");
    if (fit == j.end() || !fit->is_number_integer()) throw ParseError(where + ": missing integer 'frame'");
    DetectionFrame f;
    f.frame = fit->get<int>();
    if (!out.empty() && f.frame <= out.back().frame) throw ParseError(where + ": frames must increase");
    const auto dit = j.find("detections");
    if (dit == j.end() || !dit->is_array()) throw ParseError(where + ": missing array 'detections'");
    for (const auto& d : *dit) {
      if (!d.is_object()) throw ParseError(where + ": detection must be an object");
      Detection det;
      det.position = Vec(2);
      det.position << number(d, "x", where), number(d, "y", where);
      if (const auto ft = d.find("features"); ft != d.end()) {
        if (!ft->is_array()) throw ParseError(where + ": 'features' must be an array");
        det.features = Vec(static_cast<Eigen::Index>(ft->size()));
        for (std::size_t i = 0; i < ft->size(); ++i) {
          if (!(*ft)[i].is_number()) throw ParseError(where + ": features must be numbers");
          det.features(static_cast<Eigen::Index>(i)) = (*ft)[i].get<double>();
        }
      }
      f.detections.push_back(std::move(det));
    }
    out.push_back(std::move(f));
  }
  return out;
}

std::vector<DetectionFrame> read_detections(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open detections file " + path.string());
  return parse_detections(in, path.string());
}

void write_detections(std::ostream& out, const std::vector<DetectionFrame>& frames) {
  for (const auto& f : frames) {
    json dets = json::array();
    for (const auto& d : f.detections) {
      json o = {{"x", d.position(0)}, {"y", d.position.size() > 1 ? d.position(1) : 0.0}};
      json feats = json::array();
      for (Eigen::Index i = 0; i < d.features.size(); ++i) feats.push_back(d.features(i));
      o["features"] = feats;
      dets.push_back(std::move(o));
    }
    out << json{{"frame", f.frame}, {"detections", dets}}.dump() << '\n';
  }
}

void write_detections(const std::filesystem::path& path, const std::vector<DetectionFrame>& frames) {
  std::ostringstream os;
  write_detections(os, frames);
  write_text(path, os.str());
}

json tracks_to_json(const TrackSet& ts) {
  json tracks = json::array();
  for (const auto& [l, s] : ts.tracks) {
    json pts = json::array();
    for (const auto& [k, p] : s) pts.push_back({{"frame", k}, {"x", p(0)}, {"y", p.size() > 1 ? p(1) : 0.0}});
    const auto par = l.parent();
    tracks.push_back({{"label", l.to_string()}, {"parent", par ? json(par->to_string()) : json(nullptr)}, {"points", pts}});
  }
  const auto forest = ts.lineage();
  json roots = json::array();
  for (const auto& r : forest.roots) roots.push_back(r.to_string());
  json children = json::object();
  for (const auto& [p, kids] : forest.children) {
    json ks = json::array();
    for (const auto& k : kids) ks.push_back(k.to_string());
    children[p.to_string()] = ks;
  }
  return {{"tracks", tracks}, {"lineage", {{"roots", roots}, {"children", children}}}};
}

TrackSet tracks_from_json(const json& j) {
  if (!j.is_object() || !j.contains("tracks") || !j["tracks"].is_array())
    throw ParseError("track file needs a 'tracks' array");
  TrackSet ts;
  for (const auto& t : j["tracks"]) {
    if (!t.contains("label") || !t["label"].is_string()) throw ParseError("track entry without a label string");
    const auto l = Label::parse(t["label"].get<std::string>());
    int last = std::numeric_limits<int>::min();
    for (const auto& p : t.value("points", json::array())) {
      const int k = p.at("frame").get<int>();
      if (k <= last) throw ParseError("track " + l.to_string() + ": frames must increase");
      last = k;
      Vec v(2);
      v << number(p, "x", l.to_string()), number(p, "y", l.to_string());
      ts.add(l, k, std::move(v));
    }
    if (!ts.tracks.count(l)) ts.tracks[l];
  }
  return ts;
}

json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
    if (ec) throw IoError("cannot create directory " + path.parent_path().string() + ": " + ec.message());
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  if (!out) throw IoError("write failed for " + path.string());
}

std::string stats_csv(const RunResult& r) {
  std::ostringstream os;
  os << "frame,estimated_count,cardinality_mean,cardinality_std,divisions_mean,p_no_division,clutter_estimate,"
        "mean_detection,hypotheses\n";
  for (const auto& f : r.frames) {
    double dm = 0.0;
    for (std::size_t n = 0; n < f.spawn.divisions.size(); ++n) dm += static_cast<double>(n) * f.spawn.divisions[n];
    os << f.frame << ',' << f.estimate.cardinality << ',' << fmt(f.cardinality_mean) << ','
       << fmt(f.cardinality_std) << ',' << fmt(dm) << ',' << fmt(f.spawn.divisions.empty() ? 1.0 : f.spawn.divisions[0])
       << ',' << fmt(f.clutter_estimate) << ',' << fmt(f.mean_detection) << ',' << f.hypotheses << '\n';
  }
  return os.str();
}

std::string frame_values_csv(const std::vector<FrameValue>& v, const std::string& column) {
  std::ostringstream os;
  os << "frame," << column << '\n';
  for (const auto& f : v) os << f.frame << ',' << fmt(f.value) << '\n';
  return os.str();
}

}  // namespace celltrack
