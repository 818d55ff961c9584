#include <gtest/gtest.h>

#include <filesystem>
#include <sstream>

#include "celltrack/config.hpp"
#include "celltrack/errors.hpp"
#include "celltrack/io.hpp"

using namespace celltrack;

namespace {

std::vector<DetectionFrame> parse(const std::string& text) {
  std::istringstream in(text);
  return parse_detections(in, "dets");
}

std::string parse_error(const std::string& text) {
  try {
    parse(text);
  } catch (const ParseError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST(Detections, ParsesLinesAndSkipsBlank) {
  const auto f = parse(
      "{\"frame\": 0, \"detections\": [{\"x\": 1.5, \"y\": 2, \"features\": [0.9, 0.1]}]}\n"
      "\n"
      "{\"frame\": 3, \"detections\": []}\n");
  ASSERT_EQ(f.size(), 2u);
  EXPECT_EQ(f[1].frame, 3);
  EXPECT_DOUBLE_EQ(f[0].detections[0].position(0), 1.5);
  EXPECT_DOUBLE_EQ(f[0].detections[0].features(1), 0.1);
  EXPECT_TRUE(f[1].detections.empty());
}

TEST(Detections, ErrorsCarryLineNumbers) {
  EXPECT_NE(parse_error("{\"frame\": 0, \"detections\": []}\n{bad json\n").find("dets:2"), std::string::npos);
  EXPECT_NE(parse_error("{\"frame\": 0, \"detections\": [{\"x\": 1}]}").find("dets:1"), std::string::npos);
  EXPECT_NE(parse_error("{\"frame\": 0, \"detections\": [], \"extra\": 1}").find("extra"), std::string::npos);
  EXPECT_NE(parse_error("{\"frame\": 2, \"detections\": []}\n{\"frame\": 2, \"detections\": []}").find("dets:2"),
            std::string::npos);
  EXPECT_NE(parse_error("[1, 2]").find("object"), std::string::npos);
}

TEST(Detections, RoundTrip) {
  std::vector<DetectionFrame> frames{{0, {{(Vec(2) << 1.25, -3.5).finished(), (Vec(2) << 0.3, 0.7).finished()}}},
                                     {4, {}},
                                     {5, {{(Vec(2) << 1e3, 0.125).finished(), Vec()}}}};
  std::ostringstream out;
  write_detections(out, frames);
  const auto back = parse(out.str());
  ASSERT_EQ(back.size(), frames.size());
  for (std::size_t i = 0; i < frames.size(); ++i) {
    EXPECT_EQ(back[i].frame, frames[i].frame);
    ASSERT_EQ(back[i].detections.size(), frames[i].detections.size());
    for (std::size_t j = 0; j < frames[i].detections.size(); ++j) {
      EXPECT_EQ(back[i].detections[j].position, frames[i].detections[j].position);
      EXPECT_EQ(back[i].detections[j].features, frames[i].detections[j].features);
    }
  }
}

TEST(Tracks, JsonRoundTripWithLineage) {
  TrackSet t;
  const auto p = Label::birth(0, 0);
  t.add(p, 0, (Vec(2) << 1, 2).finished());
  t.add(p, 1, (Vec(2) << 2, 3).finished());
  const auto a = Label::spawned(p, 2, 2, 1), b = Label::spawned(p, 2, 2, 2);
  t.add(a, 2, (Vec(2) << 12, 3).finished());
  t.add(b, 2, (Vec(2) << -8, 3).finished());
  const auto j = tracks_to_json(t);
  EXPECT_EQ(j["lineage"]["roots"].size(), 1u);
  EXPECT_EQ(j["lineage"]["children"][p.to_string()].size(), 2u);
  const auto back = tracks_from_json(j);
  EXPECT_EQ(tracks_to_json(back).dump(), j.dump());
  EXPECT_THROW(tracks_from_json(nlohmann::json::object()), ParseError);
}

TEST(Files, MissingFilesRaiseIoError) {
  EXPECT_THROW(read_detections("/nonexistent/dets.jsonl"), IoError);
  EXPECT_THROW(read_json("/nonexistent/config.json"), IoError);
}

TEST(Files, WriteCreatesDirectories) {
  const auto dir = std::filesystem::temp_directory_path() / "celltrack_io_test";
  std::filesystem::remove_all(dir);
  write_text(dir / "a" / "b.txt", "hello");
  EXPECT_TRUE(std::filesystem::exists(dir / "a" / "b.txt"));
  std::filesystem::remove_all(dir);
}

TEST(Config, DefaultsAndOverrides) {
  const auto c = config_from_json(nlohmann::json::parse(R"({
    "seed": 7,
    "filter": {"variant": "ua", "gibbs_samples": 50, "parallel": false},
    "model": {"clutter": {"rate": 12.0}, "detection": {"probability": 0.8}},
    "simulator": {"scenario": "fixed6", "frames": 30},
    "metrics": {"ospa_c": 30.0}
  })"));
  EXPECT_EQ(c.seed, 7u);
  EXPECT_EQ(c.filter.seed, 7u);
  EXPECT_EQ(c.simulator.seed, 7u);
  EXPECT_EQ(c.filter.variant, Variant::UA);
  EXPECT_EQ(c.filter.execution, Execution::Serial);
  EXPECT_EQ(c.filter.gibbs_samples, 50);
  EXPECT_DOUBLE_EQ(c.model.clutter.rate, 12.0);
  EXPECT_DOUBLE_EQ(c.model.detection_probability, 0.8);
  EXPECT_EQ(c.scenario, ScenarioKind::Fixed6);
  EXPECT_EQ(c.simulator.frames, 30);
  EXPECT_DOUBLE_EQ(c.metrics.ospa_c, 30.0);
  EXPECT_NO_THROW(config_from_json(nlohmann::json::object()));
}

TEST(Config, RejectsUnknownKeysAndBadValues) {
  auto err = [](const char* text) -> std::string {
    try {
      config_from_json(nlohmann::json::parse(text));
    } catch (const ParseError& e) {
      return e.what();
    }
    return "";
  };
  EXPECT_NE(err(R"({"filter": {"gibs_samples": 3}})").find("filter"), std::string::npos);
  EXPECT_NE(err(R"({"model": {"clutter": {"rat": 3}}})").find("model.clutter"), std::string::npos);
  EXPECT_NE(err(R"({"bogus": 1})").find("bogus"), std::string::npos);
  EXPECT_FALSE(err(R"({"filter": {"variant": "zz"}})").empty());
  EXPECT_FALSE(err(R"({"filter": {"gibbs_samples": "many"}})").empty());
  EXPECT_FALSE(err(R"({"simulator": {"scenario": "fixed99"}})").empty());
  EXPECT_FALSE(err(R"({"model": {"modes": {"rho_normal": [0.5, 0.6, 0.1]}}})").empty());
  EXPECT_FALSE(err(R"({"metrics": {"ospa_p": 0.5}})").empty());
}
