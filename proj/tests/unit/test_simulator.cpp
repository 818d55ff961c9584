#include <gtest/gtest.h>

#include <cmath>

#include "celltrack/errors.hpp"
#include "celltrack/io.hpp"
#include "celltrack/simulator.hpp"

using namespace celltrack;

namespace {

ScenarioConfig still(int cells, int frames) {
  ScenarioConfig c;
  c.initial_cells = cells;
  c.frames = frames;
  c.birth_rate = 0.0;
  c.death_prob = 0.0;
  c.mitosis_prob = 0.0;
  c.w_directed = 0.0;
  c.w_diffusion = 1.0;
  c.sigma_diffusion = 0.0;
  return c;
}

std::size_t count_at(const GroundTruth& g, int k) { return g.tracks.at(k).size(); }

}  // namespace

TEST(Simulator, NoEventsKeepsCardinality) {
  const auto g = generate_truth(still(15, 40));
  for (int k = 0; k < 40; ++k) EXPECT_EQ(count_at(g, k), 15u);
}

TEST(Simulator, BirthRateMatchesPoissonMean) {
  double total = 0.0;
  const int runs = 40;
  for (int s = 0; s < runs; ++s) {
    auto c = still(0, 101);
    c.birth_rate = 0.1;
    c.seed = static_cast<std::uint64_t>(s);
    total += static_cast<double>(generate_truth(c).tracks.size());
  }
  // 100 frames of Poisson(0.1) births: mean 10, std of the run average 0.5.
  EXPECT_NEAR(total / runs, 10.0, 2.0);
}

TEST(Simulator, ParentTrackEndsAtDivision) {
  auto c = still(10, 60);
  c.mitosis_prob = 0.05;
  const auto g = generate_truth(c);
  const auto forest = g.tracks.lineage();
  int divisions = 0;
  for (const auto& [parent, kids] : forest.children) {
    if (kids.empty()) continue;
    ++divisions;
    ASSERT_EQ(kids.size(), 2u);
    const int t = kids.front().time();
    const auto& s = g.tracks.tracks.at(parent);
    EXPECT_EQ(s.rbegin()->first, t - 1);
    EXPECT_EQ(g.modes.at(parent).at(t - 1), 1);
    for (const auto& k : kids) EXPECT_EQ(g.tracks.tracks.at(k).begin()->first, t);
  }
  EXPECT_GT(divisions, 0);
}

TEST(Simulator, PerfectSensorWithoutClutter) {
  auto c = still(12, 20);
  c.detection_probability = 1.0;
  c.clutter_rate = 0.0;
  const auto g = generate_truth(c);
  const auto d = generate_detections(g, c);
  ASSERT_EQ(d.size(), 20u);
  for (int k = 0; k < 20; ++k) EXPECT_EQ(d[static_cast<std::size_t>(k)].detections.size(), count_at(g, k));
}

TEST(Simulator, DetectionFraction) {
  auto c = still(100, 100);
  c.clutter_rate = 0.0;
  const auto g = generate_truth(c);
  std::size_t dets = 0;
  for (const auto& f : generate_detections(g, c)) dets += f.detections.size();
  EXPECT_NEAR(static_cast<double>(dets) / 1e4, 0.9, 0.01);
}

TEST(Simulator, ClutterMean) {
  auto c = still(0, 1000);
  const auto d = generate_detections(generate_truth(c), c);
  double n = 0.0;
  for (const auto& f : d) {
    n += static_cast<double>(f.detections.size());
    for (const auto& z : f.detections) {
      EXPECT_GE(z.position(0), 0.0);
      EXPECT_LE(z.position(1), c.height);
      EXPECT_EQ(z.features.size(), 2);
    }
  }
  EXPECT_NEAR(n / 1000.0, 30.0, 1.0);
}

TEST(Simulator, Fixed12Schedule) {
  const auto [g, d] = fixed_scenario_12cells(3);
  EXPECT_EQ(d.size(), 100u);
  std::size_t peak = 0;
  for (int k = 0; k < 100; ++k) peak = std::max(peak, count_at(g, k));
  EXPECT_LE(peak, 12u);
  int divisions = 0;
  for (const auto& [p, kids] : g.tracks.lineage().children) divisions += kids.empty() ? 0 : 1;
  EXPECT_GE(divisions, 3);
  const auto [g2, d2] = fixed_scenario_12cells(3);
  EXPECT_EQ(tracks_to_json(g.tracks).dump(), tracks_to_json(g2.tracks).dump());
  std::ostringstream a, b;
  write_detections(a, d);
  write_detections(b, d2);
  EXPECT_EQ(a.str(), b.str());
}

TEST(Simulator, SeedsDiffer) {
  auto c = still(5, 10);
  c.sigma_diffusion = 3.0;
  auto c2 = c;
  c2.seed = 2;
  EXPECT_NE(tracks_to_json(generate_truth(c).tracks).dump(), tracks_to_json(generate_truth(c2).tracks).dump());
}

TEST(Simulator, Validation) {
  auto c = still(1, 1);
  c.w_directed = 0.5;
  EXPECT_THROW(generate_truth(c), InvalidArgument);
  c = still(1, 1);
  c.margin = 600.0;
  EXPECT_THROW(generate_truth(c), InvalidArgument);
  EXPECT_TRUE(generate_truth(still(3, 0)).tracks.empty());
}
