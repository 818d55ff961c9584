#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "celltrack/dynamics.hpp"
#include "celltrack/errors.hpp"
#include "celltrack/measurement.hpp"
#include "celltrack/models.hpp"

using namespace celltrack;

namespace {

HybridDensity hybrid(Vec mean, Mat cov, CategoricalMode mode = {}, BetaDensity det = {9.0, 1.0}) {
  return {GaussianMixture::single(std::move(mean), std::move(cov)), mode, det};
}

}  // namespace

TEST(GenerationCardinality, TableRows) {
  const ModeModel mm;
  const auto mit = generation_cardinality({0.0, 1.0}, mm);
  EXPECT_NEAR(mit[0], 0.01, 1e-15);
  EXPECT_NEAR(mit[1], 0.09, 1e-15);
  EXPECT_NEAR(mit[2], 0.9, 1e-15);
  const auto nor = generation_cardinality({1.0, 0.0}, mm);
  EXPECT_NEAR(nor[1], 0.98, 1e-15);
  EXPECT_NEAR(nor[2], 0.01, 1e-15);
  const auto half = generation_cardinality({0.5, 0.5}, mm);
  EXPECT_NEAR(half[0], 0.01, 1e-15);
  EXPECT_NEAR(half[1], 0.535, 1e-15);
  EXPECT_NEAR(half[2], 0.455, 1e-15);
}

TEST(GenerationCardinality, SumsToOne) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const ModeModel mm;
  for (int i = 0; i < 100; ++i) {
    const double p = u(rng);
    const auto r = generation_cardinality({p, 1.0 - p}, mm);
    EXPECT_NEAR(r[0] + r[1] + r[2], 1.0, 1e-12);
  }
}

TEST(SurvivalPredict, MemorylessModeLaw) {
  const auto mm = ModeModel::memoryless(0.03, ModeModel{}.rho);
  for (double p : {0.0, 0.3, 1.0}) {
    const auto out = survival_predict(hybrid(Vec::Zero(4), Mat::Identity(4, 4), {p, 1.0 - p}),
                                      MotionModel::cell(0.5, 0.5, 1.0, 1.0), mm, 1.1);
    EXPECT_NEAR(out.mode.p_normal, 0.97, 1e-12);
    EXPECT_NEAR(out.mode.p_mitotic, 0.03, 1e-12);
  }
}

TEST(SurvivalPredict, DeterministicConstantVelocityShift) {
  MotionModel motion = MotionModel::cell(1.0, 0.0, 1.0, 1.0);
  motion.components[0].Q.setZero();
  Vec mu(4);
  mu << 10, 20, 1, -2;
  const auto out = survival_predict(hybrid(mu, Mat::Identity(4, 4)), motion, ModeModel{}, 1.0,
                                    ReductionConfig::none());
  Vec expected(4);
  expected << 11, 18, 1, -2;
  EXPECT_TRUE(out.kinematics.components[0].mean.isApprox(expected));
}

TEST(SurvivalPredict, MixtureWeightsFollowMotion) {
  const auto out = survival_predict(hybrid(Vec::Zero(4), Mat::Identity(4, 4)),
                                    MotionModel::cell(0.3, 0.7, 1.0, 10.0), ModeModel{}, 1.0,
                                    ReductionConfig::none());
  ASSERT_EQ(out.kinematics.size(), 2u);
  EXPECT_NEAR(out.kinematics.components[0].weight, 0.3, 1e-12);
  EXPECT_NEAR(out.kinematics.components[1].weight, 0.7, 1e-12);
}

TEST(SpawnPredict, DaughterOffsets) {
  const auto mit = MitosisModel::cell(1.0, 1, 0.0, 0.0, 10.0, false);
  const auto l = Label::birth(0, 0);
  const auto sp = spawn_predict_joint(hybrid(Vec::Zero(4), Mat::Identity(4, 4)), l, 1, mit, ModeModel{},
                                      ReductionConfig::none());
  ASSERT_EQ(sp.joint.labels.size(), 2u);
  const Vec m = sp.joint.mixture.components[0].mean;
  EXPECT_NEAR(m(0), 10.0, 1e-12);
  EXPECT_NEAR(m(1), 0.0, 1e-12);
  EXPECT_NEAR(m(4), -10.0, 1e-12);
  EXPECT_NEAR(m(5), 0.0, 1e-12);
  EXPECT_NEAR((m.segment(0, 2) - m.segment(4, 2)).norm(), 20.0, 1e-12);
  EXPECT_EQ(*sp.joint.labels[0].parent(), l);
}

TEST(SpawnPredict, SiblingsCorrelatedAndMarginalsValid) {
  const auto mit = MitosisModel::cell(1.0, 2, 30.0, 90.0, 10.0, true);
  Vec mu(4);
  mu << 100, 100, 1, 0;
  const auto sp = spawn_predict_joint(hybrid(mu, 4.0 * Mat::Identity(4, 4)), Label::birth(0, 0), 1, mit,
                                      ModeModel{}, ReductionConfig::none());
  const Mat P = sp.joint.mixture.components[0].cov;
  EXPECT_GT(P.block(0, 4, 4, 4).cwiseAbs().maxCoeff(), 1.0);
  for (const auto& l : sp.joint.labels) {
    const auto m = gm_marginalize(sp.joint, l);
    EXPECT_NEAR(m.total_weight(), 1.0, 1e-12);
    EXPECT_EQ(m.dim(), 4);
  }
  EXPECT_EQ(sp.daughter_detection.s, 9.0);
}

TEST(SpawnPredict, CrossCovarianceMatchesMonteCarlo) {
  const auto mit = MitosisModel::cell(2.0, 1, 0.0, 0.0, 10.0, false);
  Mat P0 = Mat::Identity(4, 4);
  P0(0, 2) = P0(2, 0) = 0.5;
  const auto sp = spawn_predict_joint(hybrid(Vec::Zero(4), P0), Label::birth(0, 0), 1, mit, ModeModel{},
                                      ReductionConfig::none());
  const Mat P = sp.joint.mixture.components[0].cov;
  std::mt19937_64 rng(4);
  std::normal_distribution<double> n01(0.0, 1.0);
  const Mat L0 = P0.llt().matrixL();
  const Mat LQ = mit.Q.cwiseSqrt();  // diagonal
  const int n = 40000;
  double sxy = 0.0, sx = 0.0, sy = 0.0;
  for (int i = 0; i < n; ++i) {
    const Vec x = L0 * Vec::NullaryExpr(4, [&] { return n01(rng); });
    const Vec a = mit.F * x + LQ * Vec::NullaryExpr(4, [&] { return n01(rng); });
    const Vec b = mit.F * x + LQ * Vec::NullaryExpr(4, [&] { return n01(rng); });
    sxy += a(0) * b(0);
    sx += a(0);
    sy += b(0);
  }
  const double cov = sxy / n - (sx / n) * (sy / n);
  EXPECT_NEAR(cov, P(0, 4), 4.0 * std::sqrt((P(0, 0) * P(4, 4) + P(0, 4) * P(0, 4)) / n));
}

TEST(LmbBirth, Weights) {
  const auto a = Label::birth(3, 0), b = Label::birth(3, 1);
  const HybridDensity d = hybrid(Vec::Zero(4), Mat::Identity(4, 4));
  BirthModel bm{{{a, 0.1, d}, {b, 0.1, d}}};
  EXPECT_NEAR(lmb_birth_weight(bm, {}), 0.81, 1e-15);
  EXPECT_NEAR(lmb_birth_weight(bm, {a, b}), 0.01, 1e-15);
  bm.entries[1].r = 0.2;
  EXPECT_NEAR(lmb_birth_weight(bm, {a}), 0.08, 1e-15);
  EXPECT_NEAR(lmb_birth_weight(bm, {b}), 0.18, 1e-15);
  EXPECT_EQ(lmb_birth_weight(bm, {Label::birth(3, 7)}), 0.0);
}

TEST(AdaptiveBirth, EdgeBoostedExistence) {
  const ImageBounds bounds;
  const AdaptiveBirthConfig cfg;
  DetectionFrame f;
  f.detections.push_back({(Vec(2) << 500, 500).finished(), Vec()});
  f.detections.push_back({(Vec(2) << 0, 500).finished(), Vec()});
  f.detections.push_back({(Vec(2) << 25, 500).finished(), Vec()});
  f.detections.push_back({(Vec(2) << 400, 400).finished(), Vec()});
  const auto bm = adaptive_birth(f, {0.0, 0.0, 0.2, 0.9}, 5, bounds, cfg, 4, 2);
  ASSERT_EQ(bm.entries.size(), 3u);
  EXPECT_NEAR(bm.entries[0].r, 0.02, 1e-15);
  EXPECT_NEAR(bm.entries[1].r, 0.06, 1e-15);
  EXPECT_NEAR(bm.entries[2].r, 0.04, 1e-15);
  EXPECT_EQ(bm.entries[2].label, Label::birth(5, 2));
  EXPECT_NEAR(bm.entries[0].density.kinematics.mean()(0), 500.0, 1e-12);
  EXPECT_EQ(bm.entries[0].density.kinematics.mean()(3), 0.0);
  EXPECT_TRUE(adaptive_birth(DetectionFrame{}, {}, 5, bounds, cfg, 4, 2).entries.empty());
}

TEST(DynamicsProperties, GenerationDensityIntegratesToOne) {
  // 1-D quadrature of sum_c rho(c) int Phi_c with one survival and one division kernel.
  const ModeModel mm;
  const CategoricalMode mode{0.4, 0.6};
  const auto rho = generation_cardinality(mode, mm);
  const double h = 0.05;
  auto npdf = [](double x, double m, double v) { return std::exp(-0.5 * (x - m) * (x - m) / v) / std::sqrt(2 * M_PI * v); };
  double s1 = 0.0, s2 = 0.0;
  for (double x = -40; x <= 40; x += h) {
    s1 += npdf(x, 1.0, 2.0) * h;
    for (double y = -40; y <= 40; y += h) s2 += npdf(x, 3.0, 2.0) * npdf(y, -3.0, 2.0) * h * h;
  }
  EXPECT_NEAR(rho[0] + rho[1] * s1 + rho[2] * s2, 1.0, 1e-9);
}

TEST(DynamicsProperties, ParentNeverCoexistsWithDaughters) {
  const auto l = Label::spawned(Label::birth(0, 1), 3, 2, 1);
  for (int c = 0; c <= 2; ++c) {
    const auto s = generated_label_set(l, c, 7);
    const bool has_parent = std::find(s.begin(), s.end(), l) != s.end();
    bool has_child = false;
    for (const auto& x : s) has_child |= !x.is_birth() && x.parent() == l;
    EXPECT_FALSE(has_parent && has_child);
  }
}

TEST(ModeModel, Validation) {
  EXPECT_THROW(ModeModel::memoryless(0.03, {{{0.5, 0.5, 0.5}, {0.0, 0.0, 1.0}}}), InvalidArgument);
  EXPECT_THROW(MotionModel::cell(0.5, 0.6, 1.0, 1.0), InvalidArgument);
}
