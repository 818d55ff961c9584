#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "celltrack/errors.hpp"
#include "celltrack/hungarian.hpp"
#include "celltrack/metrics.hpp"

using namespace celltrack;

namespace {

Vec p2(double x, double y) { return (Vec(2) << x, y).finished(); }

/// OSPA with the optimal assignment found by trying every injection.
double brute_ospa(const std::vector<Vec>& X, const std::vector<Vec>& Y, double p, double c) {
  if (X.empty() && Y.empty()) return 0.0;
  const auto& S = X.size() <= Y.size() ? X : Y;
  const auto& L = X.size() <= Y.size() ? Y : X;
  std::vector<std::size_t> perm(L.size());
  std::iota(perm.begin(), perm.end(), 0);
  double best = INFINITY;
  do {
    double s = 0.0;
    for (std::size_t i = 0; i < S.size(); ++i) s += std::pow(std::min(c, (S[i] - L[perm[i]]).norm()), p);
    best = std::min(best, s);
  } while (std::next_permutation(perm.begin(), perm.end()));
  const double total = best + std::pow(c, p) * static_cast<double>(L.size() - S.size());
  return std::pow(total / static_cast<double>(L.size()), 1.0 / p);
}

std::vector<Vec> random_set(std::mt19937_64& rng, int n) {
  std::uniform_real_distribution<double> u(0.0, 40.0);
  std::vector<Vec> out;
  for (int i = 0; i < n; ++i) out.push_back(p2(u(rng), u(rng)));
  return out;
}

TrackSet family() {
  // Parent frames 0..4, daughters 5..9.
  TrackSet t;
  const auto p = Label::birth(0, 0);
  for (int k = 0; k < 5; ++k) t.add(p, k, p2(100 + k, 100));
  const auto a = Label::spawned(p, 5, 2, 1), b = Label::spawned(p, 5, 2, 2);
  for (int k = 5; k < 10; ++k) {
    t.add(a, k, p2(110 + k, 100));
    t.add(b, k, p2(90 + k, 100));
  }
  return t;
}

}  // namespace

TEST(Hungarian, RectangularAndTransposed) {
  Mat c(2, 3);
  c << 4, 1, 3, 2, 0, 5;
  const auto r = hungarian(c);
  EXPECT_DOUBLE_EQ(r.cost, 3.0);
  EXPECT_EQ(r.row_to_col[0], 1);
  EXPECT_EQ(r.row_to_col[1], 0);
  const auto t = hungarian(c.transpose());
  EXPECT_DOUBLE_EQ(t.cost, 3.0);
  EXPECT_EQ(t.row_to_col[2], -1);
  Mat bad = Mat::Zero(1, 1);
  bad(0, 0) = NAN;
  EXPECT_THROW(hungarian(bad), InvalidArgument);
}

TEST(Ospa, Examples) {
  const std::vector<Vec> X{p2(1, 2), p2(5, 5)};
  EXPECT_NEAR(ospa(X, X), 0.0, 1e-12);
  EXPECT_DOUBLE_EQ(ospa({}, {p2(0, 0), p2(1, 1), p2(2, 2)}), 25.0);
  EXPECT_NEAR(ospa({p2(0, 0)}, {p2(3, 4)}), 5.0, 1e-12);
  EXPECT_DOUBLE_EQ(ospa({}, {}), 0.0);
  EXPECT_THROW(ospa(X, X, 0.5, 25.0), InvalidArgument);
}

TEST(Ospa, MatchesExhaustiveAssignment) {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 200; ++trial) {
    const auto X = random_set(rng, trial % 5), Y = random_set(rng, (trial / 5) % 5);
    const double p = trial % 2 ? 1.0 : 2.0;
    EXPECT_NEAR(ospa(X, Y, p, 25.0), brute_ospa(X, Y, p, 25.0), 1e-9);
  }
}

TEST(MetricProperties, OspaAxioms) {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 300; ++trial) {
    const auto X = random_set(rng, trial % 5), Y = random_set(rng, (trial / 5) % 5),
               Z = random_set(rng, (trial / 25) % 5);
    EXPECT_NEAR(ospa(X, X), 0.0, 1e-12);
    EXPECT_NEAR(ospa(X, Y), ospa(Y, X), 1e-12);
    EXPECT_LE(ospa(X, Z), ospa(X, Y) + ospa(Y, Z) + 1e-9);
    EXPECT_LE(ospa(X, Y), 25.0 + 1e-12);
    if (ospa(X, Y) < 1e-12) EXPECT_EQ(X.size(), Y.size());
  }
}

TEST(Ospa2, IdenticalAndWindowOne) {
  const auto t = family();
  for (const auto& v : ospa2(t, t)) EXPECT_NEAR(v.value, 0.0, 1e-12);
  TrackSet e = t;
  e.add(Label::birth(3, 0), 3, p2(500, 500));
  const auto a = ospa2(e, t, 1), b = ospa_per_frame(e, t);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_NEAR(a[i].value, b[i].value, 1e-12);
  for (const auto& v : ospa2(e, t)) EXPECT_LE(v.value, 25.0);
  EXPECT_THROW(ospa2(e, t, 0), InvalidArgument);
}

TEST(Ospa2, LabelSwapRaisesTrackMetricOnly) {
  TrackSet truth, swapped;
  const auto a = Label::birth(0, 0), b = Label::birth(0, 1);
  for (int k = 0; k < 20; ++k) {
    const Vec pa = p2(k * 10.0, k * 10.0), pb = p2(k * 10.0, 190.0 - k * 10.0);
    truth.add(a, k, pa);
    truth.add(b, k, pb);
    swapped.add(a, k, k < 10 ? pa : pb);
    swapped.add(b, k, k < 10 ? pb : pa);
  }
  const auto o = ospa_per_frame(swapped, truth);
  for (const auto& v : o) EXPECT_NEAR(v.value, 0.0, 1e-12);
  const auto o2 = ospa2(swapped, truth, 20);
  EXPECT_GT(o2.back().value, 1.0);
  EXPECT_NEAR(o2[5].value, 0.0, 1e-12);
}

TEST(Tra, IdentityEmptyAndMissingDivisionEdge) {
  const auto t = family();
  EXPECT_DOUBLE_EQ(tra_score(t, t).score, 1.0);
  EXPECT_DOUBLE_EQ(tra_score(TrackSet{}, t).score, 0.0);
  EXPECT_DOUBLE_EQ(tra_score(TrackSet{}, TrackSet{}).score, 1.0);

  // Daughter "a" reported as a fresh birth: one missing division edge.
  TrackSet e;
  const auto p = Label::birth(0, 0);
  for (const auto& [l, s] : t.tracks) {
    const auto nl = (!l.is_birth() && l.sibling_index() == 1) ? Label::birth(5, 0) : l;
    for (const auto& [k, x] : s) e.add(nl, k, x);
  }
  const auto r = tra_score(e, t);
  // 15 nodes; edges: 4 + 4 + 4 continuation and 2 division = 14.
  EXPECT_DOUBLE_EQ(r.aogm_empty, 29.0);
  EXPECT_EQ(r.fn_edges, 1);
  EXPECT_EQ(r.fp_edges, 0);
  EXPECT_NEAR(r.score, 1.0 - 1.0 / 29.0, 1e-12);
  (void)p;
}

TEST(Tra, SemanticAndFalsePositiveEdges) {
  const auto t = family();
  TrackSet e = t;
  e.add(Label::birth(2, 7), 2, p2(800, 800));
  const auto r = tra_score(e, t);
  EXPECT_EQ(r.fp_nodes, 1);
  EXPECT_NEAR(r.score, 1.0 - 1.0 / 29.0, 1e-12);
}

TEST(MetricProperties, TraMonotoneInInjectedErrors) {
  const auto t = family();
  TrackSet e = t;
  double prev = tra_score(e, t).score;
  std::mt19937_64 rng(3);
  for (int i = 0; i < 8; ++i) {
    e.add(Label::birth(1, 10 + i), 1 + i, p2(600 + 40 * i, 600));
    const double s = tra_score(e, t).score;
    EXPECT_LE(s, prev);
    EXPECT_GE(s, 0.0);
    prev = s;
  }
  // Removing truth nodes from the estimate one by one.
  TrackSet f = t;
  prev = tra_score(f, t).score;
  for (int k = 9; k >= 5; --k) {
    std::prev(f.tracks.end())->second.erase(k);
    const double s = tra_score(f, t).score;
    EXPECT_LE(s, prev);
    prev = s;
  }
}

TEST(MitoticError, PerfectAndSpurious) {
  const auto t = family();
  const auto perfect = mitotic_event_error(t, t);
  EXPECT_DOUBLE_EQ(perfect.mean_abs, 0.0);
  for (const auto& v : perfect.per_frame) EXPECT_DOUBLE_EQ(v.value, 0.0);

  TrackSet e = t;
  const auto other = Label::birth(0, 1);
  for (int k = 0; k < 7; ++k) e.add(other, k, p2(300, 300));
  e.add(Label::spawned(other, 7, 2, 1), 7, p2(310, 300));
  e.add(Label::spawned(other, 7, 2, 2), 7, p2(290, 300));
  const auto err = mitotic_event_error(e, t);
  for (const auto& v : err.per_frame) EXPECT_DOUBLE_EQ(v.value, v.frame == 7 ? 1.0 : 0.0);
  EXPECT_NEAR(err.mean_abs, 0.1, 1e-12);
}

TEST(MitoticError, MatchesLineageRecount) {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 30; ++trial) {
    TrackSet ts;
    std::vector<Label> alive{Label::birth(0, 0), Label::birth(0, 1)};
    std::map<int, int> truth_count;
    for (int k = 0; k < 15; ++k) {
      std::vector<Label> next;
      int events = 0;
      for (const auto& l : alive) {
        ts.add(l, k, p2(k, 0));
        if (k + 1 < 15 && std::uniform_real_distribution<double>(0, 1)(rng) < 0.15) {
          ++events;
          next.push_back(Label::spawned(l, k + 1, 2, 1));
          next.push_back(Label::spawned(l, k + 1, 2, 2));
        } else {
          next.push_back(l);
        }
      }
      if (events) truth_count[k + 1] = events;
      alive = std::move(next);
    }
    const auto lf = ts.lineage();
    for (const auto& v : division_counts(ts, 0, 14)) {
      int recount = 0;
      for (const auto& [parent, kids] : lf.children)
        if (!kids.empty() && kids.front().time() == v.frame) ++recount;
      EXPECT_DOUBLE_EQ(v.value, recount);
      EXPECT_EQ(recount, truth_count.count(v.frame) ? truth_count[v.frame] : 0);
    }
  }
}

TEST(CardinalityError, SignedDifference) {
  const auto t = family();
  TrackSet e = t;
  e.add(Label::birth(2, 7), 2, p2(800, 800));
  for (const auto& v : cardinality_error(e, t)) EXPECT_DOUBLE_EQ(v.value, v.frame == 2 ? 1.0 : 0.0);
}
