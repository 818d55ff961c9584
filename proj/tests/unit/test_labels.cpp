#include <gtest/gtest.h>

#include <random>

#include "celltrack/errors.hpp"
#include "celltrack/labels.hpp"

using namespace celltrack;

namespace {

Label random_label(std::mt19937_64& rng, int depth) {
  std::uniform_int_distribution<int> t(0, 3), idx(0, 3), q(1, 2);
  Label l = Label::birth(t(rng), idx(rng));
  for (int d = 0; d < depth; ++d) l = Label::spawned(l, l.time() + 1 + t(rng), 2, q(rng));
  return l;
}

}  // namespace

TEST(Labels, ParentOfDaughter) {
  const auto b = Label::birth(1, 0);
  EXPECT_EQ(*parent(Label::spawned(b, 5, 2, 1)), b);
}

TEST(Labels, BirthHasNoParent) { EXPECT_FALSE(parent(Label::birth(3, 2)).has_value()); }

TEST(Labels, ParentUnwrapsOneLevel) {
  const auto mid = Label::spawned(Label::birth(1, 0), 5, 2, 2);
  EXPECT_EQ(*parent(Label::spawned(mid, 9, 2, 2)), mid);
}

TEST(Labels, GeneratedSets) {
  const auto b = Label::birth(1, 0);
  EXPECT_EQ(generated_label_set(b, 1, 6), std::vector<Label>{b});
  EXPECT_TRUE(generated_label_set(b, 0, 6).empty());
  const auto two = generated_label_set(b, 2, 6);
  ASSERT_EQ(two.size(), 2u);
  EXPECT_EQ(two[0].sibling_index(), 1);
  EXPECT_EQ(two[1].sibling_index(), 2);
  EXPECT_EQ(two[0].time(), 6);
  EXPECT_THROW(generated_label_set(b, 3, 6), InvalidArgument);
}

TEST(Labels, DaughterMustFollowParent) {
  EXPECT_THROW(Label::spawned(Label::birth(4, 0), 4, 2, 1), InvalidArgument);
  EXPECT_THROW(Label::spawned(Label::birth(1, 0), 5, 2, 3), InvalidArgument);
}

TEST(Labels, Ancestry) {
  const auto b = Label::birth(1, 0);
  EXPECT_EQ(ancestry(b), std::vector<Label>{b});
  const auto d = Label::spawned(b, 5, 2, 1);
  EXPECT_EQ(ancestry(d), (std::vector<Label>{b, d}));
  const auto g = Label::spawned(d, 9, 2, 2);
  const auto chain = ancestry(g);
  ASSERT_EQ(chain.size(), 3u);
  EXPECT_EQ(chain.front(), b);
  EXPECT_EQ(g.depth(), 2);
}

TEST(Labels, LineageForest) {
  const auto b = Label::birth(1, 0);
  const auto f1 = build_lineage_forest({b});
  EXPECT_EQ(f1.roots.size(), 1u);
  EXPECT_TRUE(f1.children.empty() || f1.children.at(b).empty());

  const auto d1 = Label::spawned(b, 5, 2, 1), d2 = Label::spawned(b, 5, 2, 2);
  const auto f2 = build_lineage_forest({b, d1, d2});
  EXPECT_EQ(f2.roots, std::set<Label>{b});
  EXPECT_EQ(f2.children.at(b), (std::vector<Label>{d1, d2}));

  const auto f3 = build_lineage_forest({d1});
  EXPECT_EQ(f3.roots, std::set<Label>{d1});
}

TEST(Labels, StringRoundTrip) {
  const auto l = Label::spawned(Label::spawned(Label::birth(1, 3), 5, 2, 2), 9, 2, 1);
  EXPECT_EQ(Label::birth(1, 3).to_string(), "1.3");
  EXPECT_EQ(l.to_string(), "1.3|5:2:2|9:2:1");
  EXPECT_EQ(Label::parse(l.to_string()), l);
  EXPECT_THROW(Label::parse("1.x"), ParseError);
  EXPECT_THROW(Label::parse("1.0|5:2"), ParseError);
  EXPECT_THROW(Label::parse(""), ParseError);
}

TEST(LabelProperties, DistinctParentsGenerateDisjointSets) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 500; ++trial) {
    const auto a = random_label(rng, trial % 3), b = random_label(rng, (trial / 3) % 3);
    if (a == b) continue;
    const int t = std::max(a.time(), b.time()) + 1;
    for (int c = 0; c <= 2; ++c)
      for (int c2 = 0; c2 <= 2; ++c2) {
        const auto sa = generated_label_set(a, c, t), sb = generated_label_set(b, c2, t);
        for (const auto& x : sa)
          for (const auto& y : sb) EXPECT_NE(x, y);
      }
  }
}

TEST(LabelProperties, SameParentSurvivalAndDivisionDisjoint) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const auto l = random_label(rng, trial % 4);
    const auto s = generated_label_set(l, 1, l.time() + 1), d = generated_label_set(l, 2, l.time() + 1);
    for (const auto& x : d) {
      EXPECT_NE(x, s.front());
      EXPECT_EQ(*parent(x), l);
    }
  }
}

TEST(LabelProperties, AncestryTimesStrictlyIncrease) {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 200; ++trial) {
    const auto chain = ancestry(random_label(rng, trial % 5));
    for (std::size_t i = 1; i < chain.size(); ++i) EXPECT_LT(chain[i - 1].time(), chain[i].time());
    EXPECT_EQ(static_cast<int>(chain.size()), 1 + chain.back().depth());
  }
}

TEST(LabelProperties, TotalOrderConsistentWithEquality) {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 300; ++trial) {
    const auto a = random_label(rng, trial % 3), b = random_label(rng, trial % 2);
    const auto ab = a <=> b, ba = b <=> a;
    EXPECT_EQ(ab == 0, a == b);
    EXPECT_EQ(ab < 0, ba > 0);
    if (a == b) EXPECT_EQ(a.hash(), b.hash());
  }
}
