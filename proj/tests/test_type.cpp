#include <gtest/gtest.h>

#include <random>

#include "support.hpp"

using namespace srk;

namespace {

Type bit() { return Type::sum(Type::unit(), Type::unit()); }

Type random_type(std::mt19937& rng, int depth) {
  std::uniform_int_distribution<int> pick(0, depth == 0 ? 0 : 2);
  switch (pick(rng)) {
    case 0: return Type::unit();
    case 1: return Type::sum(random_type(rng, depth - 1), random_type(rng, depth - 1));
    default: return Type::prod(random_type(rng, depth - 1), random_type(rng, depth - 1));
  }
}

}  // namespace

TEST(Type, SizesFollowStructure) {
  EXPECT_EQ(Type::unit().size(), 1u);
  EXPECT_EQ(bit().size(), 2u);
  EXPECT_EQ(numeral_type(4).size(), 4u);
  EXPECT_EQ(Type::prod(bit(), numeral_type(3)).size(), 6u);
  EXPECT_EQ(Type::sum(Type::prod(bit(), bit()), numeral_type(3)).size(), 7u);
}

TEST(Type, PrintsAndParses) {
  Type t = Type::prod(bit(), numeral_type(3));
  EXPECT_EQ(t.str(), "(Prod (Sum Unit Unit) (Sum Unit (Sum Unit Unit)))");
  EXPECT_EQ(parse_type(t.str()), t);
  EXPECT_THROW(parse_type("(Sum Unit)"), ParseError);
  EXPECT_THROW(parse_type("Num"), ParseError);
}

TEST(Universe, UnitHasOneValue) {
  auto vs = enumerate_values(Type::unit());
  ASSERT_EQ(vs.size(), 1u);
  EXPECT_EQ(vs[0], Value::unit());
}

TEST(Universe, NumeralsCountUp) {
  Type num = numeral_type(4);
  auto vs = enumerate_values(num);
  ASSERT_EQ(vs.size(), 4u);
  for (std::uint64_t k = 0; k < 4; ++k) {
    EXPECT_EQ(vs[k], numeral_value(num, k));
    EXPECT_EQ(numeral_index(vs[k]), k);
    EXPECT_EQ(format_value(num, vs[k]), std::to_string(k));
  }
  EXPECT_EQ(vs[0], Value::left(Value::unit()));
  EXPECT_EQ(vs[3], Value::right(Value::right(Value::right(Value::unit()))));
}

TEST(Universe, ThreeValuedSum) {
  EXPECT_EQ(enumerate_values(numeral_type(3)).size(), 3u);
}

TEST(Universe, LeftsPrecedeRightsAndPairsAreLexicographic) {
  Type t = Type::prod(Type::sum(bit(), Type::unit()), bit());
  auto vs = enumerate_values(t);
  ASSERT_EQ(vs.size(), 6u);
  EXPECT_EQ(vs[0], Value::pair(Value::left(Value::left(Value::unit())), Value::left(Value::unit())));
  EXPECT_EQ(vs[1], Value::pair(Value::left(Value::left(Value::unit())), Value::right(Value::unit())));
  EXPECT_EQ(vs[4], Value::pair(Value::right(Value::unit()), Value::left(Value::unit())));
}

TEST(Universe, RankUnrankBijectionOnRandomTypes) {
  std::mt19937 rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    Type t = random_type(rng, 4);
    if (t.size() > 5000) continue;
    ValueUniverse u{t};
    for (std::uint64_t i = 0; i < u.size(); ++i) {
      Value v = u.unrank(i);
      ASSERT_TRUE(inhabits(v, t));
      ASSERT_EQ(u.rank(v), i) << t.str();
    }
  }
}

TEST(Universe, InhabitsRejectsWrongShapes) {
  EXPECT_FALSE(inhabits(Value::left(Value::unit()), Type::unit()));
  EXPECT_FALSE(inhabits(Value::pair(Value::unit(), Value::unit()), bit()));
  EXPECT_TRUE(inhabits(Value::right(Value::unit()), bit()));
}
