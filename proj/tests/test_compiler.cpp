#include <gtest/gtest.h>

#include <set>

#include "support.hpp"

using namespace srk;
using srk::test::load;
using srk::test::source;

namespace {

const Type kBit = Type::sum(Type::unit(), Type::unit());
const Type kThree = numeral_type(3);
const Type kNum = numeral_type(4);

std::string bits_str(const std::vector<bool>& bits) {
  std::string s;
  for (bool b : bits) s += b ? '1' : '0';
  return s;
}

}  // namespace

TEST(Unroll, RemovesRelations) {
  auto p = load("programs/connect.srk");
  for (std::size_t d = 0; d <= 3; ++d) {
    auto u = unroll(p, d);
    EXPECT_TRUE(u.rels.empty());
    EXPECT_FALSE(has_calls(u.query.body));
    EXPECT_TRUE(check_program(u).empty());
  }
}

TEST(Unroll, CallDepth) {
  EXPECT_EQ(call_depth(load("programs/coins.srk")), 1u);
  EXPECT_EQ(call_depth(load("programs/graph.srk")), 1u);
  EXPECT_EQ(call_depth(load("programs/sudoku4.srk")), 2u);
  EXPECT_EQ(call_depth(load("programs/three_values.srk")), 0u);
  EXPECT_FALSE(call_depth(load("programs/connect.srk")).has_value());
  EXPECT_FALSE(call_depth(load("programs/fair.srk")).has_value());
}

TEST(Unroll, DeepEnoughIsExact) {
  auto p = load("programs/dice.srk");
  auto exact = run_query<RealInfSemiring>(p);
  auto shallow = run_query<RealInfSemiring>(unroll(p, 0));
  auto deep = run_query<RealInfSemiring>(unroll(p, 1));
  for (std::uint64_t i = 0; i < exact.size(); ++i) {
    EXPECT_EQ(shallow[i], 0.0);
    EXPECT_NEAR(deep[i], exact[i], 1e-12);
  }
}

TEST(Unroll, ConnectGrowsWithDepth) {
  auto p = load("programs/connect.srk");
  auto at = [&](std::size_t d) { return srk::test::bool_cells(run_query<BooleanSemiring>(unroll(p, d))); };
  // Each call uses a level, including the calls to graph.
  EXPECT_EQ(at(1), std::vector<bool>(16, false));
  std::vector<bool> edges = {0, 1, 0, 0,  1, 0, 1, 0,  0, 0, 0, 0,  0, 0, 1, 0};
  EXPECT_EQ(at(2), edges);
  std::vector<bool> closure = {1, 1, 1, 0,  1, 1, 1, 0,  0, 0, 0, 0,  0, 0, 1, 0};
  EXPECT_EQ(at(3), closure);
}

TEST(Bitify, Types) {
  EXPECT_TRUE(is_bit_type(kBit));
  EXPECT_FALSE(is_bit_type(kThree));
  EXPECT_EQ(bit_width(Type::unit()), 0u);
  EXPECT_EQ(bit_width(bitify_type(kThree)), 2u);
  EXPECT_EQ(bit_width(bitify_type(kNum)), 3u);
  // Sum of a 3-bit product and a 2-bit numeral: tag plus three payload bits.
  Type shape = Type::sum(Type::prod(kBit, Type::prod(kBit, kBit)), kThree);
  EXPECT_EQ(bit_width(bitify_type(shape)), 4u);
  EXPECT_EQ(bitify_type(kBit), kBit);
}

TEST(Bitify, NumeralEmbedding) {
  Type bt = bitify_type(kNum);
  std::vector<std::string> got;
  for (const auto& v : enumerate_values(kNum)) got.push_back(bits_str(flat_bits(bt, embed_value(kNum, v))));
  EXPECT_EQ(got, (std::vector<std::string>{"000", "100", "110", "111"}));
}

TEST(Bitify, EmbedDecodeRoundTrip) {
  std::vector<Type> types = {
      Type::unit(), kBit, kThree, kNum, Type::prod(kBit, kThree),
      Type::sum(Type::prod(kBit, Type::prod(kBit, kBit)), kThree),
      Type::sum(kThree, Type::prod(kThree, kThree)), Type::sum(Type::unit(), Type::prod(kNum, kBit))};
  for (const auto& t : types) {
    Type bt = bitify_type(t);
    ASSERT_TRUE(is_bit_type(bt));
    std::set<std::string> images;
    for (const auto& v : enumerate_values(t)) {
      Value b = embed_value(t, v);
      ASSERT_TRUE(inhabits(b, bt));
      auto back = decode_value(t, b);
      ASSERT_TRUE(back.has_value());
      EXPECT_EQ(*back, v) << t.str();
      images.insert(bits_str(flat_bits(bt, b)));
    }
    EXPECT_EQ(images.size(), t.size()) << t.str();
    std::size_t decodable = 0;
    for (const auto& b : enumerate_values(bt)) decodable += decode_value(t, b).has_value();
    EXPECT_EQ(decodable, t.size()) << t.str();
  }
}

TEST(Bitify, ValidityCountsValues) {
  for (const auto& t : {kThree, kNum, Type::sum(kThree, Type::prod(kBit, kBit)), kBit}) {
    Type bt = bitify_type(t);
    Program p;
    p.query.params = {Binding{"x", bt, {}}};
    p.query.body = validity_goal(t, "x");
    auto arr = run_query<RealInfSemiring>(p);
    double total = 0;
    for (std::uint64_t i = 0; i < arr.size(); ++i) {
      EXPECT_TRUE(arr[i] == 0.0 || arr[i] == 1.0);
      total += arr[i];
      bool valid = decode_value(t, arr.values_at(i)[0]).has_value();
      EXPECT_EQ(arr[i] == 1.0, valid) << t.str() << " entry " << i;
    }
    EXPECT_EQ(total, double(t.size())) << t.str();
    EXPECT_EQ(arr.size(), std::uint64_t(1) << bit_width(bt));
  }
}

TEST(Bitify, CountsStayExact) {
  auto three = bitify(load("programs/three_values.srk"));
  EXPECT_EQ(run_query<RealInfSemiring>(three).scalar(), 3.0);
  EXPECT_TRUE(run_query<BooleanSemiring>(three).scalar());
  auto none = bitify(load("programs/four_distinct.srk"));
  EXPECT_EQ(run_query<RealInfSemiring>(none).scalar(), 0.0);
  EXPECT_FALSE(run_query<BooleanSemiring>(none).scalar());
}

TEST(Bitify, OutputIsOverBitTypes) {
  for (const auto& f : srk::test::corpus_programs()) {
    auto b = bitify(load(f));
    EXPECT_TRUE(check_program(b).empty()) << f;
    for (const auto& r : b.rels)
      for (const auto& param : r.params) EXPECT_TRUE(is_bit_type(param.type)) << f;
    for (const auto& param : b.query.params) EXPECT_TRUE(is_bit_type(param.type)) << f;
  }
}

// Weights at valid bitstrings equal the source program's weights, and
// invalid bitstrings weigh zero.
template <Semiring S>
void check_bitify_preserves(EvalOptions opts = {}) {
  std::vector<std::string> skipped;
  for (const auto& f : srk::test::corpus_programs()) {
    auto p = load(f);
    auto want = srk::test::try_run<S>(p, opts);
    auto got_bits = srk::test::try_run<S>(bitify(p), opts);
    if (!want || !got_bits) {
      skipped.push_back(f);
      continue;
    }
    WeightArray<S> got;
    ASSERT_TRUE(srk::test::reindex_from_bits(*got_bits, p.query.params, got)) << f;
    for (std::uint64_t i = 0; i < want->size(); ++i)
      EXPECT_TRUE(S::approx_eq((*want)[i], got[i], 1e-9))
          << f << " entry " << i << ": " << S::display((*want)[i]) << " vs " << S::display(got[i]);
  }
  EXPECT_EQ(skipped, std::vector<std::string>{"programs/sudoku4.srk"});
}

TEST(Bitify, PreservesBooleanMeaning) { check_bitify_preserves<BooleanSemiring>(); }
TEST(Bitify, PreservesRealMeaning) {
  check_bitify_preserves<RealInfSemiring>(srk::test::widened());
}
TEST(Bitify, PreservesTropicalMeaning) { check_bitify_preserves<TropicalSemiring>(); }

TEST(Stages, UnrollAndBitifyCommute) {
  for (const auto& f : srk::test::corpus_programs()) {
    auto p = load(f);
    auto bp = bitify(p);
    for (std::size_t d = 0; d <= 3; ++d) {
      auto a = srk::test::try_run<BooleanSemiring>(bitify(unroll(p, d)));
      auto b = srk::test::try_run<BooleanSemiring>(unroll(bp, d));
      ASSERT_EQ(a.has_value(), b.has_value()) << f;
      if (!a) {
        EXPECT_EQ(f, "programs/sudoku4.srk");
        continue;
      }
      EXPECT_EQ(srk::test::bool_cells(*a), srk::test::bool_cells(*b)) << f << " depth " << d;
    }
  }
}

TEST(Formula, Equality) {
  auto c = compile_program(source("(run ((x : (Sum Unit Unit)) (y : (Sum Unit Unit))) (== x y))"));
  ASSERT_EQ(c.varmap.size(), 2u);
  EXPECT_EQ(c.varmap.entries[0].vars, std::vector<int>{1});
  EXPECT_EQ(c.varmap.entries[1].vars, std::vector<int>{2});
  for (int m = 0; m < 4; ++m) {
    bool x = m & 1, y = m & 2;
    EXPECT_EQ(c.formula.eval({false, x, y}), x == y);
  }
}

TEST(Formula, Factors) {
  auto zero = compile_program(source("(run ((x : (Sum Unit Unit))) (factor 0))"));
  EXPECT_EQ(zero.formula.root(), PropFormula::kFalse);
  EXPECT_FALSE(solve(zero.cnf).sat());
  auto some = compile_program(source("(run ((x : (Sum Unit Unit))) (factor 0.7))"));
  EXPECT_EQ(some.formula.root(), PropFormula::kTrue);
  EXPECT_TRUE(solve(some.cnf).sat());
}

TEST(Formula, ThreeValuedValidity) {
  auto c = compile_program(source("(run ((x : (Sum Unit (Sum Unit Unit)))) (factor 1))"));
  ASSERT_EQ(c.varmap.entries[0].width(), 2u);
  int tag = c.varmap.entries[0].vars[0], payload = c.varmap.entries[0].vars[1];
  std::vector<bool> a(c.formula.num_vars() + 1);
  // The padding bit of the left variant must be 0.
  a[tag] = false;
  a[payload] = true;
  EXPECT_FALSE(c.formula.eval(a));
  a[payload] = false;
  EXPECT_TRUE(c.formula.eval(a));
}

TEST(Pipeline, SatMatchesNaiveOnNonRecursiveCorpus) {
  std::size_t checked = 0;
  for (const auto& f : srk::test::corpus_programs()) {
    auto p = load(f);
    if (!call_depth(p)) continue;
    if (checked_entries(dims_of(p.query.params), kSizeSaturated, "query") > 4096) continue;
    auto c = compile_program(p);
    auto sat = sat_query_array(c);
    auto naive = run_query<BooleanSemiring>(p);
    EXPECT_EQ(srk::test::bool_cells(sat), srk::test::bool_cells(naive)) << f;
    ++checked;
  }
  EXPECT_GE(checked, 9u);
}

TEST(Pipeline, ConnectUnderApproximates) {
  auto p = load("programs/connect.srk");
  auto exact = srk::test::bool_cells(run_query<BooleanSemiring>(p));
  std::vector<bool> prev(exact.size(), false);
  for (std::size_t d = 0; d <= 3; ++d) {
    auto got = srk::test::bool_cells(sat_query_array(compile_program(p, d)));
    for (std::size_t i = 0; i < got.size(); ++i) {
      EXPECT_TRUE(!got[i] || exact[i]) << "depth " << d;
      EXPECT_TRUE(!prev[i] || got[i]) << "depth " << d;
    }
    prev = got;
  }
  EXPECT_EQ(prev, exact);
}

TEST(Pipeline, EnumerateAnswers) {
  auto c = compile_program(load("programs/graph.srk"));
  auto all = enumerate_solutions(c.cnf, c.varmap, 100);
  // Two-edge paths: 0-1-0, 0-1-2, 1-0-1.
  std::set<std::pair<std::uint64_t, std::uint64_t>> got;
  for (const auto& vals : all) got.insert({numeral_index(vals[0]), numeral_index(vals[1])});
  EXPECT_EQ(all.size(), got.size());
  EXPECT_EQ(got, (std::set<std::pair<std::uint64_t, std::uint64_t>>{{0, 0}, {0, 2}, {1, 1}}));
  EXPECT_EQ(enumerate_solutions(c.cnf, c.varmap, 2).size(), 2u);
  EXPECT_THROW(enumerate_solutions(c.cnf, c.varmap, 0), Error);
}

TEST(Pipeline, RankZeroEnumeration) {
  auto c = compile_program(load("programs/three_values.srk"));
  EXPECT_TRUE(c.varmap.entries.empty());
  EXPECT_EQ(enumerate_solutions(c.cnf, c.varmap, 10).size(), 1u);
  auto none = compile_program(load("programs/four_distinct.srk"));
  EXPECT_TRUE(enumerate_solutions(none.cnf, none.varmap, 10).empty());
}

TEST(Pipeline, DecodeRejectsInvalidBits) {
  auto c = compile_program(source("(run ((x : (Sum Unit (Sum Unit Unit)))) (factor 1))"));
  std::vector<bool> model(c.cnf.num_vars + 1, false);
  model[c.varmap.entries[0].vars[1]] = true;
  EXPECT_THROW(decode_model(model, c.varmap), SolverError);
}
