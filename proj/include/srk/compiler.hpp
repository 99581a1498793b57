#pragma once

#include <vector>

#include "srk/bitify.hpp"
#include "srk/cnf.hpp"
#include "srk/formula.hpp"
#include "srk/syntax.hpp"
#include "srk/typecheck.hpp"
#include "srk/unroll.hpp"

namespace srk {

inline constexpr std::size_t kDefaultDepth = 8;

struct Compiled {
  Program unrolled;
  Program bitified;
  PropFormula formula;
  VarMap varmap;
  Cnf cnf;
};

/// The Boolean pipeline: unroll to `depth`, bitify, build the formula and
/// convert it to CNF. `p` must be desugared.
inline Compiled compile_program(const Program& p, std::size_t depth = kDefaultDepth) {
  require_well_typed(p);
  Compiled c;
  c.unrolled = unroll(p, depth);
  c.bitified = bitify(c.unrolled);
  std::vector<Type> source;
  for (const auto& b : p.query.params) source.push_back(b.type);
  auto fr = to_formula(c.bitified, source);
  c.formula = std::move(fr.formula);
  c.varmap = std::move(fr.varmap);
  c.cnf = tseitin(c.formula);
  return c;
}

}  // namespace srk
