#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "srk/bitify.hpp"
#include "srk/cdcl.hpp"
#include "srk/cnf.hpp"
#include "srk/compiler.hpp"
#include "srk/error.hpp"
#include "srk/evaluator.hpp"
#include "srk/formula.hpp"

namespace srk {

/// Reads each query binder's bits out of a model and decodes them.
inline std::vector<Value> decode_model(const std::vector<bool>& model, const VarMap& vm) {
  std::vector<Value> out;
  for (const auto& e : vm.entries) {
    std::vector<bool> bits;
    for (int v : e.vars) {
      if (v <= 0 || v >= static_cast<int>(model.size()))
        throw SolverError("model does not cover variable " + std::to_string(v));
      bits.push_back(model[v]);
    }
    auto val = decode_value(e.type, from_flat_bits(e.bit_type, bits));
    if (!val)
      throw SolverError("model assigns '" + e.name + "' a bitstring outside " + e.type.str());
    out.push_back(*val);
  }
  return out;
}

/// Unit clauses fixing every binder's bits to the embedding of `values`.
inline std::vector<Clause> pin_clauses(const VarMap& vm, const std::vector<Value>& values) {
  if (values.size() != vm.entries.size())
    throw Error("expected " + std::to_string(vm.entries.size()) + " values, got " +
                std::to_string(values.size()));
  std::vector<Clause> out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const auto& e = vm.entries[i];
    auto bits = flat_bits(e.bit_type, embed_value(e.type, values[i]));
    for (std::size_t k = 0; k < bits.size(); ++k)
      out.push_back({bits[k] ? e.vars[k] : -e.vars[k]});
  }
  return out;
}

/// Satisfiability of the CNF with the query binders fixed to `values`.
inline bool check_index(const Cnf& cnf, const VarMap& vm, const std::vector<Value>& values,
                        const SolverOptions& opts = {}) {
  CdclSolver s(cnf, opts);
  for (const auto& c : pin_clauses(vm, values)) s.add_clause(c);
  auto r = s.solve();
  if (r.status == SolveStatus::Unknown) throw ResourceError("solver gave up: " + r.reason);
  return r.sat();
}

/// Distinct answers, at most `limit`, found by blocking each model's
/// query bits and solving again. `solver` defaults to the embedded one.
inline std::vector<std::vector<Value>> enumerate_solutions(
    const Cnf& cnf, const VarMap& vm, std::size_t limit,
    const std::function<SolveResult(const Cnf&)>& solver = {}) {
  if (limit == 0) throw Error("solution limit must be at least 1");
  std::vector<std::vector<Value>> out;
  Cnf work = cnf;
  CdclSolver embedded(cnf);
  for (;;) {
    SolveResult r = solver ? solver(work) : embedded.solve();
    if (r.status == SolveStatus::Unknown) throw ResourceError("solver gave up: " + r.reason);
    if (!r.sat()) break;
    out.push_back(decode_model(r.model, vm));
    if (out.size() >= limit) break;
    Clause block;
    for (const auto& e : vm.entries)
      for (int v : e.vars) block.push_back(r.model[v] ? -v : v);
    // No query bits: the single empty answer is the only one.
    if (block.empty()) break;
    work.clauses.push_back(block);
    embedded.add_clause(block);
  }
  return out;
}

/// The Boolean query array rebuilt from the CNF, one check_index call per
/// index tuple.
inline WeightArray<BooleanSemiring> sat_query_array(const Compiled& c,
                                                    std::uint64_t size_cap = kDefaultSizeCap) {
  std::vector<Dim> dims;
  for (const auto& e : c.varmap.entries) dims.push_back(Dim{e.name, e.type});
  WeightArray<BooleanSemiring> out(dims, size_cap, "the query array");
  for (std::uint64_t f = 0; f < out.size(); ++f)
    out.set(f, check_index(c.cnf, c.varmap, out.values_at(f)));
  return out;
}

}  // namespace srk
