#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "srk/bitify.hpp"
#include "srk/error.hpp"
#include "srk/semiring.hpp"
#include "srk/syntax.hpp"

namespace srk {

/// Propositional formula stored as a node arena. Node 0 is False and
/// node 1 is True; the constructors fold constants away.
class PropFormula {
 public:
  enum class Kind { False, True, Var, Not, And, Or, Iff };

  struct Node {
    Kind kind;
    int var = 0;            // Var
    std::vector<int> kids;  // Not: 1, Iff: 2, And/Or: 2 or more
  };

  PropFormula() {
    nodes_.push_back(Node{Kind::False, 0, {}});
    nodes_.push_back(Node{Kind::True, 0, {}});
  }

  static constexpr int kFalse = 0;
  static constexpr int kTrue = 1;

  int constant(bool b) const { return b ? kTrue : kFalse; }

  // Allocates the next propositional variable (1-based).
  int new_var() {
    ++num_vars_;
    nodes_.push_back(Node{Kind::Var, num_vars_, {}});
    var_nodes_.push_back(static_cast<int>(nodes_.size() - 1));
    return num_vars_;
  }
  int var(int v) const { return var_nodes_.at(v - 1); }

  int neg(int a) {
    if (a == kFalse) return kTrue;
    if (a == kTrue) return kFalse;
    if (nodes_[a].kind == Kind::Not) return nodes_[a].kids[0];
    return add(Node{Kind::Not, 0, {a}});
  }

  int conj(std::vector<int> xs) { return nary(Kind::And, std::move(xs)); }
  int disj(std::vector<int> xs) { return nary(Kind::Or, std::move(xs)); }
  int conj(int a, int b) { return conj(std::vector<int>{a, b}); }
  int disj(int a, int b) { return disj(std::vector<int>{a, b}); }

  int iff(int a, int b) {
    if (a == b) return kTrue;
    if (a == kTrue) return b;
    if (b == kTrue) return a;
    if (a == kFalse) return neg(b);
    if (b == kFalse) return neg(a);
    return add(Node{Kind::Iff, 0, {a, b}});
  }

  const Node& node(int id) const { return nodes_[id]; }
  std::size_t num_nodes() const { return nodes_.size(); }
  int num_vars() const { return num_vars_; }

  int root() const { return root_; }
  void set_root(int r) { root_ = r; }

  /// Truth value under `assignment`, indexed by variable (slot 0 unused).
  bool eval(const std::vector<bool>& assignment) const { return eval(root_, assignment); }

  bool eval(int id, const std::vector<bool>& assignment) const {
    std::vector<std::int8_t> memo(id + 1, -1);
    auto go = [&](auto& self, int n) -> bool {
      if (memo[n] >= 0) return memo[n];
      const Node& nd = nodes_[n];
      bool r = false;
      switch (nd.kind) {
        case Kind::False: r = false; break;
        case Kind::True: r = true; break;
        case Kind::Var: r = assignment.at(nd.var); break;
        case Kind::Not: r = !self(self, nd.kids[0]); break;
        case Kind::And:
          r = true;
          for (int k : nd.kids) r = r && self(self, k);
          break;
        case Kind::Or:
          for (int k : nd.kids) r = r || self(self, k);
          break;
        case Kind::Iff: r = self(self, nd.kids[0]) == self(self, nd.kids[1]); break;
      }
      memo[n] = r;
      return r;
    };
    return go(go, id);
  }

  std::string str(int id) const {
    const Node& nd = nodes_[id];
    switch (nd.kind) {
      case Kind::False: return "⊥";
      case Kind::True: return "⊤";
      case Kind::Var: return "b" + std::to_string(nd.var);
      case Kind::Not: return "¬" + str(nd.kids[0]);
      default: break;
    }
    std::string op = nd.kind == Kind::And ? " ∧ " : nd.kind == Kind::Or ? " ∨ " : " ↔ ";
    std::string s = "(";
    for (std::size_t i = 0; i < nd.kids.size(); ++i) s += (i ? op : "") + str(nd.kids[i]);
    return s + ")";
  }
  std::string str() const { return str(root_); }

 private:
  int add(Node n) {
    nodes_.push_back(std::move(n));
    return static_cast<int>(nodes_.size() - 1);
  }

  int nary(Kind k, std::vector<int> xs) {
    const int unit = k == Kind::And ? kTrue : kFalse;
    const int absorb = k == Kind::And ? kFalse : kTrue;
    std::vector<int> kept;
    for (int x : xs) {
      if (x == absorb) return absorb;
      if (x == unit) continue;
      // Flatten nested nodes of the same connective.
      if (nodes_[x].kind == k) {
        kept.insert(kept.end(), nodes_[x].kids.begin(), nodes_[x].kids.end());
        continue;
      }
      kept.push_back(x);
    }
    if (kept.empty()) return unit;
    if (kept.size() == 1) return kept[0];
    return add(Node{k, 0, std::move(kept)});
  }

  std::vector<Node> nodes_;
  std::vector<int> var_nodes_;
  int num_vars_ = 0;
  int root_ = kTrue;
};

struct VarMapEntry {
  std::string name;
  Type type;      // the binder's type in the source program
  Type bit_type;  // bitify_type(type)
  std::vector<int> vars;  // propositional variables, tag-first bit order

  std::size_t width() const { return vars.size(); }
};

/// Query binders to propositional variables.
struct VarMap {
  std::vector<VarMapEntry> entries;

  std::size_t size() const { return entries.size(); }
};

namespace detail {

class FormulaBuilder {
 public:
  explicit FormulaBuilder(PropFormula& f) : f_(f) {}

  std::vector<int> allocate(const std::string& name, const Type& t) {
    if (!is_bit_type(t))
      throw Error("to_formula: binder '" + name + "' has non-bitstring type " + t.str());
    std::vector<int> bits;
    for (std::size_t i = 0; i < bit_width(t); ++i) bits.push_back(f_.var(f_.new_var()));
    scope_.push_back(Entry{name, t, bits});
    return bits;
  }
  void pop(std::size_t n) { scope_.resize(scope_.size() - n); }

  int goal(const Goal& g) {
    switch (g.kind) {
      case GoalKind::Conj:
      case GoalKind::Disj: {
        std::vector<int> parts;
        for (const auto& s : g.subgoals) parts.push_back(goal(s));
        return g.kind == GoalKind::Conj ? f_.conj(std::move(parts))
                                        : f_.disj(std::move(parts));
      }
      case GoalKind::Factor:
        return f_.constant(BooleanSemiring::from_literal(g.weight));
      case GoalKind::Fresh: {
        for (const auto& b : g.binders) allocate(b.name, b.type);
        int r = goal(g.body());
        pop(g.binders.size());
        return r;
      }
      case GoalKind::Call:
        throw Error("to_formula: residual call to '" + g.rel + "'", g.loc);
      case GoalKind::Eq:
        return equal(bits(g.args[0]), bits(g.args[1]));
      case GoalKind::Neq:
        return f_.neg(equal(bits(g.args[0]), bits(g.args[1])));
      case GoalKind::Soleo:
        bits(g.args[0]);
        return PropFormula::kTrue;
      case GoalKind::Lefto:
      case GoalKind::Righto: {
        const Entry& x = lookup(g.args[0]);
        if (!x.type.is_bit())
          throw Error("to_formula: lefto/righto on non-bit type " + x.type.str(), g.loc);
        bits(g.args[1]);
        int tag = x.bits[0];
        return g.kind == GoalKind::Lefto ? f_.neg(tag) : tag;
      }
      case GoalKind::Pairo: {
        auto xs = bits(g.args[0]);
        auto ys = bits(g.args[1]);
        auto zs = bits(g.args[2]);
        ys.insert(ys.end(), zs.begin(), zs.end());
        return equal(xs, ys);
      }
    }
    throw Error("unreachable");
  }

 private:
  struct Entry {
    std::string name;
    Type type;
    std::vector<int> bits;  // formula node ids
  };

  const Entry& lookup(const Arg& a) const {
    if (a.is_literal()) throw Error("to_formula needs a desugared program", a.loc);
    for (auto it = scope_.rbegin(); it != scope_.rend(); ++it)
      if (it->name == a.var) return *it;
    throw Error("to_formula: unbound variable '" + a.var + "'", a.loc);
  }
  std::vector<int> bits(const Arg& a) const { return lookup(a).bits; }

  int equal(const std::vector<int>& a, const std::vector<int>& b) {
    if (a.size() != b.size()) throw Error("to_formula: bit width mismatch");
    std::vector<int> parts;
    for (std::size_t i = 0; i < a.size(); ++i) parts.push_back(f_.iff(a[i], b[i]));
    return f_.conj(std::move(parts));
  }

  PropFormula& f_;
  std::vector<Entry> scope_;
};

}  // namespace detail

struct FormulaResult {
  PropFormula formula;
  VarMap varmap;
};

/// Stage 3: a call-free program over bitstring types becomes a formula.
/// Run binders get the first variables, in binder order. `source_types`
/// gives the binders' original types for the VarMap; when empty the
/// bitstring types are recorded.
inline FormulaResult to_formula(const Program& p,
                                const std::vector<Type>& source_types = {}) {
  FormulaResult out;
  detail::FormulaBuilder b(out.formula);
  for (std::size_t i = 0; i < p.query.params.size(); ++i) {
    const auto& param = p.query.params[i];
    b.allocate(param.name, param.type);
    VarMapEntry e;
    e.name = param.name;
    e.bit_type = param.type;
    e.type = i < source_types.size() ? source_types[i] : param.type;
    const std::size_t first = static_cast<std::size_t>(out.formula.num_vars()) -
                              bit_width(param.type) + 1;
    for (std::size_t k = 0; k < bit_width(param.type); ++k)
      e.vars.push_back(static_cast<int>(first + k));
    out.varmap.entries.push_back(std::move(e));
  }
  out.formula.set_root(b.goal(p.query.body));
  return out;
}

}  // namespace srk
