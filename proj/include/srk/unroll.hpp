#pragma once

#include <algorithm>
#include <functional>
#include <map>
#include <optional>
#include <string>

#include "srk/error.hpp"
#include "srk/syntax.hpp"
#include "srk/typecheck.hpp"

namespace srk {

namespace detail {

class Unroller {
 public:
  Unroller(const Program& p, std::size_t depth)
      : prog_(p), depth_(depth), names_(name_supply_for(p, "u")) {}

  using Subst = std::map<std::string, std::string>;

  // `level` is the nesting level a call found in g would have; calls in
  // the query body are at level 1.
  Goal inline_goal(const Goal& g, const Subst& s, std::size_t level) {
    Goal out;
    out.kind = g.kind;
    out.loc = g.loc;
    switch (g.kind) {
      case GoalKind::Conj:
      case GoalKind::Disj:
        for (const auto& sub : g.subgoals) out.subgoals.push_back(inline_goal(sub, s, level));
        return out;
      case GoalKind::Factor:
        out.weight = g.weight;
        return out;
      case GoalKind::Fresh: {
        Subst inner = s;
        for (const auto& b : g.binders) {
          std::string fresh = names_.next();
          inner[b.name] = fresh;
          out.binders.push_back(Binding{fresh, b.type, b.loc});
        }
        out.subgoals.push_back(inline_goal(g.body(), inner, level));
        return out;
      }
      case GoalKind::Call: {
        if (level > depth_) return Goal::factor(WeightLiteral::number("0"));
        const RelDef* callee = prog_.find_rel(g.rel);
        if (!callee) throw Error("unroll: unknown relation '" + g.rel + "'", g.loc);
        if (callee->params.size() != g.args.size())
          throw Error("unroll: arity mismatch calling '" + g.rel + "'", g.loc);
        Subst callee_s;
        for (std::size_t i = 0; i < g.args.size(); ++i)
          callee_s[callee->params[i].name] = rename(g.args[i], s);
        return inline_goal(callee->body, callee_s, level + 1);
      }
      default:
        for (const auto& a : g.args) out.args.push_back(Arg::variable(rename(a, s), a.loc));
        return out;
    }
  }

 private:
  static std::string rename(const Arg& a, const Subst& s) {
    if (a.is_literal()) throw Error("unroll needs a desugared program", a.loc);
    auto it = s.find(a.var);
    return it == s.end() ? a.var : it->second;
  }

  const Program& prog_;
  std::size_t depth_;
  NameSupply names_;
};

}  // namespace detail

/// Inlines relation calls up to `depth` levels deep and replaces deeper
/// calls by (factor 0). The result has no relations and no calls.
inline Program unroll(const Program& p, std::size_t depth) {
  require_well_typed(p);
  detail::Unroller u(p, depth);
  Program out;
  out.query.params = p.query.params;
  out.query.loc = p.query.loc;
  out.query.body = u.inline_goal(p.query.body, {}, 1);
  return out;
}

inline bool has_calls(const Goal& g) {
  if (g.kind == GoalKind::Call) return true;
  for (const auto& s : g.subgoals)
    if (has_calls(s)) return true;
  return false;
}

/// Length of the longest chain of calls starting in the query, or nothing
/// when the call graph reachable from the query has a cycle.
inline std::optional<std::size_t> call_depth(const Program& p) {
  std::map<std::string, int> state;  // 1 = on stack, 2 = done
  std::map<std::string, std::size_t> memo;
  bool cyclic = false;
  std::function<std::size_t(const Goal&)> goal_depth;
  std::function<std::size_t(const std::string&)> rel_depth =
      [&](const std::string& name) -> std::size_t {
    if (state[name] == 2) return memo[name];
    if (state[name] == 1) {
      cyclic = true;
      return 0;
    }
    state[name] = 1;
    const RelDef* r = p.find_rel(name);
    std::size_t d = r ? goal_depth(r->body) : 0;
    state[name] = 2;
    return memo[name] = d;
  };
  goal_depth = [&](const Goal& g) -> std::size_t {
    std::size_t d = 0;
    if (g.kind == GoalKind::Call) d = 1 + rel_depth(g.rel);
    for (const auto& s : g.subgoals) d = std::max(d, goal_depth(s));
    return d;
  };
  std::size_t d = goal_depth(p.query.body);
  if (cyclic) return std::nullopt;
  return d;
}

}  // namespace srk
