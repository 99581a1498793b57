#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "srk/error.hpp"
#include "srk/syntax.hpp"

namespace srk {

struct RelSig {
  std::string name;
  std::vector<Type> arg_types;

  std::size_t arity() const { return arg_types.size(); }
};

/// Typing context: relation signatures and scoped variable types.
/// Inner bindings shadow outer ones.
class TypeEnv {
 public:
  TypeEnv() = default;
  explicit TypeEnv(std::vector<RelSig> rels) {
    for (auto& r : rels) rels_[r.name] = std::move(r);
  }

  const RelSig* find_rel(const std::string& name) const {
    auto it = rels_.find(name);
    return it == rels_.end() ? nullptr : &it->second;
  }

  std::optional<Type> find_var(const std::string& name) const {
    for (auto it = vars_.rbegin(); it != vars_.rend(); ++it)
      if (it->first == name) return it->second;
    return std::nullopt;
  }

  void push(std::string name, Type type) {
    vars_.emplace_back(std::move(name), std::move(type));
  }
  void pop() { vars_.pop_back(); }

  std::vector<std::pair<std::string, Type>>& vars() { return vars_; }

 private:
  std::map<std::string, RelSig> rels_;
  std::vector<std::pair<std::string, Type>> vars_;
};

/// One signature per defrel, in program order.
inline std::vector<RelSig> purported_signatures(const Program& p) {
  std::vector<RelSig> out;
  std::set<std::string> seen;
  for (const auto& r : p.rels) {
    if (!seen.insert(r.name).second)
      throw TypeError("duplicate relation '" + r.name + "'", r.loc);
    RelSig sig{r.name, {}};
    for (const auto& b : r.params) sig.arg_types.push_back(b.type);
    out.push_back(std::move(sig));
  }
  return out;
}

namespace detail {

class GoalChecker {
 public:
  GoalChecker(TypeEnv& env, std::vector<TypeError>& errors)
      : env_(env), errors_(errors) {}

  void check(const Goal& g) {
    switch (g.kind) {
      case GoalKind::Conj:
      case GoalKind::Disj:
        for (const auto& s : g.subgoals) check(s);
        return;
      case GoalKind::Factor:
        return;
      case GoalKind::Fresh:
        for (const auto& b : g.binders) env_.push(b.name, b.type);
        check(g.body());
        for (std::size_t i = 0; i < g.binders.size(); ++i) env_.pop();
        return;
      case GoalKind::Call:
        check_call(g);
        return;
      default:
        check_primitive(g);
        return;
    }
  }

 private:
  void fail(const Goal& g, const std::string& what) {
    errors_.emplace_back(what + " in " + goal_to_string(g), g.loc);
  }

  // Resolves every argument; reports literals and unbound names.
  std::optional<std::vector<Type>> arg_types(const Goal& g) {
    std::vector<Type> out;
    bool ok = true;
    for (const auto& a : g.args) {
      if (a.is_literal()) {
        fail(g, "literal argument " + to_string(*a.literal) +
                    " (desugar the program first)");
        ok = false;
        continue;
      }
      auto t = env_.find_var(a.var);
      if (!t) {
        fail(g, "unbound variable '" + a.var + "'");
        ok = false;
        continue;
      }
      out.push_back(*t);
    }
    if (!ok) return std::nullopt;
    return out;
  }

  void check_call(const Goal& g) {
    const RelSig* sig = env_.find_rel(g.rel);
    if (!sig) {
      fail(g, "unbound relation '" + g.rel + "'");
      return;
    }
    if (sig->arity() != g.args.size()) {
      fail(g, "arity mismatch: '" + g.rel + "' takes " +
                  std::to_string(sig->arity()) + " arguments, got " +
                  std::to_string(g.args.size()));
      return;
    }
    auto types = arg_types(g);
    if (!types) return;
    for (std::size_t i = 0; i < types->size(); ++i) {
      if ((*types)[i] != sig->arg_types[i])
        fail(g, "type mismatch: argument " + std::to_string(i + 1) + " ('" +
                    g.args[i].var + "') has type " + (*types)[i].str() +
                    ", expected " + sig->arg_types[i].str());
    }
  }

  void check_primitive(const Goal& g) {
    auto types = arg_types(g);
    if (!types) return;
    const auto& t = *types;
    auto mismatch = [&](const std::string& expected) {
      fail(g, "type mismatch: expected " + expected);
    };
    switch (g.kind) {
      case GoalKind::Eq:
      case GoalKind::Neq:
        if (t[0] != t[1])
          fail(g, "type mismatch: '" + g.args[0].var + "' has type " +
                      t[0].str() + " but '" + g.args[1].var + "' has type " +
                      t[1].str());
        return;
      case GoalKind::Soleo:
        if (!t[0].is_unit()) mismatch("'" + g.args[0].var + "' : Unit");
        return;
      case GoalKind::Lefto:
      case GoalKind::Righto: {
        if (!t[0].is_sum()) {
          mismatch("'" + g.args[0].var + "' to have a Sum type, got " +
                   t[0].str());
          return;
        }
        Type want = g.kind == GoalKind::Lefto ? t[0].left() : t[0].right();
        if (t[1] != want)
          mismatch("'" + g.args[1].var + "' : " + want.str() + ", got " +
                   t[1].str());
        return;
      }
      case GoalKind::Pairo:
        if (!t[0].is_prod()) {
          mismatch("'" + g.args[0].var + "' to have a Prod type, got " +
                   t[0].str());
          return;
        }
        if (t[1] != t[0].left())
          mismatch("'" + g.args[1].var + "' : " + t[0].left().str() +
                   ", got " + t[1].str());
        if (t[2] != t[0].right())
          mismatch("'" + g.args[2].var + "' : " + t[0].right().str() +
                   ", got " + t[2].str());
        return;
      default:
        return;
    }
  }

  TypeEnv& env_;
  std::vector<TypeError>& errors_;
};

}  // namespace detail

/// Checks Γ;Δ ⊢ g. Returns every error found; empty means well typed.
inline std::vector<TypeError> check_goal(const TypeEnv& env, const Goal& g) {
  TypeEnv scratch = env;
  std::vector<TypeError> errors;
  detail::GoalChecker(scratch, errors).check(g);
  return errors;
}

/// Checks every relation body under its parameters and then the query.
/// Errors from all of them are collected.
inline std::vector<TypeError> check_program(const Program& p) {
  std::vector<TypeError> errors;
  std::vector<RelSig> sigs;
  std::set<std::string> seen;
  for (const auto& r : p.rels) {
    if (!seen.insert(r.name).second) {
      errors.emplace_back("duplicate relation '" + r.name + "'", r.loc);
      continue;
    }
    RelSig sig{r.name, {}};
    for (const auto& b : r.params) sig.arg_types.push_back(b.type);
    sigs.push_back(std::move(sig));
  }
  auto check_params = [&](const std::vector<Binding>& params) {
    std::set<std::string> names;
    for (const auto& b : params)
      if (!names.insert(b.name).second)
        errors.emplace_back("duplicate parameter '" + b.name + "'", b.loc);
  };

  TypeEnv base(sigs);
  for (const auto& r : p.rels) {
    check_params(r.params);
    TypeEnv env = base;
    for (const auto& b : r.params) env.push(b.name, b.type);
    detail::GoalChecker(env, errors).check(r.body);
  }
  check_params(p.query.params);
  TypeEnv env = base;
  for (const auto& b : p.query.params) env.push(b.name, b.type);
  detail::GoalChecker(env, errors).check(p.query.body);
  return errors;
}

/// Raised by consumers that require a well-typed program.
class TypeCheckFailure : public Error {
 public:
  explicit TypeCheckFailure(std::vector<TypeError> errors)
      : Error(summary(errors), errors.empty() ? SourceLoc{} : errors.front().loc()),
        errors_(std::move(errors)) {}

  const std::vector<TypeError>& errors() const { return errors_; }

 private:
  static std::string summary(const std::vector<TypeError>& errors) {
    if (errors.empty()) return "type error";
    std::string s = errors.front().message();
    if (errors.size() > 1)
      s += " (and " + std::to_string(errors.size() - 1) + " more)";
    return s;
  }
  std::vector<TypeError> errors_;
};

inline void require_well_typed(const Program& p) {
  auto errors = check_program(p);
  if (!errors.empty()) throw TypeCheckFailure(std::move(errors));
}

}  // namespace srk
