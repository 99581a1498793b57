#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "srk/error.hpp"
#include "srk/sexpr.hpp"
#include "srk/type.hpp"

namespace srk {

// ---------------------------------------------------------------------------
// Abstract syntax
// ---------------------------------------------------------------------------

/// Weight written in `(factor r)`. Interpretation is up to the semiring.
struct WeightLiteral {
  enum class Kind { Number, Infinity, True, False };

  Kind kind = Kind::Number;
  std::string text = "1";  // decimal digits for Number

  static WeightLiteral number(std::string digits) {
    return {Kind::Number, std::move(digits)};
  }
  static WeightLiteral infinity() { return {Kind::Infinity, "inf"}; }
  static WeightLiteral truth(bool b) {
    return b ? WeightLiteral{Kind::True, "#t"} : WeightLiteral{Kind::False, "#f"};
  }

  friend bool operator==(const WeightLiteral& a, const WeightLiteral& b) {
    return a.kind == b.kind && a.text == b.text;
  }
};

/// Surface value literal in argument position: (), (left v), (right v),
/// (v1 . v2) or a nonnegative integer.
struct ValueLiteral {
  enum class Kind { Unit, Left, Right, Pair, Nat };

  Kind kind = Kind::Unit;
  std::vector<ValueLiteral> parts;
  std::uint64_t nat = 0;
  SourceLoc loc;

  friend bool operator==(const ValueLiteral& a, const ValueLiteral& b) {
    return a.kind == b.kind && a.nat == b.nat && a.parts == b.parts;
  }
};

struct Arg {
  std::string var;                      // set when the argument is a variable
  std::optional<ValueLiteral> literal;  // set when it is a value literal
  SourceLoc loc;

  static Arg variable(std::string name, SourceLoc loc = {}) {
    return Arg{std::move(name), std::nullopt, loc};
  }
  bool is_literal() const { return literal.has_value(); }

  friend bool operator==(const Arg& a, const Arg& b) {
    return a.var == b.var && a.literal == b.literal;
  }
};

struct Binding {
  std::string name;
  Type type;
  SourceLoc loc;

  friend bool operator==(const Binding& a, const Binding& b) {
    return a.name == b.name && a.type == b.type;
  }
};

enum class GoalKind {
  Conj, Disj, Factor, Fresh, Call, Eq, Neq, Soleo, Lefto, Righto, Pairo
};

/// A goal. Core goals have binary conj/disj, single-binder fresh and
/// variable-only arguments; surface goals may be n-ary, bind several
/// variables at once and carry literal arguments.
struct Goal {
  GoalKind kind = GoalKind::Factor;
  std::vector<Goal> subgoals;     // conj/disj operands; fresh body is [0]
  std::vector<Binding> binders;   // fresh
  WeightLiteral weight;           // factor
  std::string rel;                // call
  std::vector<Arg> args;          // call and primitives
  SourceLoc loc;

  static Goal conj(Goal a, Goal b) { return binary(GoalKind::Conj, std::move(a), std::move(b)); }
  static Goal disj(Goal a, Goal b) { return binary(GoalKind::Disj, std::move(a), std::move(b)); }
  static Goal factor(WeightLiteral w) {
    Goal g;
    g.kind = GoalKind::Factor;
    g.weight = std::move(w);
    return g;
  }
  static Goal fresh(std::string name, Type type, Goal body) {
    Goal g;
    g.kind = GoalKind::Fresh;
    g.binders.push_back(Binding{std::move(name), std::move(type), {}});
    g.subgoals.push_back(std::move(body));
    return g;
  }
  static Goal call(std::string rel, std::vector<std::string> vars) {
    Goal g = prim(GoalKind::Call, std::move(vars));
    g.rel = std::move(rel);
    return g;
  }
  static Goal eq(std::string x, std::string y) { return prim(GoalKind::Eq, {std::move(x), std::move(y)}); }
  static Goal neq(std::string x, std::string y) { return prim(GoalKind::Neq, {std::move(x), std::move(y)}); }
  static Goal soleo(std::string x) { return prim(GoalKind::Soleo, {std::move(x)}); }
  static Goal lefto(std::string x, std::string y) { return prim(GoalKind::Lefto, {std::move(x), std::move(y)}); }
  static Goal righto(std::string x, std::string y) { return prim(GoalKind::Righto, {std::move(x), std::move(y)}); }
  static Goal pairo(std::string x, std::string y, std::string z) {
    return prim(GoalKind::Pairo, {std::move(x), std::move(y), std::move(z)});
  }

  bool is_primitive() const {
    return kind == GoalKind::Eq || kind == GoalKind::Neq ||
           kind == GoalKind::Soleo || kind == GoalKind::Lefto ||
           kind == GoalKind::Righto || kind == GoalKind::Pairo;
  }
  const Goal& body() const { return subgoals.front(); }

  friend bool operator==(const Goal& a, const Goal& b) {
    return a.kind == b.kind && a.subgoals == b.subgoals &&
           a.binders == b.binders && a.weight == b.weight && a.rel == b.rel &&
           a.args == b.args;
  }

 private:
  static Goal binary(GoalKind k, Goal a, Goal b) {
    Goal g;
    g.kind = k;
    g.subgoals.push_back(std::move(a));
    g.subgoals.push_back(std::move(b));
    return g;
  }
  static Goal prim(GoalKind k, std::vector<std::string> vars) {
    Goal g;
    g.kind = k;
    for (auto& v : vars) g.args.push_back(Arg::variable(std::move(v)));
    return g;
  }
};

// Right-nested conjunction/disjunction of a non-empty list.
inline Goal conj_all(std::vector<Goal> goals) {
  if (goals.empty()) throw Error("conj_all of an empty list");
  Goal acc = std::move(goals.back());
  for (std::size_t i = goals.size() - 1; i-- > 0;)
    acc = Goal::conj(std::move(goals[i]), std::move(acc));
  return acc;
}

inline Goal disj_all(std::vector<Goal> goals) {
  if (goals.empty()) throw Error("disj_all of an empty list");
  Goal acc = std::move(goals.back());
  for (std::size_t i = goals.size() - 1; i-- > 0;)
    acc = Goal::disj(std::move(goals[i]), std::move(acc));
  return acc;
}

struct RelDef {
  std::string name;
  std::vector<Binding> params;
  Goal body;
  SourceLoc loc;

  friend bool operator==(const RelDef& a, const RelDef& b) {
    return a.name == b.name && a.params == b.params && a.body == b.body;
  }
};

struct QueryDef {
  std::vector<Binding> params;
  Goal body;
  SourceLoc loc;

  friend bool operator==(const QueryDef& a, const QueryDef& b) {
    return a.params == b.params && a.body == b.body;
  }
};

struct TypeAlias {
  std::string name;
  Type type;
  SourceLoc loc;
};

struct Program {
  std::vector<TypeAlias> aliases;  // surface only; already expanded in types
  std::vector<RelDef> rels;
  QueryDef query;

  const RelDef* find_rel(std::string_view name) const {
    for (const auto& r : rels)
      if (r.name == name) return &r;
    return nullptr;
  }

  // Aliases are not compared: they are expanded at parse time.
  friend bool operator==(const Program& a, const Program& b) {
    return a.rels == b.rels && a.query == b.query;
  }
};

inline bool is_generated_name(std::string_view name) {
  return !name.empty() && name.front() == '%';
}

/// Supplies `%<prefix><n>` names. Starts above every counter already used
/// with the same prefix in the program it was created for.
class NameSupply {
 public:
  explicit NameSupply(std::string prefix, std::size_t start = 0)
      : prefix_("%" + std::move(prefix)), next_(start) {}

  std::string next() { return prefix_ + std::to_string(++next_); }

  void observe(std::string_view name) {
    if (name.substr(0, prefix_.size()) != prefix_) return;
    auto digits = name.substr(prefix_.size());
    if (!is_natural(digits)) return;
    next_ = std::max<std::size_t>(next_, std::stoull(std::string(digits)));
  }

 private:
  std::string prefix_;
  std::size_t next_;
};

// Calls f on every variable name bound or used in g.
inline void for_each_name(const Goal& g,
                          const std::function<void(const std::string&)>& f) {
  for (const auto& b : g.binders) f(b.name);
  for (const auto& a : g.args)
    if (!a.is_literal()) f(a.var);
  for (const auto& s : g.subgoals) for_each_name(s, f);
}

inline void for_each_name(const Program& p,
                          const std::function<void(const std::string&)>& f) {
  for (const auto& r : p.rels) {
    f(r.name);
    for (const auto& b : r.params) f(b.name);
    for_each_name(r.body, f);
  }
  for (const auto& b : p.query.params) f(b.name);
  for_each_name(p.query.body, f);
}

inline NameSupply name_supply_for(const Program& p, std::string prefix) {
  NameSupply supply(std::move(prefix));
  for_each_name(p, [&](const std::string& n) { supply.observe(n); });
  return supply;
}

// ---------------------------------------------------------------------------
// Parsing
// ---------------------------------------------------------------------------

struct ParseOptions {
  // Accept `%`-prefixed names. Only for re-reading compiler output.
  bool allow_generated_names = false;
};

namespace detail {

class ProgramParser {
 public:
  explicit ProgramParser(ParseOptions opts) : opts_(opts) {}

  Type read_type(const Sexp& s) const { return parse_type(s); }

  Program parse(std::string_view text) {
    auto forms = read_sexps(text, opts_.allow_generated_names);
    Program prog;
    bool have_query = false;
    for (const auto& form : forms) {
      if (have_query)
        throw ParseError("forms after the run query are not allowed", form.loc);
      auto head = form.head();
      if (head == "deftype") {
        prog.aliases.push_back(parse_deftype(form));
      } else if (head == "defrel") {
        prog.rels.push_back(parse_defrel(form));
      } else if (head == "run") {
        prog.query = parse_run(form);
        have_query = true;
      } else {
        throw ParseError("expected deftype, defrel or run at top level",
                         form.loc);
      }
    }
    if (!have_query) throw ParseError("program has no run query", SourceLoc{1, 1});
    return prog;
  }

 private:
  static bool is_reserved_head(std::string_view s) {
    static const std::set<std::string_view> reserved = {
        "conj",  "disj",   "factor", "fresh", "==",     "=/=",    "soleo",
        "lefto", "righto", "pairo",  "run",   "defrel", "deftype"};
    return reserved.count(s) != 0;
  }

  std::string identifier(const Sexp& s, std::string_view what) const {
    if (!s.is_atom() || !is_identifier(s.atom, opts_.allow_generated_names))
      throw ParseError("expected " + std::string(what), s.loc);
    return s.atom;
  }

  TypeAlias parse_deftype(const Sexp& form) {
    if (form.items.size() != 3)
      throw ParseError("deftype takes a name and a type", form.loc);
    std::string name = identifier(form.items[1], "type alias name");
    if (name == "Unit" || name == "Sum" || name == "Prod" || aliases_.count(name))
      throw ParseError("type alias '" + name + "' is already defined",
                       form.items[1].loc);
    Type t = parse_type(form.items[2]);
    aliases_[name] = t;
    return TypeAlias{name, t, form.loc};
  }

  Type parse_type(const Sexp& s) const {
    if (s.is_atom()) {
      if (s.atom == "Unit") return Type::unit();
      auto it = aliases_.find(s.atom);
      if (it == aliases_.end())
        throw ParseError("unbound type alias '" + s.atom + "'", s.loc);
      return it->second;
    }
    auto head = s.head();
    if (head == "Sum" || head == "Prod") {
      if (s.items.size() != 3)
        throw ParseError(std::string(head) + " takes exactly two types", s.loc);
      Type a = parse_type(s.items[1]);
      Type b = parse_type(s.items[2]);
      return head == "Sum" ? Type::sum(a, b) : Type::prod(a, b);
    }
    throw ParseError("expected a type", s.loc);
  }

  Binding parse_binding(const Sexp& s) const {
    if (!s.is_list() || s.items.size() != 3 || !s.items[1].is_atom(":"))
      throw ParseError("expected a binding (name : type)", s.loc);
    return Binding{identifier(s.items[0], "variable name"),
                   parse_type(s.items[2]), s.loc};
  }

  std::vector<Binding> parse_bindings(const Sexp& s) const {
    if (!s.is_list()) throw ParseError("expected a binding list", s.loc);
    std::vector<Binding> out;
    std::set<std::string> seen;
    for (const auto& item : s.items) {
      out.push_back(parse_binding(item));
      if (!seen.insert(out.back().name).second)
        throw ParseError("duplicate parameter '" + out.back().name + "'",
                         item.loc);
    }
    return out;
  }

  // Remaining items from `first` are goals joined by implicit conjunction.
  Goal parse_body(const Sexp& form, std::size_t first) const {
    if (form.items.size() <= first)
      throw ParseError("expected at least one goal", form.loc);
    if (form.items.size() == first + 1) return parse_goal(form.items[first]);
    Goal g;
    g.kind = GoalKind::Conj;
    g.loc = form.items[first].loc;
    for (std::size_t i = first; i < form.items.size(); ++i)
      g.subgoals.push_back(parse_goal(form.items[i]));
    return g;
  }

  RelDef parse_defrel(const Sexp& form) const {
    if (form.items.size() < 3)
      throw ParseError("defrel takes a header and at least one goal", form.loc);
    const Sexp& header = form.items[1];
    if (!header.is_list() || header.items.empty())
      throw ParseError("expected (name (x : type) ...)", header.loc);
    RelDef def;
    def.loc = form.loc;
    def.name = identifier(header.items[0], "relation name");
    if (is_reserved_head(def.name))
      throw ParseError("'" + def.name + "' is reserved", header.items[0].loc);
    Sexp params = header;
    params.items.erase(params.items.begin());
    def.params = parse_bindings(params);
    def.body = parse_body(form, 2);
    return def;
  }

  QueryDef parse_run(const Sexp& form) const {
    if (form.items.size() < 3)
      throw ParseError("run takes a binding list and at least one goal",
                       form.loc);
    QueryDef q;
    q.loc = form.loc;
    q.params = parse_bindings(form.items[1]);
    q.body = parse_body(form, 2);
    return q;
  }

  WeightLiteral parse_weight(const Sexp& s) const {
    if (s.is_atom()) {
      if (s.atom == "#t") return WeightLiteral::truth(true);
      if (s.atom == "#f") return WeightLiteral::truth(false);
      if (s.atom == "inf") return WeightLiteral::infinity();
      if (is_decimal(s.atom)) return WeightLiteral::number(s.atom);
    }
    throw ParseError("expected a weight: nonnegative decimal, inf, #t or #f",
                     s.loc);
  }

  ValueLiteral parse_value(const Sexp& s) const {
    ValueLiteral v;
    v.loc = s.loc;
    if (s.is_atom()) {
      if (!is_natural(s.atom))
        throw ParseError("expected a value literal", s.loc);
      v.kind = ValueLiteral::Kind::Nat;
      try {
        v.nat = std::stoull(s.atom);
      } catch (const std::exception&) {
        throw ParseError("integer literal out of range", s.loc);
      }
      return v;
    }
    if (s.items.empty()) {
      v.kind = ValueLiteral::Kind::Unit;
      return v;
    }
    auto head = s.head();
    if ((head == "left" || head == "right") && s.items.size() == 2) {
      v.kind = head == "left" ? ValueLiteral::Kind::Left : ValueLiteral::Kind::Right;
      v.parts.push_back(parse_value(s.items[1]));
      return v;
    }
    if (s.items.size() == 3 && s.items[1].is_atom(".")) {
      v.kind = ValueLiteral::Kind::Pair;
      v.parts.push_back(parse_value(s.items[0]));
      v.parts.push_back(parse_value(s.items[2]));
      return v;
    }
    throw ParseError("expected a value literal", s.loc);
  }

  Arg parse_arg(const Sexp& s) const {
    if (s.is_atom() && is_identifier(s.atom, opts_.allow_generated_names))
      return Arg::variable(s.atom, s.loc);
    Arg a;
    a.loc = s.loc;
    a.literal = parse_value(s);
    return a;
  }

  Goal parse_goal(const Sexp& s) const {
    if (!s.is_list() || s.items.empty() || !s.items[0].is_atom())
      throw ParseError("expected a goal", s.loc);
    const std::string& head = s.items[0].atom;
    const std::size_t nargs = s.items.size() - 1;
    Goal g;
    g.loc = s.loc;

    auto expect_args = [&](std::size_t n) {
      if (nargs != n)
        throw ParseError(head + " takes " + std::to_string(n) + " argument" +
                             (n == 1 ? "" : "s") + ", got " +
                             std::to_string(nargs),
                         s.loc);
    };
    auto take_args = [&] {
      for (std::size_t i = 1; i < s.items.size(); ++i)
        g.args.push_back(parse_arg(s.items[i]));
    };

    if (head == "conj" || head == "disj") {
      if (nargs == 0) throw ParseError(head + " needs at least one goal", s.loc);
      g.kind = head == "conj" ? GoalKind::Conj : GoalKind::Disj;
      for (std::size_t i = 1; i < s.items.size(); ++i)
        g.subgoals.push_back(parse_goal(s.items[i]));
      return g;
    }
    if (head == "factor") {
      expect_args(1);
      g.kind = GoalKind::Factor;
      g.weight = parse_weight(s.items[1]);
      return g;
    }
    if (head == "fresh") {
      if (nargs < 2)
        throw ParseError("fresh takes a binding list and at least one goal",
                         s.loc);
      g.kind = GoalKind::Fresh;
      g.binders = parse_bindings(s.items[1]);
      g.subgoals.push_back(parse_body(s, 2));
      return g;
    }
    static const std::map<std::string, std::pair<GoalKind, std::size_t>> prims = {
        {"==", {GoalKind::Eq, 2}},        {"=/=", {GoalKind::Neq, 2}},
        {"soleo", {GoalKind::Soleo, 1}},  {"lefto", {GoalKind::Lefto, 2}},
        {"righto", {GoalKind::Righto, 2}}, {"pairo", {GoalKind::Pairo, 3}}};
    if (auto it = prims.find(head); it != prims.end()) {
      expect_args(it->second.second);
      g.kind = it->second.first;
      take_args();
      return g;
    }
    if (is_reserved_head(head))
      throw ParseError("'" + head + "' cannot be used as a goal", s.loc);
    if (!is_identifier(head, opts_.allow_generated_names))
      throw ParseError("unknown form '" + head + "'", s.loc);
    g.kind = GoalKind::Call;
    g.rel = head;
    take_args();
    return g;
  }

  ParseOptions opts_;
  std::map<std::string, Type> aliases_;
};

}  // namespace detail

/// Parses source text into a surface program. Type aliases are expanded
/// as they are read; everything else keeps its surface shape.
inline Program parse_program(std::string_view text, ParseOptions opts = {}) {
  return detail::ProgramParser(opts).parse(text);
}

/// Parses a single type written without aliases, e.g. (Sum Unit Unit).
inline Type parse_type(std::string_view text) {
  auto forms = read_sexps(text, false);
  if (forms.size() != 1)
    throw ParseError("expected exactly one type", forms.empty() ? SourceLoc{1, 1} : forms[1].loc);
  return detail::ProgramParser({}).read_type(forms[0]);
}

// ---------------------------------------------------------------------------
// Desugaring
// ---------------------------------------------------------------------------

/// Interprets a literal at a type, e.g. 2 at (Sum Unit (Sum Unit Unit)).
inline Value literal_value(const ValueLiteral& lit, const Type& t) {
  auto fail = [&] {
    std::ostringstream os;
    os << "literal does not inhabit type " << t;
    return DesugarError(os.str(), lit.loc);
  };
  switch (lit.kind) {
    case ValueLiteral::Kind::Unit:
      if (!t.is_unit()) throw fail();
      return Value::unit();
    case ValueLiteral::Kind::Left:
      if (!t.is_sum()) throw fail();
      return Value::left(literal_value(lit.parts[0], t.left()));
    case ValueLiteral::Kind::Right:
      if (!t.is_sum()) throw fail();
      return Value::right(literal_value(lit.parts[0], t.right()));
    case ValueLiteral::Kind::Pair:
      if (!t.is_prod()) throw fail();
      return Value::pair(literal_value(lit.parts[0], t.left()),
                         literal_value(lit.parts[1], t.right()));
    case ValueLiteral::Kind::Nat:
      try {
        return numeral_value(t, lit.nat);
      } catch (const Error&) {
        throw fail();
      }
  }
  throw fail();
}

namespace detail {

class Desugarer {
 public:
  explicit Desugarer(const Program& p) : names_(name_supply_for(p, "g")) {
    for (const auto& r : p.rels) {
      std::vector<Type> types;
      for (const auto& b : r.params) types.push_back(b.type);
      sigs_[r.name] = std::move(types);
    }
  }

  Program run(const Program& p) {
    Program out;
    for (const auto& r : p.rels) {
      scope_.assign(r.params.begin(), r.params.end());
      out.rels.push_back(RelDef{r.name, r.params, goal(r.body), r.loc});
    }
    scope_.assign(p.query.params.begin(), p.query.params.end());
    out.query = QueryDef{p.query.params, goal(p.query.body), p.query.loc};
    return out;
  }

  // Builds the goal that constrains `target` (of type t) to equal v.
  Goal build(const Value& v, const Type& t, const std::string& target) {
    switch (t.kind()) {
      case Type::Kind::Unit:
        return Goal::soleo(target);
      case Type::Kind::Sum: {
        bool is_left = v.is_left();
        Type inner = is_left ? t.left() : t.right();
        std::string u = names_.next();
        Goal tag = is_left ? Goal::lefto(target, u) : Goal::righto(target, u);
        return Goal::fresh(u, inner,
                           Goal::conj(build(v.first(), inner, u), std::move(tag)));
      }
      case Type::Kind::Prod: {
        std::string u1 = names_.next();
        std::string u2 = names_.next();
        Goal body = Goal::conj(
            build(v.first(), t.left(), u1),
            Goal::conj(build(v.second(), t.right(), u2),
                       Goal::pairo(target, u1, u2)));
        return Goal::fresh(u1, t.left(),
                           Goal::fresh(u2, t.right(), std::move(body)));
      }
    }
    throw Error("unreachable");
  }

 private:
  std::optional<Type> lookup(const std::string& name) const {
    for (auto it = scope_.rbegin(); it != scope_.rend(); ++it)
      if (it->name == name) return it->type;
    return std::nullopt;
  }

  std::optional<Type> arg_type(const Arg& a) const {
    if (a.is_literal()) return std::nullopt;
    return lookup(a.var);
  }

  // Expected type of each argument position, where it can be determined.
  std::vector<std::optional<Type>> expected_types(const Goal& g) const {
    const auto& a = g.args;
    std::vector<std::optional<Type>> out(a.size());
    switch (g.kind) {
      case GoalKind::Eq:
      case GoalKind::Neq:
        out[0] = arg_type(a[1]);
        out[1] = arg_type(a[0]);
        break;
      case GoalKind::Soleo:
        out[0] = Type::unit();
        break;
      case GoalKind::Lefto:
      case GoalKind::Righto: {
        auto x = arg_type(a[0]);
        if (x && x->is_sum())
          out[1] = g.kind == GoalKind::Lefto ? x->left() : x->right();
        break;
      }
      case GoalKind::Pairo: {
        auto x = arg_type(a[0]);
        if (x && x->is_prod()) {
          out[1] = x->left();
          out[2] = x->right();
        }
        auto y = arg_type(a[1]);
        auto z = arg_type(a[2]);
        if (y && z) out[0] = Type::prod(*y, *z);
        break;
      }
      case GoalKind::Call: {
        auto it = sigs_.find(g.rel);
        if (it != sigs_.end() && it->second.size() == a.size())
          for (std::size_t i = 0; i < a.size(); ++i) out[i] = it->second[i];
        break;
      }
      default:
        break;
    }
    return out;
  }

  Goal goal(const Goal& g) {
    switch (g.kind) {
      case GoalKind::Conj:
      case GoalKind::Disj: {
        std::vector<Goal> parts;
        for (const auto& s : g.subgoals) parts.push_back(goal(s));
        Goal out = g.kind == GoalKind::Conj ? conj_all(std::move(parts))
                                            : disj_all(std::move(parts));
        if (g.subgoals.size() > 1) out.loc = g.loc;
        return out;
      }
      case GoalKind::Factor:
        return g;
      case GoalKind::Fresh: {
        std::size_t mark = scope_.size();
        for (const auto& b : g.binders) scope_.push_back(b);
        Goal body = goal(g.body());
        scope_.resize(mark);
        for (auto it = g.binders.rbegin(); it != g.binders.rend(); ++it) {
          body = Goal::fresh(it->name, it->type, std::move(body));
          body.binders.front().loc = it->loc;
          body.loc = g.loc;
        }
        return body;
      }
      default:
        return with_literals_expanded(g);
    }
  }

  Goal with_literals_expanded(const Goal& g) {
    bool any = std::any_of(g.args.begin(), g.args.end(),
                           [](const Arg& a) { return a.is_literal(); });
    if (!any) return g;
    auto types = expected_types(g);
    Goal core = g;
    std::vector<std::pair<std::string, Goal>> temps;  // (name, builder)
    std::vector<Type> temp_types;
    for (std::size_t i = 0; i < g.args.size(); ++i) {
      const Arg& a = g.args[i];
      if (!a.is_literal()) continue;
      if (!types[i])
        throw DesugarError("cannot determine the type of this literal argument",
                           a.loc);
      Value v = literal_value(*a.literal, *types[i]);
      std::string t = names_.next();
      temps.emplace_back(t, build(v, *types[i], t));
      temp_types.push_back(*types[i]);
      core.args[i] = Arg::variable(t, a.loc);
    }
    Goal out = std::move(core);
    for (std::size_t i = temps.size(); i-- > 0;) {
      out = Goal::fresh(temps[i].first, temp_types[i],
                        Goal::conj(std::move(temps[i].second), std::move(out)));
      out.loc = g.loc;
    }
    return out;
  }

  NameSupply names_;
  std::map<std::string, std::vector<Type>> sigs_;
  std::vector<Binding> scope_;
};

}  // namespace detail

/// Removes all surface sugar: run/defrel bodies become a single goal,
/// conj/disj become binary (right-nested), fresh binds one variable, and
/// literal arguments are replaced by fresh variables constrained with
/// soleo/lefto/righto/pairo. Generated names are `%g<n>`.
inline Program desugar(const Program& surface) {
  return detail::Desugarer(surface).run(surface);
}

/// Goal constraining variable `target` of type t to the value v.
inline Goal value_goal(const Value& v, const Type& t, const std::string& target,
                       const Program& context = {}) {
  Program p = context;
  p.query.params.push_back(Binding{target, t, {}});
  return detail::Desugarer(p).build(v, t, target);
}

/// True when g uses no surface sugar.
inline bool is_core(const Goal& g) {
  switch (g.kind) {
    case GoalKind::Conj:
    case GoalKind::Disj:
      return g.subgoals.size() == 2 && is_core(g.subgoals[0]) &&
             is_core(g.subgoals[1]);
    case GoalKind::Fresh:
      return g.binders.size() == 1 && g.subgoals.size() == 1 &&
             is_core(g.body());
    case GoalKind::Factor:
      return true;
    default:
      return std::none_of(g.args.begin(), g.args.end(),
                          [](const Arg& a) { return a.is_literal(); });
  }
}

inline bool is_core(const Program& p) {
  for (const auto& r : p.rels)
    if (!is_core(r.body)) return false;
  return is_core(p.query.body);
}

// ---------------------------------------------------------------------------
// Printing
// ---------------------------------------------------------------------------

inline std::string to_string(const WeightLiteral& w) { return w.text; }

inline std::string to_string(const ValueLiteral& v) {
  switch (v.kind) {
    case ValueLiteral::Kind::Unit:
      return "()";
    case ValueLiteral::Kind::Left:
      return "(left " + to_string(v.parts[0]) + ")";
    case ValueLiteral::Kind::Right:
      return "(right " + to_string(v.parts[0]) + ")";
    case ValueLiteral::Kind::Pair:
      return "(" + to_string(v.parts[0]) + " . " + to_string(v.parts[1]) + ")";
    case ValueLiteral::Kind::Nat:
      return std::to_string(v.nat);
  }
  return "?";
}

inline std::string_view goal_head(const Goal& g) {
  switch (g.kind) {
    case GoalKind::Conj: return "conj";
    case GoalKind::Disj: return "disj";
    case GoalKind::Factor: return "factor";
    case GoalKind::Fresh: return "fresh";
    case GoalKind::Call: return g.rel;
    case GoalKind::Eq: return "==";
    case GoalKind::Neq: return "=/=";
    case GoalKind::Soleo: return "soleo";
    case GoalKind::Lefto: return "lefto";
    case GoalKind::Righto: return "righto";
    case GoalKind::Pairo: return "pairo";
  }
  return "?";
}

namespace detail {

class Printer {
 public:
  using Rename = std::function<std::string(const std::string&)>;

  explicit Printer(Rename rename) : rename_(std::move(rename)) {}

  std::string binding(const Binding& b) const {
    std::ostringstream os;
    os << '(' << rename_(b.name) << " : " << b.type << ')';
    return os.str();
  }

  std::string bindings(const std::vector<Binding>& bs) const {
    std::string s = "(";
    for (std::size_t i = 0; i < bs.size(); ++i) {
      if (i) s += ' ';
      s += binding(bs[i]);
    }
    return s + ")";
  }

  std::string flat(const Goal& g) const {
    switch (g.kind) {
      case GoalKind::Conj:
      case GoalKind::Disj: {
        std::string s = "(" + std::string(goal_head(g));
        for (const auto& sub : g.subgoals) s += " " + flat(sub);
        return s + ")";
      }
      case GoalKind::Factor:
        return "(factor " + to_string(g.weight) + ")";
      case GoalKind::Fresh:
        return "(fresh " + bindings(g.binders) + " " + flat(g.body()) + ")";
      default: {
        std::string s = "(" + (g.kind == GoalKind::Call ? rename_(g.rel)
                                                        : std::string(goal_head(g)));
        for (const auto& a : g.args)
          s += " " + (a.is_literal() ? to_string(*a.literal) : rename_(a.var));
        return s + ")";
      }
    }
  }

  // Multi-line layout: compound goals put operands on their own lines
  // once the flat form gets long.
  void goal(std::ostream& os, const Goal& g, std::size_t indent) const {
    std::string f = flat(g);
    if (f.size() + indent <= 78 ||
        (g.kind != GoalKind::Conj && g.kind != GoalKind::Disj &&
         g.kind != GoalKind::Fresh)) {
      os << f;
      return;
    }
    std::string pad(indent + 2, ' ');
    if (g.kind == GoalKind::Fresh) {
      os << "(fresh " << bindings(g.binders) << '\n' << pad;
      goal(os, g.body(), indent + 2);
      os << ')';
      return;
    }
    os << '(' << goal_head(g);
    for (const auto& sub : g.subgoals) {
      os << '\n' << pad;
      goal(os, sub, indent + 2);
    }
    os << ')';
  }

 private:
  Rename rename_;
};

// Maps every generated `%` name to a legal identifier unused elsewhere.
inline std::function<std::string(const std::string&)> legal_renamer(
    const Program& p) {
  std::set<std::string> used;
  std::vector<std::string> generated;
  for_each_name(p, [&](const std::string& n) {
    if (is_generated_name(n)) {
      if (std::find(generated.begin(), generated.end(), n) == generated.end())
        generated.push_back(n);
    } else {
      used.insert(n);
    }
  });
  auto table = std::make_shared<std::map<std::string, std::string>>();
  for (const auto& n : generated) {
    std::string base = "_" + n.substr(1);
    std::string cand = base;
    while (used.count(cand)) cand += "_";
    used.insert(cand);
    (*table)[n] = cand;
  }
  return [table](const std::string& n) {
    auto it = table->find(n);
    return it == table->end() ? n : it->second;
  };
}

}  // namespace detail

/// Single-line rendering of a goal, used in diagnostics.
inline std::string goal_to_string(const Goal& g) {
  return detail::Printer([](const std::string& n) { return n; }).flat(g);
}

/// Renders a program as source text. Compiler-generated names are renamed
/// to fresh legal identifiers so the output always re-parses.
inline std::string pretty_print(const Program& p) {
  detail::Printer pr(detail::legal_renamer(p));
  std::ostringstream os;
  for (const auto& r : p.rels) {
    os << "(defrel (" << r.name;
    for (const auto& b : r.params) os << ' ' << pr.binding(b);
    os << ")\n  ";
    pr.goal(os, r.body, 2);
    os << ")\n\n";
  }
  os << "(run " << pr.bindings(p.query.params) << "\n  ";
  pr.goal(os, p.query.body, 2);
  os << ")\n";
  return os.str();
}

}  // namespace srk
