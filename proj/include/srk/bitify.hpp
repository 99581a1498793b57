#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "srk/error.hpp"
#include "srk/syntax.hpp"
#include "srk/type.hpp"
#include "srk/typecheck.hpp"

namespace srk {

// Bitstring types are built from Unit, one-bit sums (Sum Unit Unit) and
// products. Their bits are read in order, left to right, so the tag of a
// tagged union comes before its payload. Left is bit 0 and Right is bit 1.

inline bool is_bit_type(const Type& t) {
  switch (t.kind()) {
    case Type::Kind::Unit:
      return true;
    case Type::Kind::Sum:
      return t.is_bit();
    case Type::Kind::Prod:
      return is_bit_type(t.left()) && is_bit_type(t.right());
  }
  return false;
}

/// Number of one-bit sums in a bitstring type.
inline std::size_t bit_width(const Type& t) {
  switch (t.kind()) {
    case Type::Kind::Unit:
      return 0;
    case Type::Kind::Sum:
      if (!t.is_bit()) throw Error("bit_width of a non-bitstring type " + t.str());
      return 1;
    case Type::Kind::Prod:
      return bit_width(t.left()) + bit_width(t.right());
  }
  return 0;
}

/// τ ↦ τ*: Unit and Sum Unit Unit stay, any other sum becomes a tag bit
/// paired with the wider of the two payloads (the right one on ties), and
/// products map componentwise.
inline Type bitify_type(const Type& t) {
  switch (t.kind()) {
    case Type::Kind::Unit:
      return t;
    case Type::Kind::Sum: {
      if (t.is_bit()) return t;
      Type a = bitify_type(t.left());
      Type b = bitify_type(t.right());
      return Type::prod(Type::bit(), a.size() > b.size() ? a : b);
    }
    case Type::Kind::Prod:
      return Type::prod(bitify_type(t.left()), bitify_type(t.right()));
  }
  return t;
}

/// Flat bits of a value of a bitstring type.
inline std::vector<bool> flat_bits(const Type& bt, const Value& v) {
  std::vector<bool> out;
  auto walk = [&](auto& self, const Type& t, const Value& x) -> void {
    switch (t.kind()) {
      case Type::Kind::Unit:
        return;
      case Type::Kind::Sum:
        out.push_back(x.is_right());
        return;
      case Type::Kind::Prod:
        self(self, t.left(), x.first());
        self(self, t.right(), x.second());
        return;
    }
  };
  walk(walk, bt, v);
  return out;
}

/// Value of bitstring type `bt` with the given flat bits.
inline Value from_flat_bits(const Type& bt, const std::vector<bool>& bits) {
  if (bits.size() != bit_width(bt))
    throw Error("expected " + std::to_string(bit_width(bt)) + " bits for " +
                bt.str() + ", got " + std::to_string(bits.size()));
  std::size_t pos = 0;
  auto build = [&](auto& self, const Type& t) -> Value {
    switch (t.kind()) {
      case Type::Kind::Unit:
        return Value::unit();
      case Type::Kind::Sum:
        return Value::bit(bits[pos++]);
      case Type::Kind::Prod: {
        Value a = self(self, t.left());
        return Value::pair(std::move(a), self(self, t.right()));
      }
    }
    return Value::unit();
  };
  return build(build, bt);
}

namespace detail {

// Widens `inner` (of bitstring type `from`) to bitstring type `to` by
// copying its bits to the front and filling the rest with zeros.
inline Value pad_value(const Type& from, const Type& to, const Value& inner) {
  if (from == to) return inner;
  auto bits = flat_bits(from, inner);
  bits.resize(bit_width(to), false);
  return from_flat_bits(to, bits);
}

}  // namespace detail

/// The bitstring encoding of v : t.
inline Value embed_value(const Type& t, const Value& v) {
  if (!inhabits(v, t)) throw Error("value " + v.str() + " does not inhabit " + t.str());
  switch (t.kind()) {
    case Type::Kind::Unit:
      return v;
    case Type::Kind::Sum: {
      if (t.is_bit()) return v;
      Type payload = bitify_type(t).right();
      const Type& variant = v.is_left() ? t.left() : t.right();
      Value inner = embed_value(variant, v.first());
      return Value::pair(Value::bit(v.is_right()),
                         detail::pad_value(bitify_type(variant), payload, inner));
    }
    case Type::Kind::Prod:
      return Value::pair(embed_value(t.left(), v.first()),
                         embed_value(t.right(), v.second()));
  }
  return v;
}

/// Inverse of embed_value; nothing when b is not the image of any value.
inline std::optional<Value> decode_value(const Type& t, const Value& b) {
  switch (t.kind()) {
    case Type::Kind::Unit:
      return Value::unit();
    case Type::Kind::Sum: {
      if (t.is_bit()) return b;
      Type payload = bitify_type(t).right();
      bool right = b.first().is_right();
      const Type& variant = right ? t.right() : t.left();
      Type vt = bitify_type(variant);
      auto bits = flat_bits(payload, b.second());
      std::size_t w = bit_width(vt);
      for (std::size_t i = w; i < bits.size(); ++i)
        if (bits[i]) return std::nullopt;
      bits.resize(w);
      auto inner = decode_value(variant, from_flat_bits(vt, bits));
      if (!inner) return std::nullopt;
      return right ? Value::right(*inner) : Value::left(*inner);
    }
    case Type::Kind::Prod: {
      auto a = decode_value(t.left(), b.first());
      auto c = decode_value(t.right(), b.second());
      if (!a || !c) return std::nullopt;
      return Value::pair(*a, *c);
    }
  }
  return std::nullopt;
}

namespace detail {

// Builds the goals that stage 2 inserts. Generated names are `%b<n>`.
class BitGoals {
 public:
  explicit BitGoals(NameSupply names) : names_(std::move(names)) {}

  std::string fresh_name() { return names_.next(); }

  // Bit b is 0 (Left) or 1 (Right).
  Goal bit_is(const std::string& b, bool one) {
    std::string u = names_.next();
    return Goal::fresh(u, Type::unit(), one ? Goal::righto(b, u) : Goal::lefto(b, u));
  }

  // Destructures x : bt down to its one-bit leaves, then continues with
  // k(leaf names). Pairo fixes every component, so the fresh binders
  // introduced here contribute exactly one term each.
  Goal with_bits(const std::string& x, const Type& bt,
                 const std::function<Goal(std::vector<std::string>)>& k) {
    std::vector<std::pair<std::string, Type>> todo{{x, bt}};
    return expand(std::move(todo), {}, k);
  }

  // y : yt and pl : pt are bitstring values with bit_width(yt) ≤
  // bit_width(pt). Holds when pl is y's bits followed by zeros.
  Goal coerce(const std::string& y, const Type& yt, const std::string& pl,
              const Type& pt) {
    if (yt == pt) return Goal::eq(y, pl);
    return with_bits(y, yt, [&, pl, pt](std::vector<std::string> ybits) {
      return with_bits(pl, pt, [&, ybits](std::vector<std::string> pbits) {
        std::vector<Goal> parts;
        for (std::size_t i = 0; i < pbits.size(); ++i)
          parts.push_back(i < ybits.size() ? Goal::eq(ybits[i], pbits[i])
                                           : bit_is(pbits[i], false));
        if (parts.empty()) parts.push_back(Goal::eq(pl, pl));
        return conj_all(std::move(parts));
      });
    });
  }

  // Goal over x : bitify_type(t) that holds exactly on embeddings.
  Goal validity(const Type& t, const std::string& x) {
    Type bt = bitify_type(t);
    // Every bitstring decodes when the sizes agree.
    if (t.size() == bt.size()) return Goal::eq(x, x);
    if (t.is_sum()) {
      std::string tag = names_.next();
      std::string pl = names_.next();
      Type pt = bt.right();
      Goal left = Goal::conj(bit_is(tag, false), padded_valid(t.left(), pl, pt));
      Goal right = Goal::conj(bit_is(tag, true), padded_valid(t.right(), pl, pt));
      return Goal::fresh(tag, Type::bit(),
                         Goal::fresh(pl, pt,
                                     Goal::conj(Goal::pairo(x, tag, pl),
                                                Goal::disj(std::move(left), std::move(right)))));
    }
    // Prod; Unit is always full.
    std::string a = names_.next();
    std::string b = names_.next();
    return Goal::fresh(
        a, bt.left(),
        Goal::fresh(b, bt.right(),
                    Goal::conj(Goal::pairo(x, a, b),
                               Goal::conj(validity(t.left(), a), validity(t.right(), b)))));
  }

 private:
  Goal padded_valid(const Type& variant, const std::string& pl, const Type& pt) {
    Type vt = bitify_type(variant);
    if (vt == pt) return validity(variant, pl);
    std::string y = names_.next();
    return Goal::fresh(y, vt, Goal::conj(coerce(y, vt, pl, pt), validity(variant, y)));
  }

  Goal expand(std::vector<std::pair<std::string, Type>> todo,
              std::vector<std::string> leaves,
              const std::function<Goal(std::vector<std::string>)>& k) {
    if (todo.empty()) return k(std::move(leaves));
    auto [x, t] = todo.front();
    todo.erase(todo.begin());
    switch (t.kind()) {
      case Type::Kind::Unit:
        return expand(std::move(todo), std::move(leaves), k);
      case Type::Kind::Sum:
        leaves.push_back(x);
        return expand(std::move(todo), std::move(leaves), k);
      case Type::Kind::Prod: {
        std::string a = names_.next();
        std::string b = names_.next();
        todo.insert(todo.begin(), {{a, t.left()}, {b, t.right()}});
        Goal rest = expand(std::move(todo), std::move(leaves), k);
        return Goal::fresh(a, t.left(),
                           Goal::fresh(b, t.right(),
                                       Goal::conj(Goal::pairo(x, a, b), std::move(rest))));
      }
    }
    throw Error("unreachable");
  }

  NameSupply names_;
};

class Bitifier {
 public:
  explicit Bitifier(const Program& p) : gen_(name_supply_for(p, "b")) {}

  Goal with_validity(const std::vector<Binding>& binders, Goal body) {
    std::vector<Goal> parts;
    for (const auto& b : binders) parts.push_back(gen_.validity(b.type, b.name));
    parts.push_back(std::move(body));
    return conj_all(std::move(parts));
  }

  std::vector<Binding> rewrite(const std::vector<Binding>& binders) {
    std::vector<Binding> out;
    for (const auto& b : binders) out.push_back(Binding{b.name, bitify_type(b.type), b.loc});
    return out;
  }

  // Converts a binder list plus body, with the binders in scope.
  Goal scoped(const std::vector<Binding>& binders, const Goal& body) {
    for (const auto& b : binders) scope_.emplace_back(b.name, b.type);
    Goal out = with_validity(binders, goal(body));
    scope_.resize(scope_.size() - binders.size());
    return out;
  }

  Goal goal(const Goal& g) {
    switch (g.kind) {
      case GoalKind::Conj:
      case GoalKind::Disj: {
        Goal out;
        out.kind = g.kind;
        out.loc = g.loc;
        for (const auto& s : g.subgoals) out.subgoals.push_back(goal(s));
        return out;
      }
      case GoalKind::Fresh: {
        Goal out;
        out.kind = GoalKind::Fresh;
        out.loc = g.loc;
        out.binders = rewrite(g.binders);
        out.subgoals.push_back(scoped(g.binders, g.body()));
        return out;
      }
      case GoalKind::Lefto:
      case GoalKind::Righto:
        return sum_intro(g);
      default:
        for (const auto& a : g.args)
          if (a.is_literal()) throw Error("bitify needs a desugared program", a.loc);
        return g;
    }
  }

 private:
  const Type& type_of(const Arg& a) const {
    if (a.is_literal()) throw Error("bitify needs a desugared program", a.loc);
    for (auto it = scope_.rbegin(); it != scope_.rend(); ++it)
      if (it->first == a.var) return it->second;
    throw Error("bitify: unbound variable '" + a.var + "'", a.loc);
  }

  // lefto/righto on a tagged union: split x into tag and payload, test
  // the tag and coerce y into the payload.
  Goal sum_intro(const Goal& g) {
    const Type& xt = type_of(g.args[0]);
    type_of(g.args[1]);
    if (xt.is_bit()) return g;
    bool right = g.kind == GoalKind::Righto;
    Type pt = bitify_type(xt).right();
    Type yt = bitify_type(right ? xt.right() : xt.left());
    std::string tag = gen_.fresh_name();
    std::string pl = gen_.fresh_name();
    const std::string& x = g.args[0].var;
    const std::string& y = g.args[1].var;
    Goal out = Goal::fresh(
        tag, Type::bit(),
        Goal::fresh(pl, pt,
                    conj_all({Goal::pairo(x, tag, pl), gen_.bit_is(tag, right),
                              gen_.coerce(y, yt, pl, pt)})));
    out.loc = g.loc;
    return out;
  }

  BitGoals gen_;
  std::vector<std::pair<std::string, Type>> scope_;
};

}  // namespace detail

/// Goal over x : bitify_type(t) that holds exactly when x decodes to a
/// value of t. `names` supplies binder names that must not clash with x.
inline Goal validity_goal(const Type& t, const std::string& x,
                          NameSupply names = NameSupply("b")) {
  return detail::BitGoals(std::move(names)).validity(t, x);
}

/// Stage 2: rewrites every binder type to its bitstring type, inserts a
/// validity goal under each binder (defrel parameters and run binders
/// included) and turns lefto/righto on tagged unions into tag tests plus
/// payload coercions.
inline Program bitify(const Program& p) {
  require_well_typed(p);
  detail::Bitifier b(p);
  Program out;
  for (const auto& r : p.rels) {
    RelDef nr;
    nr.name = r.name;
    nr.loc = r.loc;
    nr.params = b.rewrite(r.params);
    nr.body = b.scoped(r.params, r.body);
    out.rels.push_back(std::move(nr));
  }
  out.query.loc = p.query.loc;
  out.query.params = b.rewrite(p.query.params);
  out.query.body = b.scoped(p.query.params, p.query.body);
  return out;
}

}  // namespace srk
