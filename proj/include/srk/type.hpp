#pragma once

#include <cstdint>
#include <limits>
#include <memory>
#include <ostream>
#include <sstream>
#include <string>

#include "srk/error.hpp"

namespace srk {

// Saturating size arithmetic. Type sizes can exceed 64 bits for large
// products; anything at or above kSizeSaturated is "too big".
inline constexpr std::uint64_t kSizeSaturated =
    std::numeric_limits<std::uint64_t>::max();

inline std::uint64_t sat_add(std::uint64_t a, std::uint64_t b) {
  return a > kSizeSaturated - b ? kSizeSaturated : a + b;
}

inline std::uint64_t sat_mul(std::uint64_t a, std::uint64_t b) {
  if (a == 0 || b == 0) return 0;
  return a > kSizeSaturated / b ? kSizeSaturated : a * b;
}

/// A finite algebraic type: Unit, (Sum a b) or (Prod a b).
///
/// Immutable and cheap to copy; nodes are shared. The number of
/// inhabitants is computed once at construction.
class Type {
 public:
  enum class Kind { Unit, Sum, Prod };

 private:
  struct Node {
    Kind kind;
    std::shared_ptr<const Node> a;
    std::shared_ptr<const Node> b;
    std::uint64_t size;
  };

 public:

  Type() : Type(unit()) {}

  static Type unit() {
    static const std::shared_ptr<const Node> node =
        std::make_shared<const Node>(Node{Kind::Unit, nullptr, nullptr, 1});
    return Type(node);
  }
  static Type sum(Type left, Type right) {
    auto n = sat_add(left.size(), right.size());
    return Type(std::make_shared<const Node>(
        Node{Kind::Sum, std::move(left.node_), std::move(right.node_), n}));
  }
  static Type prod(Type first, Type second) {
    auto n = sat_mul(first.size(), second.size());
    return Type(std::make_shared<const Node>(
        Node{Kind::Prod, std::move(first.node_), std::move(second.node_), n}));
  }
  // Sum Unit Unit, the one-bit type.
  static Type bit() { return sum(unit(), unit()); }

  Kind kind() const { return node_->kind; }
  bool is_unit() const { return kind() == Kind::Unit; }
  bool is_sum() const { return kind() == Kind::Sum; }
  bool is_prod() const { return kind() == Kind::Prod; }
  bool is_bit() const {
    return is_sum() && left().is_unit() && right().is_unit();
  }

  // Left summand or first factor.
  Type left() const { return Type(node_->a); }
  // Right summand or second factor.
  Type right() const { return Type(node_->b); }

  /// Number of values; saturates at kSizeSaturated.
  std::uint64_t size() const { return node_->size; }

  friend bool operator==(const Type& x, const Type& y) {
    if (x.node_ == y.node_) return true;
    if (x.kind() != y.kind() || x.size() != y.size()) return false;
    if (x.is_unit()) return true;
    return x.left() == y.left() && x.right() == y.right();
  }
  friend bool operator!=(const Type& x, const Type& y) { return !(x == y); }

  std::string str() const {
    std::ostringstream os;
    os << *this;
    return os.str();
  }

  friend std::ostream& operator<<(std::ostream& os, const Type& t) {
    switch (t.kind()) {
      case Kind::Unit:
        return os << "Unit";
      case Kind::Sum:
        return os << "(Sum " << t.left() << ' ' << t.right() << ')';
      case Kind::Prod:
        return os << "(Prod " << t.left() << ' ' << t.right() << ')';
    }
    return os;
  }

 private:
  explicit Type(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  std::shared_ptr<const Node> node_;
};

// The numeral type with n values: Unit for n = 1, otherwise
// (Sum Unit <numeral n-1>). (numeral_type 4) is the 0..3 type.
inline Type numeral_type(std::uint64_t n) {
  if (n == 0) throw Error("numeral type needs at least one value");
  if (n == 1) return Type::unit();
  return Type::sum(Type::unit(), numeral_type(n - 1));
}

// True when t is (Sum Unit (Sum Unit ... Unit)) with at least 3 values,
// in which case values print as integers.
inline bool is_numeral_type(const Type& t) {
  if (t.size() < 3) return false;
  Type cur = t;
  while (cur.is_sum()) {
    if (!cur.left().is_unit()) return false;
    cur = cur.right();
  }
  return cur.is_unit();
}

/// An inhabitant of a Type: (), (left v), (right v) or (v1 . v2).
class Value {
 public:
  enum class Kind { Unit, Left, Right, Pair };

 private:
  struct Node {
    Kind kind;
    std::shared_ptr<const Node> a;
    std::shared_ptr<const Node> b;
  };

 public:

  Value() : Value(unit()) {}

  static Value unit() {
    static const std::shared_ptr<const Node> node =
        std::make_shared<const Node>(Node{Kind::Unit, nullptr, nullptr});
    return Value(node);
  }
  static Value left(Value v) {
    return Value(
        std::make_shared<const Node>(Node{Kind::Left, std::move(v.node_), nullptr}));
  }
  static Value right(Value v) {
    return Value(
        std::make_shared<const Node>(Node{Kind::Right, std::move(v.node_), nullptr}));
  }
  static Value pair(Value a, Value b) {
    return Value(std::make_shared<const Node>(
        Node{Kind::Pair, std::move(a.node_), std::move(b.node_)}));
  }
  // Bit values of Sum Unit Unit.
  static Value bit(bool one) { return one ? right(unit()) : left(unit()); }

  Kind kind() const { return node_->kind; }
  bool is_unit() const { return kind() == Kind::Unit; }
  bool is_left() const { return kind() == Kind::Left; }
  bool is_right() const { return kind() == Kind::Right; }
  bool is_pair() const { return kind() == Kind::Pair; }

  // Payload of left/right, or the first component of a pair.
  Value first() const { return Value(node_->a); }
  Value second() const { return Value(node_->b); }

  friend bool operator==(const Value& x, const Value& y) {
    if (x.node_ == y.node_) return true;
    if (x.kind() != y.kind()) return false;
    switch (x.kind()) {
      case Kind::Unit:
        return true;
      case Kind::Left:
      case Kind::Right:
        return x.first() == y.first();
      case Kind::Pair:
        return x.first() == y.first() && x.second() == y.second();
    }
    return false;
  }
  friend bool operator!=(const Value& x, const Value& y) { return !(x == y); }

  std::string str() const {
    std::ostringstream os;
    os << *this;
    return os.str();
  }

  friend std::ostream& operator<<(std::ostream& os, const Value& v) {
    switch (v.kind()) {
      case Kind::Unit:
        return os << "()";
      case Kind::Left:
        return os << "(left " << v.first() << ')';
      case Kind::Right:
        return os << "(right " << v.first() << ')';
      case Kind::Pair:
        return os << '(' << v.first() << " . " << v.second() << ')';
    }
    return os;
  }

 private:
  explicit Value(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  std::shared_ptr<const Node> node_;
};

inline bool inhabits(const Value& v, const Type& t) {
  switch (t.kind()) {
    case Type::Kind::Unit:
      return v.is_unit();
    case Type::Kind::Sum:
      if (v.is_left()) return inhabits(v.first(), t.left());
      if (v.is_right()) return inhabits(v.first(), t.right());
      return false;
    case Type::Kind::Prod:
      return v.is_pair() && inhabits(v.first(), t.left()) &&
             inhabits(v.second(), t.right());
  }
  return false;
}

/// The k-th value of a numeral-shaped type: k nested rights around a
/// left (or around the final unit). Works on any sum spine whose left
/// branches can hold value 0.
inline Value numeral_value(const Type& t, std::uint64_t k) {
  switch (t.kind()) {
    case Type::Kind::Unit:
      if (k != 0) break;
      return Value::unit();
    case Type::Kind::Sum:
      if (k == 0) return Value::left(numeral_value(t.left(), 0));
      return Value::right(numeral_value(t.right(), k - 1));
    case Type::Kind::Prod:
      if (k != 0) break;
      return Value::pair(numeral_value(t.left(), 0),
                         numeral_value(t.right(), 0));
  }
  throw Error("integer " + std::to_string(k) + " does not inhabit type " +
              t.str());
}

// Inverse of numeral_value on numeral types.
inline std::uint64_t numeral_index(const Value& v) {
  std::uint64_t k = 0;
  Value cur = v;
  while (cur.is_right()) {
    ++k;
    cur = cur.first();
  }
  return k;
}

// Prints v, using integer notation when t is a numeral type.
inline std::string format_value(const Type& t, const Value& v) {
  if (is_numeral_type(t)) return std::to_string(numeral_index(v));
  return v.str();
}

}  // namespace srk
