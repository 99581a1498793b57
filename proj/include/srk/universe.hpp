#pragma once

#include <cstdint>
#include <vector>

#include "srk/error.hpp"
#include "srk/type.hpp"

namespace srk {

// Values are ordered with every left before every right, and pairs
// lexicographically with the first component major. rank() is the
// position of a value in that order.

inline std::uint64_t rank(const Type& t, const Value& v) {
  switch (t.kind()) {
    case Type::Kind::Unit:
      return 0;
    case Type::Kind::Sum:
      if (v.is_left()) return rank(t.left(), v.first());
      return t.left().size() + rank(t.right(), v.first());
    case Type::Kind::Prod:
      return rank(t.left(), v.first()) * t.right().size() +
             rank(t.right(), v.second());
  }
  return 0;
}

inline Value unrank(const Type& t, std::uint64_t i) {
  if (i >= t.size())
    throw Error("index " + std::to_string(i) + " out of range for type " +
                t.str());
  switch (t.kind()) {
    case Type::Kind::Unit:
      return Value::unit();
    case Type::Kind::Sum: {
      auto n = t.left().size();
      if (i < n) return Value::left(unrank(t.left(), i));
      return Value::right(unrank(t.right(), i - n));
    }
    case Type::Kind::Prod: {
      auto m = t.right().size();
      return Value::pair(unrank(t.left(), i / m), unrank(t.right(), i % m));
    }
  }
  return Value::unit();
}

/// All values of t in rank order.
inline std::vector<Value> enumerate_values(const Type& t) {
  if (t.size() == kSizeSaturated || t.size() > (std::uint64_t{1} << 32))
    throw Error("type " + t.str() + " has too many values to enumerate");
  std::vector<Value> out;
  out.reserve(t.size());
  for (std::uint64_t i = 0; i < t.size(); ++i) out.push_back(unrank(t, i));
  return out;
}

/// ⟦τ⟧ with its rank/unrank bijection.
struct ValueUniverse {
  Type ty;

  std::uint64_t size() const { return ty.size(); }
  std::uint64_t rank(const Value& v) const { return srk::rank(ty, v); }
  Value unrank(std::uint64_t i) const { return srk::unrank(ty, i); }
};

}  // namespace srk
