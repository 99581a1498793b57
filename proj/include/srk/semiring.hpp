#pragma once

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstdio>
#include <limits>
#include <optional>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "srk/error.hpp"
#include "srk/syntax.hpp"

namespace srk {

/// A commutative semiring, given as a stateless descriptor type.
template <class S>
concept Semiring = requires(typename S::weight_type a, typename S::weight_type b,
                            const WeightLiteral& lit, double tol) {
  typename S::weight_type;
  { S::name } -> std::convertible_to<std::string_view>;
  { S::zero() } -> std::same_as<typename S::weight_type>;
  { S::one() } -> std::same_as<typename S::weight_type>;
  { S::add(a, b) } -> std::same_as<typename S::weight_type>;
  { S::mul(a, b) } -> std::same_as<typename S::weight_type>;
  { S::from_literal(lit) } -> std::same_as<typename S::weight_type>;
  { S::approx_eq(a, b, tol) } -> std::same_as<bool>;
  { S::is_zero(a) } -> std::same_as<bool>;
  { S::display(a) } -> std::convertible_to<std::string>;
};

// Elements for which a ⊕ x = a for every x. Lets summation stop early.
template <class S>
concept HasAbsorbingSum = requires(typename S::weight_type a) {
  { S::absorbs_add(a) } -> std::same_as<bool>;
};

// Semirings with a greatest element that widening can jump to.
template <class S>
concept HasTop = requires { { S::top() } -> std::same_as<typename S::weight_type>; };

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

namespace detail {

inline double parse_nonnegative(const WeightLiteral& lit, std::string_view who) {
  switch (lit.kind) {
    case WeightLiteral::Kind::Infinity:
      return kInfinity;
    case WeightLiteral::Kind::Number: {
      double v = 0;
      try {
        v = std::stod(lit.text);
      } catch (const std::exception&) {
        throw Error(std::string(who) + ": malformed weight '" + lit.text + "'");
      }
      if (!(v >= 0) || std::isnan(v))
        throw Error(std::string(who) + ": weights must be nonnegative, got '" +
                    lit.text + "'");
      return v;
    }
    default:
      throw Error("unreachable");
  }
}

inline bool close(double a, double b, double tol) {
  if (std::isinf(a) || std::isinf(b)) return a == b;
  double scale = std::max({1.0, std::fabs(a), std::fabs(b)});
  return std::fabs(a - b) <= tol * scale;
}

inline std::string display_real(double w) {
  if (std::isinf(w)) return "inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", w);
  return buf;
}

}  // namespace detail

/// (𝔹, ∨, ∧, ⊥, ⊤).
struct BooleanSemiring {
  using weight_type = bool;
  static constexpr std::string_view name = "bool";

  static bool zero() { return false; }
  static bool one() { return true; }
  static bool add(bool a, bool b) { return a || b; }
  static bool mul(bool a, bool b) { return a && b; }
  static bool absorbs_add(bool a) { return a; }
  static bool top() { return true; }

  // #f and numeric zero are ⊥; every other literal is ⊤.
  static bool from_literal(const WeightLiteral& lit) {
    switch (lit.kind) {
      case WeightLiteral::Kind::False:
        return false;
      case WeightLiteral::Kind::True:
      case WeightLiteral::Kind::Infinity:
        return true;
      case WeightLiteral::Kind::Number:
        return detail::parse_nonnegative(lit, name) != 0.0;
    }
    return true;
  }
  static bool leq(bool a, bool b) { return !a || b; }
  static bool approx_eq(bool a, bool b, double = 0) { return a == b; }
  static bool is_zero(bool a) { return !a; }
  static std::string display(bool a) { return a ? "#t" : "#f"; }
};

/// ℝ≥0 ∪ {+∞} with ordinary + and ×. 0 annihilates +∞.
struct RealInfSemiring {
  using weight_type = double;
  static constexpr std::string_view name = "real-inf";

  static double zero() { return 0.0; }
  static double one() { return 1.0; }
  static double add(double a, double b) { return a + b; }
  static double mul(double a, double b) {
    if (a == 0.0 || b == 0.0) return 0.0;
    return a * b;
  }
  static bool absorbs_add(double a) { return std::isinf(a); }
  static double top() { return kInfinity; }

  static double from_literal(const WeightLiteral& lit) {
    switch (lit.kind) {
      case WeightLiteral::Kind::True:
        return 1.0;
      case WeightLiteral::Kind::False:
        return 0.0;
      default:
        return detail::parse_nonnegative(lit, name);
    }
  }
  static bool leq(double a, double b) { return a <= b; }
  static bool approx_eq(double a, double b, double tol) {
    return detail::close(a, b, tol);
  }
  static bool is_zero(double a) { return a == 0.0; }
  static std::string display(double a) { return detail::display_real(a); }
};

/// Costs under (min, +): zero is +∞, one is 0.
struct TropicalSemiring {
  using weight_type = double;
  static constexpr std::string_view name = "tropical";

  static double zero() { return kInfinity; }
  static double one() { return 0.0; }
  static double add(double a, double b) { return std::min(a, b); }
  static double mul(double a, double b) { return a + b; }
  // Costs are nonnegative, so a cost of 0 is already the minimum.
  static bool absorbs_add(double a) { return a == 0.0; }

  // #t is the unit cost-free weight, #f is the impossible weight.
  static double from_literal(const WeightLiteral& lit) {
    switch (lit.kind) {
      case WeightLiteral::Kind::True:
        return one();
      case WeightLiteral::Kind::False:
        return zero();
      default:
        return detail::parse_nonnegative(lit, name);
    }
  }
  // Larger costs sit lower: min(a, c) reaches every b ≤ a.
  static bool leq(double a, double b) { return a >= b; }
  static bool approx_eq(double a, double b, double tol) {
    return detail::close(a, b, tol);
  }
  static bool is_zero(double a) { return std::isinf(a); }
  static std::string display(double a) { return detail::display_real(a); }
};

// Instances that state their natural order directly.
template <class S>
concept HasOrder = requires(typename S::weight_type a) {
  { S::leq(a, a) } -> std::same_as<bool>;
};

/// Natural order: a ⊑ b when a ⊕ c = b for some c. Without an explicit
/// leq this falls back to a ⊕ b = b, which is only right for idempotent ⊕.
template <Semiring S>
bool natural_leq(typename S::weight_type a, typename S::weight_type b,
                 double tol = 1e-9) {
  if (S::approx_eq(a, b, tol)) return true;
  if constexpr (HasOrder<S>) return S::leq(a, b);
  else return S::approx_eq(S::add(a, b), b, tol);
}

template <class W>
struct LawViolation {
  std::string law;
  std::vector<W> witnesses;

  std::string describe(const std::function<std::string(W)>& show) const {
    std::string s = law + " fails at";
    for (const auto& w : witnesses) s += " " + show(w);
    return s;
  }
};

/// Checks the commutative-semiring laws over every triple of samples.
/// Returns the first violation, or nothing when all laws hold.
template <Semiring S>
std::optional<LawViolation<typename S::weight_type>> check_laws(
    const std::vector<typename S::weight_type>& samples, double tol = 1e-9) {
  using W = typename S::weight_type;
  if (samples.empty()) throw Error("check_laws needs at least one sample");
  auto eq = [&](W a, W b) { return S::approx_eq(a, b, tol); };
  const W zero = S::zero();
  const W one = S::one();
  for (W a : samples) {
    if (!eq(S::add(a, zero), a)) return LawViolation<W>{"additive identity", {a}};
    if (!eq(S::mul(a, one), a)) return LawViolation<W>{"multiplicative identity", {a}};
    if (!eq(S::mul(a, zero), zero) || !eq(S::mul(zero, a), zero))
      return LawViolation<W>{"annihilation", {a}};
    for (W b : samples) {
      if (!eq(S::add(a, b), S::add(b, a)))
        return LawViolation<W>{"additive commutativity", {a, b}};
      if (!eq(S::mul(a, b), S::mul(b, a)))
        return LawViolation<W>{"multiplicative commutativity", {a, b}};
      for (W c : samples) {
        if (!eq(S::add(S::add(a, b), c), S::add(a, S::add(b, c))))
          return LawViolation<W>{"additive associativity", {a, b, c}};
        if (!eq(S::mul(S::mul(a, b), c), S::mul(a, S::mul(b, c))))
          return LawViolation<W>{"multiplicative associativity", {a, b, c}};
        if (!eq(S::mul(a, S::add(b, c)), S::add(S::mul(a, b), S::mul(a, c))))
          return LawViolation<W>{"distributivity", {a, b, c}};
      }
    }
  }
  return std::nullopt;
}

}  // namespace srk
