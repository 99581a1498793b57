#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <type_traits>
#include <vector>

#include "srk/error.hpp"
#include "srk/semiring.hpp"
#include "srk/syntax.hpp"
#include "srk/typecheck.hpp"
#include "srk/universe.hpp"

namespace srk {

inline constexpr std::uint64_t kDefaultSizeCap = 100'000'000;

struct Dim {
  std::string name;
  Type type;

  std::uint64_t size() const { return type.size(); }
};

inline std::vector<Dim> dims_of(const std::vector<Binding>& bindings) {
  std::vector<Dim> out;
  for (const auto& b : bindings) out.push_back(Dim{b.name, b.type});
  return out;
}

// Number of entries of a dense array over `dims`; throws when it exceeds
// `cap`. `what` names the array in the message.
inline std::uint64_t checked_entries(const std::vector<Dim>& dims,
                                     std::uint64_t cap, const std::string& what) {
  std::uint64_t n = 1;
  for (const auto& d : dims) n = sat_mul(n, d.size());
  if (n > cap) {
    std::string count = n == kSizeSaturated ? "more than 2^64" : std::to_string(n);
    throw SizeLimitError(what + " needs " + count +
                         " entries, over the size cap of " + std::to_string(cap));
  }
  return n;
}

/// Dense row-major array of weights, one axis per typed dimension.
template <Semiring S>
class WeightArray {
 public:
  using W = typename S::weight_type;
  // std::vector<bool> is not a container of bools.
  using Storage = std::conditional_t<std::is_same_v<W, bool>, std::uint8_t, W>;

  WeightArray() : WeightArray(std::vector<Dim>{}) {}

  explicit WeightArray(std::vector<Dim> dims, std::uint64_t cap = kDefaultSizeCap,
                       const std::string& what = "array")
      : dims_(std::move(dims)) {
    auto n = checked_entries(dims_, cap, what);
    strides_.assign(dims_.size(), 1);
    for (std::size_t i = dims_.size(); i-- > 1;)
      strides_[i - 1] = strides_[i] * dims_[i].size();
    data_.assign(n, static_cast<Storage>(S::zero()));
  }

  const std::vector<Dim>& dims() const { return dims_; }
  const std::vector<std::uint64_t>& strides() const { return strides_; }
  std::size_t rank() const { return dims_.size(); }
  std::uint64_t size() const { return data_.size(); }

  W operator[](std::uint64_t flat) const { return static_cast<W>(data_[flat]); }
  void set(std::uint64_t flat, W w) { data_[flat] = static_cast<Storage>(w); }

  std::uint64_t flat_index(std::span<const std::uint64_t> idx) const {
    std::uint64_t f = 0;
    for (std::size_t i = 0; i < idx.size(); ++i) f += idx[i] * strides_[i];
    return f;
  }
  std::vector<std::uint64_t> unflatten(std::uint64_t flat) const {
    std::vector<std::uint64_t> idx(dims_.size());
    for (std::size_t i = 0; i < dims_.size(); ++i) {
      idx[i] = flat / strides_[i];
      flat %= strides_[i];
    }
    return idx;
  }

  W at(std::span<const std::uint64_t> idx) const { return (*this)[flat_index(idx)]; }
  W at(std::initializer_list<std::uint64_t> idx) const {
    return at(std::span<const std::uint64_t>(idx.begin(), idx.size()));
  }
  W at_values(const std::vector<Value>& vals) const {
    std::vector<std::uint64_t> idx;
    for (std::size_t i = 0; i < vals.size(); ++i)
      idx.push_back(srk::rank(dims_[i].type, vals[i]));
    return at(idx);
  }
  std::vector<Value> values_at(std::uint64_t flat) const {
    auto idx = unflatten(flat);
    std::vector<Value> out;
    for (std::size_t i = 0; i < idx.size(); ++i)
      out.push_back(unrank(dims_[i].type, idx[i]));
    return out;
  }

  // Scalar of a rank-0 array.
  W scalar() const { return (*this)[0]; }

 private:
  std::vector<Dim> dims_;
  std::vector<std::uint64_t> strides_;
  std::vector<Storage> data_;
};

/// η: one array per defined relation.
template <Semiring S>
using RelEnv = std::map<std::string, WeightArray<S>>;

/// δ: variable name to value.
using VarEnv = std::map<std::string, Value>;

struct EvalOptions {
  std::size_t max_iters = 10000;
  double tol = 1e-12;
  // Promote entries still growing after this many iterations to the top
  // element. Only semirings with a top element widen.
  std::optional<std::size_t> widen_after;
  std::uint64_t size_cap = kDefaultSizeCap;
};

inline constexpr std::size_t kDefaultWidenAfter = 256;

// ---------------------------------------------------------------------------
// Reference evaluation over values. Follows the semantic equations
// literally: fresh enumerates ⟦τ⟧, primitives compare values.
// ---------------------------------------------------------------------------

namespace detail {

template <Semiring S>
class ValueEvaluator {
 public:
  using W = typename S::weight_type;

  ValueEvaluator(const RelEnv<S>& eta, VarEnv delta)
      : eta_(eta), delta_(std::move(delta)) {}

  W eval(const Goal& g) {
    switch (g.kind) {
      case GoalKind::Conj: {
        W acc = S::one();
        for (const auto& s : g.subgoals) acc = S::mul(acc, eval(s));
        return acc;
      }
      case GoalKind::Disj: {
        W acc = S::zero();
        for (const auto& s : g.subgoals) acc = S::add(acc, eval(s));
        return acc;
      }
      case GoalKind::Factor:
        return S::from_literal(g.weight);
      case GoalKind::Fresh:
        return fresh(g, 0);
      case GoalKind::Call: {
        auto it = eta_.find(g.rel);
        if (it == eta_.end()) throw Error("no array for relation '" + g.rel + "'");
        std::vector<Value> vals;
        for (const auto& a : g.args) vals.push_back(var(a));
        return it->second.at_values(vals);
      }
      case GoalKind::Eq:
        return indicator(var(g.args[0]) == var(g.args[1]));
      case GoalKind::Neq:
        return indicator(var(g.args[0]) != var(g.args[1]));
      case GoalKind::Soleo:
        return indicator(var(g.args[0]).is_unit());
      case GoalKind::Lefto:
        return indicator(var(g.args[0]) == Value::left(var(g.args[1])));
      case GoalKind::Righto:
        return indicator(var(g.args[0]) == Value::right(var(g.args[1])));
      case GoalKind::Pairo:
        return indicator(var(g.args[0]) ==
                         Value::pair(var(g.args[1]), var(g.args[2])));
    }
    return S::zero();
  }

 private:
  static W indicator(bool b) { return b ? S::one() : S::zero(); }

  const Value& var(const Arg& a) const {
    if (a.is_literal()) throw Error("literal argument in core goal");
    auto it = delta_.find(a.var);
    if (it == delta_.end()) throw Error("unbound variable '" + a.var + "'");
    return it->second;
  }

  W fresh(const Goal& g, std::size_t i) {
    if (i == g.binders.size()) return eval(g.body());
    const Binding& b = g.binders[i];
    std::optional<Value> saved;
    if (auto it = delta_.find(b.name); it != delta_.end()) saved = it->second;
    W acc = S::zero();
    for (const auto& v : enumerate_values(b.type)) {
      delta_[b.name] = v;
      acc = S::add(acc, fresh(g, i + 1));
    }
    if (saved) delta_[b.name] = *saved;
    else delta_.erase(b.name);
    return acc;
  }

  const RelEnv<S>& eta_;
  VarEnv delta_;
};

}  // namespace detail

/// Weight of g under η and δ.
template <Semiring S>
typename S::weight_type eval_goal(const RelEnv<S>& eta, const VarEnv& delta,
                                  const Goal& g) {
  return detail::ValueEvaluator<S>(eta, delta).eval(g);
}

// ---------------------------------------------------------------------------
// Index-based evaluation. Variables live in slots holding value ranks;
// relation calls index η directly.
// ---------------------------------------------------------------------------

namespace detail {

struct RelShape {
  std::string name;
  std::vector<Type> arg_types;
};

template <Semiring S>
class CompiledGoal {
 public:
  using W = typename S::weight_type;

  CompiledGoal(const Goal& g, const std::vector<Binding>& free_vars,
               const std::vector<RelShape>& rels)
      : rels_(rels) {
    for (const auto& b : free_vars) bind(b);
    root_ = compile(g);
  }

  std::size_t num_slots() const { return num_slots_; }

  W eval(std::vector<std::uint64_t>& env,
         const std::vector<const WeightArray<S>*>& eta) const {
    return eval(root_, env, eta);
  }

 private:
  enum class Op { Conj, Disj, Const, Fresh, Call, Eq, Neq, Lefto, Righto, Pairo };

  struct Node {
    Op op;
    std::vector<int> kids;
    W weight{};
    std::vector<std::uint32_t> slots;
    std::uint64_t size = 0;  // fresh domain, lefto left size, pairo right size
    int rel = -1;
  };

  void bind(const Binding& b) {
    scope_.emplace_back(b.name, static_cast<std::uint32_t>(num_slots_++));
    types_.push_back(b.type);
  }

  std::pair<std::uint32_t, Type> lookup(const Arg& a) const {
    if (a.is_literal()) throw Error("literal argument in core goal");
    for (auto it = scope_.rbegin(); it != scope_.rend(); ++it)
      if (it->first == a.var) return {it->second, types_[it->second]};
    throw Error("unbound variable '" + a.var + "'");
  }

  int add(Node n) {
    nodes_.push_back(std::move(n));
    return static_cast<int>(nodes_.size() - 1);
  }

  int compile(const Goal& g) {
    Node n;
    switch (g.kind) {
      case GoalKind::Conj:
      case GoalKind::Disj:
        n.op = g.kind == GoalKind::Conj ? Op::Conj : Op::Disj;
        for (const auto& s : g.subgoals) n.kids.push_back(compile(s));
        return add(std::move(n));
      case GoalKind::Factor:
        n.op = Op::Const;
        n.weight = S::from_literal(g.weight);
        return add(std::move(n));
      case GoalKind::Fresh: {
        // Multi-binder fresh becomes nested single-binder nodes.
        std::size_t mark = scope_.size();
        std::vector<Node> outer;
        for (const auto& b : g.binders) {
          Node f;
          f.op = Op::Fresh;
          f.size = b.type.size();
          f.slots.push_back(static_cast<std::uint32_t>(num_slots_));
          bind(b);
          outer.push_back(std::move(f));
        }
        int body = compile(g.body());
        scope_.resize(mark);
        for (auto it = outer.rbegin(); it != outer.rend(); ++it) {
          it->kids.push_back(body);
          body = add(std::move(*it));
        }
        return body;
      }
      case GoalKind::Call: {
        n.op = Op::Call;
        for (std::size_t r = 0; r < rels_.size(); ++r)
          if (rels_[r].name == g.rel) n.rel = static_cast<int>(r);
        if (n.rel < 0) throw Error("no array for relation '" + g.rel + "'");
        for (const auto& a : g.args) n.slots.push_back(lookup(a).first);
        return add(std::move(n));
      }
      case GoalKind::Soleo:
        lookup(g.args[0]);
        n.op = Op::Const;
        n.weight = S::one();
        return add(std::move(n));
      case GoalKind::Eq:
      case GoalKind::Neq:
        n.op = g.kind == GoalKind::Eq ? Op::Eq : Op::Neq;
        for (const auto& a : g.args) n.slots.push_back(lookup(a).first);
        return add(std::move(n));
      case GoalKind::Lefto:
      case GoalKind::Righto: {
        n.op = g.kind == GoalKind::Lefto ? Op::Lefto : Op::Righto;
        auto [x, tx] = lookup(g.args[0]);
        n.slots = {x, lookup(g.args[1]).first};
        if (!tx.is_sum()) throw Error("lefto/righto on a non-sum variable");
        n.size = tx.left().size();
        return add(std::move(n));
      }
      case GoalKind::Pairo: {
        n.op = Op::Pairo;
        auto [x, tx] = lookup(g.args[0]);
        n.slots = {x, lookup(g.args[1]).first, lookup(g.args[2]).first};
        if (!tx.is_prod()) throw Error("pairo on a non-product variable");
        n.size = tx.right().size();
        return add(std::move(n));
      }
    }
    throw Error("unreachable");
  }

  static W indicator(bool b) { return b ? S::one() : S::zero(); }

  W eval(int id, std::vector<std::uint64_t>& env,
         const std::vector<const WeightArray<S>*>& eta) const {
    const Node& n = nodes_[id];
    switch (n.op) {
      case Op::Conj: {
        // 0 annihilates, so a zero factor settles the product.
        W acc = S::one();
        for (int k : n.kids) {
          acc = S::mul(acc, eval(k, env, eta));
          if (S::is_zero(acc)) return acc;
        }
        return acc;
      }
      case Op::Disj: {
        W acc = S::zero();
        for (int k : n.kids) acc = S::add(acc, eval(k, env, eta));
        return acc;
      }
      case Op::Const:
        return n.weight;
      case Op::Fresh: {
        W acc = S::zero();
        auto slot = n.slots[0];
        for (std::uint64_t v = 0; v < n.size; ++v) {
          env[slot] = v;
          acc = S::add(acc, eval(n.kids[0], env, eta));
          if constexpr (HasAbsorbingSum<S>)
            if (S::absorbs_add(acc)) break;
        }
        return acc;
      }
      case Op::Call: {
        const auto& arr = *eta[n.rel];
        const auto& strides = arr.strides();
        std::uint64_t flat = 0;
        for (std::size_t i = 0; i < n.slots.size(); ++i)
          flat += env[n.slots[i]] * strides[i];
        return arr[flat];
      }
      case Op::Eq:
        return indicator(env[n.slots[0]] == env[n.slots[1]]);
      case Op::Neq:
        return indicator(env[n.slots[0]] != env[n.slots[1]]);
      case Op::Lefto: {
        auto x = env[n.slots[0]];
        return indicator(x < n.size && x == env[n.slots[1]]);
      }
      case Op::Righto: {
        auto x = env[n.slots[0]];
        return indicator(x >= n.size && x - n.size == env[n.slots[1]]);
      }
      case Op::Pairo:
        return indicator(env[n.slots[0]] ==
                         env[n.slots[1]] * n.size + env[n.slots[2]]);
    }
    return S::zero();
  }

  const std::vector<RelShape>& rels_;
  std::vector<Node> nodes_;
  int root_ = -1;
  std::vector<std::pair<std::string, std::uint32_t>> scope_;
  std::vector<Type> types_;
  std::size_t num_slots_ = 0;
};

// Fills `out` with the goal's weight at every index tuple of its dims.
template <Semiring S>
void fill_array(WeightArray<S>& out, const CompiledGoal<S>& goal,
                const std::vector<const WeightArray<S>*>& eta) {
  std::vector<std::uint64_t> env(std::max<std::size_t>(goal.num_slots(), 1), 0);
  const auto& dims = out.dims();
  std::vector<std::uint64_t> idx(dims.size(), 0);
  for (std::uint64_t flat = 0; flat < out.size(); ++flat) {
    std::copy(idx.begin(), idx.end(), env.begin());
    out.set(flat, goal.eval(env, eta));
    for (std::size_t i = dims.size(); i-- > 0;) {
      if (++idx[i] < dims[i].size()) break;
      idx[i] = 0;
    }
  }
}

template <Semiring S>
std::vector<RelShape> shapes_of(const RelEnv<S>& eta) {
  std::vector<RelShape> out;
  for (const auto& [name, arr] : eta) {
    RelShape s{name, {}};
    for (const auto& d : arr.dims()) s.arg_types.push_back(d.type);
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace detail

/// Dense array of g over the variables in `bindings` (in order).
template <Semiring S>
WeightArray<S> eval_goal_array(const RelEnv<S>& eta,
                               const std::vector<Binding>& bindings,
                               const Goal& g,
                               std::uint64_t size_cap = kDefaultSizeCap) {
  auto shapes = detail::shapes_of(eta);
  detail::CompiledGoal<S> compiled(g, bindings, shapes);
  std::vector<const WeightArray<S>*> ptrs;
  for (const auto& [name, arr] : eta) ptrs.push_back(&arr);
  WeightArray<S> out(dims_of(bindings), size_cap, "the goal's array");
  detail::fill_array(out, compiled, ptrs);
  return out;
}

template <Semiring S>
struct FixpointResult {
  RelEnv<S> env;
  std::size_t iterations = 0;
};

/// Least fixed point of the relation definitions by Kleene iteration from
/// the all-zero environment. Converged when every entry is approx_eq to
/// its previous value. `observe` (optional) sees every iterate η_k,
/// starting with η_0.
template <Semiring S>
FixpointResult<S> fixpoint(
    const Program& p, const EvalOptions& opts = {},
    const std::function<void(std::size_t, const RelEnv<S>&)>& observe = {}) {
  using W = typename S::weight_type;
  require_well_typed(p);

  std::vector<detail::RelShape> shapes;
  for (const auto& r : p.rels) {
    detail::RelShape s{r.name, {}};
    for (const auto& b : r.params) s.arg_types.push_back(b.type);
    shapes.push_back(std::move(s));
  }
  std::vector<WeightArray<S>> cur;
  for (const auto& r : p.rels)
    cur.emplace_back(dims_of(r.params), opts.size_cap,
                     "relation '" + r.name + "'");
  std::vector<detail::CompiledGoal<S>> bodies;
  for (const auto& r : p.rels) bodies.emplace_back(r.body, r.params, shapes);

  auto to_env = [&](const std::vector<WeightArray<S>>& arrays) {
    RelEnv<S> env;
    for (std::size_t i = 0; i < arrays.size(); ++i)
      env.emplace(p.rels[i].name, arrays[i]);
    return env;
  };

  if (observe) observe(0, to_env(cur));
  if (p.rels.empty()) return {RelEnv<S>{}, 0};

  for (std::size_t iter = 1; iter <= opts.max_iters; ++iter) {
    std::vector<const WeightArray<S>*> ptrs;
    for (const auto& a : cur) ptrs.push_back(&a);
    std::vector<WeightArray<S>> next;
    for (std::size_t r = 0; r < cur.size(); ++r) {
      next.emplace_back(cur[r].dims(), opts.size_cap);
      detail::fill_array(next[r], bodies[r], ptrs);
    }

    bool stable = true;
    const bool widen = opts.widen_after && iter >= *opts.widen_after;
    for (std::size_t r = 0; r < cur.size(); ++r) {
      for (std::uint64_t i = 0; i < cur[r].size(); ++i) {
        W before = cur[r][i];
        W after = next[r][i];
        if (S::approx_eq(before, after, opts.tol)) continue;
        if constexpr (HasTop<S>) {
          if (widen && natural_leq<S>(before, after, 0.0)) {
            next[r].set(i, S::top());
            after = S::top();
          }
        }
        (void)after;
        stable = false;
      }
    }
    cur = std::move(next);
    if (observe) observe(iter, to_env(cur));
    if (stable) return {to_env(cur), iter};

    if (iter == opts.max_iters) {
      // Report the entries that moved in the final step.
      std::vector<WeightArray<S>> again;
      std::vector<const WeightArray<S>*> ptrs2;
      for (const auto& a : cur) ptrs2.push_back(&a);
      std::string unstable;
      std::size_t shown = 0, total = 0;
      for (std::size_t r = 0; r < cur.size(); ++r) {
        WeightArray<S> probe(cur[r].dims(), opts.size_cap);
        detail::fill_array(probe, bodies[r], ptrs2);
        for (std::uint64_t i = 0; i < probe.size(); ++i) {
          if (S::approx_eq(cur[r][i], probe[i], opts.tol)) continue;
          ++total;
          if (shown++ < 8) {
            unstable += " " + p.rels[r].name + "(";
            auto vals = cur[r].values_at(i);
            for (std::size_t k = 0; k < vals.size(); ++k)
              unstable += (k ? ", " : "") +
                          format_value(cur[r].dims()[k].type, vals[k]);
            unstable += ")";
          }
        }
      }
      throw ConvergenceError("fixpoint did not converge after " +
                             std::to_string(opts.max_iters) + " iterations; " +
                             std::to_string(total) + " unstable entries:" +
                             unstable);
    }
  }
  throw ConvergenceError("fixpoint did not converge (max_iters is 0)");
}

/// The array denoted by the program: the query body under the least
/// fixed point, indexed by the run binders.
template <Semiring S>
WeightArray<S> run_query(const Program& p, const EvalOptions& opts = {}) {
  require_well_typed(p);
  checked_entries(dims_of(p.query.params), opts.size_cap, "the query array");
  auto fp = fixpoint<S>(p, opts);
  auto shapes = detail::shapes_of(fp.env);
  detail::CompiledGoal<S> compiled(p.query.body, p.query.params, shapes);
  std::vector<const WeightArray<S>*> ptrs;
  for (const auto& [name, arr] : fp.env) ptrs.push_back(&arr);
  WeightArray<S> out(dims_of(p.query.params), opts.size_cap, "the query array");
  detail::fill_array(out, compiled, ptrs);
  return out;
}

enum class OutputMode { Full, Nonzero };

/// Text rendering of an array. Rank 0 prints one weight; `nonzero` prints
/// `(v1, …, vn) ↦ w` per nonzero entry; `full` prints every entry, as a
/// grid for rank-2 arrays.
template <Semiring S>
std::string format_array(const WeightArray<S>& arr, OutputMode mode) {
  std::ostringstream os;
  const auto& dims = arr.dims();
  if (dims.empty()) {
    os << S::display(arr.scalar()) << '\n';
    return os.str();
  }
  if (mode == OutputMode::Full && dims.size() == 2) {
    std::vector<std::vector<std::string>> cells(dims[0].size() + 1);
    cells[0].push_back("");
    for (std::uint64_t j = 0; j < dims[1].size(); ++j)
      cells[0].push_back(format_value(dims[1].type, unrank(dims[1].type, j)));
    for (std::uint64_t i = 0; i < dims[0].size(); ++i) {
      cells[i + 1].push_back(format_value(dims[0].type, unrank(dims[0].type, i)));
      for (std::uint64_t j = 0; j < dims[1].size(); ++j)
        cells[i + 1].push_back(S::display(arr.at({i, j})));
    }
    std::vector<std::size_t> width(cells[0].size(), 0);
    for (const auto& row : cells)
      for (std::size_t c = 0; c < row.size(); ++c)
        width[c] = std::max(width[c], row[c].size());
    for (const auto& row : cells) {
      std::string line;
      for (std::size_t c = 0; c < row.size(); ++c) {
        if (c) line += c == 1 ? " | " : "  ";
        line += row[c] + std::string(width[c] - row[c].size(), ' ');
      }
      while (!line.empty() && line.back() == ' ') line.pop_back();
      os << line << '\n';
    }
    return os.str();
  }
  for (std::uint64_t f = 0; f < arr.size(); ++f) {
    if (mode == OutputMode::Nonzero && S::is_zero(arr[f])) continue;
    auto vals = arr.values_at(f);
    os << '(';
    for (std::size_t k = 0; k < vals.size(); ++k)
      os << (k ? ", " : "") << format_value(dims[k].type, vals[k]);
    os << ") ↦ " << S::display(arr[f]) << '\n';
  }
  return os.str();
}

}  // namespace srk
