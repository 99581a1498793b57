#pragma once

#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <optional>
#include <string>
#include <vector>

#include "srk/cnf.hpp"
#include "srk/error.hpp"

namespace srk {

enum class SolveStatus { Satisfiable, Unsatisfiable, Unknown };

struct SolveResult {
  SolveStatus status = SolveStatus::Unknown;
  std::vector<bool> model;  // indexed by variable; slot 0 unused
  std::string reason;       // why the answer is Unknown

  bool sat() const { return status == SolveStatus::Satisfiable; }
  bool unsat() const { return status == SolveStatus::Unsatisfiable; }
  bool value(int var) const { return model.at(var); }
};

inline std::string to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Satisfiable: return "SATISFIABLE";
    case SolveStatus::Unsatisfiable: return "UNSATISFIABLE";
    case SolveStatus::Unknown: return "UNKNOWN";
  }
  return "UNKNOWN";
}

struct SolverOptions {
  std::optional<std::uint64_t> conflict_budget;  // per solve() call
  std::uint64_t restart_base = 64;
  double var_decay = 0.95;
  bool initial_phase = false;
};

struct SolverStats {
  std::uint64_t conflicts = 0;
  std::uint64_t decisions = 0;
  std::uint64_t propagations = 0;
  std::uint64_t restarts = 0;
};

/// Conflict-driven clause learning: two watched literals, first-UIP
/// learning with backjumping, VSIDS branching, Luby restarts and phase
/// saving. Clauses may be added between solve() calls.
class CdclSolver {
 public:
  explicit CdclSolver(int num_vars = 0, SolverOptions opts = {}) : opts_(opts) {
    while (num_vars_ < num_vars) new_var();
  }
  explicit CdclSolver(const Cnf& cnf, SolverOptions opts = {}) : CdclSolver(cnf.num_vars, opts) {
    for (const auto& c : cnf.clauses) add_clause(c);
  }

  int num_vars() const { return num_vars_; }

  int new_var() {
    int v = num_vars_++;
    value_.push_back(kUndef);
    level_.push_back(0);
    reason_.push_back(-1);
    activity_.push_back(0.0);
    phase_.push_back(opts_.initial_phase);
    seen_.push_back(0);
    heap_index_.push_back(-1);
    watches_.emplace_back();
    watches_.emplace_back();
    heap_insert(v);
    return v + 1;
  }

  /// Adds a clause of DIMACS literals. Returns false once the clause set
  /// is known to be unsatisfiable.
  bool add_clause(const Clause& clause) {
    cancel_until(0);
    originals_.push_back(clause);
    if (unsat_) return false;
    std::vector<int> c;
    for (int lit : clause) {
      if (lit == 0 || std::abs(lit) > num_vars_)
        throw Error("clause literal " + std::to_string(lit) + " out of range");
      int l = to_internal(lit);
      if (lit_value(l) == kTrue) return true;
      if (lit_value(l) == kFalse) continue;
      bool dup = false, taut = false;
      for (int m : c) {
        dup = dup || m == l;
        taut = taut || m == (l ^ 1);
      }
      if (taut) return true;
      if (!dup) c.push_back(l);
    }
    if (c.empty()) {
      unsat_ = true;
      return false;
    }
    if (c.size() == 1) {
      enqueue(c[0], -1);
      if (propagate() >= 0) unsat_ = true;
      return !unsat_;
    }
    attach(std::move(c), false);
    return true;
  }

  SolveResult solve() {
    SolveResult res;
    if (unsat_) {
      res.status = SolveStatus::Unsatisfiable;
      return res;
    }
    std::uint64_t budget_start = stats_.conflicts;
    std::uint64_t restart_no = 0;
    std::uint64_t limit = luby(restart_no) * opts_.restart_base;
    std::uint64_t since_restart = 0;
    for (;;) {
      int confl = propagate();
      if (confl >= 0) {
        ++stats_.conflicts;
        ++since_restart;
        if (decision_level() == 0) {
          unsat_ = true;
          res.status = SolveStatus::Unsatisfiable;
          return res;
        }
        auto [learnt, back] = analyze(confl);
        cancel_until(back);
        learned_.push_back(to_external(learnt));
        if (learnt.size() == 1) {
          enqueue(learnt[0], -1);
        } else {
          int cr = attach(learnt, true);
          enqueue(learnt[0], cr);
        }
        decay_activity();
        continue;
      }
      if (opts_.conflict_budget &&
          stats_.conflicts - budget_start >= *opts_.conflict_budget) {
        cancel_until(0);
        res.status = SolveStatus::Unknown;
        res.reason = "conflict budget of " + std::to_string(*opts_.conflict_budget) +
                     " exhausted";
        return res;
      }
      if (since_restart >= limit) {
        ++stats_.restarts;
        ++restart_no;
        limit = luby(restart_no) * opts_.restart_base;
        since_restart = 0;
        cancel_until(0);
        continue;
      }
      int next = pick_branch();
      if (next < 0) {
        res.status = SolveStatus::Satisfiable;
        res.model.assign(num_vars_ + 1, false);
        for (int v = 0; v < num_vars_; ++v) res.model[v + 1] = value_[v] == kTrue;
        cancel_until(0);
        verify(res.model);
        return res;
      }
      ++stats_.decisions;
      trail_lim_.push_back(static_cast<int>(trail_.size()));
      enqueue(2 * next + (phase_[next] ? 0 : 1), -1);
    }
  }

  /// Every clause learned so far, as DIMACS literals.
  const std::vector<Clause>& learned_clauses() const { return learned_; }
  const SolverStats& stats() const { return stats_; }

 private:
  // Internal literal 2v is the positive literal of variable v (0-based),
  // 2v+1 the negative one.
  static constexpr std::int8_t kFalse = 0, kTrue = 1, kUndef = 2;

  struct ClauseData {
    std::vector<int> lits;
    bool learnt;
  };

  static int to_internal(int lit) { return lit > 0 ? 2 * (lit - 1) : 2 * (-lit - 1) + 1; }
  static int to_dimacs(int l) { return (l & 1) ? -(l / 2 + 1) : l / 2 + 1; }
  static Clause to_external(const std::vector<int>& c) {
    Clause out;
    for (int l : c) out.push_back(to_dimacs(l));
    return out;
  }

  std::int8_t lit_value(int l) const {
    std::int8_t v = value_[l >> 1];
    if (v == kUndef) return kUndef;
    return (l & 1) ? static_cast<std::int8_t>(v ^ 1) : v;
  }

  int decision_level() const { return static_cast<int>(trail_lim_.size()); }

  void enqueue(int l, int reason) {
    int v = l >> 1;
    value_[v] = (l & 1) ? kFalse : kTrue;
    level_[v] = decision_level();
    reason_[v] = reason;
    trail_.push_back(l);
  }

  int attach(std::vector<int> c, bool learnt) {
    int id = static_cast<int>(clauses_.size());
    watches_[c[0]].push_back(id);
    watches_[c[1]].push_back(id);
    clauses_.push_back(ClauseData{std::move(c), learnt});
    return id;
  }

  // Returns the index of a conflicting clause, or -1.
  int propagate() {
    int confl = -1;
    while (qhead_ < trail_.size() && confl < 0) {
      int p = trail_[qhead_++];
      int falselit = p ^ 1;
      ++stats_.propagations;
      auto& ws = watches_[falselit];
      std::size_t i = 0, j = 0;
      while (i < ws.size()) {
        int cr = ws[i++];
        auto& c = clauses_[cr].lits;
        if (c[0] == falselit) std::swap(c[0], c[1]);
        if (lit_value(c[0]) == kTrue) {
          ws[j++] = cr;
          continue;
        }
        bool moved = false;
        for (std::size_t k = 2; k < c.size(); ++k) {
          if (lit_value(c[k]) != kFalse) {
            std::swap(c[1], c[k]);
            watches_[c[1]].push_back(cr);
            moved = true;
            break;
          }
        }
        if (moved) continue;
        ws[j++] = cr;
        if (lit_value(c[0]) == kFalse) {
          confl = cr;
          while (i < ws.size()) ws[j++] = ws[i++];
        } else {
          enqueue(c[0], cr);
        }
      }
      ws.resize(j);
    }
    return confl;
  }

  // First-UIP conflict analysis. Returns the learnt clause, asserting
  // literal first and a literal of the backjump level second, together
  // with the backjump level.
  std::pair<std::vector<int>, int> analyze(int confl) {
    std::vector<int> learnt{-1};
    int counter = 0;
    int p = -1;
    std::size_t idx = trail_.size();
    std::vector<int> touched;
    do {
      const auto& c = clauses_[confl].lits;
      for (std::size_t k = (p < 0 ? 0 : 1); k < c.size(); ++k) {
        int q = c[k];
        int v = q >> 1;
        if (seen_[v] || level_[v] == 0) continue;
        seen_[v] = 1;
        touched.push_back(v);
        bump(v);
        if (level_[v] >= decision_level()) ++counter;
        else learnt.push_back(q);
      }
      while (!seen_[trail_[--idx] >> 1]) {}
      p = trail_[idx];
      confl = reason_[p >> 1];
      seen_[p >> 1] = 0;
      --counter;
      // The reason clause has p at position 0.
      if (counter > 0 && confl >= 0) {
        auto& rc = clauses_[confl].lits;
        if (rc[0] != p) std::swap(rc[0], rc[1]);
      }
    } while (counter > 0);
    learnt[0] = p ^ 1;
    for (int v : touched) seen_[v] = 0;

    int back = 0;
    if (learnt.size() > 1) {
      std::size_t best = 1;
      for (std::size_t k = 2; k < learnt.size(); ++k)
        if (level_[learnt[k] >> 1] > level_[learnt[best] >> 1]) best = k;
      std::swap(learnt[1], learnt[best]);
      back = level_[learnt[1] >> 1];
    }
    return {learnt, back};
  }

  void cancel_until(int level) {
    if (decision_level() <= level) return;
    for (std::size_t k = trail_.size(); k-- > static_cast<std::size_t>(trail_lim_[level]);) {
      int v = trail_[k] >> 1;
      phase_[v] = value_[v] == kTrue;
      value_[v] = kUndef;
      reason_[v] = -1;
      if (heap_index_[v] < 0) heap_insert(v);
    }
    trail_.resize(trail_lim_[level]);
    trail_lim_.resize(level);
    qhead_ = trail_.size();
  }

  int pick_branch() {
    while (!heap_.empty()) {
      int v = heap_pop();
      if (value_[v] == kUndef) return v;
    }
    return -1;
  }

  void bump(int v) {
    activity_[v] += var_inc_;
    if (activity_[v] > 1e100) {
      for (auto& a : activity_) a *= 1e-100;
      var_inc_ *= 1e-100;
    }
    if (heap_index_[v] >= 0) sift_up(heap_index_[v]);
  }
  void decay_activity() { var_inc_ /= opts_.var_decay; }

  // Binary max-heap on activity.
  bool heap_less(int a, int b) const { return activity_[a] > activity_[b]; }
  void heap_insert(int v) {
    heap_index_[v] = static_cast<int>(heap_.size());
    heap_.push_back(v);
    sift_up(heap_index_[v]);
  }
  int heap_pop() {
    int top = heap_[0];
    heap_index_[top] = -1;
    int last = heap_.back();
    heap_.pop_back();
    if (!heap_.empty()) {
      heap_[0] = last;
      heap_index_[last] = 0;
      sift_down(0);
    }
    return top;
  }
  void sift_up(int i) {
    int v = heap_[i];
    while (i > 0) {
      int parent = (i - 1) / 2;
      if (!heap_less(v, heap_[parent])) break;
      heap_[i] = heap_[parent];
      heap_index_[heap_[i]] = i;
      i = parent;
    }
    heap_[i] = v;
    heap_index_[v] = i;
  }
  void sift_down(int i) {
    int v = heap_[i];
    int n = static_cast<int>(heap_.size());
    for (;;) {
      int child = 2 * i + 1;
      if (child >= n) break;
      if (child + 1 < n && heap_less(heap_[child + 1], heap_[child])) ++child;
      if (!heap_less(heap_[child], v)) break;
      heap_[i] = heap_[child];
      heap_index_[heap_[i]] = i;
      i = child;
    }
    heap_[i] = v;
    heap_index_[v] = i;
  }

  // 1, 1, 2, 1, 1, 2, 4, 1, 1, 2, ...
  static std::uint64_t luby(std::uint64_t x) {
    std::uint64_t size = 1, seq = 0;
    while (size < x + 1) {
      ++seq;
      size = 2 * size + 1;
    }
    while (size - 1 != x) {
      size = (size - 1) >> 1;
      --seq;
      x = x % size;
    }
    return std::uint64_t{1} << seq;
  }

  void verify(const std::vector<bool>& model) const {
    Cnf check;
    check.num_vars = num_vars_;
    check.clauses = originals_;
    if (!check.satisfied_by(model))
      throw SolverError("internal solver produced a model that violates a clause");
  }

  SolverOptions opts_;
  int num_vars_ = 0;
  bool unsat_ = false;
  std::vector<std::int8_t> value_;
  std::vector<int> level_;
  std::vector<int> reason_;
  std::vector<double> activity_;
  std::vector<bool> phase_;
  std::vector<char> seen_;
  std::vector<int> heap_;
  std::vector<int> heap_index_;
  std::vector<std::vector<int>> watches_;
  std::vector<ClauseData> clauses_;
  std::vector<int> trail_;
  std::vector<int> trail_lim_;
  std::size_t qhead_ = 0;
  double var_inc_ = 1.0;
  std::vector<Clause> originals_;
  std::vector<Clause> learned_;
  SolverStats stats_;
};

/// Solves a CNF with the embedded solver.
inline SolveResult solve(const Cnf& cnf, const SolverOptions& opts = {}) {
  CdclSolver s(cnf, opts);
  return s.solve();
}

}  // namespace srk
