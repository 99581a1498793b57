#pragma once

#include <cstdio>
#include <cstdlib>
#include <sstream>
#include <string>
#include <vector>

#include "srk/error.hpp"
#include "srk/formula.hpp"
#include "srk/syntax.hpp"

namespace srk {

using Clause = std::vector<int>;

struct Cnf {
  int num_vars = 0;
  std::vector<Clause> clauses;

  /// True when every clause has a literal made true by `assignment`
  /// (indexed by variable, slot 0 unused).
  bool satisfied_by(const std::vector<bool>& assignment) const {
    for (const auto& c : clauses) {
      bool sat = false;
      for (int lit : c) {
        int v = std::abs(lit);
        if (v < static_cast<int>(assignment.size()) && assignment[v] == (lit > 0)) {
          sat = true;
          break;
        }
      }
      if (!sat) return false;
    }
    return true;
  }
};

namespace detail {

class Tseitin {
 public:
  Tseitin(const PropFormula& f, Cnf& out) : f_(f), out_(out), lit_(f.num_nodes(), 0) {
    out_.num_vars = f.num_vars();
  }

  // Literal standing for node n, defining it on first use.
  int literal(int n) {
    if (lit_[n] != 0) return lit_[n];
    const auto& nd = f_.node(n);
    using K = PropFormula::Kind;
    switch (nd.kind) {
      case K::Var:
        return lit_[n] = nd.var;
      case K::Not:
        return lit_[n] = -literal(nd.kids[0]);
      case K::True:
      case K::False: {
        // Only reachable when a constant sits under a connective, which
        // folding prevents; define it anyway.
        int d = ++out_.num_vars;
        out_.clauses.push_back({nd.kind == K::True ? d : -d});
        return lit_[n] = d;
      }
      default:
        break;
    }
    std::vector<int> ks;
    for (int k : nd.kids) ks.push_back(literal(k));
    int d = ++out_.num_vars;
    if (nd.kind == K::And) {
      Clause big{d};
      for (int k : ks) {
        out_.clauses.push_back({-d, k});
        big.push_back(-k);
      }
      out_.clauses.push_back(std::move(big));
    } else if (nd.kind == K::Or) {
      Clause big{-d};
      for (int k : ks) {
        out_.clauses.push_back({d, -k});
        big.push_back(k);
      }
      out_.clauses.push_back(std::move(big));
    } else {
      int a = ks[0], b = ks[1];
      out_.clauses.push_back({-d, -a, b});
      out_.clauses.push_back({-d, a, -b});
      out_.clauses.push_back({d, a, b});
      out_.clauses.push_back({d, -a, -b});
    }
    return lit_[n] = d;
  }

  // Asserts node n without naming it.
  void assert_node(int n) {
    const auto& nd = f_.node(n);
    using K = PropFormula::Kind;
    switch (nd.kind) {
      case K::True:
        return;
      case K::False:
        out_.clauses.push_back({});
        return;
      case K::And:
        for (int k : nd.kids) assert_node(k);
        return;
      case K::Or: {
        Clause c;
        for (int k : nd.kids) c.push_back(literal(k));
        out_.clauses.push_back(std::move(c));
        return;
      }
      case K::Iff: {
        int a = literal(nd.kids[0]), b = literal(nd.kids[1]);
        out_.clauses.push_back({-a, b});
        out_.clauses.push_back({a, -b});
        return;
      }
      default:
        out_.clauses.push_back({literal(n)});
        return;
    }
  }

 private:
  const PropFormula& f_;
  Cnf& out_;
  std::vector<int> lit_;
};

}  // namespace detail

/// Equisatisfiable CNF. Formula variables keep their numbers; every
/// connective below the root gets a definition variable after them.
inline Cnf tseitin(const PropFormula& f) {
  Cnf out;
  detail::Tseitin t(f, out);
  t.assert_node(f.root());
  return out;
}

inline std::string emit_dimacs(const Cnf& cnf) {
  std::string s = "p cnf " + std::to_string(cnf.num_vars) + " " +
                  std::to_string(cnf.clauses.size()) + "\n";
  for (const auto& c : cnf.clauses) {
    for (int lit : c) s += std::to_string(lit) + " ";
    s += "0\n";
  }
  return s;
}

inline Cnf parse_dimacs(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  Cnf cnf;
  bool header = false;
  std::size_t declared = 0;
  Clause cur;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::istringstream ls(line);
    std::string tok;
    if (!(ls >> tok)) continue;
    if (tok == "c" || tok[0] == 'c') continue;
    if (tok == "p") {
      std::string fmt;
      if (!(ls >> fmt >> cnf.num_vars >> declared) || fmt != "cnf")
        throw Error("malformed DIMACS header", SourceLoc{lineno, 1});
      header = true;
      continue;
    }
    if (!header) throw Error("DIMACS clause before the header", SourceLoc{lineno, 1});
    do {
      char* end = nullptr;
      long v = std::strtol(tok.c_str(), &end, 10);
      if (*end != '\0') throw Error("bad DIMACS literal '" + tok + "'", SourceLoc{lineno, 1});
      if (v == 0) {
        cnf.clauses.push_back(std::move(cur));
        cur.clear();
      } else {
        if (std::labs(v) > cnf.num_vars)
          throw Error("DIMACS literal " + tok + " exceeds the declared variables",
                      SourceLoc{lineno, 1});
        cur.push_back(static_cast<int>(v));
      }
    } while (ls >> tok);
  }
  if (!header) throw Error("missing DIMACS header");
  if (!cur.empty()) cnf.clauses.push_back(std::move(cur));
  if (cnf.clauses.size() != declared)
    throw Error("DIMACS header declares " + std::to_string(declared) +
                " clauses, found " + std::to_string(cnf.clauses.size()));
  return cnf;
}

/// One line per query binder:
/// `var <name> : <type> bits=<k> dimacs=<i1> ... <ik>`.
inline std::string emit_varmap(const VarMap& vm) {
  std::string s;
  for (const auto& e : vm.entries) {
    s += "var " + e.name + " : " + e.type.str() + " bits=" + std::to_string(e.width()) +
         " dimacs=";
    for (std::size_t i = 0; i < e.vars.size(); ++i)
      s += (i ? " " : "") + std::to_string(e.vars[i]);
    s += "\n";
  }
  return s;
}

inline VarMap parse_varmap(const std::string& text) {
  VarMap vm;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    auto fail = [&](const std::string& why) {
      return Error("varmap: " + why, SourceLoc{lineno, 1});
    };
    if (line.rfind("var ", 0) != 0) throw fail("expected 'var'");
    auto colon = line.find(" : ");
    auto bits = line.find(" bits=");
    auto dim = line.find(" dimacs=");
    if (colon == std::string::npos || bits == std::string::npos || dim == std::string::npos)
      throw fail("malformed line");
    VarMapEntry e;
    e.name = line.substr(4, colon - 4);
    e.type = parse_type(line.substr(colon + 3, bits - colon - 3));
    e.bit_type = bitify_type(e.type);
    std::size_t k = std::stoul(line.substr(bits + 6, dim - bits - 6));
    std::istringstream vs(line.substr(dim + 8));
    int v;
    while (vs >> v) e.vars.push_back(v);
    if (e.vars.size() != k || k != bit_width(e.bit_type)) throw fail("bit count mismatch");
    vm.entries.push_back(std::move(e));
  }
  return vm;
}

struct CompileStats {
  int num_vars = 0;
  std::size_t num_clauses = 0;
  double mean_clause = 0.0;

  std::string str() const {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3f", mean_clause);
    return "vars=" + std::to_string(num_vars) + " clauses=" + std::to_string(num_clauses) +
           " mean_clause=" + buf;
  }
};

inline CompileStats compile_stats(const Cnf& cnf) {
  CompileStats s;
  s.num_vars = cnf.num_vars;
  s.num_clauses = cnf.clauses.size();
  std::size_t lits = 0;
  for (const auto& c : cnf.clauses) lits += c.size();
  if (!cnf.clauses.empty()) s.mean_clause = double(lits) / double(cnf.clauses.size());
  return s;
}

}  // namespace srk
