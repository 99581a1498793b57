#pragma once

#include <algorithm>
#include <array>
#include <cstdio>
#include <filesystem>
#include <random>
#include <string>
#include <sys/wait.h>
#include <vector>

#include "srk/srk.hpp"

namespace srk::test {

inline std::string corpus(const std::string& rel) {
  return std::string(SRK_CORPUS_DIR) + "/" + rel;
}

inline Program load(const std::string& rel) {
  return desugar(parse_program(read_file(corpus(rel))));
}

inline Program source(std::string_view text) { return desugar(parse_program(text)); }

inline std::vector<std::string> corpus_programs() {
  std::vector<std::string> out;
  for (const auto& e : std::filesystem::directory_iterator(corpus("programs")))
    if (e.path().extension() == ".srk") out.push_back("programs/" + e.path().filename().string());
  std::sort(out.begin(), out.end());
  return out;
}

struct Run {
  int code = -1;
  std::string out;
};

// Runs a shell command, capturing stdout (stderr too when merge is set).
inline Run shell(const std::string& cmd, bool merge = false) {
  std::string full = cmd + (merge ? " 2>&1" : " 2>/dev/null");
  FILE* pipe = ::popen(full.c_str(), "r");
  Run r;
  if (!pipe) return r;
  std::array<char, 4096> buf;
  std::size_t n;
  while ((n = std::fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), n);
  int st = ::pclose(pipe);
  r.code = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
  return r;
}

inline Run srk_cli(const std::string& args, bool merge = false) {
  return shell(shell_quote(SRK_BIN) + " " + args, merge);
}

// Boolean support of any array.
template <Semiring S>
std::vector<bool> support(const WeightArray<S>& a) {
  std::vector<bool> out;
  for (std::uint64_t i = 0; i < a.size(); ++i) out.push_back(!S::is_zero(a[i]));
  return out;
}

inline std::vector<bool> bool_cells(const WeightArray<BooleanSemiring>& a) {
  std::vector<bool> out;
  for (std::uint64_t i = 0; i < a.size(); ++i) out.push_back(a[i]);
  return out;
}

// Uniform random 3-CNF; variables are 1..n.
template <class Rng>
Cnf random_3cnf(Rng& rng, int n, int m) {
  Cnf c;
  c.num_vars = n;
  std::uniform_int_distribution<int> var(1, n), sign(0, 1);
  for (int i = 0; i < m; ++i) {
    Clause cl;
    for (int k = 0; k < 3; ++k) cl.push_back(sign(rng) ? var(rng) : -var(rng));
    c.clauses.push_back(cl);
  }
  return c;
}

inline bool brute_force_sat(const Cnf& c) {
  std::vector<bool> a(c.num_vars + 1);
  for (std::uint64_t m = 0; m < (1ull << c.num_vars); ++m) {
    for (int v = 1; v <= c.num_vars; ++v) a[v] = (m >> (v - 1)) & 1;
    if (c.satisfied_by(a)) return true;
  }
  return false;
}

}  // namespace srk::test

namespace srk::test {

// Renames every identifier by order of first appearance, so programs that
// differ only in the choice of names compare equal.
class Canonicalizer {
 public:
  Program run(Program p) {
    for (auto& r : p.rels) {
      r.name = name(r.name);
      for (auto& b : r.params) b.name = name(b.name);
      goal(r.body);
    }
    for (auto& b : p.query.params) b.name = name(b.name);
    goal(p.query.body);
    p.aliases.clear();
    return p;
  }

 private:
  std::string name(const std::string& n) {
    auto [it, fresh] = names_.try_emplace(n, "v" + std::to_string(names_.size()));
    return it->second;
  }
  void goal(Goal& g) {
    for (auto& b : g.binders) b.name = name(b.name);
    if (!g.rel.empty()) g.rel = name(g.rel);
    for (auto& a : g.args)
      if (!a.is_literal()) a.var = name(a.var);
    for (auto& s : g.subgoals) goal(s);
  }
  std::map<std::string, std::string> names_;
};

inline Program canonical(const Program& p) { return Canonicalizer().run(p); }

}  // namespace srk::test

namespace srk::test {

// Cap used where tests evaluate compiler output naively; programs over it
// are skipped by name.
inline constexpr std::uint64_t kTestCap = 1u << 20;

template <Semiring S>
std::optional<WeightArray<S>> try_run(const Program& p, EvalOptions opts = {}) {
  opts.size_cap = kTestCap;
  try {
    return run_query<S>(p, opts);
  } catch (const SizeLimitError&) {
    return std::nullopt;
  }
}

// The source-typed array read back from an array over bitstring types,
// and whether every invalid bitstring has weight zero.
template <Semiring S>
bool reindex_from_bits(const WeightArray<S>& bits, const std::vector<Binding>& params,
                       WeightArray<S>& out) {
  out = WeightArray<S>(dims_of(params));
  for (std::uint64_t f = 0; f < out.size(); ++f) {
    auto vals = out.values_at(f);
    for (std::size_t k = 0; k < vals.size(); ++k) vals[k] = embed_value(params[k].type, vals[k]);
    out.set(f, bits.at_values(vals));
  }
  for (std::uint64_t f = 0; f < bits.size(); ++f) {
    auto vals = bits.values_at(f);
    bool valid = true;
    for (std::size_t k = 0; k < vals.size(); ++k)
      valid = valid && decode_value(params[k].type, vals[k]).has_value();
    if (!valid && !S::is_zero(bits[f])) return false;
  }
  return true;
}

}  // namespace srk::test

namespace srk::test {

inline EvalOptions widened(std::size_t after = kDefaultWidenAfter) {
  EvalOptions o;
  o.widen_after = after;
  return o;
}

inline EvalOptions capped(std::uint64_t cap) {
  EvalOptions o;
  o.size_cap = cap;
  return o;
}

inline EvalOptions limited(std::size_t iters) {
  EvalOptions o;
  o.max_iters = iters;
  return o;
}

}  // namespace srk::test
