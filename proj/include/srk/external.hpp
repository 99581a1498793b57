#pragma once

#include <array>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include "srk/cdcl.hpp"
#include "srk/cnf.hpp"
#include "srk/error.hpp"

namespace srk {

inline constexpr const char* kSolverEnvVar = "SRK_SAT_SOLVER";

inline std::string shell_quote(const std::string& s) {
  std::string out = "'";
  for (char c : s) {
    if (c == '\'') out += "'\\''";
    else out += c;
  }
  return out + "'";
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// Reads SAT-competition output (`s` and `v` lines) for a CNF with
/// `num_vars` variables. Variables the solver leaves out default to false.
inline SolveResult parse_solver_output(const std::string& text, int num_vars) {
  SolveResult res;
  bool have_status = false;
  res.model.assign(num_vars + 1, false);
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.rfind("s ", 0) == 0) {
      std::string status = line.substr(2);
      while (!status.empty() && status.back() == ' ') status.pop_back();
      if (status == "SATISFIABLE") res.status = SolveStatus::Satisfiable;
      else if (status == "UNSATISFIABLE") res.status = SolveStatus::Unsatisfiable;
      else if (status == "UNKNOWN") res.status = SolveStatus::Unknown;
      else throw SolverError("unrecognised solver status line: " + line);
      have_status = true;
    } else if (line.rfind("v ", 0) == 0 || line == "v") {
      std::istringstream vs(line.substr(1));
      std::string tok;
      while (vs >> tok) {
        char* end = nullptr;
        long lit = std::strtol(tok.c_str(), &end, 10);
        if (*end != '\0') throw SolverError("bad literal in solver model: " + tok);
        if (lit == 0) continue;
        if (std::labs(lit) > num_vars)
          throw SolverError("solver model mentions variable " + tok + " beyond " +
                            std::to_string(num_vars));
        res.model[std::labs(lit)] = lit > 0;
      }
    }
  }
  if (!have_status) throw SolverError("solver output has no 's' status line");
  if (res.status != SolveStatus::Satisfiable) res.model.clear();
  if (res.status == SolveStatus::Unknown) res.reason = "external solver answered UNKNOWN";
  return res;
}

/// Runs `command <dimacs_path>` through the shell, parses its answer and
/// checks any model against the CNF in the file.
inline SolveResult external_solve(const std::string& dimacs_path, const std::string& command) {
  Cnf cnf = parse_dimacs(read_file(dimacs_path));
  std::string cmd = command + " " + shell_quote(dimacs_path) + " 2>/dev/null";
  FILE* pipe = ::popen(cmd.c_str(), "r");
  if (!pipe) throw SolverError("cannot start solver: " + command);
  std::string output;
  std::array<char, 4096> buf;
  std::size_t n;
  while ((n = std::fread(buf.data(), 1, buf.size(), pipe)) > 0) output.append(buf.data(), n);
  int status = ::pclose(pipe);
  SolveResult res;
  try {
    res = parse_solver_output(output, cnf.num_vars);
  } catch (const SolverError& e) {
    std::string code = WIFEXITED(status) ? std::to_string(WEXITSTATUS(status)) : "signal";
    throw SolverError(std::string(e.what()) + " (solver '" + command + "' exited with " +
                      code + ")");
  }
  if (res.sat() && !cnf.satisfied_by(res.model))
    throw SolverError("solver '" + command + "' returned a model that violates the CNF");
  return res;
}

/// SAT-competition output for a result.
inline std::string format_solver_output(const SolveResult& r) {
  std::string s = "s " + to_string(r.status) + "\n";
  if (!r.sat()) return s;
  std::string line = "v";
  for (std::size_t v = 1; v < r.model.size(); ++v) {
    std::string lit = " " + std::string(r.model[v] ? "" : "-") + std::to_string(v);
    if (line.size() + lit.size() > 78) {
      s += line + "\n";
      line = "v";
    }
    line += lit;
  }
  return s + line + " 0\n";
}

}  // namespace srk
