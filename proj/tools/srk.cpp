// srk: command-line front end for semiringKanren programs.

#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "srk/srk.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitDiagnostic = 1;
constexpr int kExitResource = 2;

struct RunConfig {
  std::string semiring = "real-inf";
  std::string backend = "naive";
  std::size_t depth = srk::kDefaultDepth;
  std::size_t max_iters = 10000;
  double tol = 1e-12;
  std::optional<std::size_t> widen_after;
  bool widen = false;
  std::string output = "full";
  std::size_t limit = 1;
  std::string solver;

  srk::EvalOptions eval_options() const {
    srk::EvalOptions o;
    o.max_iters = max_iters;
    o.tol = tol;
    if (widen_after) o.widen_after = *widen_after;
    else if (widen) o.widen_after = srk::kDefaultWidenAfter;
    return o;
  }

  // --solver wins over the environment.
  std::string solver_command() const {
    if (!solver.empty()) return solver;
    if (const char* env = std::getenv(srk::kSolverEnvVar)) return env;
    return {};
  }
};

srk::Program load_program(const std::string& path) {
  auto p = srk::desugar(srk::parse_program(srk::read_file(path)));
  srk::require_well_typed(p);
  return p;
}

template <srk::Semiring S>
std::string run_naive(const srk::Program& p, const RunConfig& cfg) {
  auto arr = srk::run_query<S>(p, cfg.eval_options());
  auto mode = cfg.output == "nonzero" ? srk::OutputMode::Nonzero : srk::OutputMode::Full;
  return srk::format_array(arr, mode);
}

// Solver used for the SAT backend: the external command when one is
// configured, otherwise the embedded CDCL solver.
std::function<srk::SolveResult(const srk::Cnf&)> make_solver(const RunConfig& cfg) {
  std::string cmd = cfg.solver_command();
  if (cmd.empty()) return [](const srk::Cnf& cnf) { return srk::solve(cnf); };
  return [cmd](const srk::Cnf& cnf) {
    char tmpl[] = "/tmp/srk-XXXXXX.cnf";
    int fd = ::mkstemps(tmpl, 4);
    if (fd < 0) throw srk::SolverError("cannot create a temporary DIMACS file");
    ::close(fd);
    std::string path = tmpl;
    {
      std::ofstream out(path);
      out << srk::emit_dimacs(cnf);
    }
    try {
      auto r = srk::external_solve(path, cmd);
      fs::remove(path);
      return r;
    } catch (...) {
      fs::remove(path);
      throw;
    }
  };
}

std::string format_answers(const std::vector<std::vector<srk::Value>>& answers,
                           const srk::VarMap& vm) {
  if (answers.empty()) return "unsat\n";
  if (vm.entries.empty()) return "#t\n";
  // Print in index order, whatever order the solver found them in.
  std::vector<std::pair<std::vector<std::uint64_t>, std::size_t>> order;
  for (std::size_t k = 0; k < answers.size(); ++k) {
    std::vector<std::uint64_t> idx;
    for (std::size_t i = 0; i < answers[k].size(); ++i)
      idx.push_back(srk::rank(vm.entries[i].type, answers[k][i]));
    order.emplace_back(std::move(idx), k);
  }
  std::sort(order.begin(), order.end());
  std::string s;
  for (const auto& [idx, k] : order) {
    const auto& a = answers[k];
    s += "(";
    for (std::size_t i = 0; i < a.size(); ++i)
      s += (i ? ", " : "") + srk::format_value(vm.entries[i].type, a[i]);
    s += ") ↦ #t\n";
  }
  return s;
}

std::string run_sat(const srk::Program& p, const RunConfig& cfg) {
  if (cfg.semiring != "bool")
    throw srk::Error("the sat backend needs --semiring bool");
  auto c = srk::compile_program(p, cfg.depth);
  auto answers = srk::enumerate_solutions(c.cnf, c.varmap, cfg.limit, make_solver(cfg));
  return format_answers(answers, c.varmap);
}

std::string run_program(const std::string& path, const RunConfig& cfg) {
  auto p = load_program(path);
  if (cfg.backend == "sat") return run_sat(p, cfg);
  if (cfg.semiring == "bool") return run_naive<srk::BooleanSemiring>(p, cfg);
  if (cfg.semiring == "tropical") return run_naive<srk::TropicalSemiring>(p, cfg);
  return run_naive<srk::RealInfSemiring>(p, cfg);
}

// Maps library errors to diagnostics and exit codes.
int guarded(const std::string& file, const std::function<int()>& body) {
  try {
    return body();
  } catch (const srk::TypeCheckFailure& e) {
    for (const auto& err : e.errors()) std::cerr << err.diagnostic(file) << "\n";
    return kExitDiagnostic;
  } catch (const srk::ResourceError& e) {
    std::cerr << e.diagnostic(file) << "\n";
    return kExitResource;
  } catch (const srk::Error& e) {
    std::cerr << e.diagnostic(file) << "\n";
    return kExitDiagnostic;
  } catch (const std::bad_alloc&) {
    std::cerr << file << ": out of memory\n";
    return kExitResource;
  } catch (const std::exception& e) {
    std::cerr << file << ": " << e.what() << "\n";
    return kExitDiagnostic;
  }
}

// `out` names either the .cnf file or the common stem.
std::pair<std::string, std::string> output_paths(const std::string& out) {
  fs::path base(out);
  if (base.extension() == ".cnf" || base.extension() == ".vars") base.replace_extension();
  return {base.string() + ".cnf", base.string() + ".vars"};
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw srk::Error("cannot write " + path);
  out << text;
}

// ---------------------------------------------------------------------------
// bench

struct BenchRow {
  std::string name;
  std::string backend;
  std::string outcome;  // seconds, "timeout", "memory-limit" or "error"
  std::string detail;
};

// Runs `work` in a child process and waits up to `timeout` seconds.
BenchRow bench_one(const std::string& name, const std::string& backend, double timeout,
                   const std::function<void()>& work) {
  BenchRow row{name, backend, "", ""};
  int pipefd[2];
  if (::pipe(pipefd) != 0) throw srk::Error("pipe failed");
  auto start = std::chrono::steady_clock::now();
  pid_t pid = ::fork();
  if (pid < 0) throw srk::Error("fork failed");
  if (pid == 0) {
    ::close(pipefd[0]);
    int code = 0;
    std::string msg;
    try {
      work();
    } catch (const srk::ResourceError& e) {
      code = kExitResource;
      msg = e.what();
    } catch (const std::bad_alloc&) {
      code = kExitResource;
      msg = "out of memory";
    } catch (const std::exception& e) {
      code = kExitDiagnostic;
      msg = e.what();
    }
    if (!msg.empty()) {
      ssize_t ignored = ::write(pipefd[1], msg.data(), msg.size());
      (void)ignored;
    }
    ::close(pipefd[1]);
    ::_exit(code);
  }
  ::close(pipefd[1]);
  int status = 0;
  bool done = false;
  while (!done) {
    pid_t r = ::waitpid(pid, &status, WNOHANG);
    if (r == pid) {
      done = true;
      break;
    }
    double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (elapsed > timeout) {
      ::kill(pid, SIGKILL);
      ::waitpid(pid, &status, 0);
      row.outcome = "timeout";
      break;
    }
    std::this_thread::sleep_for(std::chrono::milliseconds(5));
  }
  double elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::string msg;
  char buf[512];
  ssize_t n;
  while ((n = ::read(pipefd[0], buf, sizeof buf)) > 0) msg.append(buf, n);
  ::close(pipefd[0]);
  if (!done) return row;
  row.detail = msg;
  if (WIFEXITED(status) && WEXITSTATUS(status) == 0) {
    char t[32];
    std::snprintf(t, sizeof t, "%.3f", elapsed);
    row.outcome = t;
  } else if (WIFEXITED(status) && WEXITSTATUS(status) == kExitResource) {
    row.outcome = "memory-limit";
  } else if (WIFSIGNALED(status)) {
    row.outcome = "error";
    row.detail = "killed by signal " + std::to_string(WTERMSIG(status));
  } else {
    row.outcome = "error";
  }
  return row;
}

int cmd_bench(const std::string& suite_path, const RunConfig& base, bool as_json) {
  json suite = json::parse(srk::read_file(suite_path));
  fs::path dir = fs::path(suite_path).parent_path();
  double default_timeout = suite.value("timeout", 120.0);
  std::vector<BenchRow> rows;
  for (const auto& entry : suite.value("programs", json::array())) {
    std::string name = entry.at("name").get<std::string>();
    double timeout = entry.value("timeout", default_timeout);
    RunConfig cfg = base;
    cfg.semiring = entry.value("semiring", std::string("bool"));
    cfg.depth = entry.value("depth", base.depth);
    std::vector<std::string> backends =
        entry.value("backends", std::vector<std::string>{"sat", "naive"});
    std::string program;
    if (entry.contains("program")) {
      program = (dir / entry.at("program").get<std::string>()).string();
    } else if (entry.contains("puzzle")) {
      program = (dir / entry.at("puzzle").get<std::string>()).string();
    } else {
      throw srk::Error("bench entry '" + name + "' needs a program or a puzzle");
    }
    const bool puzzle = entry.contains("puzzle");
    for (const auto& backend : backends) {
      RunConfig c = cfg;
      c.backend = backend;
      rows.push_back(bench_one(name, backend, timeout, [&] {
        std::string text = puzzle ? srk::encode_sudoku(srk::parse_sudoku(srk::read_file(program)))
                                  : srk::read_file(program);
        auto p = srk::desugar(srk::parse_program(text));
        srk::require_well_typed(p);
        if (c.backend == "sat") {
          run_sat(p, c);
        } else if (c.semiring == "bool") {
          run_naive<srk::BooleanSemiring>(p, c);
        } else if (c.semiring == "tropical") {
          run_naive<srk::TropicalSemiring>(p, c);
        } else {
          run_naive<srk::RealInfSemiring>(p, c);
        }
      }));
    }
  }
  if (as_json) {
    json out = json::array();
    for (const auto& r : rows)
      out.push_back({{"name", r.name}, {"backend", r.backend}, {"result", r.outcome},
                     {"detail", r.detail}});
    std::cout << out.dump(2) << "\n";
    return kExitOk;
  }
  std::size_t w = 7;
  for (const auto& r : rows) w = std::max(w, r.name.size());
  std::printf("%-*s  %-7s  %s\n", static_cast<int>(w), "program", "backend", "seconds");
  for (const auto& r : rows)
    std::printf("%-*s  %-7s  %s\n", static_cast<int>(w), r.name.c_str(), r.backend.c_str(),
                r.outcome.c_str());
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"srk: evaluate and compile semiringKanren programs"};
  app.require_subcommand(1);
  RunConfig cfg;

  auto add_eval_flags = [&](CLI::App* sub) {
    sub->add_option("--semiring", cfg.semiring, "Weight semiring")
        ->check(CLI::IsMember({"bool", "real-inf", "tropical"}));
    sub->add_option("--max-iters", cfg.max_iters, "Fixpoint iteration limit");
    sub->add_option("--tol", cfg.tol, "Fixpoint convergence tolerance");
    sub->add_option("--widen-after", cfg.widen_after,
                    "Promote entries still growing after N iterations to inf");
    sub->add_flag("--widen", cfg.widen, "Widen after 256 iterations");
  };
  auto add_sat_flags = [&](CLI::App* sub) {
    sub->add_option("--depth", cfg.depth, "Call unrolling depth");
    sub->add_option("--limit", cfg.limit, "Maximum number of solutions to print")
        ->check(CLI::PositiveNumber);
    sub->add_option("--solver", cfg.solver,
                    "External DIMACS solver command (default: $SRK_SAT_SOLVER or built-in)");
  };

  std::string file;
  std::string out_path;

  auto* run = app.add_subcommand("run", "Evaluate a program's query");
  run->add_option("file", file, "Program file")->required();
  run->add_option("--backend", cfg.backend, "naive or sat")
      ->check(CLI::IsMember({"naive", "sat"}));
  run->add_option("--output", cfg.output, "full or nonzero")
      ->check(CLI::IsMember({"full", "nonzero"}));
  add_eval_flags(run);
  add_sat_flags(run);

  auto* compile = app.add_subcommand("compile", "Compile a Boolean program to DIMACS");
  compile->add_option("file", file, "Program file")->required();
  compile->add_option("-o,--out", out_path, "Output stem; writes <stem>.cnf and <stem>.vars");
  compile->add_option("--depth", cfg.depth, "Call unrolling depth");

  std::string vars_path;
  std::optional<std::uint64_t> budget;
  auto* solve = app.add_subcommand("solve", "Solve a DIMACS file");
  solve->add_option("file", file, "DIMACS file")->required();
  solve->add_option("--vars", vars_path, "VarMap sidecar; decode the model with it");
  solve->add_option("--budget", budget, "Conflict budget for the built-in solver");
  solve->add_option("--solver", cfg.solver, "External DIMACS solver command");

  auto* sudoku = app.add_subcommand("sudoku", "Sudoku puzzles");
  sudoku->require_subcommand(1);
  auto* encode = sudoku->add_subcommand("encode", "Write a puzzle as a program");
  encode->add_option("puzzle", file, "Puzzle file")->required();
  encode->add_option("-o,--out", out_path, "Output file (default: stdout)");
  auto* ssolve = sudoku->add_subcommand("solve", "Solve a puzzle with the SAT backend");
  ssolve->add_option("puzzle", file, "Puzzle file")->required();
  add_sat_flags(ssolve);

  bool bench_json = false;
  auto* bench = app.add_subcommand("bench", "Time a suite of programs per backend");
  bench->add_option("suite", file, "Suite file (JSON)")->required();
  bench->add_flag("--json", bench_json, "Print JSON instead of a table");
  bench->add_option("--depth", cfg.depth, "Call unrolling depth");

  CLI11_PARSE(app, argc, argv);

  if (run->parsed()) {
    return guarded(file, [&] {
      if (cfg.backend == "sat" && !run->count("--semiring")) cfg.semiring = "bool";
      std::cout << run_program(file, cfg);
      return kExitOk;
    });
  }
  if (compile->parsed()) {
    return guarded(file, [&] {
      auto p = load_program(file);
      auto c = srk::compile_program(p, cfg.depth);
      std::string stem = out_path.empty() ? fs::path(file).replace_extension().string() : out_path;
      auto [cnf_path, vars_file] = output_paths(stem);
      write_file(cnf_path, srk::emit_dimacs(c.cnf));
      write_file(vars_file, srk::emit_varmap(c.varmap));
      std::cout << srk::compile_stats(c.cnf).str() << "\n";
      return kExitOk;
    });
  }
  if (solve->parsed()) {
    return guarded(file, [&] {
      srk::SolveResult r;
      std::string cmd = cfg.solver;
      if (!cmd.empty()) {
        r = srk::external_solve(file, cmd);
      } else {
        srk::SolverOptions opts;
        opts.conflict_budget = budget;
        r = srk::solve(srk::parse_dimacs(srk::read_file(file)), opts);
      }
      if (vars_path.empty()) {
        std::cout << srk::format_solver_output(r);
      } else {
        auto vm = srk::parse_varmap(srk::read_file(vars_path));
        std::vector<std::vector<srk::Value>> answers;
        if (r.sat()) answers.push_back(srk::decode_model(r.model, vm));
        if (r.status == srk::SolveStatus::Unknown) throw srk::ResourceError(r.reason);
        std::cout << format_answers(answers, vm);
      }
      return kExitOk;
    });
  }
  if (encode->parsed()) {
    return guarded(file, [&] {
      auto text = srk::encode_sudoku(srk::parse_sudoku(srk::read_file(file)));
      if (out_path.empty()) std::cout << text;
      else write_file(out_path, text);
      return kExitOk;
    });
  }
  if (ssolve->parsed()) {
    return guarded(file, [&] {
      auto puzzle = srk::parse_sudoku(srk::read_file(file));
      auto p = srk::desugar(srk::parse_program(srk::encode_sudoku(puzzle)));
      auto c = srk::compile_program(p, cfg.depth);
      auto answers = srk::enumerate_solutions(c.cnf, c.varmap, cfg.limit, make_solver(cfg));
      if (answers.empty()) {
        std::cout << "unsat\n";
        return kExitOk;
      }
      for (std::size_t k = 0; k < answers.size(); ++k) {
        std::vector<int> digits;
        for (const auto& v : answers[k]) digits.push_back(static_cast<int>(srk::numeral_index(v)));
        auto grid = srk::fill_sudoku(puzzle, digits);
        if (!srk::is_sudoku_solution(puzzle, grid))
          throw srk::SolverError("decoded grid is not a solution");
        if (k) std::cout << "\n";
        std::cout << grid.str();
      }
      return kExitOk;
    });
  }
  if (bench->parsed()) {
    return guarded(file, [&] { return cmd_bench(file, cfg, bench_json); });
  }
  return kExitOk;
}
