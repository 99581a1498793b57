#pragma once

#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "srk/error.hpp"
#include "srk/type.hpp"

namespace srk {

/// A 4×4 or 9×9 puzzle. Cells are listed row by row; 0 is blank, other
/// entries are digits 1..side.
struct SudokuPuzzle {
  int side = 4;
  std::vector<int> cells;

  int box() const { return side == 4 ? 2 : 3; }
  int at(int r, int c) const { return cells[r * side + c]; }

  // The cells of row, column and box i.
  std::vector<std::vector<int>> groups() const {
    std::vector<std::vector<int>> out;
    int b = box();
    for (int i = 0; i < side; ++i) {
      std::vector<int> row, col, bx;
      for (int j = 0; j < side; ++j) {
        row.push_back(i * side + j);
        col.push_back(j * side + i);
        int r = (i / b) * b + j / b;
        int c = (i % b) * b + j % b;
        bx.push_back(r * side + c);
      }
      out.push_back(row);
      out.push_back(bx);
      out.push_back(col);
    }
    return out;
  }

  std::string str() const {
    std::string s;
    for (int r = 0; r < side; ++r) {
      for (int c = 0; c < side; ++c) {
        int d = at(r, c);
        s += d == 0 ? '.' : static_cast<char>('0' + d);
      }
      s += '\n';
    }
    return s;
  }
};

/// Reads one line per row: digits 1..side, `.` for blank. Blank lines
/// and lines starting with '#' are skipped.
inline SudokuPuzzle parse_sudoku(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::vector<std::string> rows;
  std::size_t lineno = 0;
  std::vector<std::size_t> linenos;
  while (std::getline(in, line)) {
    ++lineno;
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    rows.push_back(line);
    linenos.push_back(lineno);
  }
  SudokuPuzzle p;
  if (rows.size() != 4 && rows.size() != 9)
    throw Error("a puzzle has 4 or 9 rows, found " + std::to_string(rows.size()));
  p.side = static_cast<int>(rows.size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != rows.size())
      throw Error("row has " + std::to_string(rows[r].size()) + " cells, expected " +
                      std::to_string(p.side),
                  SourceLoc{linenos[r], 1});
    for (std::size_t c = 0; c < rows[r].size(); ++c) {
      char ch = rows[r][c];
      if (ch == '.') {
        p.cells.push_back(0);
      } else if (ch >= '1' && ch <= '0' + p.side) {
        p.cells.push_back(ch - '0');
      } else {
        throw Error(std::string("bad cell '") + ch + "'", SourceLoc{linenos[r], c + 1});
      }
    }
  }
  for (const auto& g : p.groups()) {
    std::set<int> seen;
    for (int idx : g) {
      int d = p.cells[idx];
      if (d != 0 && !seen.insert(d).second)
        throw Error("digit " + std::to_string(d) + " is given twice in one row, column or box",
                    SourceLoc{linenos[idx / p.side], static_cast<std::size_t>(idx % p.side) + 1});
    }
  }
  return p;
}

/// Variable name for cell idx: a..p on 4×4 boards, r<row>c<col> on 9×9.
inline std::string sudoku_cell_name(int side, int idx) {
  if (side == 4) return std::string(1, static_cast<char>('a' + idx));
  return "r" + std::to_string(idx / side + 1) + "c" + std::to_string(idx % side + 1);
}

/// A program whose query is nonzero exactly at the puzzle's solutions:
/// valid<n> requires its arguments to differ pairwise, sudoku<n>x<n>
/// applies it to every row, box and column, and the run binds the blank
/// cells with the givens passed as numerals (digit d is d - 1).
inline std::string encode_sudoku(const SudokuPuzzle& p) {
  const int n = p.side;
  const std::string num = n == 4 ? "Num" : "Num9";
  const std::string valid = "valid" + std::to_string(n);
  const std::string rel = "sudoku" + std::to_string(n) + "x" + std::to_string(n);
  std::ostringstream os;
  os << "(deftype " << num << " " << numeral_type(n).str() << ")\n\n";

  os << "(defrel (" << valid;
  for (int i = 0; i < n; ++i) os << " (" << static_cast<char>('a' + i) << " : " << num << ")";
  os << ")";
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      os << "\n  (=/= " << static_cast<char>('a' + i) << " " << static_cast<char>('a' + j) << ")";
  os << ")\n\n";

  os << "(defrel (" << rel;
  for (int r = 0; r < n; ++r) {
    os << "\n         ";
    for (int c = 0; c < n; ++c)
      os << " (" << sudoku_cell_name(n, r * n + c) << " : " << num << ")";
  }
  os << ")";
  for (const auto& g : p.groups()) {
    os << "\n  (" << valid;
    for (int idx : g) os << " " << sudoku_cell_name(n, idx);
    os << ")";
  }
  os << ")\n\n";

  os << "(run (";
  bool first = true;
  for (int i = 0; i < n * n; ++i) {
    if (p.cells[i] != 0) continue;
    if (!first) os << (i % n == 0 ? "\n      " : " ");
    os << "(" << sudoku_cell_name(n, i) << " : " << num << ")";
    first = false;
  }
  os << ")\n  (" << rel;
  for (int i = 0; i < n * n; ++i) {
    if (p.cells[i] == 0) os << " " << sudoku_cell_name(n, i);
    else os << " " << p.cells[i] - 1;
  }
  os << "))\n";
  return os.str();
}

/// Fills the blanks with digits taken from `answer` (0-based values in
/// blank-cell order).
inline SudokuPuzzle fill_sudoku(const SudokuPuzzle& p, const std::vector<int>& answer) {
  SudokuPuzzle out = p;
  std::size_t k = 0;
  for (auto& c : out.cells) {
    if (c != 0) continue;
    if (k >= answer.size()) throw Error("answer has too few cells");
    c = answer[k++] + 1;
  }
  if (k != answer.size()) throw Error("answer has too many cells");
  return out;
}

/// True when `grid` is complete, agrees with the givens of `puzzle` and
/// has no repeated digit in any row, column or box.
inline bool is_sudoku_solution(const SudokuPuzzle& puzzle, const SudokuPuzzle& grid) {
  if (grid.side != puzzle.side || grid.cells.size() != puzzle.cells.size()) return false;
  for (std::size_t i = 0; i < grid.cells.size(); ++i) {
    if (grid.cells[i] < 1 || grid.cells[i] > grid.side) return false;
    if (puzzle.cells[i] != 0 && puzzle.cells[i] != grid.cells[i]) return false;
  }
  for (const auto& g : grid.groups()) {
    std::set<int> seen;
    for (int idx : g)
      if (!seen.insert(grid.cells[idx]).second) return false;
  }
  return true;
}

}  // namespace srk
