#include "spectralab/rational_linalg.hpp"

#include <utility>

namespace spectralab {

namespace {

// Reduced row echelon form in place; returns pivot columns.
std::vector<int> rref(RationalMatrix& m, int columns) {
  std::vector<int> pivots;
  size_t row = 0;
  for (int col = 0; col < columns && row < m.size(); ++col) {
    size_t sel = row;
    while (sel < m.size() && m[sel][static_cast<size_t>(col)] == 0) ++sel;
    if (sel == m.size()) continue;
    std::swap(m[sel], m[row]);
    Rational inv = Rational(1) / m[row][static_cast<size_t>(col)];
    for (auto& v : m[row]) v *= inv;
    for (size_t r = 0; r < m.size(); ++r) {
      if (r == row) continue;
      Rational f = m[r][static_cast<size_t>(col)];
      if (f == 0) continue;
      for (int c = col; c < columns; ++c) m[r][static_cast<size_t>(c)] -= f * m[row][static_cast<size_t>(c)];
    }
    pivots.push_back(col);
    ++row;
  }
  return pivots;
}

}  // namespace

int rank(RationalMatrix rows) {
  if (rows.empty()) return 0;
  int columns = static_cast<int>(rows.front().size());
  return static_cast<int>(rref(rows, columns).size());
}

std::vector<RationalRow> nullspace(RationalMatrix rows, int columns) {
  std::vector<int> pivots = rref(rows, columns);
  std::vector<bool> is_pivot(static_cast<size_t>(columns), false);
  for (int p : pivots) is_pivot[static_cast<size_t>(p)] = true;
  std::vector<RationalRow> basis;
  for (int free = 0; free < columns; ++free) {
    if (is_pivot[static_cast<size_t>(free)]) continue;
    RationalRow v(static_cast<size_t>(columns), 0);
    v[static_cast<size_t>(free)] = 1;
    for (size_t r = 0; r < pivots.size(); ++r) v[static_cast<size_t>(pivots[r])] = -rows[r][static_cast<size_t>(free)];
    basis.push_back(std::move(v));
  }
  return basis;
}

}  // namespace spectralab
