#pragma once

#include <vector>

#include "spectralab/rational_poly.hpp"

namespace spectralab {

using RationalRow = std::vector<Rational>;
using RationalMatrix = std::vector<RationalRow>;

/// Rank of a dense rational matrix (rows may be empty -> rank 0).
int rank(RationalMatrix rows);

/// Basis of {v : rows * v = 0} for vectors of length `columns`.
std::vector<RationalRow> nullspace(RationalMatrix rows, int columns);

}  // namespace spectralab
