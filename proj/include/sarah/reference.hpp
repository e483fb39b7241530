#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>

#include "sarah/linalg.hpp"

namespace sarah {

class Problem;

// Minimizer of a convex problem found by gradient descent.
struct ReferenceSolution {
  DenseVector w_star;
  double f_star = 0.0;
  double grad_norm_sq = 0.0;
  double tol = 0.0;
  std::size_t iterations = 0;
};

// Versioned text format:
//   # sarah-reference v1
//   kind <kind>
//   lambda <x>
//   n <n>
//   d <d>
//   f_star <x>
//   grad_norm_sq <x>
//   tol <x>
//   iterations <k>
//   w <x_1> ... <x_d>
// Reals are written with %.17g.
void write_reference(std::ostream& out, const ReferenceSolution& ref, const Problem& p);
void save_reference(const std::string& path, const ReferenceSolution& ref, const Problem& p);

// Throws DataError if the file is malformed or was solved for a different problem.
ReferenceSolution read_reference(std::istream& in, const Problem& p);
ReferenceSolution load_reference(const std::string& path, const Problem& p);

}  // namespace sarah
