#pragma once

#include <cstddef>
#include <vector>

namespace morphcloud {

// Dense row-major n x n symmetric matrix eigendecomposition via cyclic Jacobi
// rotations. Eigenvalues are returned in descending order with matching columns in
// eigvecs (row-major, eigvecs[r*n+c] = component r of eigenvector c). Deterministic;
// converges to ~1e-14 relative off-diagonal mass for the small n used here (3, 9).
void jacobi_eigen_symmetric(std::vector<double> a, size_t n,
                            std::vector<double>& eigvals, std::vector<double>& eigvecs);

// Solves the n x n system a*x = b in place via Gaussian elimination with partial
// pivoting. Returns false if the pivot magnitude falls below tol (singular system).
bool solve_linear(std::vector<double> a, std::vector<double> b, size_t n,
                  std::vector<double>& x, double tol = 1e-12);

} // namespace morphcloud
