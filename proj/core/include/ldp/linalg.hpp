#pragma once

#include <cmath>
#include <limits>
#include <vector>

namespace ldp {

using Vec = std::vector<double>;
using Mat = std::vector<Vec>; // row-major, rows of equal length

constexpr double kInf = std::numeric_limits<double>::infinity();

double dot(const Vec& a, const Vec& b);
double norm(const Vec& a);
double dist(const Vec& a, const Vec& b);
Vec add(const Vec& a, const Vec& b);
Vec sub(const Vec& a, const Vec& b);
Vec scale(const Vec& a, double c);
void axpy(double c, const Vec& x, Vec& y); // y += c*x

Mat zeros(std::size_t rows, std::size_t cols);
Vec matvec(const Mat& m, const Vec& x);

/// Solves A x = b by Gaussian elimination with partial pivoting.
/// Returns false if A is singular to working precision.
bool solve_linear(Mat a, Vec b, Vec& x);

/// Numerical rank via row echelon reduction.
int matrix_rank(Mat m, double tol = 1e-10);

/// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations.
Vec sym_eigenvalues(Mat a, int sweeps = 64);

/// Orthonormal basis of the span of the given vectors (Gram-Schmidt).
Mat orthonormal_basis(const std::vector<Vec>& vectors, double tol = 1e-12);

} // namespace ldp
