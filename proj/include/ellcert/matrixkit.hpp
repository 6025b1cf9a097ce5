#pragma once

// Dense symmetric linear algebra at desk scale: a row-major value-type
// matrix, a cyclic Jacobi eigensolver, PSD tests, symmetric square roots,
// and a discrete Lyapunov solver based on Kronecker vectorization.

#include <cstddef>
#include <initializer_list>
#include <vector>

#include "ellcert/errors.hpp"

namespace ellcert {

// Default relative tolerance for positive-semidefiniteness decisions.
// Every PSD test in the project is scale-invariant: a matrix M passes iff
// its minimum eigenvalue is >= -tol * (1 + ||M||_F).
inline constexpr double kPsdTol = 1e-9;

using Vector = std::vector<double>;

class Matrix {
public:
  Matrix() = default;  // empty; only valid as a moved-from or placeholder value
  Matrix(std::size_t rows, std::size_t cols);  // zero-filled
  Matrix(std::size_t rows, std::size_t cols, std::vector<double> entries);

  static Matrix identity(std::size_t n);
  static Matrix from_rows(std::initializer_list<std::initializer_list<double>> rows);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool empty() const { return data_.empty(); }
  bool is_square() const { return rows_ == cols_ && rows_ > 0; }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  const std::vector<double>& entries() const { return data_; }

  Matrix transposed() const;
  double frobenius_norm() const;
  double max_abs() const;
  bool all_finite() const;

  // Matrix-vector product.
  Vector apply(const Vector& v) const;

private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

Matrix operator+(const Matrix& a, const Matrix& b);
Matrix operator-(const Matrix& a, const Matrix& b);
Matrix operator*(const Matrix& a, const Matrix& b);
Matrix operator*(double s, const Matrix& a);
bool operator==(const Matrix& a, const Matrix& b);

// (M + M^T) / 2.
Matrix symmetrized(const Matrix& m);

// ||M - M^T||_F <= tol * (1 + ||M||_F). False for non-square matrices.
bool is_symmetric(const Matrix& m, double tol = kPsdTol);

// Full spectral decomposition of a symmetric matrix.
// eigenvalues are ascending; eigenvectors(:, k) belongs to eigenvalues[k].
struct SymEigen {
  Vector eigenvalues;
  Matrix eigenvectors;
};

// Cyclic Jacobi with off-diagonal Frobenius convergence at 1e-12 * ||M||_F
// and a cap of 100 sweeps. Input must be square and symmetric within the
// relative gate; it is symmetrized before iteration.
SymEigen sym_eigen(const Matrix& m);

double min_eigenvalue(const Matrix& m);

// True iff min eigenvalue >= -tol * (1 + ||M||_F). A Cholesky attempt on the
// shifted matrix decides clear cases; the eigensolver settles the boundary.
bool is_psd(const Matrix& m, double tol = kPsdTol);

// Symmetric PSD square root: S with S * S = M. Eigenvalues negative within
// the tolerance band are clamped to zero; anything lower is rejected.
Matrix sym_sqrt(const Matrix& m, double tol = kPsdTol);

struct LyapunovSolution {
  Matrix p;           // symmetric positive definite
  double sigma_max;   // largest eigenvalue of p
  double residual;    // ||A^T P A - P + Q||_F
};

// Solves A^T P A - P = -Q for symmetric positive definite Q by vectorizing
// to the m^2 x m^2 linear system (I - A^T (x) A^T) vec(P) = vec(Q).
// Throws UnstableSystemError if the system is singular or the solution is
// not positive definite; positive definiteness of P is the stability
// certificate used throughout.
LyapunovSolution solve_discrete_lyapunov(const Matrix& a, const Matrix& q);

namespace detail {
// In-place lower Cholesky on a row-major d x d buffer; true iff the matrix
// is positive definite. Shared by is_psd and the membership fast path.
bool cholesky_pd_in_place(std::vector<double>& a, std::size_t d);
}  // namespace detail

}  // namespace ellcert
