#include "ellcert/matrixkit.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <utility>

namespace ellcert {

namespace {

void require(bool cond, const char* msg) {
  if (!cond) throw InvalidInputError(msg);
}

void require_symmetric_square(const Matrix& m, const char* who) {
  if (!m.is_square()) {
    throw InvalidInputError(std::string(who) + ": matrix must be square");
  }
  if (!is_symmetric(m)) {
    throw InvalidInputError(std::string(who) + ": matrix is not symmetric");
  }
}

double off_diagonal_norm(const Matrix& a) {
  double s = 0.0;
  const std::size_t d = a.rows();
  for (std::size_t r = 0; r < d; ++r) {
    for (std::size_t c = 0; c < d; ++c) {
      if (r != c) s += a(r, c) * a(r, c);
    }
  }
  return std::sqrt(s);
}

// Gaussian elimination with partial pivoting; false on a pivot below floor.
bool solve_dense_in_place(Matrix& k, Vector& b, double pivot_floor) {
  const std::size_t d = k.rows();
  for (std::size_t col = 0; col < d; ++col) {
    std::size_t best = col;
    for (std::size_t r = col + 1; r < d; ++r) {
      if (std::abs(k(r, col)) > std::abs(k(best, col))) best = r;
    }
    if (std::abs(k(best, col)) <= pivot_floor) return false;
    if (best != col) {
      for (std::size_t c = col; c < d; ++c) std::swap(k(col, c), k(best, c));
      std::swap(b[col], b[best]);
    }
    const double pivot = k(col, col);
    for (std::size_t r = col + 1; r < d; ++r) {
      const double f = k(r, col) / pivot;
      if (f == 0.0) continue;
      k(r, col) = 0.0;
      for (std::size_t c = col + 1; c < d; ++c) k(r, c) -= f * k(col, c);
      b[r] -= f * b[col];
    }
  }
  for (std::size_t r = d; r-- > 0;) {
    double s = b[r];
    for (std::size_t c = r + 1; c < d; ++c) s -= k(r, c) * b[c];
    b[r] = s / k(r, r);
  }
  return true;
}

}  // namespace

Matrix::Matrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {
  require(rows >= 1 && cols >= 1, "matrix dimensions must be positive");
}

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> entries)
    : rows_(rows), cols_(cols), data_(std::move(entries)) {
  require(rows >= 1 && cols >= 1, "matrix dimensions must be positive");
  require(data_.size() == rows * cols, "matrix entry count does not match dimensions");
  for (double v : data_) {
    require(std::isfinite(v), "matrix entries must be finite");
  }
}

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Matrix Matrix::from_rows(std::initializer_list<std::initializer_list<double>> rows) {
  require(rows.size() > 0, "matrix dimensions must be positive");
  const std::size_t nc = rows.begin()->size();
  std::vector<double> data;
  data.reserve(rows.size() * nc);
  for (const auto& row : rows) {
    require(row.size() == nc, "matrix rows must have uniform length");
    data.insert(data.end(), row.begin(), row.end());
  }
  return Matrix(rows.size(), nc, std::move(data));
}

Matrix Matrix::transposed() const {
  Matrix t(cols_, rows_);
  for (std::size_t r = 0; r < rows_; ++r) {
    for (std::size_t c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
  }
  return t;
}

double Matrix::frobenius_norm() const {
  double s = 0.0;
  for (double v : data_) s += v * v;
  return std::sqrt(s);
}

double Matrix::max_abs() const {
  double s = 0.0;
  for (double v : data_) s = std::max(s, std::abs(v));
  return s;
}

bool Matrix::all_finite() const {
  return std::all_of(data_.begin(), data_.end(),
                     [](double v) { return std::isfinite(v); });
}

Vector Matrix::apply(const Vector& v) const {
  require(v.size() == cols_, "matrix-vector dimension mismatch");
  Vector out(rows_, 0.0);
  for (std::size_t r = 0; r < rows_; ++r) {
    double s = 0.0;
    for (std::size_t c = 0; c < cols_; ++c) s += (*this)(r, c) * v[c];
    out[r] = s;
  }
  return out;
}

Matrix operator+(const Matrix& a, const Matrix& b) {
  require(a.rows() == b.rows() && a.cols() == b.cols(), "matrix addition dimension mismatch");
  Matrix out(a.rows(), a.cols());
  for (std::size_t r = 0; r < a.rows(); ++r) {
    for (std::size_t c = 0; c < a.cols(); ++c) out(r, c) = a(r, c) + b(r, c);
  }
  return out;
}

Matrix operator-(const Matrix& a, const Matrix& b) {
  require(a.rows() == b.rows() && a.cols() == b.cols(), "matrix subtraction dimension mismatch");
  Matrix out(a.rows(), a.cols());
  for (std::size_t r = 0; r < a.rows(); ++r) {
    for (std::size_t c = 0; c < a.cols(); ++c) out(r, c) = a(r, c) - b(r, c);
  }
  return out;
}

Matrix operator*(const Matrix& a, const Matrix& b) {
  require(a.cols() == b.rows(), "matrix product dimension mismatch");
  Matrix out(a.rows(), b.cols());
  for (std::size_t r = 0; r < a.rows(); ++r) {
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double ark = a(r, k);
      if (ark == 0.0) continue;
      for (std::size_t c = 0; c < b.cols(); ++c) out(r, c) += ark * b(k, c);
    }
  }
  return out;
}

Matrix operator*(double s, const Matrix& a) {
  Matrix out(a.rows(), a.cols());
  for (std::size_t r = 0; r < a.rows(); ++r) {
    for (std::size_t c = 0; c < a.cols(); ++c) out(r, c) = s * a(r, c);
  }
  return out;
}

bool operator==(const Matrix& a, const Matrix& b) {
  return a.rows() == b.rows() && a.cols() == b.cols() && a.entries() == b.entries();
}

Matrix symmetrized(const Matrix& m) {
  require(m.is_square(), "symmetrized: matrix must be square");
  Matrix out(m.rows(), m.cols());
  for (std::size_t r = 0; r < m.rows(); ++r) {
    for (std::size_t c = 0; c < m.cols(); ++c) out(r, c) = 0.5 * (m(r, c) + m(c, r));
  }
  return out;
}

bool is_symmetric(const Matrix& m, double tol) {
  if (!m.is_square()) return false;
  double s = 0.0;
  for (std::size_t r = 0; r < m.rows(); ++r) {
    for (std::size_t c = r + 1; c < m.cols(); ++c) {
      const double d = m(r, c) - m(c, r);
      s += 2.0 * d * d;
    }
  }
  return std::sqrt(s) <= tol * (1.0 + m.frobenius_norm());
}

SymEigen sym_eigen(const Matrix& m) {
  require_symmetric_square(m, "sym_eigen");
  const std::size_t d = m.rows();
  Matrix a = symmetrized(m);
  Matrix v = Matrix::identity(d);
  const double target = 1e-12 * a.frobenius_norm();

  int sweep = 0;
  while (off_diagonal_norm(a) > target) {
    if (sweep++ >= 100) {
      throw NumericalFailureError("sym_eigen: Jacobi iteration did not converge in 100 sweeps");
    }
    for (std::size_t p = 0; p + 1 < d; ++p) {
      for (std::size_t q = p + 1; q < d; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        const double tau = s / (1.0 + c);

        const double app = a(p, p);
        const double aqq = a(q, q);
        a(p, p) = app - t * apq;
        a(q, q) = aqq + t * apq;
        a(p, q) = a(q, p) = 0.0;
        for (std::size_t r = 0; r < d; ++r) {
          if (r != p && r != q) {
            const double arp = a(r, p);
            const double arq = a(r, q);
            a(r, p) = a(p, r) = arp - s * (arq + tau * arp);
            a(r, q) = a(q, r) = arq + s * (arp - tau * arq);
          }
          const double vrp = v(r, p);
          const double vrq = v(r, q);
          v(r, p) = vrp - s * (vrq + tau * vrp);
          v(r, q) = vrq + s * (vrp - tau * vrq);
        }
      }
    }
  }

  std::vector<std::size_t> order(d);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&a](std::size_t x, std::size_t y) { return a(x, x) < a(y, y); });

  SymEigen out;
  out.eigenvalues.resize(d);
  out.eigenvectors = Matrix(d, d);
  for (std::size_t k = 0; k < d; ++k) {
    out.eigenvalues[k] = a(order[k], order[k]);
    for (std::size_t r = 0; r < d; ++r) out.eigenvectors(r, k) = v(r, order[k]);
  }
  return out;
}

double min_eigenvalue(const Matrix& m) {
  return sym_eigen(m).eigenvalues.front();
}

namespace detail {

bool cholesky_pd_in_place(std::vector<double>& a, std::size_t d) {
  for (std::size_t k = 0; k < d; ++k) {
    double diag = a[k * d + k];
    for (std::size_t j = 0; j < k; ++j) diag -= a[k * d + j] * a[k * d + j];
    if (!(diag > 0.0) || !std::isfinite(diag)) return false;
    const double lkk = std::sqrt(diag);
    a[k * d + k] = lkk;
    for (std::size_t i = k + 1; i < d; ++i) {
      double s = a[i * d + k];
      for (std::size_t j = 0; j < k; ++j) s -= a[i * d + j] * a[k * d + j];
      a[i * d + k] = s / lkk;
    }
  }
  return true;
}

}  // namespace detail

bool is_psd(const Matrix& m, double tol) {
  require_symmetric_square(m, "is_psd");
  const double scale = tol * (1.0 + m.frobenius_norm());
  const std::size_t d = m.rows();

  Matrix shifted = symmetrized(m);
  for (std::size_t i = 0; i < d; ++i) shifted(i, i) += scale;
  std::vector<double> buf = shifted.entries();
  if (detail::cholesky_pd_in_place(buf, d)) return true;  // min eig > -scale

  return sym_eigen(m).eigenvalues.front() >= -scale;
}

Matrix sym_sqrt(const Matrix& m, double tol) {
  require_symmetric_square(m, "sym_sqrt");
  const SymEigen e = sym_eigen(m);
  const double scale = tol * (1.0 + m.frobenius_norm());
  if (e.eigenvalues.front() < -scale) {
    throw InvalidInputError("sym_sqrt: matrix is not positive semidefinite");
  }
  const std::size_t d = m.rows();
  Vector root(d);
  for (std::size_t k = 0; k < d; ++k) root[k] = std::sqrt(std::max(e.eigenvalues[k], 0.0));
  Matrix out(d, d);
  for (std::size_t r = 0; r < d; ++r) {
    for (std::size_t c = r; c < d; ++c) {
      double s = 0.0;
      for (std::size_t k = 0; k < d; ++k) {
        s += e.eigenvectors(r, k) * root[k] * e.eigenvectors(c, k);
      }
      out(r, c) = out(c, r) = s;
    }
  }
  return out;
}

LyapunovSolution solve_discrete_lyapunov(const Matrix& a, const Matrix& q) {
  require(a.is_square(), "solve_discrete_lyapunov: A must be square");
  require(q.rows() == a.rows() && q.cols() == a.cols(),
          "solve_discrete_lyapunov: Q must match A in size");
  require_symmetric_square(q, "solve_discrete_lyapunov");
  if (min_eigenvalue(q) <= kPsdTol * (1.0 + q.frobenius_norm())) {
    throw InvalidInputError("solve_discrete_lyapunov: Q must be positive definite");
  }

  const std::size_t m = a.rows();
  const std::size_t d = m * m;

  // Row-major vectorization: (A^T P A)(i,j) = sum_{k,l} A(k,i) P(k,l) A(l,j),
  // so the unknown P(k,l) enters equation (i,j) with coefficient A(k,i) A(l,j).
  Matrix kron(d, d);
  Vector rhs(d, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      const std::size_t row = i * m + j;
      rhs[row] = q(i, j);
      for (std::size_t k = 0; k < m; ++k) {
        for (std::size_t l = 0; l < m; ++l) {
          const std::size_t col = k * m + l;
          kron(row, col) = (row == col ? 1.0 : 0.0) - a(k, i) * a(l, j);
        }
      }
    }
  }

  const double pivot_floor = 1e-12 * (1.0 + kron.max_abs());
  if (!solve_dense_in_place(kron, rhs, pivot_floor)) {
    throw UnstableSystemError(
        "discrete Lyapunov equation is singular: the loop map has an eigenvalue "
        "product equal to one (spectral radius not strictly below one)");
  }

  Matrix p(m, m, std::move(rhs));
  p = symmetrized(p);

  const double residual = (a.transposed() * p * a - p + q).frobenius_norm();
  if (residual > 1e-8 * (1.0 + q.frobenius_norm())) {
    throw NumericalFailureError("solve_discrete_lyapunov: residual exceeds tolerance");
  }

  const SymEigen e = sym_eigen(p);
  if (e.eigenvalues.front() <= kPsdTol * (1.0 + p.frobenius_norm())) {
    throw UnstableSystemError(
        "Lyapunov solution is not positive definite: the loop map is unstable");
  }

  return LyapunovSolution{std::move(p), e.eigenvalues.back(), residual};
}

}  // namespace ellcert
