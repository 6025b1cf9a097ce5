#include "ellcert/ellipsoid.hpp"

#include <algorithm>
#include <cmath>

namespace ellcert {

Ellipsoid::Ellipsoid(const Matrix& r, double tol) {
  if (!r.is_square()) {
    throw InvalidInputError("ellipsoid: shape matrix must be square");
  }
  if (!r.all_finite()) {
    throw InvalidInputError("ellipsoid: shape matrix entries must be finite");
  }
  if (!is_symmetric(r)) {
    throw InvalidInputError("ellipsoid: shape matrix is not symmetric");
  }
  Matrix s = symmetrized(r);
  const SymEigen e = sym_eigen(s);
  const double scale = tol * (1.0 + s.frobenius_norm());
  const double lo = e.eigenvalues.front();
  if (lo < -scale) {
    throw InvalidInputError("ellipsoid: shape matrix is not positive semidefinite");
  }
  if (lo < 0.0) {
    // Rebuild with negative eigenvalues clamped to zero; untouched otherwise
    // so exact inputs stay exact.
    const std::size_t d = s.rows();
    Matrix clamped(d, d);
    for (std::size_t r1 = 0; r1 < d; ++r1) {
      for (std::size_t c = r1; c < d; ++c) {
        double acc = 0.0;
        for (std::size_t k = 0; k < d; ++k) {
          const double lambda = std::max(e.eigenvalues[k], 0.0);
          acc += e.eigenvectors(r1, k) * lambda * e.eigenvectors(c, k);
        }
        clamped(r1, c) = clamped(c, r1) = acc;
      }
    }
    s = std::move(clamped);
  }
  r_ = std::move(s);
}

Ellipsoid make_ellipsoid(const Matrix& r, double tol) { return Ellipsoid(r, tol); }

bool shape_member(const Matrix& r, const Vector& z, double tol) {
  if (!r.is_square() || z.size() != r.rows()) {
    throw InvalidInputError("member: point dimension does not match the ellipsoid");
  }
  const std::size_t d = r.rows();
  const std::size_t b = d + 1;

  // Bordered matrix [[R, z], [z^T, 1]], assembled once into a flat buffer.
  thread_local std::vector<double> buf;
  buf.assign(b * b, 0.0);
  double sq = 1.0;  // running sum of squares for the Frobenius norm
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      const double v = r(i, j);
      buf[i * b + j] = v;
      sq += v * v;
    }
    buf[i * b + d] = z[i];
    buf[d * b + i] = z[i];
    sq += 2.0 * z[i] * z[i];
  }
  buf[d * b + d] = 1.0;

  const double scale = tol * (1.0 + std::sqrt(sq));
  thread_local std::vector<double> shifted;
  shifted = buf;
  for (std::size_t i = 0; i < b; ++i) shifted[i * b + i] += scale;
  if (detail::cholesky_pd_in_place(shifted, b)) return true;

  const Matrix bordered(b, b, buf);
  return sym_eigen(bordered).eigenvalues.front() >= -scale;
}

bool member(const Ellipsoid& e, const Vector& z, double tol) {
  return shape_member(e.shape(), z, tol);
}

Ellipsoid image(const Ellipsoid& e, const Matrix& t) {
  if (t.cols() != e.dim()) {
    throw InvalidInputError("image: map columns do not match the ellipsoid dimension");
  }
  return Ellipsoid(symmetrized(t * e.shape() * t.transposed()));
}

bool contains(const Ellipsoid& outer, const Ellipsoid& inner, double tol) {
  if (outer.dim() != inner.dim()) {
    throw InvalidInputError("contains: ellipsoid dimensions differ");
  }
  return is_psd(outer.shape() - inner.shape(), tol);
}

double variable_bound(const Ellipsoid& e, std::size_t i) {
  if (i >= e.dim()) {
    throw InvalidInputError("variable_bound: coordinate index out of range");
  }
  return std::sqrt(std::max(e.shape()(i, i), 0.0));
}

double bounding_ball(const std::vector<Ellipsoid>& ellipsoids) {
  if (ellipsoids.empty()) {
    throw InvalidInputError("bounding_ball: empty ellipsoid list");
  }
  const std::size_t d = ellipsoids.front().dim();
  double radius = 0.0;
  for (const Ellipsoid& e : ellipsoids) {
    if (e.dim() != d) {
      throw InvalidInputError("bounding_ball: mixed ellipsoid dimensions");
    }
    const double top = sym_eigen(e.shape()).eigenvalues.back();
    radius = std::max(radius, std::sqrt(std::max(top, 0.0)));
  }
  return radius;
}

}  // namespace ellcert
