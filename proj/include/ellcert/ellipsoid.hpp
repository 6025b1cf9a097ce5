#pragma once

// Centered ellipsoids in shape-matrix form: E_R = { z : [[R, z], [z^T, 1]] >= 0 }
// for symmetric PSD R. A singular R is a valid, bounded but degenerate
// (flat) ellipsoid; the bordered-matrix membership test needs no inverse,
// so degeneracy costs nothing.

#include <cstddef>
#include <vector>

#include "ellcert/matrixkit.hpp"

namespace ellcert {

class Ellipsoid {
public:
  // Stores the symmetrization of r; eigenvalues negative within the
  // tolerance band are clamped to zero. Rejects asymmetric or indefinite r.
  explicit Ellipsoid(const Matrix& r, double tol = kPsdTol);

  const Matrix& shape() const { return r_; }
  std::size_t dim() const { return r_.rows(); }

private:
  Matrix r_;
};

Ellipsoid make_ellipsoid(const Matrix& r, double tol = kPsdTol);

// Bordered-matrix membership on a raw shape matrix. Shared with the
// certificate checks, which must handle shape matrices that are not
// guaranteed PSD.
bool shape_member(const Matrix& r, const Vector& z, double tol = kPsdTol);

// z in E iff [[R, z], [z^T, 1]] is PSD within tol.
bool member(const Ellipsoid& e, const Vector& z, double tol = kPsdTol);

// Image under z = T v: E_R maps to E_{T R T^T}, symmetrized.
Ellipsoid image(const Ellipsoid& e, const Matrix& t);

// True iff outer.R - inner.R is PSD within tol. For centered ellipsoids in
// this representation the PSD ordering coincides with set containment.
bool contains(const Ellipsoid& outer, const Ellipsoid& inner, double tol = kPsdTol);

// Exact maximum of |z_i| over the ellipsoid: sqrt(R[i][i]). Zero-based i.
double variable_bound(const Ellipsoid& e, std::size_t i);

// Radius of the smallest centered ball containing every listed ellipsoid:
// max over the list of sqrt(lambda_max(R)).
double bounding_ball(const std::vector<Ellipsoid>& ellipsoids);

}  // namespace ellcert
