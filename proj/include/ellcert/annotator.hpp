#pragma once

// Certificate construction: a Lyapunov-based loop-head invariant, an
// image-propagated invariant per instruction, and the loop-closure test.
//
// R_init is alpha * P^{-1} where P solves the discrete Lyapunov equation
// for the net loop map and alpha = safety_factor * n * sigma_max. That
// scaling puts the ball of squared radius n (the initial box's enclosing
// ball) inside E_{R_init}, and the Lyapunov inequality maps E_{R_init}
// strictly into itself over one loop iteration.

#include <optional>
#include <string>
#include <vector>

#include "ellcert/certificate.hpp"
#include "ellcert/ellipsoid.hpp"
#include "ellcert/program.hpp"

namespace ellcert {

struct AnnotatorOptions {
  std::optional<Matrix> q;     // Lyapunov right-hand side; identity(2n) if unset
  double safety_factor = 2.0;  // >= 1; 1 gives the tight alpha = n * sigma_max
  double tol = kPsdTol;
};

struct RinitResult {
  Ellipsoid r_init;
  double alpha;
  double sigma_max;
};

// Loop-head invariant for the 2n x 2n net loop map a1. Throws
// UnstableSystemError when a1 admits no positive definite Lyapunov solution.
RinitResult compute_rinit(const Matrix& a1, int n, const AnnotatorOptions& opts);

struct PropagatedPoint {
  std::string label;
  Ellipsoid invariant;
};

// Post-invariant chain: E_0 = r_init, E_k = image(E_{k-1}, T_k).
std::vector<PropagatedPoint> propagate(const Program& p, const Ellipsoid& r_init);

// Full annotation. Closure failure is a refuted certificate, not an error;
// only an unstable loop map throws. Init boxes larger than the unit box
// rescale alpha by the squared box norm so coverage still holds.
Certificate annotate(const Program& p, const AnnotatorOptions& opts = {});

}  // namespace ellcert
