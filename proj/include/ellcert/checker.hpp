#pragma once

// Independent line-by-line certificate verification. The checker trusts
// nothing it has not recomputed from the certificate and the program body:
// it rebuilds each instruction's linear map and discharges every proof
// obligation as a PSD test. It never solves a Lyapunov equation, never
// re-derives the head invariant, and reads A only through the mac
// coefficients embedded in the body.
//
// Obligations, in order:
//   init-box   n' I <= r_init,  n' = sum of squared init-box bounds
//   steps      point_k >= T_k * point_{k-1} * T_k^T  (r_init before point 1)
//   closure    loop-exit invariant <= r_init

#include <string>
#include <vector>

#include "ellcert/certificate.hpp"
#include "ellcert/ellipsoid.hpp"
#include "ellcert/program.hpp"

namespace ellcert {

enum class FailureKind { kStepContainment, kClosure, kInitBox };

const char* failure_kind_name(FailureKind kind);

struct CheckFailure {
  std::string point;              // program-point label of the failed obligation
  FailureKind kind;
  double witness_min_eigenvalue;  // negative eigenvalue witnessing the violation
};

struct Verdict {
  bool certified = true;  // true iff failures is empty
  std::vector<CheckFailure> failures;
};

// Single proof step: post must enclose the image of pre under the
// instruction's map. Containment, not equality, so conservatively rounded
// or hand-edited certificates remain checkable.
bool check_step(const Ellipsoid& pre, const Instruction& ins, const Ellipsoid& post,
                int n, double tol = kPsdTol);

// Verifies every obligation and collects all failures rather than stopping
// at the first.
Verdict check_certificate(const Program& p, const Certificate& cert, double tol = kPsdTol);

}  // namespace ellcert
