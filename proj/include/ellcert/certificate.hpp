#pragma once

// The certificate document: the loop-head invariant plus one invariant shape
// matrix per instruction, together with the annotation parameters and the
// recorded closure/init-box verdicts.
//
// Point matrices are stored as plain symmetric matrices rather than
// validated ellipsoids: an independent checker has to be able to load a
// tampered or hand-edited certificate and refute it through its PSD
// obligations instead of rejecting it at parse time.

#include <string>
#include <vector>

#include "ellcert/matrixkit.hpp"

namespace ellcert {

struct CertificatePoint {
  std::string label;  // program-point label, e.g. "#5:mac(1,2)"
  Matrix shape;       // symmetric 2n x 2n invariant matrix
};

struct Certificate {
  int n = 0;
  Matrix a;              // system matrix, recorded for reference
  Matrix q;              // Lyapunov right-hand side used by the annotator
  double safety_factor = 2.0;
  double tol = kPsdTol;
  double alpha = 0.0;
  double sigma_max = 0.0;
  Matrix r_init;         // loop-head invariant shape matrix
  std::vector<CertificatePoint> points;  // post-invariant of each instruction
  bool closure_ok = false;
  bool init_box_ok = false;

  // Last point's matrix; r_init itself for an empty body.
  const Matrix& loop_exit_shape() const {
    return points.empty() ? r_init : points.back().shape;
  }
};

std::string serialize_certificate(const Certificate& c);
Certificate parse_certificate(const std::string& text);

}  // namespace ellcert
