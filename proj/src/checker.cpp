#include "ellcert/checker.hpp"

#include <cmath>

namespace ellcert {

namespace {

struct PsdProbe {
  bool ok;
  double min_eigenvalue;
};

// PSD test with an explicit eigenvalue witness for the verdict.
PsdProbe probe_psd(const Matrix& diff, double tol) {
  const double lo = min_eigenvalue(diff);
  return PsdProbe{lo >= -tol * (1.0 + diff.frobenius_norm()), lo};
}

PsdProbe probe_step(const Matrix& pre, const Instruction& ins, const Matrix& post,
                    int n, double tol) {
  const Matrix t = instruction_matrix(ins, n);
  return probe_psd(symmetrized(post - t * pre * t.transposed()), tol);
}

}  // namespace

const char* failure_kind_name(FailureKind kind) {
  switch (kind) {
    case FailureKind::kStepContainment: return "step-containment";
    case FailureKind::kClosure: return "closure";
    case FailureKind::kInitBox: return "init-box";
  }
  return "?";
}

bool check_step(const Ellipsoid& pre, const Instruction& ins, const Ellipsoid& post,
                int n, double tol) {
  const std::size_t dim = static_cast<std::size_t>(2 * n);
  if (pre.dim() != dim || post.dim() != dim) {
    throw InvalidInputError("check_step: invariant dimension must be 2n");
  }
  return probe_step(pre.shape(), ins, post.shape(), n, tol).ok;
}

Verdict check_certificate(const Program& p, const Certificate& cert, double tol) {
  validate_program(p);
  if (cert.points.size() != p.body.size()) {
    throw InvalidInputError("check_certificate: certificate has " +
                            std::to_string(cert.points.size()) + " points but the program body has " +
                            std::to_string(p.body.size()) + " instructions");
  }
  const std::size_t dim = static_cast<std::size_t>(p.state_dim());
  if (!cert.r_init.is_square() || cert.r_init.rows() != dim) {
    throw InvalidInputError("check_certificate: r_init must be 2n x 2n");
  }
  for (const CertificatePoint& pt : cert.points) {
    if (!pt.shape.is_square() || pt.shape.rows() != dim) {
      throw InvalidInputError("check_certificate: point '" + pt.label + "' is not 2n x 2n");
    }
  }

  Verdict verdict;
  auto record = [&verdict](const std::string& point, FailureKind kind, double witness) {
    verdict.failures.push_back(CheckFailure{point, kind, witness});
  };

  // Init-box coverage: the enclosing ball of the initial box fits in r_init.
  double box_norm_sq = 0.0;
  for (double b : p.init_box) box_norm_sq += b * b;
  const PsdProbe box =
      probe_psd(cert.r_init - box_norm_sq * Matrix::identity(dim), tol);
  if (!box.ok) record("r_init", FailureKind::kInitBox, box.min_eigenvalue);

  // Per-instruction containment along the chain.
  const Matrix* pre = &cert.r_init;
  for (std::size_t k = 0; k < p.body.size(); ++k) {
    const CertificatePoint& pt = cert.points[k];
    const PsdProbe step = probe_step(*pre, p.body[k], pt.shape, p.n, tol);
    if (!step.ok) record(pt.label, FailureKind::kStepContainment, step.min_eigenvalue);
    pre = &pt.shape;
  }

  // Loop closure: the exit invariant re-enters the head invariant.
  const PsdProbe closure = probe_psd(cert.r_init - *pre, tol);
  if (!closure.ok) {
    record(cert.points.empty() ? "r_init" : cert.points.back().label,
           FailureKind::kClosure, closure.min_eigenvalue);
  }

  verdict.certified = verdict.failures.empty();
  return verdict;
}

}  // namespace ellcert
