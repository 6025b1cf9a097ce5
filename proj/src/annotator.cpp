#include "ellcert/annotator.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

namespace ellcert {

namespace {

// box_norm_sq is the squared radius the head invariant must cover; at least
// n so the unit-box guarantee never weakens.
RinitResult compute_rinit_covering(const Matrix& a1, int n, const AnnotatorOptions& opts,
                                   double box_norm_sq) {
  if (n < 1) throw InvalidInputError("compute_rinit: n must be at least 1");
  const std::size_t dim = static_cast<std::size_t>(2 * n);
  if (!a1.is_square() || a1.rows() != dim) {
    throw InvalidInputError("compute_rinit: loop map must be 2n x 2n");
  }
  if (!(opts.safety_factor >= 1.0)) {
    throw InvalidInputError("compute_rinit: safety_factor must be at least 1");
  }
  if (!(opts.tol > 0.0) || !std::isfinite(opts.tol)) {
    throw InvalidInputError("compute_rinit: tol must be positive");
  }
  Matrix q = opts.q.value_or(Matrix::identity(dim));
  if (!q.is_square() || q.rows() != dim) {
    throw InvalidInputError("compute_rinit: Q must be 2n x 2n");
  }

  const LyapunovSolution lyap = solve_discrete_lyapunov(a1, q);
  const double cover = std::max(static_cast<double>(n), box_norm_sq);
  const double alpha = opts.safety_factor * cover * lyap.sigma_max;

  // Invert P through its spectral decomposition; P is positive definite by
  // the solver's contract, so the eigenvalues are safely above zero.
  const SymEigen e = sym_eigen(lyap.p);
  Matrix r(dim, dim);
  for (std::size_t i = 0; i < dim; ++i) {
    for (std::size_t j = i; j < dim; ++j) {
      double acc = 0.0;
      for (std::size_t k = 0; k < dim; ++k) {
        acc += e.eigenvectors(i, k) * (alpha / e.eigenvalues[k]) * e.eigenvectors(j, k);
      }
      r(i, j) = r(j, i) = acc;
    }
  }
  return RinitResult{Ellipsoid(r, opts.tol), alpha, lyap.sigma_max};
}

}  // namespace

RinitResult compute_rinit(const Matrix& a1, int n, const AnnotatorOptions& opts) {
  return compute_rinit_covering(a1, n, opts, static_cast<double>(n));
}

std::vector<PropagatedPoint> propagate(const Program& p, const Ellipsoid& r_init) {
  validate_program(p);
  if (r_init.dim() != static_cast<std::size_t>(p.state_dim())) {
    throw InvalidInputError("propagate: invariant dimension must be 2n");
  }
  std::vector<PropagatedPoint> points;
  points.reserve(p.body.size());
  Ellipsoid current = r_init;
  for (std::size_t k = 0; k < p.body.size(); ++k) {
    current = image(current, instruction_matrix(p.body[k], p.n));
    points.push_back(PropagatedPoint{instruction_label(p.body[k], k + 1), current});
  }
  return points;
}

Certificate annotate(const Program& p, const AnnotatorOptions& opts) {
  validate_program(p);
  const Matrix a1 = loop_matrix(p);

  double box_norm_sq = 0.0;
  for (double b : p.init_box) box_norm_sq += b * b;

  const RinitResult head = compute_rinit_covering(a1, p.n, opts, box_norm_sq);
  const std::vector<PropagatedPoint> chain = propagate(p, head.r_init);
  const Ellipsoid& loop_exit = chain.empty() ? head.r_init : chain.back().invariant;

  Certificate cert;
  cert.n = p.n;
  cert.a = p.a;
  cert.q = opts.q.value_or(Matrix::identity(static_cast<std::size_t>(p.state_dim())));
  cert.safety_factor = opts.safety_factor;
  cert.tol = opts.tol;
  cert.alpha = head.alpha;
  cert.sigma_max = head.sigma_max;
  cert.r_init = head.r_init.shape();
  cert.points.reserve(chain.size());
  for (const PropagatedPoint& pt : chain) {
    cert.points.push_back(CertificatePoint{pt.label, pt.invariant.shape()});
  }
  cert.closure_ok = contains(head.r_init, loop_exit, opts.tol);

  const std::size_t dim = static_cast<std::size_t>(p.state_dim());
  cert.init_box_ok =
      is_psd(cert.r_init - box_norm_sq * Matrix::identity(dim), opts.tol);
  return cert;
}

}  // namespace ellcert
