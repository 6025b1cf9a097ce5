#include <cmath>
#include <random>

#include "doctest.h"

#include "ellcert/annotator.hpp"
#include "test_util.hpp"

using namespace ellcert;
using testutil::handbuilt_step_maps_n2;
using testutil::matrix_close;
using testutil::net_loop_map;
using testutil::reference_a;
using testutil::random_stable;

TEST_SUITE("annotator") {

TEST_CASE("compute_rinit: scalar zero map solved by hand") {
  // a1 = [[0,1],[0,0]] gives P = diag(1,2), sigma_max = 2; with the default
  // safety factor 2 and n = 1, alpha = 4 and R_init = 4 P^{-1} = diag(4,2).
  const Matrix a1 = net_loop_map(Matrix::from_rows({{0.0}}));
  const RinitResult r = compute_rinit(a1, 1, AnnotatorOptions{});
  CHECK(r.sigma_max == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(r.alpha == doctest::Approx(4.0).epsilon(1e-12));
  CHECK(matrix_close(r.r_init.shape(), Matrix::from_rows({{4.0, 0.0}, {0.0, 2.0}}), 1e-10));
}

TEST_CASE("compute_rinit: the n-ball fits even with safety factor 1") {
  std::mt19937_64 rng(53);
  for (int rep = 0; rep < 8; ++rep) {
    const std::size_t n = 1 + rep % 4;
    AnnotatorOptions opts;
    opts.safety_factor = 1.0;
    const RinitResult r = compute_rinit(net_loop_map(random_stable(n, rng)),
                                        static_cast<int>(n), opts);
    const Matrix ball = static_cast<double>(n) * Matrix::identity(2 * n);
    CHECK(contains(r.r_init, make_ellipsoid(ball), 1e-9));
  }
}

TEST_CASE("compute_rinit validates its options") {
  const Matrix a1 = net_loop_map(Matrix::from_rows({{0.0}}));
  AnnotatorOptions opts;
  opts.safety_factor = 0.5;
  CHECK_THROWS_AS(compute_rinit(a1, 1, opts), InvalidInputError);
  CHECK_THROWS_AS(compute_rinit(Matrix::identity(3), 1, AnnotatorOptions{}), InvalidInputError);
}

TEST_CASE("propagate: empty body yields no points") {
  Program p = canonical_program(reference_a());
  p.body.clear();
  const Ellipsoid head = make_ellipsoid(Matrix::identity(4));
  CHECK(propagate(p, head).empty());
}

TEST_CASE("annotate: empty body means an identity loop map, which is not stable") {
  Program p = canonical_program(reference_a());
  p.body.clear();
  CHECK_THROWS_AS(annotate(p), UnstableSystemError);
}

TEST_CASE("propagate: two-state chain matches hand-built congruences") {
  const Program p = canonical_program(reference_a());
  const Certificate cert = annotate(p);
  const std::vector<Matrix> maps = handbuilt_step_maps_n2(reference_a());
  REQUIRE(cert.points.size() == maps.size());

  Matrix expected = cert.r_init;
  for (std::size_t k = 0; k < maps.size(); ++k) {
    expected = symmetrized(maps[k] * expected * maps[k].transposed());
    CHECK(matrix_close(cert.points[k].shape, expected, 1e-10));
  }
}

TEST_CASE("propagate: a zero-coefficient mac is the identity step") {
  Program p = canonical_program(Matrix::from_rows({{0.5}}));
  p.body = {Instruction::mac(1, 1, 0.0)};
  const Ellipsoid head = make_ellipsoid(Matrix::from_rows({{2.0, 0.5}, {0.5, 1.0}}));
  const auto points = propagate(p, head);
  REQUIRE(points.size() == 1);
  CHECK(matrix_close(points[0].invariant.shape(), head.shape(), 1e-14));
}

TEST_CASE("annotate: reference two-state system is certified") {
  const Certificate cert = annotate(canonical_program(reference_a()));
  CHECK(cert.closure_ok);
  CHECK(cert.init_box_ok);
  CHECK(cert.alpha == doctest::Approx(2.0 * 2.0 * cert.sigma_max).epsilon(1e-12));
  // Loop closure sign test: all eigenvalues of V_nn - R_init non-positive.
  const double top = sym_eigen(cert.loop_exit_shape() - cert.r_init).eigenvalues.back();
  CHECK(top <= 1e-9 * (1.0 + cert.r_init.frobenius_norm()));
}

TEST_CASE("annotate: unstable systems raise") {
  CHECK_THROWS_AS(annotate(canonical_program(Matrix::from_rows({{1.1}}))), UnstableSystemError);
}

TEST_CASE("annotate: zero map degenerates the exit invariant") {
  const Certificate cert = annotate(canonical_program(Matrix::from_rows({{0.0}})));
  CHECK(cert.closure_ok);
  CHECK(matrix_close(cert.loop_exit_shape(), Matrix::from_rows({{2.0, 0.0}, {0.0, 0.0}}), 1e-10));
  const SymEigen e = sym_eigen(cert.loop_exit_shape());
  int positive = 0;
  for (double v : e.eigenvalues) {
    if (v > 1e-9 * (1.0 + cert.loop_exit_shape().frobenius_norm())) ++positive;
  }
  CHECK(positive <= 1);
}

TEST_CASE("closure identity: the exit invariant is the one-cycle image of the head") {
  std::mt19937_64 rng(59);
  for (int rep = 0; rep < 12; ++rep) {
    const std::size_t n = 1 + rep % 4;
    const Program p = canonical_program(random_stable(n, rng));
    const Certificate cert = annotate(p);
    const Matrix a1 = loop_matrix(p);
    const Matrix expected = symmetrized(a1 * cert.r_init * a1.transposed());
    CHECK(matrix_close(cert.loop_exit_shape(), expected, 1e-10));
  }
}

TEST_CASE("scaling covariance: scaling Q rescales P but leaves R_init fixed") {
  const Program p = canonical_program(reference_a());
  AnnotatorOptions scaled;
  scaled.q = 3.0 * Matrix::identity(4);
  const Certificate base = annotate(p);
  const Certificate times3 = annotate(p, scaled);
  CHECK(times3.sigma_max == doctest::Approx(3.0 * base.sigma_max).epsilon(1e-10));
  CHECK(times3.alpha == doctest::Approx(3.0 * base.alpha).epsilon(1e-10));
  CHECK(matrix_close(times3.r_init, base.r_init, 1e-9));
}

TEST_CASE("annotate: larger init boxes rescale alpha and stay covered") {
  const Program wide = canonical_program(reference_a(), {2.0, 2.0});
  const Certificate cert = annotate(wide);
  CHECK(cert.init_box_ok);
  CHECK(cert.closure_ok);
  // Squared box norm 8 replaces n = 2 in alpha.
  CHECK(cert.alpha == doctest::Approx(2.0 * 8.0 * cert.sigma_max).epsilon(1e-12));
  CHECK(is_psd(cert.r_init - 8.0 * Matrix::identity(4), 1e-9));
}

TEST_CASE("certificate document round-trips exactly") {
  const Certificate cert = annotate(canonical_program(reference_a(), {1.0, 0.5}));
  const Certificate copy = parse_certificate(serialize_certificate(cert));
  CHECK(copy.n == cert.n);
  CHECK(copy.a == cert.a);
  CHECK(copy.q == cert.q);
  CHECK(copy.safety_factor == cert.safety_factor);
  CHECK(copy.tol == cert.tol);
  CHECK(copy.alpha == cert.alpha);
  CHECK(copy.sigma_max == cert.sigma_max);
  CHECK(copy.r_init == cert.r_init);
  CHECK(copy.closure_ok == cert.closure_ok);
  CHECK(copy.init_box_ok == cert.init_box_ok);
  REQUIRE(copy.points.size() == cert.points.size());
  for (std::size_t k = 0; k < cert.points.size(); ++k) {
    CHECK(copy.points[k].label == cert.points[k].label);
    CHECK(copy.points[k].shape == cert.points[k].shape);
  }
}

TEST_CASE("certificate parser rejects malformed documents") {
  CHECK_THROWS_AS(parse_certificate("not json"), ParseError);
  CHECK_THROWS_AS(parse_certificate("{}"), ParseError);
  Certificate cert = annotate(canonical_program(reference_a()));
  std::string text = serialize_certificate(cert);
  // Break symmetry of r_init beyond the gate.
  const std::string needle = "\"r_init\"";
  REQUIRE(text.find(needle) != std::string::npos);
  Certificate tampered = cert;
  tampered.r_init(0, 1) += 1.0;  // asymmetric now
  CHECK_THROWS_AS(parse_certificate(serialize_certificate(tampered)), ParseError);
}

}  // TEST_SUITE
