#include "ellcert/certificate.hpp"

#include <cmath>
#include <utility>

#include "ellcert/json_io.hpp"

namespace ellcert {

namespace {

// Certificates carry shape matrices that must be structurally sound
// (square, finite, symmetric within the relative gate) even when their PSD
// obligations no longer hold.
Matrix parse_shape(const nlohmann::json& j, const std::string& where, std::size_t dim) {
  Matrix m = matrix_from_json(j, where);
  if (!m.is_square() || m.rows() != dim) {
    throw ParseError(where, "expected a " + std::to_string(dim) + " x " +
                                std::to_string(dim) + " matrix");
  }
  if (!is_symmetric(m)) throw ParseError(where, "matrix is not symmetric");
  return symmetrized(m);
}

}  // namespace

std::string serialize_certificate(const Certificate& c) {
  nlohmann::json j;
  j["n"] = c.n;
  j["A"] = matrix_to_json(c.a);
  j["options"] = {
      {"Q", matrix_to_json(c.q)},
      {"safety_factor", c.safety_factor},
      {"tol", c.tol},
  };
  j["alpha"] = c.alpha;
  j["sigma_max"] = c.sigma_max;
  j["r_init"] = matrix_to_json(c.r_init);
  nlohmann::json points = nlohmann::json::array();
  for (const CertificatePoint& pt : c.points) {
    points.push_back({{"label", pt.label}, {"matrix", matrix_to_json(pt.shape)}});
  }
  j["points"] = std::move(points);
  j["closure_ok"] = c.closure_ok;
  j["init_box_ok"] = c.init_box_ok;
  return j.dump(2) + "\n";
}

Certificate parse_certificate(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("certificate", e.what());
  }
  if (!j.is_object()) throw ParseError("certificate", "top-level value must be an object");

  Certificate c;
  c.n = int_field(j, "n", "certificate");
  if (c.n < 1) throw ParseError("certificate.n", "n must be at least 1");
  const std::size_t dim = static_cast<std::size_t>(2 * c.n);

  c.a = matrix_from_json(require_field(j, "A", "certificate"), "certificate.A");
  if (!c.a.is_square() || c.a.rows() != static_cast<std::size_t>(c.n)) {
    throw ParseError("certificate.A", "A must be n x n");
  }

  const nlohmann::json& opts = require_field(j, "options", "certificate");
  if (!opts.is_object()) throw ParseError("certificate.options", "expected an object");
  c.q = parse_shape(require_field(opts, "Q", "certificate.options"), "certificate.options.Q", dim);
  c.safety_factor =
      finite_number(require_field(opts, "safety_factor", "certificate.options"),
                    "certificate.options.safety_factor");
  if (c.safety_factor < 1.0) {
    throw ParseError("certificate.options.safety_factor", "must be at least 1");
  }
  c.tol = finite_number(require_field(opts, "tol", "certificate.options"),
                        "certificate.options.tol");
  if (c.tol <= 0.0) throw ParseError("certificate.options.tol", "must be positive");

  c.alpha = finite_number(require_field(j, "alpha", "certificate"), "certificate.alpha");
  c.sigma_max =
      finite_number(require_field(j, "sigma_max", "certificate"), "certificate.sigma_max");

  c.r_init = parse_shape(require_field(j, "r_init", "certificate"), "certificate.r_init", dim);

  const nlohmann::json& points = require_field(j, "points", "certificate");
  if (!points.is_array()) throw ParseError("certificate.points", "expected an array");
  for (std::size_t k = 0; k < points.size(); ++k) {
    const std::string where = "certificate.points[" + std::to_string(k) + "]";
    const nlohmann::json& rec = points[k];
    if (!rec.is_object()) throw ParseError(where, "expected an object");
    const nlohmann::json& label = require_field(rec, "label", where);
    if (!label.is_string()) throw ParseError(where + ".label", "expected a string");
    CertificatePoint pt;
    pt.label = label.get<std::string>();
    pt.shape = parse_shape(require_field(rec, "matrix", where), where + ".matrix", dim);
    c.points.push_back(std::move(pt));
  }

  const nlohmann::json& closure = require_field(j, "closure_ok", "certificate");
  if (!closure.is_boolean()) throw ParseError("certificate.closure_ok", "expected a boolean");
  c.closure_ok = closure.get<bool>();
  const nlohmann::json& box = require_field(j, "init_box_ok", "certificate");
  if (!box.is_boolean()) throw ParseError("certificate.init_box_ok", "expected a boolean");
  c.init_box_ok = box.get<bool>();

  return c;
}

}  // namespace ellcert
