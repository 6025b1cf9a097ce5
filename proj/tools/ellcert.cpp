// ellcert: annotate linear control-loop programs with ellipsoidal invariants,
// check certificates independently, extract variable bounds, and stress-test
// certificates against concrete executions.
//
// Exit codes: 0 = certified / no violations, 1 = refuted (a sound analysis
// result), 2 = operational error (bad files, unstable system, bad options).

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "ellcert/annotator.hpp"
#include "ellcert/checker.hpp"
#include "ellcert/json_io.hpp"
#include "ellcert/simulate.hpp"

namespace {

using namespace ellcert;

constexpr int kExitCertified = 0;
constexpr int kExitRefuted = 1;
constexpr int kExitError = 2;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(path, "cannot open file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError(path, "cannot open file for writing");
  out << content;
  if (!out) throw ParseError(path, "write failed");
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::string var_name(std::size_t v, int n) {
  return v < static_cast<std::size_t>(n) ? "y" + std::to_string(v + 1)
                                         : "x" + std::to_string(v - n + 1);
}

void print_matrix(std::ostream& os, const Matrix& m, const std::string& indent) {
  for (std::size_t r = 0; r < m.rows(); ++r) {
    os << indent << "[";
    for (std::size_t c = 0; c < m.cols(); ++c) {
      os << (c ? "  " : " ") << fmt(m(r, c));
    }
    os << " ]\n";
  }
}

struct Paths {
  std::string input;
  std::string output;
  std::string cert;
  std::string q_file;
};

int cmd_gen(const Paths& paths) {
  const nlohmann::json doc = [&] {
    try {
      return nlohmann::json::parse(read_file(paths.input));
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(paths.input, e.what());
    }
  }();

  Matrix a;
  std::vector<double> box;
  if (doc.is_array()) {
    a = matrix_from_json(doc, "A");
  } else if (doc.is_object()) {
    a = matrix_from_json(require_field(doc, "A", "input"), "A");
    if (doc.contains("init_box")) {
      const nlohmann::json& b = doc["init_box"];
      if (!b.is_array()) throw ParseError("input.init_box", "expected an array");
      for (std::size_t k = 0; k < b.size(); ++k) {
        box.push_back(finite_number(b[k], "input.init_box[" + std::to_string(k) + "]"));
      }
    }
  } else {
    throw ParseError(paths.input, "expected a matrix or an object with field 'A'");
  }

  const Program p = canonical_program(a, std::move(box));
  const std::string text = serialize_program(p);
  if (paths.output.empty()) {
    std::cout << text;
  } else {
    write_file(paths.output, text);
    std::cerr << "wrote program with " << p.body.size() << " instructions to "
              << paths.output << "\n";
  }
  return kExitCertified;
}

int cmd_annotate(const Paths& paths, double safety_factor, double tol,
                 const std::string& format) {
  const Program p = parse_program(read_file(paths.input));

  AnnotatorOptions opts;
  opts.safety_factor = safety_factor;
  opts.tol = tol;
  if (!paths.q_file.empty()) {
    const nlohmann::json qdoc = [&] {
      try {
        return nlohmann::json::parse(read_file(paths.q_file));
      } catch (const nlohmann::json::exception& e) {
        throw ParseError(paths.q_file, e.what());
      }
    }();
    opts.q = matrix_from_json(qdoc.is_object() ? require_field(qdoc, "Q", "Q file") : qdoc, "Q");
  }

  const Certificate cert = annotate(p, opts);
  const double closure_margin = min_eigenvalue(cert.r_init - cert.loop_exit_shape());
  const bool certified = cert.closure_ok && cert.init_box_ok;

  const std::string text = serialize_certificate(cert);
  std::ostream& report_os = paths.output.empty() ? std::cerr : std::cout;
  if (!paths.output.empty()) write_file(paths.output, text);

  if (format == "json") {
    nlohmann::json rep;
    rep["alpha"] = cert.alpha;
    rep["sigma_max"] = cert.sigma_max;
    rep["closure_ok"] = cert.closure_ok;
    rep["init_box_ok"] = cert.init_box_ok;
    rep["closure_margin"] = closure_margin;
    rep["certified"] = certified;
    rep["points"] = cert.points.size();
    if (paths.output.empty()) {
      std::cout << text;
    } else {
      std::cout << rep.dump(2) << "\n";
    }
  } else {
    if (paths.output.empty()) std::cout << text;
    report_os << "system: n=" << cert.n << ", " << cert.points.size() << " instructions\n";
    report_os << "sigma_max      " << fmt(cert.sigma_max) << "\n";
    report_os << "alpha          " << fmt(cert.alpha) << "\n";
    report_os << "init box ok    " << (cert.init_box_ok ? "yes" : "NO") << "\n";
    report_os << "closure ok     " << (cert.closure_ok ? "yes" : "NO") << "\n";
    report_os << "closure margin " << fmt(closure_margin) << "\n";
    report_os << "loop-head invariant:\n";
    print_matrix(report_os, cert.r_init, "  ");
    report_os << "per-point variable bounds:\n";
    report_os << "  point";
    for (std::size_t v = 0; v < cert.r_init.rows(); ++v) {
      report_os << "\t" << var_name(v, cert.n);
    }
    report_os << "\n";
    for (const CertificatePoint& pt : cert.points) {
      report_os << "  " << pt.label;
      for (std::size_t v = 0; v < pt.shape.rows(); ++v) {
        report_os << "\t" << fmt(std::sqrt(std::max(pt.shape(v, v), 0.0)));
      }
      report_os << "\n";
    }
    report_os << "result: " << (certified ? "CERTIFIED" : "REFUTED") << "\n";
  }
  return certified ? kExitCertified : kExitRefuted;
}

int cmd_check(const Paths& paths, std::optional<double> tol, const std::string& format) {
  const Program p = parse_program(read_file(paths.input));
  const Certificate cert = parse_certificate(read_file(paths.cert));
  const Verdict verdict = check_certificate(p, cert, tol.value_or(cert.tol));

  if (format == "json") {
    nlohmann::json rep;
    rep["certified"] = verdict.certified;
    nlohmann::json fails = nlohmann::json::array();
    for (const CheckFailure& f : verdict.failures) {
      fails.push_back({{"point", f.point},
                       {"kind", failure_kind_name(f.kind)},
                       {"witness_min_eigenvalue", f.witness_min_eigenvalue}});
    }
    rep["failures"] = std::move(fails);
    std::cout << rep.dump(2) << "\n";
  } else {
    for (const CheckFailure& f : verdict.failures) {
      std::cout << "FAIL " << failure_kind_name(f.kind) << " at " << f.point
                << ": witness eigenvalue " << fmt(f.witness_min_eigenvalue) << "\n";
    }
    std::cout << "checked " << cert.points.size() << " points\n";
    std::cout << "verdict: "
              << (verdict.certified
                      ? "CERTIFIED"
                      : "REFUTED (" + std::to_string(verdict.failures.size()) + " failure(s))")
              << "\n";
  }
  return verdict.certified ? kExitCertified : kExitRefuted;
}

int cmd_bounds(const Paths& paths, const std::string& format) {
  const Certificate cert = parse_certificate(read_file(paths.input));

  std::vector<Ellipsoid> invariants;
  invariants.reserve(cert.points.size() + 1);
  invariants.emplace_back(cert.r_init, cert.tol);
  for (const CertificatePoint& pt : cert.points) invariants.emplace_back(pt.shape, cert.tol);

  const std::size_t dim = cert.r_init.rows();
  std::vector<double> bounds(dim, 0.0);
  for (const Ellipsoid& e : invariants) {
    for (std::size_t v = 0; v < dim; ++v) {
      bounds[v] = std::max(bounds[v], variable_bound(e, v));
    }
  }
  const double radius = bounding_ball(invariants);

  if (format == "json") {
    nlohmann::json rep;
    nlohmann::json vars = nlohmann::json::object();
    for (std::size_t v = 0; v < dim; ++v) vars[var_name(v, cert.n)] = bounds[v];
    rep["variable_bounds"] = std::move(vars);
    rep["ball_radius"] = radius;
    std::cout << rep.dump(2) << "\n";
  } else {
    std::cout << "variable bounds (max over all program points):\n";
    for (std::size_t v = 0; v < dim; ++v) {
      std::cout << "  " << var_name(v, cert.n) << "\t" << fmt(bounds[v]) << "\n";
    }
    std::cout << "bounding ball radius: " << fmt(radius) << "\n";
  }
  return kExitCertified;
}

int cmd_simulate(const Paths& paths, int trials, int cycles, std::uint64_t seed,
                 const std::string& format) {
  const Program p = parse_program(read_file(paths.input));
  const Certificate cert = parse_certificate(read_file(paths.cert));
  const SoundnessReport rep = monte_carlo_soundness(p, cert, trials, cycles, seed);

  if (format == "json") {
    nlohmann::json out;
    out["samples"] = rep.samples;
    out["checks"] = rep.checks;
    out["violations"] = rep.violations;
    out["empirical_max"] = rep.empirical_max;
    if (rep.first) {
      out["first_violation"] = {{"trial", rep.first->trial},
                                {"cycle", rep.first->cycle},
                                {"point", rep.first->point},
                                {"state", rep.first->state}};
    }
    std::cout << out.dump(2) << "\n";
  } else {
    std::cout << "samples    " << rep.samples << "\n";
    std::cout << "checks     " << rep.checks << "\n";
    std::cout << "violations " << rep.violations << "\n";
    if (rep.first) {
      std::cout << "first violation: trial " << rep.first->trial << ", cycle "
                << rep.first->cycle << ", point " << rep.first->point << ", state [";
      for (std::size_t v = 0; v < rep.first->state.size(); ++v) {
        std::cout << (v ? " " : "") << fmt(rep.first->state[v]);
      }
      std::cout << "]\n";
    }
    std::cout << "result: " << (rep.violations == 0 ? "SOUND (no violations observed)"
                                                    : "VIOLATIONS FOUND")
              << "\n";
  }
  return rep.violations == 0 ? kExitCertified : kExitRefuted;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ellipsoidal invariant certificates for linear control-loop code"};
  app.require_subcommand(1);

  Paths paths;
  double safety_factor = 2.0;
  double tol = kPsdTol;
  std::optional<double> check_tol;
  int trials = 10000;
  int cycles = 50;
  std::uint64_t seed = 1;
  std::string format = "human";

  auto add_format = [&format](CLI::App* cmd) {
    cmd->add_option("--format", format, "report format: human or json")
        ->check(CLI::IsMember({"human", "json"}));
  };

  CLI::App* gen = app.add_subcommand("gen", "generate the canonical program for a state matrix");
  gen->add_option("--input", paths.input, "JSON file with the A matrix (optionally init_box)")
      ->required();
  gen->add_option("--output", paths.output, "program file to write (stdout if omitted)");

  CLI::App* annotate_cmd =
      app.add_subcommand("annotate", "annotate a program with ellipsoidal invariants");
  annotate_cmd->add_option("--input", paths.input, "program file")->required();
  annotate_cmd->add_option("--output", paths.output, "certificate file to write");
  annotate_cmd->add_option("--safety-factor", safety_factor,
                           "scaling on alpha = safety * n * sigma_max (>= 1)");
  annotate_cmd->add_option("--tol", tol, "relative PSD tolerance");
  annotate_cmd->add_option("--q-file", paths.q_file, "JSON file with a custom Lyapunov Q");
  add_format(annotate_cmd);

  CLI::App* check = app.add_subcommand("check", "independently verify a certificate");
  check->add_option("--input", paths.input, "program file")->required();
  check->add_option("--cert", paths.cert, "certificate file")->required();
  check->add_option("--tol", check_tol,
                    "relative PSD tolerance (certificate's own tol if omitted)");
  add_format(check);

  CLI::App* bounds = app.add_subcommand("bounds", "per-variable bounds from a certificate");
  bounds->add_option("--input", paths.input, "certificate file")->required();
  add_format(bounds);

  CLI::App* simulate_cmd =
      app.add_subcommand("simulate", "Monte Carlo soundness check of a certificate");
  simulate_cmd->add_option("--input", paths.input, "program file")->required();
  simulate_cmd->add_option("--cert", paths.cert, "certificate file")->required();
  simulate_cmd->add_option("--trials", trials, "number of uniform initial states");
  simulate_cmd->add_option("--cycles", cycles, "loop iterations per trial");
  simulate_cmd->add_option("--seed", seed, "RNG seed");
  add_format(simulate_cmd);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitError;
  }

  try {
    if (gen->parsed()) return cmd_gen(paths);
    if (annotate_cmd->parsed()) return cmd_annotate(paths, safety_factor, tol, format);
    if (check->parsed()) return cmd_check(paths, check_tol, format);
    if (bounds->parsed()) return cmd_bounds(paths, format);
    if (simulate_cmd->parsed()) return cmd_simulate(paths, trials, cycles, seed, format);
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  } catch (const UnstableSystemError& e) {
    std::cerr << "error: unstable system: " << e.what() << "\n";
    return kExitError;
  } catch (const InvalidInputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  } catch (const NumericalFailureError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
  return kExitError;
}
