#include "ellcert/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <utility>

#include "ellcert/ellipsoid.hpp"

namespace ellcert {

namespace {

struct MachineState {
  Vector y;
  Vector x;

  Vector joint() const {
    Vector z(y);
    z.insert(z.end(), x.begin(), x.end());
    return z;
  }
};

void execute(const Instruction& ins, MachineState& s) {
  switch (ins.op) {
    case Opcode::kCopy:
      s.y[ins.i - 1] = s.x[ins.i - 1];
      break;
    case Opcode::kReset:
      s.x[ins.i - 1] = 0.0;
      break;
    case Opcode::kMac:
      s.x[ins.i - 1] += ins.coeff * s.y[ins.j - 1];
      break;
  }
}

// Corner enumeration is exponential in n; beyond this cap only sampled
// sign patterns are used.
constexpr int kCornerEnumLimit = 12;

std::vector<Vector> initial_states(const Program& p, int trials, std::mt19937_64& rng) {
  const int n = p.n;
  std::vector<Vector> starts;

  if (n <= kCornerEnumLimit) {
    const std::size_t corners = std::size_t{1} << n;
    for (std::size_t mask = 0; mask < corners; ++mask) {
      Vector x(n);
      for (int i = 0; i < n; ++i) {
        x[i] = (mask >> i & 1) ? p.init_box[i] : -p.init_box[i];
      }
      starts.push_back(std::move(x));
    }
  } else {
    std::bernoulli_distribution sign(0.5);
    for (int s = 0; s < 4096; ++s) {
      Vector x(n);
      for (int i = 0; i < n; ++i) x[i] = sign(rng) ? p.init_box[i] : -p.init_box[i];
      starts.push_back(std::move(x));
    }
  }

  for (int i = 0; i < n; ++i) {
    for (double s : {1.0, -1.0}) {
      Vector x(n, 0.0);
      x[i] = s * p.init_box[i];
      starts.push_back(std::move(x));
    }
  }

  for (int t = 0; t < trials; ++t) {
    Vector x(n);
    for (int i = 0; i < n; ++i) {
      std::uniform_real_distribution<double> u(-p.init_box[i], p.init_box[i]);
      x[i] = p.init_box[i] == 0.0 ? 0.0 : u(rng);
    }
    starts.push_back(std::move(x));
  }
  return starts;
}

}  // namespace

Trace run(const Program& p, const Vector& x0, int cycles) {
  validate_program(p);
  if (x0.size() != static_cast<std::size_t>(p.n)) {
    throw InvalidInputError("run: initial state must have n entries");
  }
  for (int i = 0; i < p.n; ++i) {
    if (std::abs(x0[i]) > p.init_box[i]) {
      throw InvalidInputError("run: x0[" + std::to_string(i + 1) +
                              "] lies outside the init box");
    }
  }
  if (cycles < 0) throw InvalidInputError("run: cycles must be non-negative");

  MachineState s{Vector(p.n, 0.0), x0};
  Trace trace;
  trace.states.reserve(static_cast<std::size_t>(cycles) * p.body.size() + 1);
  trace.states.push_back(s.joint());
  for (int c = 0; c < cycles; ++c) {
    for (const Instruction& ins : p.body) {
      execute(ins, s);
      trace.states.push_back(s.joint());
    }
  }
  return trace;
}

SoundnessReport monte_carlo_soundness(const Program& p, const Certificate& cert,
                                      int trials, int cycles, std::uint64_t seed,
                                      double tol) {
  validate_program(p);
  if (cert.points.size() != p.body.size()) {
    throw InvalidInputError("monte_carlo_soundness: certificate/program point count mismatch");
  }
  const std::size_t dim = static_cast<std::size_t>(p.state_dim());
  if (!cert.r_init.is_square() || cert.r_init.rows() != dim) {
    throw InvalidInputError("monte_carlo_soundness: r_init must be 2n x 2n");
  }
  if (cycles < 0) throw InvalidInputError("monte_carlo_soundness: cycles must be non-negative");

  SoundnessReport report;
  report.empirical_max.assign(dim, 0.0);
  if (trials <= 0) return report;

  std::mt19937_64 rng(seed);
  const std::vector<Vector> starts = initial_states(p, trials, rng);
  report.samples = static_cast<long long>(starts.size());

  MachineState s;
  Vector joint(dim);

  for (std::size_t t = 0; t < starts.size(); ++t) {
    s.y.assign(p.n, 0.0);
    s.x = starts[t];

    auto observe = [&](const Matrix& shape, const std::string& label, int cycle) {
      for (int i = 0; i < p.n; ++i) {
        joint[i] = s.y[i];
        joint[p.n + i] = s.x[i];
        report.empirical_max[i] = std::max(report.empirical_max[i], std::abs(s.y[i]));
        report.empirical_max[p.n + i] =
            std::max(report.empirical_max[p.n + i], std::abs(s.x[i]));
      }
      ++report.checks;
      if (!shape_member(shape, joint, tol)) {
        ++report.violations;
        if (!report.first) {
          report.first = Violation{static_cast<int>(t), cycle, label, joint};
        }
      }
    };

    for (int c = 0; c < cycles; ++c) {
      observe(cert.r_init, "r_init", c);
      for (std::size_t k = 0; k < p.body.size(); ++k) {
        execute(p.body[k], s);
        observe(cert.points[k].shape, cert.points[k].label, c);
      }
    }
    observe(cert.r_init, "r_init", cycles);
  }
  return report;
}

}  // namespace ellcert
