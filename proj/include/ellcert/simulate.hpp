#pragma once

// Concrete interpreter for programs plus a Monte Carlo soundness oracle:
// it runs real executions and checks every visited state against the
// certificate's invariant at the matching program point.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ellcert/certificate.hpp"
#include "ellcert/program.hpp"

namespace ellcert {

struct Trace {
  // Joint (y, x) state before any instruction, then after each instruction;
  // length = cycles * body size + 1.
  std::vector<Vector> states;
};

// Executes each instruction by its assignment semantics (not by matrix
// multiplication). x0 must lie in the init box; y starts at zero.
Trace run(const Program& p, const Vector& x0, int cycles);

struct Violation {
  int trial = 0;
  int cycle = 0;
  std::string point;
  Vector state;
};

struct SoundnessReport {
  long long samples = 0;     // initial states exercised
  long long checks = 0;      // membership tests performed
  long long violations = 0;
  std::optional<Violation> first;
  Vector empirical_max;      // per joint variable, max |value| over all visited states
};

// Samples `trials` uniform initial states (plus all box corners and axis
// boundary points, the worst cases for the ball argument), runs `cycles`
// loop iterations each, and tests membership at the loop head and after
// every instruction. Deterministic for a fixed seed. trials <= 0 yields an
// empty report. Works on refuted or tampered certificates as well; the
// report is informative either way.
SoundnessReport monte_carlo_soundness(const Program& p, const Certificate& cert,
                                      int trials, int cycles, std::uint64_t seed,
                                      double tol = 1e-7);

}  // namespace ellcert
