#pragma once

// Program representation for matrix-vector update loops. A program owns an
// n x n state matrix A and a fully unrolled loop body built from three
// instruction kinds over the joint state vector (y_1..y_n, x_1..x_n):
//
//   copy   y[i] := x[i]
//   reset  x[i] := 0
//   mac    x[i] := x[i] + a * y[j]
//
// The joint layout (y first, then x, dimension 2n) is fixed project-wide;
// every instruction matrix, loop map, and invariant uses it.

#include <cstddef>
#include <string>
#include <vector>

#include "ellcert/matrixkit.hpp"

namespace ellcert {

enum class Opcode { kCopy, kReset, kMac };

struct Instruction {
  Opcode op = Opcode::kCopy;
  int i = 1;          // 1-based target index
  int j = 1;          // 1-based source index (mac only)
  double coeff = 0.0; // mac coefficient

  static Instruction copy_to_y(int i);
  static Instruction reset_x(int i);
  static Instruction mac(int i, int j, double a);
};

bool operator==(const Instruction& a, const Instruction& b);

struct Program {
  int n = 0;
  Matrix a;                       // n x n state update matrix
  std::vector<double> init_box;   // |x_i| bounds at entry; y starts at zero
  std::vector<Instruction> body;  // one loop iteration, fully unrolled

  int state_dim() const { return 2 * n; }
};

bool operator==(const Program& a, const Program& b);

// Throws InvalidInputError unless dimensions, indices, bounds, and
// coefficients are all consistent and finite.
void validate_program(const Program& p);

// The standard loop body for x <- A x: for each i, copy then reset, then all
// multiply-accumulates in row-major order. init_box defaults to all ones.
Program canonical_program(const Matrix& a, std::vector<double> init_box = {});

// The 2n x 2n linear map of a single instruction on the joint state.
Matrix instruction_matrix(const Instruction& ins, int n);

// Right-to-left product of the body's instruction matrices (last instruction
// leftmost). Identity for an empty body; equals [[0, I], [0, A]] for a
// canonical program.
Matrix loop_matrix(const Program& p);

// Stable program-point label for the instruction at 1-based position k,
// e.g. "#5:mac(1,2)".
std::string instruction_label(const Instruction& ins, std::size_t k);

// JSON document round-trip; parse(serialize(p)) == p exactly.
std::string serialize_program(const Program& p);
Program parse_program(const std::string& text);

}  // namespace ellcert
