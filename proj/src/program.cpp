#include "ellcert/program.hpp"

#include <cmath>
#include <utility>

#include "ellcert/json_io.hpp"

namespace ellcert {

namespace {

const char* opcode_name(Opcode op) {
  switch (op) {
    case Opcode::kCopy: return "copy";
    case Opcode::kReset: return "reset";
    case Opcode::kMac: return "mac";
  }
  return "?";
}

void check_index(int idx, int n, const std::string& what) {
  if (idx < 1 || idx > n) {
    throw InvalidInputError(what + " index " + std::to_string(idx) +
                            " out of range for n=" + std::to_string(n));
  }
}

}  // namespace

Instruction Instruction::copy_to_y(int i) { return Instruction{Opcode::kCopy, i, 1, 0.0}; }

Instruction Instruction::reset_x(int i) { return Instruction{Opcode::kReset, i, 1, 0.0}; }

Instruction Instruction::mac(int i, int j, double a) {
  if (!std::isfinite(a)) throw InvalidInputError("mac coefficient must be finite");
  return Instruction{Opcode::kMac, i, j, a};
}

bool operator==(const Instruction& a, const Instruction& b) {
  if (a.op != b.op || a.i != b.i) return false;
  if (a.op == Opcode::kMac) return a.j == b.j && a.coeff == b.coeff;
  return true;
}

bool operator==(const Program& a, const Program& b) {
  return a.n == b.n && a.a == b.a && a.init_box == b.init_box && a.body == b.body;
}

void validate_program(const Program& p) {
  if (p.n < 1) throw InvalidInputError("program: n must be at least 1");
  if (!p.a.is_square() || p.a.rows() != static_cast<std::size_t>(p.n)) {
    throw InvalidInputError("program: A must be n x n");
  }
  if (p.init_box.size() != static_cast<std::size_t>(p.n)) {
    throw InvalidInputError("program: init_box must have n entries");
  }
  for (double b : p.init_box) {
    if (!std::isfinite(b) || b < 0.0) {
      throw InvalidInputError("program: init_box bounds must be finite and non-negative");
    }
  }
  for (const Instruction& ins : p.body) {
    check_index(ins.i, p.n, "program: instruction");
    if (ins.op == Opcode::kMac) {
      check_index(ins.j, p.n, "program: instruction");
      if (!std::isfinite(ins.coeff)) {
        throw InvalidInputError("program: mac coefficient must be finite");
      }
    }
  }
}

Program canonical_program(const Matrix& a, std::vector<double> init_box) {
  if (!a.is_square()) throw InvalidInputError("canonical_program: A must be square");
  const int n = static_cast<int>(a.rows());
  Program p;
  p.n = n;
  p.a = a;
  p.init_box = init_box.empty() ? std::vector<double>(n, 1.0) : std::move(init_box);
  p.body.reserve(static_cast<std::size_t>(2 * n + n * n));
  for (int i = 1; i <= n; ++i) {
    p.body.push_back(Instruction::copy_to_y(i));
    p.body.push_back(Instruction::reset_x(i));
  }
  for (int i = 1; i <= n; ++i) {
    for (int j = 1; j <= n; ++j) {
      p.body.push_back(Instruction::mac(i, j, a(i - 1, j - 1)));
    }
  }
  validate_program(p);
  return p;
}

Matrix instruction_matrix(const Instruction& ins, int n) {
  if (n < 1) throw InvalidInputError("instruction_matrix: n must be at least 1");
  check_index(ins.i, n, "instruction_matrix");
  Matrix m = Matrix::identity(static_cast<std::size_t>(2 * n));
  const std::size_t yi = static_cast<std::size_t>(ins.i - 1);
  const std::size_t xi = static_cast<std::size_t>(n + ins.i - 1);
  switch (ins.op) {
    case Opcode::kCopy:
      m(yi, yi) = 0.0;
      m(yi, xi) = 1.0;
      break;
    case Opcode::kReset:
      m(xi, xi) = 0.0;
      break;
    case Opcode::kMac: {
      check_index(ins.j, n, "instruction_matrix");
      m(xi, static_cast<std::size_t>(ins.j - 1)) = ins.coeff;
      break;
    }
  }
  return m;
}

Matrix loop_matrix(const Program& p) {
  validate_program(p);
  Matrix m = Matrix::identity(static_cast<std::size_t>(p.state_dim()));
  for (const Instruction& ins : p.body) {
    m = instruction_matrix(ins, p.n) * m;
  }
  return m;
}

std::string instruction_label(const Instruction& ins, std::size_t k) {
  std::string s = "#" + std::to_string(k) + ":" + opcode_name(ins.op) + "(" +
                  std::to_string(ins.i);
  if (ins.op == Opcode::kMac) s += "," + std::to_string(ins.j);
  s += ")";
  return s;
}

std::string serialize_program(const Program& p) {
  validate_program(p);
  nlohmann::json j;
  j["n"] = p.n;
  j["A"] = matrix_to_json(p.a);
  j["init_box"] = p.init_box;
  nlohmann::json body = nlohmann::json::array();
  for (const Instruction& ins : p.body) {
    nlohmann::json rec;
    rec["op"] = opcode_name(ins.op);
    rec["i"] = ins.i;
    if (ins.op == Opcode::kMac) {
      rec["j"] = ins.j;
      rec["a"] = ins.coeff;
    }
    body.push_back(std::move(rec));
  }
  j["body"] = std::move(body);
  return j.dump(2) + "\n";
}

Program parse_program(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("program", e.what());
  }
  if (!j.is_object()) throw ParseError("program", "top-level value must be an object");

  Program p;
  p.n = int_field(j, "n", "program");
  if (p.n < 1) throw ParseError("program.n", "n must be at least 1");

  p.a = matrix_from_json(require_field(j, "A", "program"), "program.A");
  if (!p.a.is_square() || p.a.rows() != static_cast<std::size_t>(p.n)) {
    throw ParseError("program.A", "A must be n x n");
  }

  if (j.contains("init_box")) {
    const nlohmann::json& box = j["init_box"];
    if (!box.is_array() || box.size() != static_cast<std::size_t>(p.n)) {
      throw ParseError("program.init_box", "expected an array of n bounds");
    }
    for (std::size_t k = 0; k < box.size(); ++k) {
      const std::string where = "program.init_box[" + std::to_string(k) + "]";
      const double b = finite_number(box[k], where);
      if (b < 0.0) throw ParseError(where, "bound must be non-negative");
      p.init_box.push_back(b);
    }
  } else {
    p.init_box.assign(static_cast<std::size_t>(p.n), 1.0);
  }

  const nlohmann::json& body = require_field(j, "body", "program");
  if (!body.is_array()) throw ParseError("program.body", "expected an array");
  for (std::size_t k = 0; k < body.size(); ++k) {
    const std::string where = "program.body[" + std::to_string(k) + "]";
    const nlohmann::json& rec = body[k];
    if (!rec.is_object()) throw ParseError(where, "expected an instruction object");
    const nlohmann::json& opj = require_field(rec, "op", where);
    if (!opj.is_string()) throw ParseError(where + ".op", "expected a string");
    const std::string op = opj.get<std::string>();

    const int i = int_field(rec, "i", where);
    if (i < 1 || i > p.n) {
      throw ParseError(where + ".i",
                       "index " + std::to_string(i) + " out of range for n=" + std::to_string(p.n));
    }
    if (op == "copy") {
      p.body.push_back(Instruction::copy_to_y(i));
    } else if (op == "reset") {
      p.body.push_back(Instruction::reset_x(i));
    } else if (op == "mac") {
      const int jj = int_field(rec, "j", where);
      if (jj < 1 || jj > p.n) {
        throw ParseError(where + ".j", "index " + std::to_string(jj) +
                                           " out of range for n=" + std::to_string(p.n));
      }
      const double a = finite_number(require_field(rec, "a", where), where + ".a");
      p.body.push_back(Instruction::mac(i, jj, a));
    } else {
      throw ParseError(where + ".op", "unknown opcode '" + op + "'");
    }
  }

  validate_program(p);
  return p;
}

}  // namespace ellcert
