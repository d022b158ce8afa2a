#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "apsim/cam_array.hpp"

namespace apsim {

/// Ordered compare/write passes realizing one bitwise operation over a group
/// of named roles (columns in horizontal mode, rows in vertical mode).
struct LutProgram {
  std::string name;
  std::vector<std::string> roles;
  std::vector<LutPass> passes;

  friend bool operator==(const LutProgram&, const LutProgram&) = default;
};

// In-place full adder, roles (C, A, B): B <- A + B + C, C <- carry out.
// Four state-changing passes ordered so no pass re-matches an earlier result.
const LutProgram& add_lut();

// Add guarded by a multiplier bit, roles (Bj, C, A, P): P += A when Bj = 1.
const LutProgram& guarded_add_lut();

// ReLU clear pass, roles (A, F): a bit is cleared when the sign flag is set.
const LutProgram& relu_lut();

// In-place maximum, roles (A, B, F1, F2), applied MSB first:
// F1F2 = 00 undecided, 01 A is larger (B takes A's bits), 11 B is larger.
const LutProgram& max_lut();

/// Text form, e.g.
///   lut add
///   roles C A B
///   pass 011 1x0
/// Each pass line lists the match pattern then the write pattern over the
/// roles; 'x' marks a role that is not searched / not written.
std::string to_text(const LutProgram& program);
LutProgram parse_lut(std::string_view text);

/// Full truth table of a program: every role state and the state after all
/// passes run in order. Used to diff against published tables.
struct LutRow {
  std::string before;
  std::string after;
  std::string pass;  // "1st", "2nd", ... or "NC"
};
std::vector<LutRow> truth_table(const LutProgram& program);

}  // namespace apsim
