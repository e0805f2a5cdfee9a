#pragma once

// Exact rational linear programming with verifiable certificates.
//
// The solver is a textbook two-phase primal simplex with Bland's rule over
// exact rationals: deterministic, terminating, tolerance-free. Every outcome
// carries a proof object that check_certificate() can validate by pure
// arithmetic, without re-solving:
//
//   Optimal    -> primal point + extended dual multipliers, equal objectives.
//   Infeasible -> extended multiplier vector combining the constraints into
//                 an impossible inequality (a Farkas certificate).
//   Unbounded  -> a feasible point (in `primal`) plus an improving ray
//                 (in `certificate`).
//
// Extended multipliers are indexed by
//   [constraint rows 0..m-1]
//   ++ [finite lower bounds, in variable order]
//   ++ [finite upper bounds, in variable order]
// where a finite lower bound is read as the row x_j >= lo_j and a finite
// upper bound as x_j <= hi_j. Sign conventions (minimization):
//   multiplier >= 0 on '>=' rows, <= 0 on '<=' rows, free on '=' rows,
// so that sum(lambda_i * row_i) is a valid '>=' aggregate. Optimality then
// means sum(lambda_i * a_i) == c and sum(lambda_i * b_i) == value;
// infeasibility means sum(lambda_i * a_i) == 0 and sum(lambda_i * b_i) > 0.
// For maximization the conventions flip ('<=' aggregate, value is an upper
// bound); check_certificate handles both senses.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rfm/rat.hpp"

namespace rfm {

enum class Sense : std::uint8_t { Min, Max };
enum class Rel : std::uint8_t { Le, Eq, Ge };

struct LpRow {
  RatVec a;
  Rel rel = Rel::Le;
  Rat b;
};

struct LinearProgram {
  Sense sense = Sense::Min;
  RatVec c;                               // objective, defines variable count
  std::vector<LpRow> rows;
  std::vector<std::optional<Rat>> lo;     // empty vector => all unbounded below
  std::vector<std::optional<Rat>> hi;     // empty vector => all unbounded above

  std::size_t num_vars() const { return c.size(); }

  // Convenience builders.
  static LinearProgram minimize(RatVec c);
  static LinearProgram maximize(RatVec c);
  LinearProgram& add(RatVec a, Rel rel, Rat b);
  LinearProgram& set_lower(std::size_t j, Rat v);
  LinearProgram& set_upper(std::size_t j, Rat v);
  LinearProgram& nonnegative();           // lower bound 0 on every variable
};

enum class LpStatus : std::uint8_t { Optimal, Infeasible, Unbounded };

struct LpOutcome {
  LpStatus status = LpStatus::Infeasible;
  std::optional<Rat> value;          // Optimal only, in the original sense
  std::optional<RatVec> primal;      // Optimal: solution; Unbounded: feasible point
  std::optional<RatVec> dual;        // Optimal: extended multipliers
  std::optional<RatVec> certificate; // Infeasible: extended Farkas multipliers;
                                     // Unbounded: improving ray over variables
};

struct CheckReport {
  bool pass = true;
  std::vector<std::string> failures;  // each names the violated row/sign/identity

  void fail(std::string what) {
    pass = false;
    failures.push_back(std::move(what));
  }
};

struct MalformedProgram : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Solves exactly. Throws MalformedProgram on width mismatches.
LpOutcome solve(const LinearProgram& lp);

// Validates an outcome against its program by pure arithmetic.
CheckReport check_certificate(const LinearProgram& lp, const LpOutcome& out);

// solve() followed by a mandatory check_certificate() pass; throws
// std::logic_error if the self-check fails (it never should). Keeps a global
// tally so test suites can assert that 100% of solver outputs were verified.
LpOutcome solve_checked(const LinearProgram& lp);

struct SolveStats {
  std::uint64_t solves = 0;
  std::uint64_t checks_passed = 0;
};
SolveStats solve_stats();
void reset_solve_stats();

}  // namespace rfm
