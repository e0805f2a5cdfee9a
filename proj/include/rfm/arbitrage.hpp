#pragma once

// Arbitrage detectors on finite path markets. Every notion reduces to LP
// feasibility after scaling strict inequalities to ">= 1" (strategy sets are
// cones and path sets finite), so each verdict carries either a strategy
// witness that re-verifies by arithmetic or LP infeasibility certificates.

#include <optional>
#include <string>
#include <vector>

#include "rfm/lp.hpp"
#include "rfm/market.hpp"
#include "rfm/priors.hpp"

namespace rfm {

struct ArbitrageError : std::runtime_error {
  std::string code;
  ArbitrageError(std::string c, const std::string& msg)
      : std::runtime_error(c + ": " + msg), code(std::move(c)) {}
};

struct ArbitrageVerdict {
  std::string notion;  // "1pA", "OA", "SA", "USA", "A(P)", "WA", "CA",
                       // "IntA", "locA", "ClassS"
  bool present = false;
  std::optional<Strategy> witness;
  PathSet witness_strict;  // paths where the witness payoff is positive
  std::optional<Measure> witness_generator;  // prior charging the strict set
  std::vector<int> sign_pattern;             // IntA only
  std::vector<LpOutcome> absence_certificates;
  std::string note;
};

// Uniform payoff of at least one on the whole scope.
ArbitrageVerdict detect_usa(const Market& m, const LevelSetPartition& part,
                            const PathSet& scope);

// Strictly positive payoff everywhere; on a finite scope this coincides
// with the uniform notion (delegates and records the equivalence).
ArbitrageVerdict detect_sa(const Market& m, const LevelSetPartition& part,
                           const PathSet& scope);

// Nonnegative on the scope, strictly positive somewhere.
ArbitrageVerdict detect_1pa(const Market& m, const LevelSetPartition& part,
                            const PathSet& scope);

// Strict positivity on an open set; every nonempty set is open in the
// discrete topology, so this is the one-point notion retagged.
ArbitrageVerdict detect_oa(const Market& m, const LevelSetPartition& part,
                           const PathSet& scope);

// Nonnegative on the scope, strictly positive on (at least) a designated
// target set Gamma, for each Gamma in the class.
struct ClassSVerdict {
  std::vector<ArbitrageVerdict> per_gamma;
  bool any_present = false;
};
ClassSVerdict detect_class_s(const Market& m, const LevelSetPartition& part,
                             const PathSet& scope,
                             const std::vector<PathSet>& class_sets);

// Nonnegative outside a polar set, strictly positive with positive
// probability under some prior.
ArbitrageVerdict detect_quasi_sure(const Market& m,
                                   const LevelSetPartition& part,
                                   const PriorSet& pr);

struct WeakClassicalReport {
  ArbitrageVerdict weak;       // arbitrage under some generator product
  ArbitrageVerdict classical;  // arbitrage under every generator product
  std::vector<std::pair<Measure, ArbitrageVerdict>> per_measure;
};
WeakClassicalReport detect_weak_and_classical(const Market& m,
                                              const LevelSetPartition& part,
                                              const PriorSet& pr);

// One-step arbitrage at a single node over its prior-supported successors.
ArbitrageVerdict detect_local(const Market& m, const LevelSetPartition& part,
                              const PriorSet& pr, std::size_t t,
                              std::size_t node);

// Arbitrage robust to shifting each option payoff by sign(h) * epsilon for
// every small epsilon; one sign pattern per witness. Decided exactly: with
// the pattern fixed the shift adds epsilon times a constant g >= 0, so one
// strategy survives every small epsilon iff the unshifted system plus either
// a strict-somewhere row or a g >= 1 row is feasible. The probe schedule
// {1, 1/2, ..., 1/32} is still reported for diagnostics; a note explains any
// case where the schedule is feasible throughout yet the verdict is absent.
struct IntAVerdict {
  ArbitrageVerdict verdict;
  std::vector<std::pair<Rat, bool>> schedule;  // (epsilon, feasible)
};
IntAVerdict detect_int_arbitrage(const Market& m, const LevelSetPartition& part,
                                 const PriorSet& pr);

// Cross-checks the implication lattice between the notions on one instance.
struct RelationsReport {
  bool ok = true;
  std::vector<std::string> violations;
  std::vector<std::pair<std::string, bool>> verdicts;
};
RelationsReport lemma_relations_check(const Market& m,
                                      const LevelSetPartition& part,
                                      const PriorSet& pr,
                                      const std::vector<PathSet>& class_sets);

}  // namespace rfm
