#pragma once

// Prior families with product structure on finite trees: per tree node a
// finite list of generator one-step measures; the modeled family is every
// product over nodes of convex combinations of that node's generators.
// Provides the quasi-sure support, the scenario-to-prior bridge, polar-set
// tests, and the equivalence checkers for the no-arbitrage theorems.

#include <optional>
#include <string>
#include <vector>

#include "rfm/efficient_set.hpp"
#include "rfm/market.hpp"

namespace rfm {

struct PriorError : std::runtime_error {
  std::string code;
  PriorError(std::string c, const std::string& msg)
      : std::runtime_error(c + ": " + msg), code(std::move(c)) {}
};

struct PriorSet {
  // gens[t][node][g]: one-step weights aligned with
  // successors(market, partition node, t); each >= 0 summing to one.
  std::vector<std::vector<std::vector<RatVec>>> gens;
};

// Checks shapes, nonemptiness, nonnegativity and normalization.
// Throws PriorError("InvalidPriors", ...).
void validate_priors(const Market& m, const LevelSetPartition& part,
                     const PriorSet& pr);

struct QuasiSureSupport {
  // supported[t][node]: indices of successor groups charged by some generator
  std::vector<std::vector<std::vector<std::size_t>>> supported;
  PathSet omega;  // paths whose every transition is supported
};

QuasiSureSupport quasi_sure_support(const Market& m,
                                    const LevelSetPartition& part,
                                    const PriorSet& pr);

// Point-mass generators on every successor group that meets `scope`
// (full-support point masses at nodes disjoint from the scope, which are
// unreachable under the induced family). Round trip:
// quasi_sure_support(priors_from_scenarios(scope)).omega == scope.
PriorSet priors_from_scenarios(const Market& m, const LevelSetPartition& part,
                               const PathSet& scope);

// The uniform-mixture product measure: node-wise average of the generators,
// multiplied along the tree. Its support is exactly the quasi-sure support.
Measure full_support_measure(const Market& m, const LevelSetPartition& part,
                             const PriorSet& pr);

// A set is polar iff every prior gives it probability zero; on finite trees,
// iff it misses the support of the full-support mixture.
bool is_polar(const Market& m, const LevelSetPartition& part,
              const PriorSet& pr, const PathSet& subset);

// Enumerates the product measures built from one generator choice per node,
// deduplicated by support. Throws PriorError("TooManyGeneratorProducts")
// past 4096 products.
std::vector<Measure> generator_products(const Market& m,
                                        const LevelSetPartition& part,
                                        const PriorSet& pr);

struct FtapStatement {
  std::string label;
  bool holds = false;
  std::string note;
};

struct FtapReport {
  std::vector<FtapStatement> statements;
  bool all_equivalent = false;  // all statements share one truth value
  std::optional<Measure> witness_measure;
  std::optional<Strategy> witness_strategy;
};

// Three-way equivalence: (1) the core of the quasi-sure support carries no
// one-point arbitrage and its complement in the support is polar; (2) every
// generator product is dominated by a calibrated martingale measure on the
// support; (3) no quasi-sure arbitrage.
FtapReport ftap_quasi_sure(const Market& m, const LevelSetPartition& part,
                           const PriorSet& pr);

// Five-way equivalence on the quasi-sure support Omega: (1) a calibrated
// martingale measure dominated by the full-support mixture exists; (2) some
// generator product charges the efficient core; (3) a calibrated martingale
// measure on Omega exists; (4) the efficient core is nonempty; (5) no strong
// arbitrage on Omega.
FtapReport robust_dmw(const Market& m, const LevelSetPartition& part,
                      const PriorSet& pr);

// The class-restricted variant: removes from the support the part of the
// efficient core covered by class sets that meet it only polarly, then
// evaluates the five statements on the reduced scope.
FtapReport class_s_equivalence(const Market& m, const LevelSetPartition& part,
                               const PriorSet& pr,
                               const std::vector<PathSet>& class_sets);

}  // namespace rfm
