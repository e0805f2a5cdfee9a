#pragma once

// The efficient scenario set: the largest subset of a scope supported by
// calibrated martingale measures. Computed two independent ways — a per-path
// measure-existence LP (the oracle) and the separator-driven removal
// iteration plus static-direction peeling (the scheme) — which provably
// agree; verify_scheme() asserts the agreement.

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "rfm/lp.hpp"
#include "rfm/market.hpp"

namespace rfm {

struct EfficientSet {
  PathSet retained;
  PathSet removed;
  std::map<std::size_t, std::string> removal_reason;  // per removed path
  // Per retained path: a calibrated martingale measure charging it,
  // supported inside the retained set.
  std::map<std::size_t, Measure> witness;
  std::string method;  // "oracle" or "scheme"
};

// Retains exactly the paths p for which some nonnegative weighting of the
// scope with mu_p >= 1 has zero expected increment at every node and zero
// expectation for every option.
EfficientSet omega_star_oracle(const Market& m, const LevelSetPartition& part,
                               const PathSet& scope);

// A calibrated martingale measure supported inside `carrier` charging every
// path of `target` (weight >= 1 before normalization), or nullopt.
std::optional<Measure> calibrated_measure_charging(const Market& m,
                                                   const LevelSetPartition& part,
                                                   const PathSet& carrier,
                                                   const PathSet& target);

// Same, but only requiring positive total mass on `target`.
std::optional<Measure> calibrated_measure_touching(const Market& m,
                                                    const LevelSetPartition& part,
                                                    const PathSet& carrier,
                                                    const PathSet& target);

// A hedge direction xi weakly positive against all successor increments and
// strictly positive on the maximal achievable subset of them.
struct Separator {
  RatVec xi;
  std::vector<std::size_t> strict;  // indices into the successor-group list
  std::vector<std::size_t> null;    // complement
};

// Computes the separator for one node's successor groups. The strict set is
// maximal: a successor group joins it iff some feasible direction is
// strictly positive on it, and the sum-of-slacks optimum achieves all of
// them simultaneously (the feasible directions form a cone, so separators
// add). Empty strict set iff zero lies in the relative interior of the
// convex hull of the increments.
Separator node_separator(const Market& m,
                         const std::vector<SuccessorGroup>& succ);

// Removes strictly-separable continuations node by node (t descending,
// nodes in path order) until no sweep changes anything. Options are ignored:
// this is the dynamic-only construction.
EfficientSet aggregator_fixpoint(const Market& m, const LevelSetPartition& part,
                                 const PathSet& scope);

struct PartitionScheme {
  struct Step {
    RatVec alpha;       // static direction, length k, independent of previous
    Strategy strat;     // h = alpha plus the dynamic complement
    PathSet equality;   // paths of the previous core where the payoff is 0
    PathSet core_prev;  // the separator fixpoint the step was computed on
  };
  std::vector<Step> steps;
  PathSet final_set;
};

// Alternates separator fixpoints with searches for a fresh static direction
// alpha whose combined payoff is nonnegative on the current core; each found
// direction shrinks the core to its equality set. Terminates after at most
// k steps; the final set equals the oracle's retained set.
PartitionScheme partition_scheme(const Market& m, const LevelSetPartition& part,
                                 const PathSet& scope);

struct SchemeReport {
  bool match = false;
  EfficientSet oracle;
  PartitionScheme scheme;
};

SchemeReport verify_scheme(const Market& m, const LevelSetPartition& part,
                           const PathSet& scope);

}  // namespace rfm
