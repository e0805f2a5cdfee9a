#pragma once

// Finite path-space market model: a d-asset price process over dates
// 0..T on finitely many paths, plus statically traded options stored as
// evaluated payoff vectors (prices normalized to zero). Level sets (paths
// sharing a price history) form the nodes of the implied scenario tree;
// a trading strategy is predictable exactly when its dynamic position is
// constant on each node.

#include <cstddef>
#include <string>
#include <vector>

#include "rfm/rat.hpp"

namespace rfm {

struct MarketError : std::runtime_error {
  std::string code;
  MarketError(std::string c, const std::string& msg)
      : std::runtime_error(c + ": " + msg), code(std::move(c)) {}
};

struct PathRecord {
  std::string id;
  std::vector<RatVec> S;  // T+1 entries, each of length d
};

struct OptionRecord {
  std::string name;
  RatVec payoff;  // per path
};

struct Market {
  std::size_t T = 1;
  std::size_t d = 1;
  std::vector<PathRecord> paths;
  std::vector<OptionRecord> options;

  std::size_t num_paths() const { return paths.size(); }
  std::size_t num_options() const { return options.size(); }
  const RatVec& price(std::size_t path, std::size_t t) const {
    return paths[path].S[t];
  }
  RatVec increment(std::size_t path, std::size_t t) const;  // S_t - S_{t-1}
};

// Sorted list of path indices; the universal "scope"/"subset" carrier.
using PathSet = std::vector<std::size_t>;

PathSet all_paths(const Market& m);
bool contains(const PathSet& s, std::size_t p);
PathSet set_minus(const PathSet& a, const PathSet& b);
PathSet set_union(const PathSet& a, const PathSet& b);
PathSet set_intersect(const PathSet& a, const PathSet& b);

struct LevelSetPartition {
  // levels[t] (t = 0..T-1): nodes at time t, each a sorted list of path
  // indices; two paths share a node iff their histories S_0..S_t coincide.
  std::vector<std::vector<PathSet>> levels;

  std::size_t node_of(std::size_t t, std::size_t path) const;
};

// Validates the market invariants and returns its level-set partition.
// Throws MarketError with code InconsistentS0, DuplicatePathId,
// DimensionMismatch, or NoPaths.
LevelSetPartition validate(const Market& m);

struct Strategy {
  RatVec h;  // static option positions, length k
  // H[t][node] in Rat^d: the position held over (t, t+1], decided at the
  // time-t node; aligned with partition.levels[t].
  std::vector<std::vector<RatVec>> H;
};

Strategy zero_strategy(const Market& m, const LevelSetPartition& part);

using PayoffVector = RatVec;  // per path

// h . Phi + sum_t H(t, node) . (S_{t+1} - S_t), exactly, per path.
PayoffVector payoff(const Market& m, const LevelSetPartition& part,
                    const Strategy& s);

// Flattened variable layout for (h, H), shared by every LP that optimizes
// over strategies: columns are h_0..h_{k-1}, then for t = 0..T-1, for each
// node at t in partition order, d coordinates of H. coeff(p) is the row of
// payoff coefficients for path p, so payoff = coeff * x.
struct StrategySpace {
  std::size_t k = 0;
  std::size_t num_vars = 0;
  std::vector<RatVec> coeff;  // per path
  // Layout bookkeeping for unpacking.
  const Market* m = nullptr;
  const LevelSetPartition* part = nullptr;

  Strategy unpack(const RatVec& x) const;
  std::size_t h_col(std::size_t lambda) const { return lambda; }
  std::size_t H_col(std::size_t t, std::size_t node, std::size_t i) const;
};

StrategySpace strategy_space(const Market& m, const LevelSetPartition& part);

struct Measure {
  RatVec w;  // per path, >= 0

  PathSet support() const;
  Rat total() const;
  bool normalized() const { return total() == Rat(1); }
};

struct MartingaleCheck {
  bool ok = true;
  std::vector<std::string> violations;
};

// True iff supp(q) is inside `scope`, every node's expected increment under
// q is zero componentwise, and every option has zero expectation. Throws
// MarketError(NotNormalized) unless the weights sum to one.
MartingaleCheck is_martingale_measure(const Market& m,
                                      const LevelSetPartition& part,
                                      const Measure& q, const PathSet& scope);

// One-step successor structure of a node: its paths grouped by S_{t+1},
// each group carrying the common increment. Deterministic order (by first
// path index).
struct SuccessorGroup {
  RatVec dS;
  PathSet paths;
};

std::vector<SuccessorGroup> successors(const Market& m, const PathSet& node,
                                       std::size_t t);

}  // namespace rfm
