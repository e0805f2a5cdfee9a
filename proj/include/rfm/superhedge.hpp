#pragma once

// Superhedging prices with martingale duals: pathwise on an arbitrary scope,
// quasi-sure via the full-support reduction, the five-quantity duality
// chain, one-step backward induction, and the efficient-core extension
// checker with its two node-level assumptions.

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "rfm/efficient_set.hpp"
#include "rfm/market.hpp"
#include "rfm/oneperiod_poly.hpp"
#include "rfm/priors.hpp"

namespace rfm {

struct SuperhedgeError : std::runtime_error {
  std::string code;
  SuperhedgeError(std::string c, const std::string& msg)
      : std::runtime_error(c + ": " + msg), code(std::move(c)) {}
};

// Extended price: finite, -inf (scalable arbitrage or empty scope), or +inf
// (reserved; cannot occur on nonempty finite scopes).
struct ExtPrice {
  enum Kind { Finite, MinusInf, PlusInf } kind = Finite;
  Rat value;

  static ExtPrice finite(Rat v) { return {Finite, std::move(v)}; }
  static ExtPrice minus_inf() { return {MinusInf, Rat(0)}; }
  static ExtPrice plus_inf() { return {PlusInf, Rat(0)}; }
  bool operator==(const ExtPrice& o) const {
    return kind == o.kind && (kind != Finite || value == o.value);
  }
  std::string str() const;
};

struct SuperhedgeResult {
  ExtPrice price;
  std::optional<Strategy> strategy;      // attained minimizer when finite
  std::optional<Measure> dual_measure;   // calibrated maximizer when finite
  Rat gap;                               // always 0 when both sides finite
  std::string scope_tag;
  std::optional<LpOutcome> lp;           // raw outcome, incl. certificates
};

// Least x such that x plus some semistatic payoff dominates g on every path
// of the scope. Empty scope prices at -inf by convention.
SuperhedgeResult price_pathwise(const Market& m, const LevelSetPartition& part,
                                const PathSet& scope, const PayoffVector& g);

// Quasi-sure price: the pathwise price on the support of the full-support
// mixture, which is also the extremal single measure for the claim.
struct QuasiSureResult {
  SuperhedgeResult result;
  Measure extremal;   // the full-support mixture
  PathSet scope;      // its support
};
QuasiSureResult price_quasisure(const Market& m, const LevelSetPartition& part,
                                const PriorSet& pr, const PayoffVector& g);

// The five independently computed quantities that exact duality makes equal:
// best calibrated-measure expectation on the support, pathwise price on the
// support's efficient core, price under the extremal measure, quasi-sure
// price, and best expectation over dominated calibrated measures.
struct DualityChain {
  bool applicable = true;  // false when a quasi-sure arbitrage is present
  std::string note;
  std::vector<std::pair<std::string, ExtPrice>> values;
  bool all_equal = false;
};
DualityChain duality_chain(const Market& m, const LevelSetPartition& part,
                           const PriorSet& pr, const PayoffVector& g);

// Dynamic programming over one-step prices; valid without static options
// (throws SuperhedgeError("OptionsPresent") otherwise). Node values at time
// t price the time-t+1 values over the in-scope successors.
struct BackwardInduction {
  // values[t]: per node at time t (partition order), the one-step price;
  // values[T] is g grouped by terminal successor groups of time-T-1 nodes.
  std::vector<std::vector<Rat>> values;
  Rat root;
};
BackwardInduction backward_induction(const Market& m,
                                     const LevelSetPartition& part,
                                     const PathSet& scope,
                                     const PayoffVector& g);

// Extension checker: does the pathwise price computed on the efficient core
// extend to the full scope? Requires no static options.
struct ExtensionReport {
  struct NodeReport {
    std::size_t t = 0, node = 0;
    // Successor groups (within the scope) whose increment projects onto the
    // span of core increments without landing in the core increment set.
    std::vector<std::size_t> outside_groups;
    bool limit_ok = true;      // no outside increment lies in the core span
    bool separator_ok = true;  // one separator removes all non-core groups
    RatVec separator;
  };
  std::vector<NodeReport> nodes;
  bool assumption_limit_ok = true;      // conjunction over nodes
  bool assumption_separator_ok = true;  // conjunction over nodes
  ExtPrice price_core;
  ExtPrice price_full;
  bool extension_holds = false;  // prices equal as extended rationals
};
ExtensionReport extension_report(const Market& m, const LevelSetPartition& part,
                                 const PathSet& scope, const PayoffVector& g);

// Price of a claim given per-cell affine payoffs on a one-period polyhedral
// market: min x with x + payoff >= claim on all closure vertices and
// nonnegative net drift along rays.
ExtPrice poly_price(const PolyMarket& pm, const PolyOption& claim);

// The boundary-growth probe: a one-period two-asset market whose efficient
// core pins the second hedge coordinate exactly, while a boundary scenario
// at horizontal distance 1/n forces the first coordinate to grow like
// 4*sqrt(n). Returns the minimal feasible first hedge coordinate of the
// capital-0 superhedge; n must be a perfect square (so sqrt(n) is exact).
Rat divergence_probe(long n);

}  // namespace rfm
