#pragma once

// One-period markets on polyhedral scenario sets: unions of axis-aligned
// boxes in the nonnegative orthant, possibly unbounded, with each finite
// face flagged open or closed, and options affine within each box. This is
// where the strict/uniform arbitrage boundary lives (a payoff can be
// positive on a half-open cell yet not bounded away from zero).

#include <optional>
#include <string>
#include <vector>

#include "rfm/lp.hpp"
#include "rfm/market.hpp"
#include "rfm/rat.hpp"

namespace rfm {

struct PolyError : std::runtime_error {
  std::string code;
  PolyError(std::string c, const std::string& msg)
      : std::runtime_error(c + ": " + msg), code(std::move(c)) {}
};

struct Cell {
  RatVec lo;                    // length d, >= 0
  std::vector<std::optional<Rat>> hi;  // per coordinate; empty optional = unbounded
  std::vector<bool> lo_open;
  std::vector<bool> hi_open;    // meaningful only where hi is finite
};

struct PolyOption {
  std::string name;
  // Affine value a . S1 + b within each cell, one entry per cell.
  std::vector<std::pair<RatVec, Rat>> pieces;
};

struct PolyMarket {
  RatVec s0;  // >= 0 componentwise
  std::vector<Cell> cells;
  std::vector<PolyOption> options;

  std::size_t dim() const { return s0.size(); }
};

void validate_poly(const PolyMarket& pm);  // throws PolyError on bad shapes

struct PolyStrategy {
  RatVec h;  // option positions
  RatVec H;  // asset positions
};

// Payoff h.Phi(S1) + H.(S1 - s0) at a point of a given cell.
Rat poly_payoff(const PolyMarket& pm, const PolyStrategy& s, std::size_t cell,
                const RatVec& S1);

struct PolyVerdict {
  std::string notion;  // "SA", "USA", "WFLVR", "SM-exists"
  bool present = false;
  std::optional<PolyStrategy> witness;
  std::optional<Measure> measure;      // over closure vertices (SM-exists)
  std::vector<RatVec> measure_points;  // the vertices the measure weights
  std::optional<Rat> epsilon;          // USA: uniform payoff floor
  std::string boundary_note;           // set when SA holds but USA fails
  std::optional<LpOutcome> lp;         // certificate for the deciding system
};

// Closure-vertex / recession-ray views of a cell, used by every check and by
// the tests' independent oracles.
struct CellGeometry {
  std::vector<RatVec> vertices;            // of the closure
  std::vector<bool> vertex_in_cell;        // closed on every active bound
  std::vector<RatVec> rays;                // coordinate recession directions
  // Minimal closed-fixable faces: per face, the vertex indices of its
  // closure vertices and the ray indices it keeps free. Every point of the
  // cell lies beyond (>=, in the cone sense) at least one of these faces.
  struct Face {
    std::vector<std::size_t> vertex_ids;
    std::vector<std::size_t> ray_ids;
  };
  std::vector<Face> min_faces;
};
CellGeometry cell_geometry(const Cell& c);

// Uniform arbitrage: payoff >= 1 on the closure of every cell (vertex values
// plus nonnegative drift along every recession ray). require_nonneg adds
// h >= 0, H >= 0 (the no-short-selling convention).
PolyVerdict usa_check(const PolyMarket& pm, bool require_nonneg = false);

// Strict arbitrage: payoff > 0 at every point of every cell. Feasibility
// system: >= 0 on all closure vertices and rays, and for every minimal
// closed-fixable face the vertex payoffs plus ray slopes sum to >= 1 (a
// nonnegative affine function vanishing somewhere on a box vanishes on a
// whole face, and a face meets the cell iff its fixed bounds are all
// closed).
PolyVerdict sa_check(const PolyMarket& pm, bool require_nonneg = false);

// Turns a strict arbitrage on an all-closed market into a uniform one by
// scaling and adding one unit of every asset: epsilon is the payoff minimum
// over the cell vertices inside the compact K = prod [0, s0_i + 2|s0|_1];
// the output payoff is at least |s0|_1 everywhere.
PolyStrategy sa_to_usa(const PolyMarket& pm, const PolyStrategy& strong_arb);

// A vertex-supported measure with total mass one, componentwise expected
// price at most s0, and nonpositive option expectations; exists iff any
// supermartingale measure does (cells compact).
PolyVerdict supermartingale_exists(const PolyMarket& pm);

// On compact markets with no short-selling, the limit-of-strategies notion
// collapses: present iff the uniform check (h, H >= 0) passes iff no
// supermartingale measure exists. Both routes are computed and compared;
// a disagreement throws PolyError("InternalInconsistency").
PolyVerdict wflvr_check_compact(const PolyMarket& pm);

// Finite truncation of the call-ladder family phi_n = (S1 - n)^+ - p_n on
// d = 1, cells [0,1], ..., [N-1,N], [N,inf). Holding one unit of the n-th
// call has payoff tending to -p_n as the truncation point recedes below the
// strike, and unit asymptotic slope; vanishing prices are therefore a
// necessary condition for the no-free-lunch property to survive the limit.
struct CallFamilyReport {
  PolyMarket market;        // the truncated piecewise-affine market
  RatVec pointwise_limits;  // per call: payoff limit below the strike = -p_n
  bool prices_vanish;       // tail price is zero, the necessary condition
};
CallFamilyReport call_family_truncation(const RatVec& prices, const Rat& s0);

}  // namespace rfm
