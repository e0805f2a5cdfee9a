#include "rfm/oneperiod_poly.hpp"

#include <algorithm>

namespace rfm {

void validate_poly(const PolyMarket& pm) {
  const std::size_t d = pm.dim();
  if (d == 0)
    throw PolyError("InvalidPolyMarket", "empty initial price vector");
  for (const auto& x : pm.s0)
    if (x.sign() < 0)
      throw PolyError("InvalidPolyMarket", "negative initial price");
  if (pm.cells.empty())
    throw PolyError("InvalidPolyMarket", "no cells");
  for (const auto& c : pm.cells) {
    if (c.lo.size() != d || c.hi.size() != d || c.lo_open.size() != d ||
        c.hi_open.size() != d)
      throw PolyError("InvalidPolyMarket", "cell dimension mismatch");
    for (std::size_t i = 0; i < d; ++i) {
      if (c.lo[i].sign() < 0)
        throw PolyError("InvalidPolyMarket",
                        "cell leaves the nonnegative orthant");
      if (c.hi[i]) {
        if (*c.hi[i] < c.lo[i])
          throw PolyError("InvalidPolyMarket", "empty cell (hi < lo)");
        if (*c.hi[i] == c.lo[i] && (c.lo_open[i] || c.hi_open[i]))
          throw PolyError("InvalidPolyMarket",
                          "degenerate coordinate flagged open");
      }
    }
  }
  for (const auto& opt : pm.options) {
    if (opt.pieces.size() != pm.cells.size())
      throw PolyError("InvalidPolyMarket",
                      "option '" + opt.name + "' needs one piece per cell");
    for (std::size_t c = 0; c < opt.pieces.size(); ++c) {
      const auto& [a, b] = opt.pieces[c];
      if (a.size() != d)
        throw PolyError("InvalidPolyMarket",
                        "option '" + opt.name + "' slope dimension mismatch");
      // On an unbounded cell an option may not decrease along a recession
      // direction (its negative part must stay bounded relative to prices).
      for (std::size_t i = 0; i < d; ++i)
        if (!pm.cells[c].hi[i] && a[i].sign() < 0)
          throw PolyError("UnboundedCellWithoutSlopeData",
                          "option '" + opt.name +
                              "' decreases along an unbounded direction");
    }
  }
}

Rat poly_payoff(const PolyMarket& pm, const PolyStrategy& s, std::size_t cell,
                const RatVec& S1) {
  Rat v;
  for (std::size_t l = 0; l < pm.options.size(); ++l) {
    const auto& [a, b] = pm.options[l].pieces[cell];
    v += s.h[l] * (dot(a, S1) + b);
  }
  for (std::size_t i = 0; i < pm.dim(); ++i)
    v += s.H[i] * (S1[i] - pm.s0[i]);
  return v;
}

CellGeometry cell_geometry(const Cell& c) {
  const std::size_t d = c.lo.size();
  CellGeometry g;
  // Per coordinate: available closure endpoints (0 = lo, 1 = finite hi > lo).
  std::vector<std::vector<int>> ends(d);
  for (std::size_t i = 0; i < d; ++i) {
    ends[i].push_back(0);
    if (c.hi[i] && *c.hi[i] > c.lo[i]) ends[i].push_back(1);
  }
  std::vector<std::vector<int>> vertex_choice;  // parallel to g.vertices
  std::vector<int> choice(d, 0);
  for (;;) {
    RatVec v(d);
    bool in_cell = true;
    for (std::size_t i = 0; i < d; ++i) {
      int e = ends[i][choice[i]];
      v[i] = e == 0 ? c.lo[i] : *c.hi[i];
      bool degenerate = c.hi[i] && *c.hi[i] == c.lo[i];
      if (degenerate) continue;  // validated closed on both sides
      if (e == 0 ? c.lo_open[i] : c.hi_open[i]) in_cell = false;
    }
    g.vertices.push_back(std::move(v));
    g.vertex_in_cell.push_back(in_cell);
    vertex_choice.push_back(choice);
    std::size_t i = 0;
    while (i < d) {
      if (++choice[i] < static_cast<int>(ends[i].size())) break;
      choice[i++] = 0;
    }
    if (i == d) break;
  }
  std::vector<std::size_t> ray_coord;
  for (std::size_t i = 0; i < d; ++i)
    if (!c.hi[i]) {
      RatVec r(d);
      r[i] = Rat(1);
      g.rays.push_back(std::move(r));
      ray_coord.push_back(i);
    }

  // Minimal closed-fixable faces: fix every coordinate that has a closed
  // endpoint (branching when both endpoints are closed); coordinates with
  // no closed endpoint stay free.
  std::vector<std::vector<int>> fix_opts(d);  // 0 fix-lo, 1 fix-hi, -1 free
  for (std::size_t i = 0; i < d; ++i) {
    bool degenerate = c.hi[i] && *c.hi[i] == c.lo[i];
    if (degenerate) {
      fix_opts[i] = {0};
      continue;
    }
    if (!c.lo_open[i]) fix_opts[i].push_back(0);
    if (c.hi[i] && *c.hi[i] > c.lo[i] && !c.hi_open[i])
      fix_opts[i].push_back(1);
    if (fix_opts[i].empty()) fix_opts[i].push_back(-1);
  }
  std::vector<std::size_t> idx(d, 0);
  for (;;) {
    CellGeometry::Face f;
    for (std::size_t v = 0; v < g.vertices.size(); ++v) {
      bool ok = true;
      for (std::size_t i = 0; i < d && ok; ++i) {
        int fo = fix_opts[i][idx[i]];
        if (fo >= 0 && ends[i][vertex_choice[v][i]] != fo) ok = false;
      }
      if (ok) f.vertex_ids.push_back(v);
    }
    for (std::size_t r = 0; r < ray_coord.size(); ++r)
      if (fix_opts[ray_coord[r]][idx[ray_coord[r]]] == -1)
        f.ray_ids.push_back(r);
    g.min_faces.push_back(std::move(f));
    std::size_t i = 0;
    while (i < d) {
      if (++idx[i] < fix_opts[i].size()) break;
      idx[i++] = 0;
    }
    if (i == d) break;
  }
  return g;
}

namespace {

// Row of LP coefficients over (h, H) for the payoff at S1 in `cell`, or for
// the payoff slope along ray `r` when point = false.
RatVec payoff_row(const PolyMarket& pm, std::size_t cell, const RatVec& x,
                  bool point) {
  const std::size_t k = pm.options.size(), d = pm.dim();
  RatVec row(k + d);
  for (std::size_t l = 0; l < k; ++l) {
    const auto& [a, b] = pm.options[l].pieces[cell];
    row[l] = dot(a, x) + (point ? b : Rat(0));
  }
  for (std::size_t i = 0; i < d; ++i)
    row[k + i] = x[i] - (point ? pm.s0[i] : Rat(0));
  return row;
}

PolyStrategy unpack_poly(const PolyMarket& pm, const RatVec& x) {
  const std::size_t k = pm.options.size();
  PolyStrategy s;
  s.h.assign(x.begin(), x.begin() + k);
  s.H.assign(x.begin() + k, x.end());
  return s;
}

bool all_compact(const PolyMarket& pm) {
  for (const auto& c : pm.cells)
    for (const auto& h : c.hi)
      if (!h) return false;
  return true;
}

}  // namespace

PolyVerdict usa_check(const PolyMarket& pm, bool require_nonneg) {
  validate_poly(pm);
  const std::size_t n = pm.options.size() + pm.dim();
  LinearProgram lp = LinearProgram::minimize(RatVec(n));
  if (require_nonneg) lp.nonnegative();
  for (std::size_t c = 0; c < pm.cells.size(); ++c) {
    CellGeometry g = cell_geometry(pm.cells[c]);
    for (const auto& v : g.vertices)
      lp.add(payoff_row(pm, c, v, true), Rel::Ge, Rat(1));
    for (const auto& r : g.rays)
      lp.add(payoff_row(pm, c, r, false), Rel::Ge, Rat(0));
  }
  PolyVerdict out;
  out.notion = "USA";
  LpOutcome res = solve_checked(lp);
  out.lp = res;
  if (res.status == LpStatus::Optimal) {
    out.present = true;
    out.witness = unpack_poly(pm, *res.primal);
    Rat floor;
    bool first = true;
    for (std::size_t c = 0; c < pm.cells.size(); ++c)
      for (const auto& v : cell_geometry(pm.cells[c]).vertices) {
        Rat p = poly_payoff(pm, *out.witness, c, v);
        floor = first ? p : min(floor, p);
        first = false;
      }
    out.epsilon = floor;
  }
  return out;
}

PolyVerdict sa_check(const PolyMarket& pm, bool require_nonneg) {
  validate_poly(pm);
  const std::size_t n = pm.options.size() + pm.dim();
  LinearProgram lp = LinearProgram::minimize(RatVec(n));
  if (require_nonneg) lp.nonnegative();
  for (std::size_t c = 0; c < pm.cells.size(); ++c) {
    CellGeometry g = cell_geometry(pm.cells[c]);
    std::vector<RatVec> vrows, rrows;
    for (const auto& v : g.vertices) {
      vrows.push_back(payoff_row(pm, c, v, true));
      lp.add(vrows.back(), Rel::Ge, Rat(0));
    }
    for (const auto& r : g.rays) {
      rrows.push_back(payoff_row(pm, c, r, false));
      lp.add(rrows.back(), Rel::Ge, Rat(0));
    }
    // A nonnegative affine function vanishing at a cell point vanishes on a
    // closed-fixable face, hence on a minimal one; forbid each.
    for (const auto& f : g.min_faces) {
      RatVec row(n);
      for (std::size_t v : f.vertex_ids)
        for (std::size_t j = 0; j < n; ++j) row[j] += vrows[v][j];
      for (std::size_t r : f.ray_ids)
        for (std::size_t j = 0; j < n; ++j) row[j] += rrows[r][j];
      lp.add(row, Rel::Ge, Rat(1));
    }
  }
  PolyVerdict out;
  out.notion = "SA";
  LpOutcome res = solve_checked(lp);
  out.lp = res;
  if (res.status == LpStatus::Optimal) {
    out.present = true;
    out.witness = unpack_poly(pm, *res.primal);
    if (!usa_check(pm, require_nonneg).present)
      out.boundary_note =
          "strict arbitrage without a uniform one: the payoff is positive on "
          "every cell point but approaches zero at an open boundary face";
  }
  return out;
}

PolyStrategy sa_to_usa(const PolyMarket& pm, const PolyStrategy& strong_arb) {
  validate_poly(pm);
  for (const auto& c : pm.cells)
    for (std::size_t i = 0; i < pm.dim(); ++i)
      if (c.lo_open[i] || (c.hi[i] && c.hi_open[i]))
        throw PolyError("OpenCellPresent",
                        "the strengthening transform needs closed cells");
  Rat norm;
  for (const auto& x : pm.s0) norm += x;
  if (norm.sign() == 0)
    throw PolyError("ZeroInitialPrice",
                    "the transform scales by the initial price norm");
  RatVec cap(pm.dim());
  for (std::size_t i = 0; i < pm.dim(); ++i) cap[i] = pm.s0[i] + Rat(2) * norm;

  std::optional<Rat> eps;
  for (std::size_t c = 0; c < pm.cells.size(); ++c) {
    Cell clipped = pm.cells[c];
    bool empty = false;
    for (std::size_t i = 0; i < pm.dim(); ++i) {
      if (clipped.lo[i] > cap[i]) { empty = true; break; }
      if (!clipped.hi[i] || *clipped.hi[i] > cap[i]) clipped.hi[i] = cap[i];
      clipped.hi_open[i] = false;
    }
    if (empty) continue;
    for (const auto& v : cell_geometry(clipped).vertices) {
      Rat p = poly_payoff(pm, strong_arb, c, v);
      eps = eps ? min(*eps, p) : p;
    }
  }
  Rat lambda(1);  // no cell meets K: any positive scaling works
  if (eps) {
    if (eps->sign() <= 0)
      throw PolyError("EpsilonZero",
                      "input is not a strict arbitrage on the compact core");
    lambda = Rat(2) * norm / *eps;
  }
  PolyStrategy out;
  for (const auto& x : strong_arb.h) out.h.push_back(lambda * x);
  for (const auto& x : strong_arb.H) out.H.push_back(lambda * x + Rat(1));
  return out;
}

PolyVerdict supermartingale_exists(const PolyMarket& pm) {
  validate_poly(pm);
  if (!all_compact(pm))
    throw PolyError("NonCompactCell",
                    "supermartingale search needs bounded cells");
  std::vector<std::pair<std::size_t, RatVec>> points;  // (cell, vertex)
  for (std::size_t c = 0; c < pm.cells.size(); ++c)
    for (const auto& v : cell_geometry(pm.cells[c]).vertices)
      points.emplace_back(c, v);

  LinearProgram lp = LinearProgram::minimize(RatVec(points.size()));
  lp.nonnegative();
  lp.add(RatVec(points.size(), Rat(1)), Rel::Eq, Rat(1));
  for (std::size_t i = 0; i < pm.dim(); ++i) {
    RatVec row(points.size());
    for (std::size_t j = 0; j < points.size(); ++j) row[j] = points[j].second[i];
    lp.add(row, Rel::Le, pm.s0[i]);
  }
  for (const auto& opt : pm.options) {
    RatVec row(points.size());
    for (std::size_t j = 0; j < points.size(); ++j) {
      const auto& [a, b] = opt.pieces[points[j].first];
      row[j] = dot(a, points[j].second) + b;
    }
    lp.add(row, Rel::Le, Rat(0));
  }
  PolyVerdict out;
  out.notion = "SM-exists";
  LpOutcome res = solve_checked(lp);
  out.lp = res;
  if (res.status == LpStatus::Optimal) {
    out.present = true;
    Measure q;
    q.w = *res.primal;
    out.measure = std::move(q);
    for (const auto& [c, v] : points) out.measure_points.push_back(v);
  }
  return out;
}

PolyVerdict wflvr_check_compact(const PolyMarket& pm) {
  validate_poly(pm);
  if (!all_compact(pm))
    throw PolyError("NonCompactCell",
                    "the compact equivalence chain needs bounded cells");
  PolyVerdict usa = usa_check(pm, /*require_nonneg=*/true);
  PolyVerdict sm = supermartingale_exists(pm);
  if (usa.present == sm.present)
    throw PolyError("InternalInconsistency",
                    "uniform-arbitrage and supermartingale routes disagree");
  PolyVerdict out;
  out.notion = "WFLVR";
  out.present = usa.present;
  out.witness = usa.witness;
  out.epsilon = usa.epsilon;
  out.measure = sm.measure;
  out.measure_points = sm.measure_points;
  out.lp = usa.lp;
  return out;
}

CallFamilyReport call_family_truncation(const RatVec& prices, const Rat& s0) {
  if (prices.empty())
    throw PolyError("InvalidPolyMarket", "empty call price list");
  for (const auto& p : prices)
    if (p.sign() < 0)
      throw PolyError("InvalidPolyMarket", "negative call price");
  const std::size_t n = prices.size();
  CallFamilyReport rep;
  rep.market.s0 = {s0};
  // Cells [0,1], ..., [n-1,n], [n, inf); the strike-k call is affine on
  // each of them.
  for (std::size_t c = 0; c <= n; ++c) {
    Cell cell;
    cell.lo = {Rat(static_cast<long>(c))};
    cell.hi.push_back(c < n ? std::optional<Rat>(Rat(static_cast<long>(c) + 1))
                            : std::nullopt);
    cell.lo_open = {false};
    cell.hi_open = {false};
    rep.market.cells.push_back(std::move(cell));
  }
  for (std::size_t k = 1; k <= n; ++k) {
    PolyOption opt;
    opt.name = "call" + std::to_string(k);
    for (std::size_t c = 0; c <= n; ++c) {
      // On [c, c+1] the payoff (S1 - k)^+ - p_k is 0 - p_k when c + 1 <= k
      // and S1 - k - p_k when c >= k.
      if (c + 1 <= k)
        opt.pieces.emplace_back(RatVec{Rat(0)}, -prices[k - 1]);
      else
        opt.pieces.emplace_back(RatVec{Rat(1)},
                                -Rat(static_cast<long>(k)) - prices[k - 1]);
    }
    rep.market.options.push_back(std::move(opt));
    rep.pointwise_limits.push_back(-prices[k - 1]);
  }
  validate_poly(rep.market);
  rep.prices_vanish = prices.back().sign() == 0;
  return rep;
}

}  // namespace rfm
