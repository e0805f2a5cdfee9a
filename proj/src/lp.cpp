#include "rfm/lp.hpp"

#include <atomic>
#include <cstddef>
#include <stdexcept>

namespace rfm {

LinearProgram LinearProgram::minimize(RatVec c) {
  LinearProgram lp;
  lp.sense = Sense::Min;
  lp.c = std::move(c);
  return lp;
}

LinearProgram LinearProgram::maximize(RatVec c) {
  LinearProgram lp;
  lp.sense = Sense::Max;
  lp.c = std::move(c);
  return lp;
}

LinearProgram& LinearProgram::add(RatVec a, Rel rel, Rat b) {
  rows.push_back(LpRow{std::move(a), rel, std::move(b)});
  return *this;
}

LinearProgram& LinearProgram::set_lower(std::size_t j, Rat v) {
  if (lo.size() < c.size()) lo.resize(c.size());
  lo.at(j) = std::move(v);
  return *this;
}

LinearProgram& LinearProgram::set_upper(std::size_t j, Rat v) {
  if (hi.size() < c.size()) hi.resize(c.size());
  hi.at(j) = std::move(v);
  return *this;
}

LinearProgram& LinearProgram::nonnegative() {
  lo.assign(c.size(), Rat(0));
  return *this;
}

namespace {

std::atomic<std::uint64_t> g_solves{0};
std::atomic<std::uint64_t> g_checks_passed{0};

void validate_shape(const LinearProgram& lp) {
  const std::size_t n = lp.num_vars();
  if (n == 0 && !lp.rows.empty())
    throw MalformedProgram("empty variable set with nonempty rows");
  for (std::size_t k = 0; k < lp.rows.size(); ++k)
    if (lp.rows[k].a.size() != n)
      throw MalformedProgram("row " + std::to_string(k) + " width mismatch");
  if (!lp.lo.empty() && lp.lo.size() != n)
    throw MalformedProgram("lower-bound vector width mismatch");
  if (!lp.hi.empty() && lp.hi.size() != n)
    throw MalformedProgram("upper-bound vector width mismatch");
}

std::optional<Rat> bound_of(const std::vector<std::optional<Rat>>& v, std::size_t j) {
  if (v.empty()) return std::nullopt;
  return v[j];
}

// How each original variable is represented by nonnegative standard-form
// columns: x_j = offset + sum(colsign * u_col).
struct VarMap {
  Rat offset;
  std::vector<std::pair<std::size_t, int>> cols;  // (sf column, sign)
  bool has_lo = false, has_hi = false;
};

// Provenance of a standard-form row, for mapping duals back.
struct RowOrigin {
  bool is_ub = false;       // true: the row "x_j <= hi_j"; false: constraint k
  std::size_t idx = 0;      // k or j
  int sigma = 1;            // sf row == sigma * (original row, substituted)
  Rel rel = Rel::Eq;        // original relation
};

struct Simplex {
  std::size_t m = 0;        // sf rows
  std::size_t nstruct = 0;  // structural columns
  std::size_t nslack = 0;
  std::size_t ncols = 0;    // nstruct + nslack + m artificials
  std::vector<RatVec> T;    // m x ncols
  RatVec b;                 // m
  std::vector<std::size_t> basis;   // per row, the basic column
  RatVec r;                 // reduced costs over ncols
  RatVec cost;              // current-phase costs over ncols

  std::size_t art0() const { return nstruct + nslack; }
  bool is_artificial(std::size_t j) const { return j >= art0(); }

  void recompute_reduced(const RatVec& phase_cost) {
    cost = phase_cost;
    r = cost;
    for (std::size_t i = 0; i < m; ++i) {
      const Rat& cb = cost[basis[i]];
      if (cb.sign() == 0) continue;
      for (std::size_t j = 0; j < ncols; ++j)
        if (T[i][j].sign() != 0) r[j] -= cb * T[i][j];
    }
  }

  void pivot(std::size_t p, std::size_t q) {
    Rat piv = T[p][q];
    for (std::size_t j = 0; j < ncols; ++j) T[p][j] /= piv;
    b[p] /= piv;
    for (std::size_t i = 0; i < m; ++i) {
      if (i == p || T[i][q].sign() == 0) continue;
      Rat f = T[i][q];
      for (std::size_t j = 0; j < ncols; ++j)
        if (T[p][j].sign() != 0) T[i][j] -= f * T[p][j];
      b[i] -= f * b[p];
    }
    if (r[q].sign() != 0) {
      Rat f = r[q];
      for (std::size_t j = 0; j < ncols; ++j)
        if (T[p][j].sign() != 0) r[j] -= f * T[p][j];
    }
    basis[p] = q;
  }

  // Bland's rule over columns < limit. Returns false when no entering column
  // exists (current basis optimal for the phase cost); sets *unbounded_col
  // when an entering column has no positive tableau entry.
  bool iterate(std::size_t limit, std::optional<std::size_t>* unbounded_col) {
    for (;;) {
      std::size_t q = ncols;
      for (std::size_t j = 0; j < limit; ++j)
        if (r[j].sign() < 0) { q = j; break; }
      if (q == ncols) return false;
      // Ratio test; ties resolved by smallest basic variable index (Bland).
      std::size_t p = m;
      for (std::size_t i = 0; i < m; ++i) {
        if (T[i][q].sign() <= 0) continue;
        if (p == m) { p = i; continue; }
        Rat lhs = b[i] * T[p][q], rhs = b[p] * T[i][q];
        if (lhs < rhs || (lhs == rhs && basis[i] < basis[p])) p = i;
      }
      if (p == m) {
        if (unbounded_col) *unbounded_col = q;
        return true;
      }
      pivot(p, q);
    }
  }

  Rat objective_value() const {
    Rat z;
    for (std::size_t i = 0; i < m; ++i)
      if (cost[basis[i]].sign() != 0) z += cost[basis[i]] * b[i];
    return z;
  }

  // Row multipliers y = cost_B * B^{-1}, read off the artificial columns.
  RatVec row_multipliers() const {
    RatVec y(m);
    for (std::size_t i = 0; i < m; ++i) y[i] = cost[art0() + i] - r[art0() + i];
    return y;
  }
};

struct ExtRow {
  RatVec a;   // sparse not needed at desk scale
  Rel rel;
  Rat b;
  std::string label;
};

// The constraint system as a uniform list of rows: original rows first, then
// finite lower bounds, then finite upper bounds (variable order).
std::vector<ExtRow> extended_rows(const LinearProgram& lp) {
  const std::size_t n = lp.num_vars();
  std::vector<ExtRow> rows;
  for (std::size_t k = 0; k < lp.rows.size(); ++k)
    rows.push_back(ExtRow{lp.rows[k].a, lp.rows[k].rel, lp.rows[k].b,
                          "row " + std::to_string(k)});
  for (std::size_t j = 0; j < n; ++j)
    if (auto l = bound_of(lp.lo, j)) {
      RatVec e(n);
      e[j] = Rat(1);
      rows.push_back(ExtRow{std::move(e), Rel::Ge, *l,
                            "lower bound of variable " + std::to_string(j)});
    }
  for (std::size_t j = 0; j < n; ++j)
    if (auto h = bound_of(lp.hi, j)) {
      RatVec e(n);
      e[j] = Rat(1);
      rows.push_back(ExtRow{std::move(e), Rel::Le, *h,
                            "upper bound of variable " + std::to_string(j)});
    }
  return rows;
}

}  // namespace

LpOutcome solve(const LinearProgram& lp) {
  validate_shape(lp);
  const std::size_t n = lp.num_vars();
  const std::size_t mcon = lp.rows.size();
  const bool maximize = lp.sense == Sense::Max;

  // Objective in minimization form.
  RatVec cmin(n);
  for (std::size_t j = 0; j < n; ++j) cmin[j] = maximize ? -lp.c[j] : lp.c[j];

  // Extended multiplier layout: rows, then finite lower bounds, then finite
  // upper bounds, both in variable order.
  std::vector<std::size_t> lb_slot(n, SIZE_MAX), ub_slot(n, SIZE_MAX);
  std::size_t next = mcon;
  for (std::size_t j = 0; j < n; ++j)
    if (bound_of(lp.lo, j)) lb_slot[j] = next++;
  for (std::size_t j = 0; j < n; ++j)
    if (bound_of(lp.hi, j)) ub_slot[j] = next++;
  const std::size_t ext_len = next;

  auto finish_multipliers = [&](RatVec lam, LpStatus st,
                                std::optional<Rat> value,
                                std::optional<RatVec> primal) {
    LpOutcome out;
    out.status = st;
    out.value = std::move(value);
    out.primal = std::move(primal);
    if (st == LpStatus::Optimal)
      out.dual = std::move(lam);
    else
      out.certificate = std::move(lam);
    return out;
  };

  // Crossed bounds admit a two-line Farkas certificate; handle up front so
  // the standard-form builder can assume lo <= hi.
  for (std::size_t j = 0; j < n; ++j) {
    auto l = bound_of(lp.lo, j), h = bound_of(lp.hi, j);
    if (l && h && *h < *l) {
      RatVec lam(ext_len);
      lam[lb_slot[j]] = Rat(1);
      lam[ub_slot[j]] = Rat(-1);
      return finish_multipliers(std::move(lam), LpStatus::Infeasible,
                                std::nullopt, std::nullopt);
    }
  }

  // Build standard form: min ct*u, A*u = bt, u >= 0.
  std::vector<VarMap> vmap(n);
  std::size_t nstruct = 0;
  for (std::size_t j = 0; j < n; ++j) {
    auto l = bound_of(lp.lo, j), h = bound_of(lp.hi, j);
    vmap[j].has_lo = l.has_value();
    vmap[j].has_hi = h.has_value();
    if (l) {
      vmap[j].offset = *l;
      vmap[j].cols = {{nstruct++, +1}};
    } else if (h) {
      vmap[j].offset = *h;
      vmap[j].cols = {{nstruct++, -1}};
    } else {
      vmap[j].cols = {{nstruct, +1}, {nstruct + 1, -1}};
      nstruct += 2;
    }
  }

  struct SfRow {
    RatVec a;       // structural part
    Rat b;
    RowOrigin origin;
    bool needs_slack;
  };
  std::vector<SfRow> sf;
  Rat obj_const;
  for (std::size_t j = 0; j < n; ++j)
    obj_const += cmin[j] * vmap[j].offset;

  auto push_row = [&](const RatVec& a, Rel rel, const Rat& rhs, RowOrigin org) {
    SfRow row;
    row.a.assign(nstruct, Rat(0));
    Rat bt = rhs;
    for (std::size_t j = 0; j < n; ++j) {
      if (a[j].sign() == 0) continue;
      bt -= a[j] * vmap[j].offset;
      for (auto [col, s] : vmap[j].cols)
        row.a[col] += s > 0 ? a[j] : -a[j];
    }
    int sigma = 1;
    if (rel == Rel::Ge) {  // negate to <=
      sigma = -sigma;
      for (auto& x : row.a) x = -x;
      bt = -bt;
    }
    row.needs_slack = rel != Rel::Eq;
    Rat slack_coeff(row.needs_slack ? 1 : 0);
    if (bt.sign() < 0) {  // normalize rhs >= 0 for phase 1
      sigma = -sigma;
      for (auto& x : row.a) x = -x;
      bt = -bt;
      slack_coeff = -slack_coeff;
    }
    row.b = std::move(bt);
    org.sigma = sigma;
    org.rel = rel;
    row.origin = org;
    sf.push_back(std::move(row));
    return slack_coeff;
  };

  std::vector<Rat> slack_coeffs;
  for (std::size_t k = 0; k < mcon; ++k)
    slack_coeffs.push_back(push_row(lp.rows[k].a, lp.rows[k].rel, lp.rows[k].b,
                                    RowOrigin{false, k, 1, lp.rows[k].rel}));
  for (std::size_t j = 0; j < n; ++j)
    if (vmap[j].has_lo && vmap[j].has_hi) {
      RatVec e(n);
      e[j] = Rat(1);
      slack_coeffs.push_back(
          push_row(e, Rel::Le, *bound_of(lp.hi, j), RowOrigin{true, j, 1, Rel::Le}));
    }

  Simplex sx;
  sx.m = sf.size();
  sx.nstruct = nstruct;
  sx.nslack = 0;
  for (std::size_t i = 0; i < sx.m; ++i)
    if (sf[i].needs_slack) ++sx.nslack;
  sx.ncols = nstruct + sx.nslack + sx.m;
  sx.T.assign(sx.m, RatVec(sx.ncols));
  sx.b.resize(sx.m);
  sx.basis.resize(sx.m);
  {
    std::size_t s = 0;
    for (std::size_t i = 0; i < sx.m; ++i) {
      for (std::size_t j = 0; j < nstruct; ++j) sx.T[i][j] = sf[i].a[j];
      if (sf[i].needs_slack) sx.T[i][nstruct + s] = slack_coeffs[i], ++s;
      sx.T[i][sx.art0() + i] = Rat(1);
      sx.b[i] = sf[i].b;
      sx.basis[i] = sx.art0() + i;
    }
  }

  // Phase 1: minimize the artificial sum.
  RatVec phase1_cost(sx.ncols);
  for (std::size_t i = 0; i < sx.m; ++i) phase1_cost[sx.art0() + i] = Rat(1);
  sx.recompute_reduced(phase1_cost);
  sx.iterate(sx.art0(), nullptr);  // artificials never re-enter

  // Extended multipliers from standard-form row multipliers y plus the
  // structural reduced costs (which carry the bound multipliers).
  auto map_multipliers = [&](const RatVec& y) {
    RatVec lam(ext_len);
    for (std::size_t i = 0; i < sx.m; ++i) {
      const RowOrigin& org = sf[i].origin;
      Rat v = Rat(org.sigma) * y[i];
      if (org.is_ub)
        lam[ub_slot[org.idx]] += v;
      else
        lam[org.idx] += v;
    }
    for (std::size_t j = 0; j < n; ++j) {
      if (vmap[j].cols.size() == 2) continue;  // free: reduced costs vanish
      auto [col, s] = vmap[j].cols[0];
      if (s > 0)
        lam[lb_slot[j]] += sx.r[col];
      else
        lam[ub_slot[j]] += -sx.r[col];
    }
    return lam;
  };

  if (sx.objective_value().sign() > 0) {
    RatVec lam = map_multipliers(sx.row_multipliers());
    return finish_multipliers(std::move(lam), LpStatus::Infeasible,
                              std::nullopt, std::nullopt);
  }

  // Drive basic artificials out so they can never turn positive in phase 2.
  for (std::size_t i = 0; i < sx.m; ++i) {
    if (!sx.is_artificial(sx.basis[i])) continue;
    for (std::size_t j = 0; j < sx.art0(); ++j)
      if (sx.T[i][j].sign() != 0) {
        sx.pivot(i, j);
        break;
      }
    // If the row is zero across real columns it is redundant; the artificial
    // stays basic at zero and its row never changes again.
  }

  // Phase 2.
  RatVec phase2_cost(sx.ncols);
  for (std::size_t j = 0; j < n; ++j)
    for (auto [col, s] : vmap[j].cols)
      phase2_cost[col] += s > 0 ? cmin[j] : -cmin[j];
  sx.recompute_reduced(phase2_cost);

  std::optional<std::size_t> ray_col;
  sx.iterate(sx.art0(), &ray_col);

  auto current_point = [&]() {
    RatVec u(sx.ncols);
    for (std::size_t i = 0; i < sx.m; ++i) u[sx.basis[i]] = sx.b[i];
    RatVec x(n);
    for (std::size_t j = 0; j < n; ++j) {
      x[j] = vmap[j].offset;
      for (auto [col, s] : vmap[j].cols)
        x[j] += s > 0 ? u[col] : -u[col];
    }
    return x;
  };

  if (ray_col) {
    RatVec d(sx.ncols);
    d[*ray_col] = Rat(1);
    for (std::size_t i = 0; i < sx.m; ++i)
      if (sx.T[i][*ray_col].sign() != 0) d[sx.basis[i]] = -sx.T[i][*ray_col];
    RatVec ray(n);
    for (std::size_t j = 0; j < n; ++j)
      for (auto [col, s] : vmap[j].cols)
        ray[j] += s > 0 ? d[col] : -d[col];
    LpOutcome out;
    out.status = LpStatus::Unbounded;
    out.primal = current_point();
    out.certificate = std::move(ray);
    return out;
  }

  Rat zmin = sx.objective_value() + obj_const;
  RatVec lam = map_multipliers(sx.row_multipliers());
  if (maximize)
    for (auto& v : lam) v = -v;
  LpOutcome out;
  out.status = LpStatus::Optimal;
  out.value = maximize ? -zmin : zmin;
  out.primal = current_point();
  out.dual = std::move(lam);
  return out;
}

CheckReport check_certificate(const LinearProgram& lp, const LpOutcome& out) {
  CheckReport rep;
  try {
    validate_shape(lp);
  } catch (const MalformedProgram& e) {
    rep.fail(std::string("malformed program: ") + e.what());
    return rep;
  }
  const std::size_t n = lp.num_vars();
  const bool maximize = lp.sense == Sense::Max;
  const auto ext = extended_rows(lp);

  auto check_point_feasible = [&](const RatVec& x) {
    for (const auto& row : ext) {
      Rat lhs = dot(row.a, x);
      bool ok = row.rel == Rel::Le   ? lhs <= row.b
                : row.rel == Rel::Ge ? lhs >= row.b
                                     : lhs == row.b;
      if (!ok) rep.fail("point violates " + row.label);
    }
  };

  // Multiplier sign conventions: for Min the aggregate is a '>=' inequality
  // (lam >= 0 on '>=' rows, <= 0 on '<=' rows); for Max they flip. Farkas
  // certificates always use the Min ('>=') conventions.
  auto check_signs = [&](const RatVec& lam, bool min_conventions) {
    for (std::size_t i = 0; i < ext.size(); ++i) {
      if (ext[i].rel == Rel::Eq) continue;
      bool want_nonneg = (ext[i].rel == Rel::Ge) == min_conventions;
      if (want_nonneg ? lam[i].sign() < 0 : lam[i].sign() > 0)
        rep.fail("multiplier sign condition violated on " + ext[i].label);
    }
  };
  auto combo = [&](const RatVec& lam, std::size_t j) {
    Rat s;
    for (std::size_t i = 0; i < ext.size(); ++i)
      if (lam[i].sign() != 0) s += lam[i] * ext[i].a[j];
    return s;
  };
  auto combo_rhs = [&](const RatVec& lam) {
    Rat s;
    for (std::size_t i = 0; i < ext.size(); ++i)
      if (lam[i].sign() != 0) s += lam[i] * ext[i].b;
    return s;
  };

  switch (out.status) {
    case LpStatus::Optimal: {
      if (!out.primal || !out.value || !out.dual) {
        rep.fail("optimal outcome missing primal/value/dual");
        return rep;
      }
      if (out.primal->size() != n || out.dual->size() != ext.size()) {
        rep.fail("primal or dual vector has wrong length");
        return rep;
      }
      check_point_feasible(*out.primal);
      if (dot(lp.c, *out.primal) != *out.value)
        rep.fail("primal objective does not equal reported value");
      check_signs(*out.dual, /*min_conventions=*/!maximize);
      for (std::size_t j = 0; j < n; ++j)
        if (combo(*out.dual, j) != lp.c[j])
          rep.fail("dual stationarity fails at variable " + std::to_string(j));
      if (combo_rhs(*out.dual) != *out.value)
        rep.fail("dual objective does not equal reported value");
      break;
    }
    case LpStatus::Infeasible: {
      if (!out.certificate) {
        rep.fail("infeasible outcome missing certificate");
        return rep;
      }
      if (out.certificate->size() != ext.size()) {
        rep.fail("certificate has wrong length");
        return rep;
      }
      check_signs(*out.certificate, /*min_conventions=*/true);
      for (std::size_t j = 0; j < n; ++j)
        if (combo(*out.certificate, j).sign() != 0)
          rep.fail("certificate leaves nonzero net coefficient at variable " +
                   std::to_string(j));
      if (combo_rhs(*out.certificate).sign() <= 0)
        rep.fail("certificate aggregate rhs is not strictly positive");
      break;
    }
    case LpStatus::Unbounded: {
      if (!out.primal || !out.certificate) {
        rep.fail("unbounded outcome missing feasible point or ray");
        return rep;
      }
      if (out.primal->size() != n || out.certificate->size() != n) {
        rep.fail("feasible point or ray has wrong length");
        return rep;
      }
      check_point_feasible(*out.primal);
      const RatVec& ray = *out.certificate;
      for (const auto& row : ext) {
        Rat lhs = dot(row.a, ray);
        bool ok = row.rel == Rel::Le   ? lhs.sign() <= 0
                  : row.rel == Rel::Ge ? lhs.sign() >= 0
                                       : lhs.sign() == 0;
        if (!ok) rep.fail("ray violates " + row.label);
      }
      Rat drift = dot(lp.c, ray);
      if (maximize ? drift.sign() <= 0 : drift.sign() >= 0)
        rep.fail("ray does not strictly improve the objective");
      break;
    }
  }
  return rep;
}

LpOutcome solve_checked(const LinearProgram& lp) {
  LpOutcome out = solve(lp);
  g_solves.fetch_add(1, std::memory_order_relaxed);
  CheckReport rep = check_certificate(lp, out);
  if (!rep.pass) {
    std::string msg = "internal solver self-check failed:";
    for (const auto& f : rep.failures) msg += " [" + f + "]";
    throw std::logic_error(msg);
  }
  g_checks_passed.fetch_add(1, std::memory_order_relaxed);
  return out;
}

SolveStats solve_stats() {
  return SolveStats{g_solves.load(), g_checks_passed.load()};
}

void reset_solve_stats() {
  g_solves = 0;
  g_checks_passed = 0;
}

}  // namespace rfm
