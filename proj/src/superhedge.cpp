#include "rfm/superhedge.hpp"

#include <algorithm>

#include "rfm/arbitrage.hpp"
#include "rfm/linalg.hpp"
#include "rfm/lp.hpp"

namespace rfm {

std::string ExtPrice::str() const {
  switch (kind) {
    case MinusInf: return "-inf";
    case PlusInf: return "+inf";
    default: return value.str();
  }
}

SuperhedgeResult price_pathwise(const Market& m, const LevelSetPartition& part,
                                const PathSet& scope, const PayoffVector& g) {
  SuperhedgeResult res;
  res.scope_tag = "pathwise";
  if (scope.empty()) {
    res.price = ExtPrice::minus_inf();
    return res;
  }
  StrategySpace sp = strategy_space(m, part);
  // Variables: x (column 0), then the semistatic strategy.
  RatVec c(1 + sp.num_vars);
  c[0] = Rat(1);
  LinearProgram lp = LinearProgram::minimize(c);
  for (std::size_t p : scope) {
    RatVec a(1 + sp.num_vars);
    a[0] = Rat(1);
    for (std::size_t j = 0; j < sp.num_vars; ++j) a[1 + j] = sp.coeff[p][j];
    lp.add(std::move(a), Rel::Ge, g[p]);
  }
  LpOutcome out = solve_checked(lp);
  res.lp = out;
  if (out.status == LpStatus::Unbounded) {
    res.price = ExtPrice::minus_inf();
    return res;
  }
  if (out.status != LpStatus::Optimal)
    throw std::logic_error("superhedge LP infeasible (x = max g is feasible)");
  res.price = ExtPrice::finite(*out.value);
  RatVec strat(out.primal->begin() + 1, out.primal->end());
  res.strategy = sp.unpack(strat);
  // The row multipliers are a calibrated martingale measure on the scope:
  // the x column forces total mass one, the strategy columns force zero
  // node-wise increment and option expectations, and the dual objective is
  // the measure's expectation of g.
  Measure q;
  q.w.assign(m.num_paths(), Rat(0));
  Rat expectation;
  for (std::size_t i = 0; i < scope.size(); ++i) {
    q.w[scope[i]] = (*out.dual)[i];
    expectation += (*out.dual)[i] * g[scope[i]];
  }
  res.dual_measure = std::move(q);
  res.gap = *out.value - expectation;
  return res;
}

QuasiSureResult price_quasisure(const Market& m, const LevelSetPartition& part,
                                const PriorSet& pr, const PayoffVector& g) {
  validate_priors(m, part, pr);
  QuasiSureResult out;
  out.extremal = full_support_measure(m, part, pr);
  out.scope = out.extremal.support();
  out.result = price_pathwise(m, part, out.scope, g);
  out.result.scope_tag = "quasi-sure";
  return out;
}

namespace {

// Largest expectation of g over calibrated martingale measures supported
// inside `carrier`; -inf when the family is empty.
ExtPrice measure_sup(const Market& m, const LevelSetPartition& part,
                     const PathSet& carrier, const PayoffVector& g) {
  if (carrier.empty()) return ExtPrice::minus_inf();
  RatVec obj(carrier.size());
  for (std::size_t i = 0; i < carrier.size(); ++i) obj[i] = g[carrier[i]];
  LinearProgram lp = LinearProgram::maximize(obj);
  lp.nonnegative();
  lp.add(RatVec(carrier.size(), Rat(1)), Rel::Eq, Rat(1));
  for (std::size_t t = 0; t < m.T; ++t)
    for (const auto& node : part.levels[t]) {
      PathSet in = set_intersect(node, carrier);
      if (in.empty()) continue;
      for (std::size_t i = 0; i < m.d; ++i) {
        RatVec row(carrier.size());
        bool nonzero = false;
        for (std::size_t j = 0; j < carrier.size(); ++j)
          if (contains(in, carrier[j])) {
            row[j] = m.increment(carrier[j], t + 1)[i];
            nonzero = nonzero || row[j].sign() != 0;
          }
        if (nonzero) lp.add(std::move(row), Rel::Eq, Rat(0));
      }
    }
  for (const auto& opt : m.options) {
    RatVec row(carrier.size());
    for (std::size_t j = 0; j < carrier.size(); ++j)
      row[j] = opt.payoff[carrier[j]];
    lp.add(std::move(row), Rel::Eq, Rat(0));
  }
  LpOutcome out = solve_checked(lp);
  if (out.status != LpStatus::Optimal) return ExtPrice::minus_inf();
  return ExtPrice::finite(*out.value);
}

}  // namespace

DualityChain duality_chain(const Market& m, const LevelSetPartition& part,
                           const PriorSet& pr, const PayoffVector& g) {
  validate_priors(m, part, pr);
  DualityChain ch;
  ArbitrageVerdict qs = detect_quasi_sure(m, part, pr);
  if (qs.present) {
    // The theorem assumes no quasi-sure arbitrage; on a finite path space
    // the five quantities still agree (all are -inf exactly when the
    // support carries no calibrated martingale measure), so the values are
    // reported anyway with the flag lowered.
    ch.applicable = false;
    ch.note = "quasi-sure arbitrage present; the equality chain is reported "
              "outside its stated hypothesis";
  }
  QuasiSureResult qsr = price_quasisure(m, part, pr, g);
  const PathSet& omega = qsr.scope;
  EfficientSet core = omega_star_oracle(m, part, omega);
  ch.values.emplace_back("sup-martingale-on-support",
                         measure_sup(m, part, omega, g));
  ch.values.emplace_back(
      "pathwise-on-core", price_pathwise(m, part, core.retained, g).price);
  ch.values.emplace_back("extremal-measure",
                         price_pathwise(m, part, omega, g).price);
  ch.values.emplace_back("quasi-sure", qsr.result.price);
  // On a finite tree the measures dominated by the prior family are exactly
  // those supported inside the quasi-sure support.
  ch.values.emplace_back("sup-dominated-measures",
                         measure_sup(m, part, omega, g));
  ch.all_equal = true;
  for (const auto& [label, v] : ch.values)
    if (!(v == ch.values.front().second)) ch.all_equal = false;
  return ch;
}

BackwardInduction backward_induction(const Market& m,
                                     const LevelSetPartition& part,
                                     const PathSet& scope,
                                     const PayoffVector& g) {
  if (m.num_options() > 0)
    throw SuperhedgeError("OptionsPresent",
                          "dynamic programming needs a market without "
                          "statically traded options");
  if (scope.empty())
    throw SuperhedgeError("EmptyScope", "nothing to price");
  BackwardInduction bi;
  bi.values.resize(m.T + 1);
  // Terminal layer: per time-T-1 node (partition order), per in-scope
  // terminal group, the worst claim value inside the group.
  std::vector<std::vector<Rat>> terminal(part.levels[m.T - 1].size());
  for (std::size_t nd = 0; nd < part.levels[m.T - 1].size(); ++nd) {
    PathSet in = set_intersect(part.levels[m.T - 1][nd], scope);
    if (in.empty()) continue;
    for (const auto& grp : successors(m, in, m.T - 1)) {
      Rat v = g[grp.paths.front()];
      for (std::size_t p : grp.paths) v = max(v, g[p]);
      terminal[nd].push_back(v);
      bi.values[m.T].push_back(v);
    }
  }
  for (std::size_t ti = m.T; ti-- > 0;) {
    bi.values[ti].assign(part.levels[ti].size(), Rat(0));
    for (std::size_t nd = 0; nd < part.levels[ti].size(); ++nd) {
      PathSet in = set_intersect(part.levels[ti][nd], scope);
      if (in.empty()) continue;
      auto succ = successors(m, in, ti);
      if (succ.empty())
        throw SuperhedgeError("EmptyNode", "node lost all successors");
      // One-step price: min x with x + H . dS(v) >= child value.
      RatVec c(1 + m.d);
      c[0] = Rat(1);
      LinearProgram lp = LinearProgram::minimize(c);
      for (std::size_t gi = 0; gi < succ.size(); ++gi) {
        Rat child;
        if (ti + 1 == m.T) {
          child = terminal[nd][gi];
        } else {
          std::size_t cn = part.node_of(ti + 1, succ[gi].paths.front());
          child = bi.values[ti + 1][cn];
        }
        RatVec a(1 + m.d);
        a[0] = Rat(1);
        for (std::size_t i = 0; i < m.d; ++i) a[1 + i] = succ[gi].dS[i];
        lp.add(std::move(a), Rel::Ge, child);
      }
      LpOutcome out = solve_checked(lp);
      if (out.status != LpStatus::Optimal)
        throw SuperhedgeError("NodeUnbounded",
                              "one-step price is -inf; use the efficient "
                              "core as the scope");
      bi.values[ti][nd] = *out.value;
    }
  }
  bi.root = bi.values[0][part.node_of(0, scope.front())];
  return bi;
}

ExtensionReport extension_report(const Market& m, const LevelSetPartition& part,
                                 const PathSet& scope, const PayoffVector& g) {
  if (m.num_options() > 0)
    throw SuperhedgeError("OptionsPresent",
                          "the extension checker assumes no static options");
  if (scope.empty()) throw SuperhedgeError("EmptyScope", "nothing to check");
  ExtensionReport rep;
  EfficientSet es = omega_star_oracle(m, part, scope);
  const PathSet& core = es.retained;
  rep.price_core = price_pathwise(m, part, core, g).price;
  rep.price_full = price_pathwise(m, part, scope, g).price;
  rep.extension_holds = rep.price_core == rep.price_full;
  for (std::size_t t = 0; t < m.T; ++t)
    for (std::size_t nd = 0; nd < part.levels[t].size(); ++nd) {
      PathSet in = set_intersect(part.levels[t][nd], scope);
      if (in.empty()) continue;
      auto succ = successors(m, in, t);
      PathSet in_core = set_intersect(part.levels[t][nd], core);
      std::vector<RatVec> core_incs;
      if (!in_core.empty())
        for (const auto& grp : successors(m, in_core, t))
          core_incs.push_back(grp.dS);
      ExtensionReport::NodeReport nr;
      nr.t = t;
      nr.node = nd;
      auto is_core_inc = [&](const RatVec& v) {
        for (const auto& w : core_incs)
          if (w == v) return true;
        return false;
      };
      for (std::size_t gi = 0; gi < succ.size(); ++gi) {
        if (is_core_inc(succ[gi].dS)) continue;
        RatVec proj = project_onto_span(core_incs, succ[gi].dS);
        if (is_core_inc(proj)) continue;
        nr.outside_groups.push_back(gi);
        // The finite form of the limit assumption: an outside increment may
        // not already lie in the span of the core increments.
        if (in_span(core_incs, succ[gi].dS)) nr.limit_ok = false;
      }
      Separator sep = node_separator(m, succ);
      nr.separator = sep.xi;
      for (std::size_t gi = 0; gi < succ.size(); ++gi) {
        if (!set_intersect(succ[gi].paths, core).empty()) continue;
        if (std::find(sep.strict.begin(), sep.strict.end(), gi) ==
            sep.strict.end())
          nr.separator_ok = false;  // one sweep does not remove this group
      }
      rep.assumption_limit_ok = rep.assumption_limit_ok && nr.limit_ok;
      rep.assumption_separator_ok =
          rep.assumption_separator_ok && nr.separator_ok;
      rep.nodes.push_back(std::move(nr));
    }
  return rep;
}

ExtPrice poly_price(const PolyMarket& pm, const PolyOption& claim) {
  if (pm.cells.empty()) return ExtPrice::minus_inf();  // empty-scope price
  validate_poly(pm);
  if (claim.pieces.size() != pm.cells.size())
    throw SuperhedgeError("InvalidPolyMarket",
                          "claim needs one affine piece per cell");
  const std::size_t k = pm.options.size(), d = pm.dim();
  RatVec c(1 + k + d);
  c[0] = Rat(1);
  LinearProgram lp = LinearProgram::minimize(c);
  for (std::size_t cc = 0; cc < pm.cells.size(); ++cc) {
    CellGeometry geo = cell_geometry(pm.cells[cc]);
    const auto& [ga, gb] = claim.pieces[cc];
    for (const auto& v : geo.vertices) {
      RatVec a(1 + k + d);
      a[0] = Rat(1);
      for (std::size_t l = 0; l < k; ++l) {
        const auto& [oa, ob] = pm.options[l].pieces[cc];
        a[1 + l] = dot(oa, v) + ob;
      }
      for (std::size_t i = 0; i < d; ++i) a[1 + k + i] = v[i] - pm.s0[i];
      lp.add(std::move(a), Rel::Ge, dot(ga, v) + gb);
    }
    for (const auto& r : geo.rays) {
      RatVec a(1 + k + d);
      for (std::size_t l = 0; l < k; ++l)
        a[1 + l] = dot(pm.options[l].pieces[cc].first, r);
      for (std::size_t i = 0; i < d; ++i) a[1 + k + i] = r[i];
      lp.add(std::move(a), Rel::Ge, dot(ga, r));  // hedge drift beats claim
    }
  }
  LpOutcome out = solve_checked(lp);
  if (out.status == LpStatus::Unbounded) return ExtPrice::minus_inf();
  if (out.status != LpStatus::Optimal)
    throw std::logic_error("poly price LP infeasible");
  return ExtPrice::finite(*out.value);
}

Rat divergence_probe(long n) {
  if (n < 1) throw SuperhedgeError("NotPerfectSquare", "n must be positive");
  long msq = 1;
  while (msq * msq < n) ++msq;
  if (msq * msq != n)
    throw SuperhedgeError("NotPerfectSquare",
                          "n must be a perfect square for an exact probe");
  const Rat mval(msq);
  // One-period two-asset market: the efficient-core sample pins the second
  // hedge coordinate to 1, the boundary scenario at horizontal distance 1/n
  // then forces the first one up to 4*sqrt(n). Claim per scenario: second
  // increment capped at 5, beyond that 5 * (increment - 4).
  std::vector<RatVec> incs = {
      {Rat(0), Rat(0)}, {Rat(0), Rat(-2)}, {Rat(0), Rat(5)},
      {Rat(1, n), Rat(5) + Rat(1, msq)}};
  RatVec claim = {Rat(0), Rat(-2), Rat(5),
                  Rat(5) * (Rat(1) + Rat(1, msq))};
  // Capital-0 superhedge: H . dS >= claim; minimize the first coordinate.
  RatVec c = {Rat(1), Rat(0)};
  LinearProgram lp = LinearProgram::minimize(c);
  for (std::size_t p = 0; p < incs.size(); ++p)
    lp.add(incs[p], Rel::Ge, claim[p]);
  LpOutcome out = solve_checked(lp);
  if (out.status != LpStatus::Optimal)
    throw std::logic_error("divergence probe LP not optimal");
  return *out.value;
}

}  // namespace rfm
