#include "rfm/arbitrage.hpp"

#include <algorithm>

namespace rfm {

namespace {

// Feasibility of {payoff >= rhs per listed row} over free strategy
// variables, optionally with extra rows and variable bounds applied first.
LpOutcome strategy_feasible(const StrategySpace& sp,
                            const std::vector<std::pair<RatVec, Rat>>& ge_rows,
                            const std::vector<std::pair<std::size_t, int>>&
                                sign_fix = {}) {
  LinearProgram lp = LinearProgram::minimize(RatVec(sp.num_vars));
  for (const auto& [col, sgn] : sign_fix) {
    if (sgn >= 0) lp.set_lower(col, Rat(0));
    if (sgn <= 0) lp.set_upper(col, Rat(0));
  }
  for (const auto& [row, rhs] : ge_rows) lp.add(row, Rel::Ge, rhs);
  return solve_checked(lp);
}

PathSet strict_set(const Market& m, const LevelSetPartition& part,
                   const Strategy& s, const PathSet& scope) {
  PayoffVector pay = payoff(m, part, s);
  PathSet out;
  for (std::size_t p : scope)
    if (pay[p].sign() > 0) out.push_back(p);
  return out;
}

// payoff >= 0 on scope, payoff >= 1 on gamma.
ArbitrageVerdict class_one(const Market& m, const LevelSetPartition& part,
                           const StrategySpace& sp, const PathSet& scope,
                           const PathSet& gamma) {
  std::vector<std::pair<RatVec, Rat>> rows;
  for (std::size_t p : scope)
    rows.emplace_back(sp.coeff[p], contains(gamma, p) ? Rat(1) : Rat(0));
  LpOutcome res = strategy_feasible(sp, rows);
  ArbitrageVerdict v;
  v.notion = "ClassS";
  if (res.status == LpStatus::Optimal) {
    v.present = true;
    v.witness = sp.unpack(*res.primal);
    v.witness_strict = strict_set(m, part, *v.witness, scope);
  } else {
    v.absence_certificates.push_back(res);
  }
  return v;
}

}  // namespace

ArbitrageVerdict detect_usa(const Market& m, const LevelSetPartition& part,
                            const PathSet& scope) {
  if (scope.empty())
    throw ArbitrageError("EmptyScope", "uniform detection needs a scope");
  StrategySpace sp = strategy_space(m, part);
  std::vector<std::pair<RatVec, Rat>> rows;
  for (std::size_t p : scope) rows.emplace_back(sp.coeff[p], Rat(1));
  LpOutcome res = strategy_feasible(sp, rows);
  ArbitrageVerdict v;
  v.notion = "USA";
  if (res.status == LpStatus::Optimal) {
    v.present = true;
    v.witness = sp.unpack(*res.primal);
    v.witness_strict = scope;
  } else {
    v.absence_certificates.push_back(res);
  }
  return v;
}

ArbitrageVerdict detect_sa(const Market& m, const LevelSetPartition& part,
                           const PathSet& scope) {
  ArbitrageVerdict v = detect_usa(m, part, scope);
  v.notion = "SA";
  v.note = "on a finite scope everywhere-strict positivity scales to a "
           "uniform bound, so the uniform system decides both notions";
  return v;
}

ArbitrageVerdict detect_1pa(const Market& m, const LevelSetPartition& part,
                            const PathSet& scope) {
  if (scope.empty())
    throw ArbitrageError("EmptyScope", "one-point detection needs a scope");
  StrategySpace sp = strategy_space(m, part);
  ArbitrageVerdict out;
  out.notion = "1pA";
  for (std::size_t p : scope) {
    ArbitrageVerdict v = class_one(m, part, sp, scope, {p});
    if (v.present) {
      v.notion = "1pA";
      return v;
    }
    out.absence_certificates.push_back(v.absence_certificates.front());
  }
  return out;
}

ArbitrageVerdict detect_oa(const Market& m, const LevelSetPartition& part,
                           const PathSet& scope) {
  ArbitrageVerdict v = detect_1pa(m, part, scope);
  v.notion = "OA";
  v.note = "every nonempty subset of a finite discrete space is open, so "
           "the open-set notion coincides with the one-point notion";
  return v;
}

ClassSVerdict detect_class_s(const Market& m, const LevelSetPartition& part,
                             const PathSet& scope,
                             const std::vector<PathSet>& class_sets) {
  if (scope.empty())
    throw ArbitrageError("EmptyScope", "class detection needs a scope");
  StrategySpace sp = strategy_space(m, part);
  ClassSVerdict out;
  for (const auto& gamma : class_sets) {
    if (gamma.empty() || !set_minus(gamma, scope).empty())
      throw ArbitrageError("GammaNotInScope",
                           "each class set must be a nonempty subset of the "
                           "scope");
    ArbitrageVerdict v = class_one(m, part, sp, scope, gamma);
    out.any_present = out.any_present || v.present;
    out.per_gamma.push_back(std::move(v));
  }
  return out;
}

ArbitrageVerdict detect_quasi_sure(const Market& m,
                                   const LevelSetPartition& part,
                                   const PriorSet& pr) {
  QuasiSureSupport qs = quasi_sure_support(m, part, pr);
  ArbitrageVerdict v = detect_1pa(m, part, qs.omega);
  v.notion = "A_P";
  if (v.present) {
    // The uniform mixture charges the whole support, in particular the
    // strict set, so it witnesses the positive-probability requirement.
    v.witness_generator = full_support_measure(m, part, pr);
  }
  return v;
}

WeakClassicalReport detect_weak_and_classical(const Market& m,
                                              const LevelSetPartition& part,
                                              const PriorSet& pr) {
  WeakClassicalReport rep;
  rep.weak.notion = "WA";
  rep.classical.notion = "CA";
  bool all = true;
  for (const auto& P : generator_products(m, part, pr)) {
    ArbitrageVerdict v = detect_1pa(m, part, P.support());
    v.notion = "A(P)";
    if (v.present) {
      v.witness_generator = P;
      if (!rep.weak.present) {
        rep.weak.present = true;
        rep.weak.witness = v.witness;
        rep.weak.witness_strict = v.witness_strict;
        rep.weak.witness_generator = P;
      }
    } else {
      all = false;
      for (const auto& c : v.absence_certificates)
        if (rep.weak.absence_certificates.size() < 64)
          rep.weak.absence_certificates.push_back(c);
    }
    rep.per_measure.emplace_back(P, v);
  }
  rep.classical.present = all;
  if (all && !rep.per_measure.empty()) {
    rep.classical.witness = rep.per_measure.front().second.witness;
    rep.classical.witness_strict = rep.per_measure.front().second.witness_strict;
    rep.classical.witness_generator = rep.per_measure.front().first;
    rep.classical.note = "every product measure admits its own witness; the "
                         "per-measure table lists them";
  }
  return rep;
}

ArbitrageVerdict detect_local(const Market& m, const LevelSetPartition& part,
                              const PriorSet& pr, std::size_t t,
                              std::size_t node) {
  if (t >= m.T || node >= part.levels[t].size())
    throw ArbitrageError("NodeNotFound", "no such node");
  validate_priors(m, part, pr);
  auto succ = successors(m, part.levels[t][node], t);
  std::vector<std::size_t> supported;
  for (std::size_t v = 0; v < succ.size(); ++v)
    for (const auto& g : pr.gens[t][node])
      if (g[v].sign() > 0) {
        supported.push_back(v);
        break;
      }
  ArbitrageVerdict out;
  out.notion = "locA";
  for (std::size_t target : supported) {
    // One-step system over H in Rat^d only.
    LinearProgram lp = LinearProgram::minimize(RatVec(m.d));
    for (std::size_t v : supported)
      lp.add(succ[v].dS, Rel::Ge, v == target ? Rat(1) : Rat(0));
    LpOutcome res = solve_checked(lp);
    if (res.status == LpStatus::Optimal) {
      out.present = true;
      Strategy s = zero_strategy(m, part);
      s.H[t][node] = *res.primal;
      out.witness = std::move(s);
      out.witness_strict = succ[target].paths;
      return out;
    }
    out.absence_certificates.push_back(res);
  }
  return out;
}

IntAVerdict detect_int_arbitrage(const Market& m, const LevelSetPartition& part,
                                 const PriorSet& pr) {
  const std::size_t k = m.num_options();
  if (k > 12)
    throw ArbitrageError("TooManyOptions",
                         "sign-pattern enumeration is bounded at 12 options");
  QuasiSureSupport qs = quasi_sure_support(m, part, pr);
  StrategySpace sp = strategy_space(m, part);
  IntAVerdict out;
  out.verdict.notion = "IntA";

  // Enumerate sign patterns. For a fixed pattern the shift adds
  // eps * sum_l sigma_l h_l — a scalar independent of the path and
  // nonnegative under the sign constraints — to every payoff. A single
  // strategy therefore survives every small shift iff its unshifted payoff
  // is nonnegative on the support and either (A) strictly positive on some
  // supported path or (B) the shift coefficient itself is positive. Both
  // are plain cone feasibility systems.
  std::vector<std::vector<int>> patterns{{}};
  patterns.back().resize(k, -1);
  for (;;) {
    std::vector<int> next = patterns.back();
    std::size_t l = 0;
    while (l < k && next[l] == 1) next[l++] = -1;
    if (l == k) break;
    ++next[l];
    patterns.push_back(std::move(next));
  }

  auto run_pattern = [&](const std::vector<int>& sigma, bool record_fail) {
    std::vector<std::pair<std::size_t, int>> fix;
    for (std::size_t l = 0; l < k; ++l) fix.emplace_back(sp.h_col(l), sigma[l]);
    std::vector<std::pair<RatVec, Rat>> base;
    for (std::size_t p : qs.omega) base.emplace_back(sp.coeff[p], Rat(0));
    RatVec shift(sp.num_vars);
    for (std::size_t l = 0; l < k; ++l) shift[sp.h_col(l)] = Rat(sigma[l]);

    {  // (A) strictly positive somewhere already without any shift.
      auto rows = base;
      RatVec sum(sp.num_vars);
      for (std::size_t p : qs.omega)
        for (std::size_t j = 0; j < sp.num_vars; ++j) sum[j] += sp.coeff[p][j];
      rows.emplace_back(std::move(sum), Rat(1));
      LpOutcome res = strategy_feasible(sp, rows, fix);
      if (res.status == LpStatus::Optimal) {
        out.verdict.present = true;
        out.verdict.witness = sp.unpack(*res.primal);
        out.verdict.witness_strict =
            strict_set(m, part, *out.verdict.witness, qs.omega);
        out.verdict.sign_pattern = sigma;
        return true;
      }
      if (record_fail) out.verdict.absence_certificates.push_back(res);
    }
    if (k > 0) {  // (B) strictness supplied by the shift itself.
      auto rows = base;
      rows.emplace_back(shift, Rat(1));
      LpOutcome res = strategy_feasible(sp, rows, fix);
      if (res.status == LpStatus::Optimal) {
        out.verdict.present = true;
        out.verdict.witness = sp.unpack(*res.primal);
        out.verdict.witness_strict = qs.omega;  // payoff >= eps everywhere
        out.verdict.sign_pattern = sigma;
        out.verdict.note = "strict positivity is supplied by the payoff "
                           "shift: the shifted payoff is at least eps on the "
                           "whole support";
        return true;
      }
      if (record_fail) out.verdict.absence_certificates.push_back(res);
    }
    return false;
  };

  std::vector<int> found_sigma;
  for (const auto& sigma : patterns)
    if (run_pattern(sigma, !out.verdict.present && k <= 2)) {
      found_sigma = sigma;
      break;
    }

  // Shift schedule, recorded per epsilon: feasibility of a quasi-sure
  // arbitrage in the eps-shifted market for some pattern (the found one, or
  // scanning all when absent).
  for (long den : {1L, 2L, 4L, 8L, 16L, 32L}) {
    Rat eps(1, den);
    bool feas = false;
    auto probe = [&](const std::vector<int>& sigma) {
      std::vector<std::pair<std::size_t, int>> fix;
      for (std::size_t l = 0; l < k; ++l)
        fix.emplace_back(sp.h_col(l), sigma[l]);
      std::vector<std::pair<RatVec, Rat>> rows;
      RatVec sum(sp.num_vars);
      for (std::size_t p : qs.omega) {
        RatVec row = sp.coeff[p];
        for (std::size_t l = 0; l < k; ++l)
          row[sp.h_col(l)] += eps * Rat(sigma[l]);
        for (std::size_t j = 0; j < sp.num_vars; ++j) sum[j] += row[j];
        rows.emplace_back(std::move(row), Rat(0));
      }
      rows.emplace_back(std::move(sum), Rat(1));
      return strategy_feasible(sp, rows, fix).status == LpStatus::Optimal;
    };
    if (out.verdict.present) {
      feas = probe(found_sigma);
    } else {
      for (const auto& sigma : patterns)
        if (probe(sigma)) {
          feas = true;
          break;
        }
    }
    out.schedule.emplace_back(eps, feas);
  }
  if (!out.verdict.present && !out.schedule.empty() &&
      out.schedule.back().second) {
    out.verdict.note =
        "the shifted market admits an arbitrage at every tested shift size, "
        "but no single strategy survives all sufficiently small shifts; "
        "decided by the shift-free characterization";
  }
  return out;
}

RelationsReport lemma_relations_check(const Market& m,
                                      const LevelSetPartition& part,
                                      const PriorSet& pr,
                                      const std::vector<PathSet>& class_sets) {
  QuasiSureSupport qs = quasi_sure_support(m, part, pr);
  const PathSet& omega = qs.omega;

  RelationsReport rep;
  auto record = [&](const std::string& name, bool present) {
    rep.verdicts.emplace_back(name, present);
    return present;
  };
  bool usa = record("USA", detect_usa(m, part, omega).present);
  bool sa = record("SA", detect_sa(m, part, omega).present);
  bool oa = record("OA", detect_oa(m, part, omega).present);
  bool onepa = record("1pA", detect_1pa(m, part, omega).present);
  bool ap = record("A_P", detect_quasi_sure(m, part, pr).present);
  WeakClassicalReport wc = detect_weak_and_classical(m, part, pr);
  bool wa = record("WA", wc.weak.present);
  bool ca = record("CA", wc.classical.present);
  bool inta = record("IntA", detect_int_arbitrage(m, part, pr).verdict.present);

  std::vector<PathSet> eligible;
  for (const auto& c : class_sets)
    if (!c.empty() && set_minus(c, omega).empty()) eligible.push_back(c);
  if (!eligible.empty())
    record("ClassS", detect_class_s(m, part, omega, eligible).any_present);

  bool loc_any = false;
  for (std::size_t t = 0; t < m.T && !loc_any; ++t)
    for (std::size_t nd = 0; nd < part.levels[t].size(); ++nd)
      if (!set_intersect(part.levels[t][nd], omega).empty() &&
          detect_local(m, part, pr, t, nd).present) {
        loc_any = true;
        break;
      }
  record("locA-some-node", loc_any);

  auto implies = [&](const std::string& a, bool va, const std::string& b,
                     bool vb) {
    if (va && !vb) {
      rep.ok = false;
      rep.violations.push_back(a + " holds but " + b + " does not");
    }
  };
  implies("USA", usa, "SA", sa);
  implies("SA", sa, "OA", oa);
  implies("OA", oa, "1pA", onepa);
  implies("A_P", ap, "WA", wa);
  implies("CA", ca, "WA", wa);
  implies("A_P", ap, "IntA", inta);
  if (m.num_options() == 0 && ap != loc_any) {
    rep.ok = false;
    rep.violations.push_back(
        "without options, quasi-sure arbitrage must hold exactly when some "
        "reachable node admits a one-step arbitrage");
  }
  return rep;
}

}  // namespace rfm
