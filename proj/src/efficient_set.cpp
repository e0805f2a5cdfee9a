#include "rfm/efficient_set.hpp"

#include <algorithm>

#include "rfm/linalg.hpp"

namespace rfm {

namespace {

// Rows of the homogeneous calibrated-martingale system over `scope`:
// per node and asset, the expected-increment row; per option, the
// expectation row. Columns are indexed by position in `scope`.
std::vector<RatVec> measure_rows(const Market& m, const LevelSetPartition& part,
                                 const PathSet& scope) {
  std::vector<RatVec> rows;
  for (std::size_t t = 0; t < m.T; ++t)
    for (const auto& node : part.levels[t]) {
      PathSet in = set_intersect(node, scope);
      if (in.empty()) continue;
      std::vector<RatVec> block(m.d, RatVec(scope.size()));
      bool nonzero = false;
      for (std::size_t p : in) {
        std::size_t col =
            std::lower_bound(scope.begin(), scope.end(), p) - scope.begin();
        RatVec dS = m.increment(p, t + 1);
        for (std::size_t i = 0; i < m.d; ++i) {
          block[i][col] = dS[i];
          if (dS[i].sign() != 0) nonzero = true;
        }
      }
      if (nonzero)
        for (auto& r : block) rows.push_back(std::move(r));
    }
  for (const auto& opt : m.options) {
    RatVec r(scope.size());
    bool nonzero = false;
    for (std::size_t c = 0; c < scope.size(); ++c) {
      r[c] = opt.payoff[scope[c]];
      if (r[c].sign() != 0) nonzero = true;
    }
    if (nonzero) rows.push_back(std::move(r));
  }
  return rows;
}

// Shared core of the two charging helpers: target rows as per-path lower
// bounds (each) or one aggregate >= 1 row (touching).
std::optional<Measure> charging_lp(const Market& m,
                                   const LevelSetPartition& part,
                                   const PathSet& carrier,
                                   const PathSet& target, bool each) {
  if (carrier.empty() || target.empty()) return std::nullopt;
  for (std::size_t p : target)
    if (!contains(carrier, p)) return std::nullopt;
  LinearProgram lp = LinearProgram::minimize(RatVec(carrier.size()));
  lp.nonnegative();
  for (const auto& r : measure_rows(m, part, carrier)) lp.add(r, Rel::Eq, Rat(0));
  if (each) {
    for (std::size_t p : target) {
      std::size_t col =
          std::lower_bound(carrier.begin(), carrier.end(), p) - carrier.begin();
      lp.set_lower(col, Rat(1));
    }
  } else {
    RatVec row(carrier.size());
    for (std::size_t p : target) {
      std::size_t col =
          std::lower_bound(carrier.begin(), carrier.end(), p) - carrier.begin();
      row[col] = Rat(1);
    }
    lp.add(row, Rel::Ge, Rat(1));
  }
  LpOutcome res = solve_checked(lp);
  if (res.status != LpStatus::Optimal) return std::nullopt;
  Rat total;
  for (const auto& w : *res.primal) total += w;
  Measure q;
  q.w.assign(m.num_paths(), Rat(0));
  for (std::size_t j = 0; j < carrier.size(); ++j)
    q.w[carrier[j]] = (*res.primal)[j] / total;
  return q;
}

}  // namespace

std::optional<Measure> calibrated_measure_charging(const Market& m,
                                                   const LevelSetPartition& part,
                                                   const PathSet& carrier,
                                                   const PathSet& target) {
  return charging_lp(m, part, carrier, target, true);
}

std::optional<Measure> calibrated_measure_touching(const Market& m,
                                                    const LevelSetPartition& part,
                                                    const PathSet& carrier,
                                                    const PathSet& target) {
  return charging_lp(m, part, carrier, target, false);
}

EfficientSet omega_star_oracle(const Market& m, const LevelSetPartition& part,
                               const PathSet& scope) {
  if (scope.empty())
    throw MarketError("EmptyScope", "efficient-set oracle needs a scope");
  EfficientSet out;
  out.method = "oracle";
  std::vector<char> known_retained(scope.size(), 0);

  for (std::size_t c = 0; c < scope.size(); ++c) {
    if (known_retained[c]) continue;
    auto q = calibrated_measure_charging(m, part, scope, {scope[c]});
    if (q) {
      // Every path the witness charges is retained by the same measure.
      for (std::size_t j = 0; j < scope.size(); ++j)
        if (q->w[scope[j]].sign() > 0) {
          known_retained[j] = 1;
          out.witness.emplace(scope[j], *q);
        }
    }
  }
  for (std::size_t c = 0; c < scope.size(); ++c) {
    if (known_retained[c]) {
      out.retained.push_back(scope[c]);
    } else {
      out.removed.push_back(scope[c]);
      out.removal_reason.emplace(scope[c],
                                 "no calibrated martingale measure on the "
                                 "scope charges this path");
    }
  }
  return out;
}

Separator node_separator(const Market& m,
                         const std::vector<SuccessorGroup>& succ) {
  (void)m;
  const std::size_t d = succ.empty() ? 0 : succ[0].dS.size();
  const std::size_t nv = succ.size();
  // Variables: xi (free, d) then one slack per successor group in [0,1].
  RatVec obj(d + nv);
  for (std::size_t v = 0; v < nv; ++v) obj[d + v] = Rat(1);
  LinearProgram lp = LinearProgram::maximize(obj);
  for (std::size_t v = 0; v < nv; ++v) {
    RatVec strict(d + nv), weak(d + nv);
    for (std::size_t i = 0; i < d; ++i) strict[i] = weak[i] = succ[v].dS[i];
    strict[d + v] = Rat(-1);
    lp.add(strict, Rel::Ge, Rat(0));  // xi . dS_v >= s_v
    lp.add(weak, Rel::Ge, Rat(0));    // xi . dS_v >= 0
    lp.set_lower(d + v, Rat(0));
    lp.set_upper(d + v, Rat(1));
  }
  LpOutcome res = solve_checked(lp);
  if (res.status != LpStatus::Optimal)
    throw std::logic_error("separator LP must be bounded and feasible");
  Separator sep;
  sep.xi.assign(res.primal->begin(), res.primal->begin() + d);
  for (std::size_t v = 0; v < nv; ++v) {
    if ((*res.primal)[d + v] == Rat(1))
      sep.strict.push_back(v);
    else
      sep.null.push_back(v);
  }
  return sep;
}

EfficientSet aggregator_fixpoint(const Market& m, const LevelSetPartition& part,
                                 const PathSet& scope) {
  if (scope.empty())
    throw MarketError("EmptyScope", "aggregator needs a scope");
  EfficientSet out;
  out.method = "scheme";
  PathSet retained = scope;
  bool changed = true;
  while (changed && !retained.empty()) {
    changed = false;
    for (std::size_t ti = m.T; ti-- > 0;) {
      for (const auto& node : part.levels[ti]) {
        PathSet in = set_intersect(node, retained);
        if (in.empty()) continue;
        auto succ = successors(m, in, ti);
        Separator sep = node_separator(m, succ);
        for (std::size_t v : sep.strict) {
          for (std::size_t p : succ[v].paths) {
            std::string xi_txt;
            for (const auto& x : sep.xi)
              xi_txt += (xi_txt.empty() ? "" : ",") + x.str();
            out.removal_reason.emplace(
                p, "separated at time " + std::to_string(ti) + " by xi=(" +
                       xi_txt + ")");
          }
          retained = set_minus(retained, succ[v].paths);
          changed = true;
        }
      }
    }
  }
  out.retained = retained;
  out.removed = set_minus(scope, retained);
  return out;
}

namespace {

// Searches for a static direction alpha outside span(prev) admitting a
// nonnegative combined payoff on `core`. Completeness: the feasible (h,H)
// set is a cone; its alpha-projection escapes span(prev) iff the maximum of
// +/- alpha . w over the normalized cone is positive for some null-space
// basis vector w of the previous directions.
std::optional<std::pair<RatVec, Strategy>> find_direction(
    const Market& m, const StrategySpace& sp, const PathSet& core,
    const std::vector<RatVec>& prev) {
  const std::size_t k = m.num_options();
  std::vector<RatVec> basis =
      prev.empty() ? nullspace_basis({RatVec(k)}, k) : nullspace_basis(prev, k);
  const std::size_t nv = sp.num_vars;
  for (const RatVec& w : basis) {
    for (int sgn : {+1, -1}) {
      // Variables: positive and negative parts of the strategy vector.
      RatVec obj(2 * nv);
      for (std::size_t l = 0; l < k; ++l) {
        obj[l] = Rat(sgn) * w[l];
        obj[nv + l] = -Rat(sgn) * w[l];
      }
      LinearProgram lp = LinearProgram::maximize(obj);
      lp.nonnegative();
      RatVec norm(2 * nv, Rat(1));
      lp.add(norm, Rel::Le, Rat(1));
      for (std::size_t p : core) {
        RatVec row(2 * nv);
        for (std::size_t j = 0; j < nv; ++j) {
          row[j] = sp.coeff[p][j];
          row[nv + j] = -sp.coeff[p][j];
        }
        lp.add(row, Rel::Ge, Rat(0));
      }
      LpOutcome res = solve_checked(lp);
      if (res.status == LpStatus::Optimal && res.value->sign() > 0) {
        RatVec x(nv);
        for (std::size_t j = 0; j < nv; ++j)
          x[j] = (*res.primal)[j] - (*res.primal)[nv + j];
        Strategy s = sp.unpack(x);
        RatVec alpha = s.h;
        return std::make_pair(alpha, s);
      }
    }
  }
  return std::nullopt;
}

}  // namespace

PartitionScheme partition_scheme(const Market& m, const LevelSetPartition& part,
                                 const PathSet& scope) {
  if (scope.empty())
    throw MarketError("EmptyScope", "partition scheme needs a scope");
  StrategySpace sp = strategy_space(m, part);
  PartitionScheme scheme;
  PathSet A = scope;
  std::vector<RatVec> prev;
  const std::size_t k = m.num_options();
  for (;;) {
    PathSet core = A.empty() ? A : aggregator_fixpoint(m, part, A).retained;
    if (core.empty() || scheme.steps.size() >= k) {
      scheme.final_set = core;
      break;
    }
    auto found = find_direction(m, sp, core, prev);
    if (!found) {
      scheme.final_set = core;
      break;
    }
    const auto& [alpha, strat] = *found;
    PayoffVector pay = payoff(m, part, strat);
    PathSet equality;
    for (std::size_t p : core)
      if (pay[p].sign() == 0) equality.push_back(p);
    scheme.steps.push_back(
        PartitionScheme::Step{alpha, strat, equality, core});
    prev.push_back(alpha);
    A = equality;
  }
  return scheme;
}

SchemeReport verify_scheme(const Market& m, const LevelSetPartition& part,
                           const PathSet& scope) {
  SchemeReport rep;
  rep.oracle = omega_star_oracle(m, part, scope);
  rep.scheme = partition_scheme(m, part, scope);
  rep.match = rep.oracle.retained == rep.scheme.final_set;
  return rep;
}

}  // namespace rfm
