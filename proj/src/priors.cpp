#include "rfm/priors.hpp"

#include <algorithm>

#include "rfm/arbitrage.hpp"

namespace rfm {

void validate_priors(const Market& m, const LevelSetPartition& part,
                     const PriorSet& pr) {
  if (pr.gens.size() != m.T)
    throw PriorError("InvalidPriors", "generator table has wrong depth");
  for (std::size_t t = 0; t < m.T; ++t) {
    if (pr.gens[t].size() != part.levels[t].size())
      throw PriorError("InvalidPriors",
                       "node count mismatch at time " + std::to_string(t));
    for (std::size_t nd = 0; nd < part.levels[t].size(); ++nd) {
      const auto& gens = pr.gens[t][nd];
      if (gens.empty())
        throw PriorError("InvalidPriors",
                         "node without generators at time " + std::to_string(t));
      std::size_t nsucc = successors(m, part.levels[t][nd], t).size();
      for (const auto& g : gens) {
        if (g.size() != nsucc)
          throw PriorError("InvalidPriors", "generator width mismatch");
        Rat total;
        for (const auto& w : g) {
          if (w.sign() < 0)
            throw PriorError("InvalidPriors", "negative generator weight");
          total += w;
        }
        if (total != Rat(1))
          throw PriorError("InvalidPriors", "generator weights must sum to one");
      }
    }
  }
}

QuasiSureSupport quasi_sure_support(const Market& m,
                                    const LevelSetPartition& part,
                                    const PriorSet& pr) {
  validate_priors(m, part, pr);
  QuasiSureSupport out;
  out.supported.resize(m.T);
  std::vector<char> alive(m.num_paths(), 1);
  for (std::size_t t = 0; t < m.T; ++t) {
    out.supported[t].resize(part.levels[t].size());
    for (std::size_t nd = 0; nd < part.levels[t].size(); ++nd) {
      auto succ = successors(m, part.levels[t][nd], t);
      for (std::size_t v = 0; v < succ.size(); ++v) {
        bool charged = false;
        for (const auto& g : pr.gens[t][nd])
          if (g[v].sign() > 0) { charged = true; break; }
        if (charged)
          out.supported[t][nd].push_back(v);
        else
          for (std::size_t p : succ[v].paths) alive[p] = 0;
      }
    }
  }
  for (std::size_t p = 0; p < m.num_paths(); ++p)
    if (alive[p]) out.omega.push_back(p);
  return out;
}

PriorSet priors_from_scenarios(const Market& m, const LevelSetPartition& part,
                               const PathSet& scope) {
  if (scope.empty())
    throw MarketError("EmptyScope", "scenario-to-prior bridge needs a scope");
  PriorSet pr;
  pr.gens.resize(m.T);
  for (std::size_t t = 0; t < m.T; ++t) {
    pr.gens[t].resize(part.levels[t].size());
    for (std::size_t nd = 0; nd < part.levels[t].size(); ++nd) {
      auto succ = successors(m, part.levels[t][nd], t);
      bool node_in_scope =
          !set_intersect(part.levels[t][nd], scope).empty();
      for (std::size_t v = 0; v < succ.size(); ++v) {
        bool eligible = node_in_scope
                            ? !set_intersect(succ[v].paths, scope).empty()
                            : true;  // unreachable node: keep full support
        if (!eligible) continue;
        RatVec point(succ.size(), Rat(0));
        point[v] = Rat(1);
        pr.gens[t][nd].push_back(std::move(point));
      }
    }
  }
  return pr;
}

namespace {

// One-step mixture weights per node (uniform over that node's generators).
std::vector<std::vector<RatVec>> mixture_weights(const Market& m,
                                                 const LevelSetPartition& part,
                                                 const PriorSet& pr) {
  std::vector<std::vector<RatVec>> mix(m.T);
  for (std::size_t t = 0; t < m.T; ++t) {
    mix[t].resize(part.levels[t].size());
    for (std::size_t nd = 0; nd < part.levels[t].size(); ++nd) {
      const auto& gens = pr.gens[t][nd];
      RatVec w(gens[0].size(), Rat(0));
      Rat share(1, static_cast<long>(gens.size()));
      for (const auto& g : gens)
        for (std::size_t v = 0; v < w.size(); ++v) w[v] += share * g[v];
      mix[t][nd] = std::move(w);
    }
  }
  return mix;
}

// Product measure from per-node one-step weights; paths sharing a full
// trajectory split their group's terminal mass equally.
Measure product_measure(const Market& m, const LevelSetPartition& part,
                        const std::vector<std::vector<RatVec>>& step) {
  Measure q;
  q.w.assign(m.num_paths(), Rat(1));
  for (std::size_t p = 0; p < m.num_paths(); ++p) {
    for (std::size_t t = 0; t < m.T; ++t) {
      std::size_t nd = part.node_of(t, p);
      auto succ = successors(m, part.levels[t][nd], t);
      for (std::size_t v = 0; v < succ.size(); ++v)
        if (contains(succ[v].paths, p)) {
          q.w[p] *= step[t][nd][v];
          if (t + 1 == m.T)
            q.w[p] /= Rat(static_cast<long>(succ[v].paths.size()));
          break;
        }
    }
  }
  return q;
}

}  // namespace

Measure full_support_measure(const Market& m, const LevelSetPartition& part,
                             const PriorSet& pr) {
  validate_priors(m, part, pr);
  return product_measure(m, part, mixture_weights(m, part, pr));
}

bool is_polar(const Market& m, const LevelSetPartition& part,
              const PriorSet& pr, const PathSet& subset) {
  Measure pf = full_support_measure(m, part, pr);
  return set_intersect(subset, pf.support()).empty();
}

std::vector<Measure> generator_products(const Market& m,
                                        const LevelSetPartition& part,
                                        const PriorSet& pr) {
  validate_priors(m, part, pr);
  // Odometer over one generator choice per node, (t, node) order.
  std::vector<std::pair<std::size_t, std::size_t>> slots;
  std::size_t count = 1;
  for (std::size_t t = 0; t < m.T; ++t)
    for (std::size_t nd = 0; nd < part.levels[t].size(); ++nd) {
      slots.emplace_back(t, nd);
      count *= pr.gens[t][nd].size();
      if (count > 4096)
        throw PriorError("TooManyGeneratorProducts",
                         "more than 4096 generator product measures");
    }
  std::vector<std::size_t> choice(slots.size(), 0);
  std::vector<Measure> out;
  std::vector<PathSet> seen_supports;
  for (;;) {
    std::vector<std::vector<RatVec>> step(m.T);
    for (std::size_t t = 0; t < m.T; ++t)
      step[t].resize(part.levels[t].size());
    for (std::size_t s = 0; s < slots.size(); ++s) {
      auto [t, nd] = slots[s];
      step[t][nd] = pr.gens[t][nd][choice[s]];
    }
    Measure q = product_measure(m, part, step);
    PathSet supp = q.support();
    if (std::find(seen_supports.begin(), seen_supports.end(), supp) ==
        seen_supports.end()) {
      seen_supports.push_back(supp);
      out.push_back(std::move(q));
    }
    std::size_t s = 0;
    while (s < slots.size()) {
      auto [t, nd] = slots[s];
      if (++choice[s] < pr.gens[t][nd].size()) break;
      choice[s] = 0;
      ++s;
    }
    if (s == slots.size()) break;
  }
  return out;
}

namespace {

bool all_same(const std::vector<FtapStatement>& st) {
  for (const auto& s : st)
    if (s.holds != st[0].holds) return false;
  return true;
}

}  // namespace

FtapReport ftap_quasi_sure(const Market& m, const LevelSetPartition& part,
                           const PriorSet& pr) {
  QuasiSureSupport qs = quasi_sure_support(m, part, pr);
  EfficientSet core = omega_star_oracle(m, part, qs.omega);
  FtapReport rep;

  {  // (1) the efficient core is everything up to a polar set.
    bool polar_rest = is_polar(m, part, pr, core.removed);
    // One-point arbitrage is absent on the core by construction (the core
    // is its own efficient set); record via idempotence.
    EfficientSet idem = core.retained.empty()
                            ? core
                            : omega_star_oracle(m, part, core.retained);
    bool n1pa = core.retained.empty() || idem.removed.empty();
    rep.statements.push_back(
        {"core-free-and-complement-polar", n1pa && polar_rest,
         "no one-point arbitrage on the efficient core and the rest of the "
         "support is polar"});
  }
  {  // (2) every generator product is dominated by a calibrated measure.
    bool ok = true;
    std::string note = "per product measure: a calibrated martingale measure "
                       "on the support charging its whole support";
    for (const auto& P : generator_products(m, part, pr)) {
      auto q = calibrated_measure_charging(m, part, qs.omega, P.support());
      if (!q) { ok = false; break; }
      if (!rep.witness_measure) rep.witness_measure = *q;
    }
    rep.statements.push_back({"all-priors-dominated", ok, note});
  }
  {  // (3) no quasi-sure arbitrage.
    ArbitrageVerdict v = detect_quasi_sure(m, part, pr);
    if (v.present && v.witness) rep.witness_strategy = v.witness;
    rep.statements.push_back(
        {"no-quasi-sure-arbitrage", !v.present, v.note});
  }
  rep.all_equivalent = all_same(rep.statements);
  return rep;
}

FtapReport robust_dmw(const Market& m, const LevelSetPartition& part,
                      const PriorSet& pr) {
  QuasiSureSupport qs = quasi_sure_support(m, part, pr);
  EfficientSet core = omega_star_oracle(m, part, qs.omega);
  FtapReport rep;

  {  // (1) a calibrated martingale measure dominated by the priors exists.
    auto q = calibrated_measure_touching(m, part, qs.omega, qs.omega);
    if (q && !rep.witness_measure) rep.witness_measure = *q;
    rep.statements.push_back({"dominated-calibrated-measure-exists",
                              q.has_value(), ""});
  }
  {  // (2) some prior charges the efficient core.
    bool ok = !is_polar(m, part, pr, core.retained);
    rep.statements.push_back(
        {"some-prior-charges-core", ok,
         "checked against the full-support mixture, itself a member of the "
         "family"});
  }
  {  // (3) a calibrated martingale measure on the support exists.
    bool ok = !core.retained.empty();
    rep.statements.push_back({"martingale-measure-exists", ok, ""});
  }
  {  // (4) the efficient core is nonempty.
    rep.statements.push_back({"core-nonempty", !core.retained.empty(), ""});
  }
  {  // (5) no strong arbitrage on the support.
    ArbitrageVerdict v = detect_sa(m, part, qs.omega);
    if (v.present && v.witness && !rep.witness_strategy)
      rep.witness_strategy = v.witness;
    rep.statements.push_back({"no-strong-arbitrage", !v.present, ""});
  }
  rep.all_equivalent = all_same(rep.statements);
  return rep;
}

FtapReport class_s_equivalence(const Market& m, const LevelSetPartition& part,
                               const PriorSet& pr,
                               const std::vector<PathSet>& class_sets) {
  QuasiSureSupport qs = quasi_sure_support(m, part, pr);
  EfficientSet support_core = omega_star_oracle(m, part, qs.omega);

  // Scope reduction: drop from the support the part of its efficient core
  // covered by class sets meeting the core only polarly. (On finite trees a
  // polar subset of the support is empty, so this is typically the support
  // itself; kept literal for fidelity.)
  PathSet B;
  for (const auto& C : class_sets)
    if (is_polar(m, part, pr, set_intersect(C, support_core.retained)))
      B = set_union(B, C);
  PathSet omega = set_minus(qs.omega, set_intersect(support_core.retained, B));

  EfficientSet core = omega.empty() ? EfficientSet{}
                                    : omega_star_oracle(m, part, omega);
  std::vector<PathSet> eligible;  // class sets inside the reduced scope
  for (const auto& C : class_sets)
    if (!C.empty() && set_minus(C, omega).empty()) eligible.push_back(C);

  FtapReport rep;
  {  // (1) every eligible class set is charged by a dominated calibrated measure.
    bool ok = true;
    for (const auto& C : eligible) {
      auto q = calibrated_measure_touching(m, part, qs.omega, C);
      if (!q) { ok = false; break; }
      if (!rep.witness_measure) rep.witness_measure = *q;
    }
    rep.statements.push_back({"each-class-set-charged-dominated", ok, ""});
  }
  {  // (2) every eligible class set meets the efficient core with positive mass.
    bool ok = true;
    for (const auto& C : eligible)
      if (is_polar(m, part, pr, set_intersect(C, core.retained))) {
        ok = false;
        break;
      }
    rep.statements.push_back({"each-class-set-meets-core", ok, ""});
  }
  {  // (3) every eligible class set is charged by a measure living on the scope.
    bool ok = true;
    for (const auto& C : eligible) {
      std::optional<Measure> q;
      if (!omega.empty()) q = calibrated_measure_touching(m, part, omega, C);
      if (!q) { ok = false; break; }
    }
    rep.statements.push_back({"each-class-set-charged-on-scope", ok, ""});
  }
  {  // (4) no class set fits inside the inefficient part of the scope.
    bool ok = true;
    for (const auto& C : class_sets)
      if (!C.empty() && set_minus(C, set_minus(omega, core.retained)).empty()) {
        ok = false;
        break;
      }
    rep.statements.push_back({"no-class-set-inside-inefficient-part", ok, ""});
  }
  {  // (5) no class arbitrage on the scope.
    bool present = false;
    if (!omega.empty() && !eligible.empty()) {
      ClassSVerdict v = detect_class_s(m, part, omega, eligible);
      present = v.any_present;
      for (const auto& g : v.per_gamma)
        if (g.present && g.witness && !rep.witness_strategy)
          rep.witness_strategy = g.witness;
    }
    rep.statements.push_back({"no-class-arbitrage", !present, ""});
  }
  rep.all_equivalent = all_same(rep.statements);
  return rep;
}

}  // namespace rfm
