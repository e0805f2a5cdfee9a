#include "rfm/market.hpp"

#include <algorithm>
#include <map>

namespace rfm {

RatVec Market::increment(std::size_t path, std::size_t t) const {
  RatVec out(d);
  for (std::size_t i = 0; i < d; ++i)
    out[i] = paths[path].S[t][i] - paths[path].S[t - 1][i];
  return out;
}

PathSet all_paths(const Market& m) {
  PathSet s(m.num_paths());
  for (std::size_t p = 0; p < s.size(); ++p) s[p] = p;
  return s;
}

bool contains(const PathSet& s, std::size_t p) {
  return std::binary_search(s.begin(), s.end(), p);
}

PathSet set_minus(const PathSet& a, const PathSet& b) {
  PathSet out;
  std::set_difference(a.begin(), a.end(), b.begin(), b.end(),
                      std::back_inserter(out));
  return out;
}

PathSet set_union(const PathSet& a, const PathSet& b) {
  PathSet out;
  std::set_union(a.begin(), a.end(), b.begin(), b.end(),
                 std::back_inserter(out));
  return out;
}

PathSet set_intersect(const PathSet& a, const PathSet& b) {
  PathSet out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(),
                        std::back_inserter(out));
  return out;
}

std::size_t LevelSetPartition::node_of(std::size_t t, std::size_t path) const {
  const auto& nodes = levels.at(t);
  for (std::size_t i = 0; i < nodes.size(); ++i)
    if (contains(nodes[i], path)) return i;
  throw std::out_of_range("path not present in partition level");
}

LevelSetPartition validate(const Market& m) {
  if (m.paths.empty()) throw MarketError("NoPaths", "market has no paths");
  if (m.T == 0 || m.d == 0)
    throw MarketError("DimensionMismatch", "T and d must be positive");
  {
    std::vector<std::string> ids;
    for (const auto& p : m.paths) ids.push_back(p.id);
    std::sort(ids.begin(), ids.end());
    auto dup = std::adjacent_find(ids.begin(), ids.end());
    if (dup != ids.end())
      throw MarketError("DuplicatePathId", "duplicate path id '" + *dup + "'");
  }
  for (const auto& p : m.paths) {
    if (p.S.size() != m.T + 1)
      throw MarketError("DimensionMismatch",
                        "path '" + p.id + "' has wrong trajectory length");
    for (const auto& s : p.S)
      if (s.size() != m.d)
        throw MarketError("DimensionMismatch",
                          "path '" + p.id + "' has wrong price dimension");
  }
  for (std::size_t p = 1; p < m.num_paths(); ++p)
    if (m.paths[p].S[0] != m.paths[0].S[0])
      throw MarketError("InconsistentS0",
                        "path '" + m.paths[p].id + "' disagrees at time 0");
  for (const auto& opt : m.options)
    if (opt.payoff.size() != m.num_paths())
      throw MarketError("DimensionMismatch",
                        "option '" + opt.name + "' payoff length mismatch");

  LevelSetPartition part;
  part.levels.resize(m.T);
  // t = 0: one node holding everything (S0 already checked equal).
  part.levels[0] = {all_paths(m)};
  for (std::size_t t = 1; t < m.T; ++t) {
    // Split each node at t-1 by S_t; deterministic order by first path index.
    for (const auto& node : part.levels[t - 1]) {
      std::vector<PathSet> groups;
      for (std::size_t p : node) {
        bool placed = false;
        for (auto& g : groups)
          if (m.price(g[0], t) == m.price(p, t)) {
            g.push_back(p);
            placed = true;
            break;
          }
        if (!placed) groups.push_back({p});
      }
      for (auto& g : groups) part.levels[t].push_back(std::move(g));
    }
  }
  return part;
}

Strategy zero_strategy(const Market& m, const LevelSetPartition& part) {
  Strategy s;
  s.h.assign(m.num_options(), Rat(0));
  s.H.resize(m.T);
  for (std::size_t t = 0; t < m.T; ++t)
    s.H[t].assign(part.levels[t].size(), RatVec(m.d));
  return s;
}

PayoffVector payoff(const Market& m, const LevelSetPartition& part,
                    const Strategy& s) {
  if (s.h.size() != m.num_options() || s.H.size() != m.T)
    throw MarketError("DimensionMismatch", "strategy shape mismatch");
  for (std::size_t t = 0; t < m.T; ++t)
    if (s.H[t].size() != part.levels[t].size())
      throw MarketError("DimensionMismatch", "strategy node count mismatch");
  PayoffVector out(m.num_paths());
  for (std::size_t p = 0; p < m.num_paths(); ++p) {
    Rat v;
    for (std::size_t l = 0; l < m.num_options(); ++l)
      v += s.h[l] * m.options[l].payoff[p];
    for (std::size_t t = 0; t < m.T; ++t) {
      const RatVec& H = s.H[t][part.node_of(t, p)];
      if (H.size() != m.d)
        throw MarketError("DimensionMismatch", "strategy asset dim mismatch");
      RatVec dS = m.increment(p, t + 1);
      v += dot(H, dS);
    }
    out[p] = v;
  }
  return out;
}

std::size_t StrategySpace::H_col(std::size_t t, std::size_t node,
                                 std::size_t i) const {
  std::size_t col = k;
  for (std::size_t u = 0; u < t; ++u) col += part->levels[u].size() * m->d;
  return col + node * m->d + i;
}

Strategy StrategySpace::unpack(const RatVec& x) const {
  Strategy s = zero_strategy(*m, *part);
  for (std::size_t l = 0; l < k; ++l) s.h[l] = x[l];
  for (std::size_t t = 0; t < m->T; ++t)
    for (std::size_t nd = 0; nd < part->levels[t].size(); ++nd)
      for (std::size_t i = 0; i < m->d; ++i)
        s.H[t][nd][i] = x[H_col(t, nd, i)];
  return s;
}

StrategySpace strategy_space(const Market& m, const LevelSetPartition& part) {
  StrategySpace sp;
  sp.k = m.num_options();
  sp.m = &m;
  sp.part = &part;
  sp.num_vars = sp.k;
  for (std::size_t t = 0; t < m.T; ++t)
    sp.num_vars += part.levels[t].size() * m.d;
  sp.coeff.assign(m.num_paths(), RatVec(sp.num_vars));
  for (std::size_t p = 0; p < m.num_paths(); ++p) {
    for (std::size_t l = 0; l < sp.k; ++l)
      sp.coeff[p][l] = m.options[l].payoff[p];
    for (std::size_t t = 0; t < m.T; ++t) {
      std::size_t nd = part.node_of(t, p);
      RatVec dS = m.increment(p, t + 1);
      for (std::size_t i = 0; i < m.d; ++i)
        sp.coeff[p][sp.H_col(t, nd, i)] = dS[i];
    }
  }
  return sp;
}

PathSet Measure::support() const {
  PathSet s;
  for (std::size_t p = 0; p < w.size(); ++p)
    if (w[p].sign() > 0) s.push_back(p);
  return s;
}

Rat Measure::total() const {
  Rat t;
  for (const auto& x : w) t += x;
  return t;
}

MartingaleCheck is_martingale_measure(const Market& m,
                                      const LevelSetPartition& part,
                                      const Measure& q, const PathSet& scope) {
  if (q.w.size() != m.num_paths())
    throw MarketError("DimensionMismatch", "measure length mismatch");
  for (const auto& x : q.w)
    if (x.sign() < 0)
      throw MarketError("NotNormalized", "negative weight");
  if (!q.normalized())
    throw MarketError("NotNormalized", "weights do not sum to one");

  MartingaleCheck res;
  for (std::size_t p : q.support())
    if (!contains(scope, p)) {
      res.ok = false;
      res.violations.push_back("support leaves scope at path '" +
                               m.paths[p].id + "'");
    }
  for (std::size_t t = 0; t < m.T; ++t)
    for (std::size_t nd = 0; nd < part.levels[t].size(); ++nd) {
      RatVec sum(m.d);
      for (std::size_t p : part.levels[t][nd]) {
        if (q.w[p].sign() == 0) continue;
        RatVec dS = m.increment(p, t + 1);
        for (std::size_t i = 0; i < m.d; ++i) sum[i] += q.w[p] * dS[i];
      }
      for (std::size_t i = 0; i < m.d; ++i)
        if (sum[i].sign() != 0) {
          res.ok = false;
          res.violations.push_back(
              "node " + std::to_string(nd) + " at time " + std::to_string(t) +
              " has expected increment " + sum[i].str() + " in asset " +
              std::to_string(i));
        }
    }
  for (const auto& opt : m.options) {
    Rat e = dot(q.w, opt.payoff);
    if (e.sign() != 0) {
      res.ok = false;
      res.violations.push_back("option '" + opt.name + "' has expectation " +
                               e.str());
    }
  }
  return res;
}

std::vector<SuccessorGroup> successors(const Market& m, const PathSet& node,
                                       std::size_t t) {
  std::vector<SuccessorGroup> out;
  for (std::size_t p : node) {
    bool placed = false;
    for (auto& g : out)
      if (m.price(g.paths[0], t + 1) == m.price(p, t + 1)) {
        g.paths.push_back(p);
        placed = true;
        break;
      }
    if (!placed) out.push_back(SuccessorGroup{m.increment(p, t + 1), {p}});
  }
  return out;
}

}  // namespace rfm
