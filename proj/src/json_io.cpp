#include "rfm/json_io.hpp"

#include <fstream>

namespace rfm {

using nlohmann::json;

namespace {

Rat rat_field(const json& j, const std::string& where) {
  try {
    if (j.is_string()) return Rat::parse(j.get<std::string>());
    if (j.is_number_integer()) return Rat(j.get<long>());
  } catch (const std::domain_error& e) {
    throw JsonError("SchemaError", where + ": " + e.what());
  }
  throw JsonError("SchemaError",
                  where + ": expected a rational string like \"p/q\"");
}

RatVec ratvec_field(const json& j, const std::string& where) {
  if (!j.is_array())
    throw JsonError("SchemaError", where + ": expected an array");
  RatVec out;
  for (std::size_t i = 0; i < j.size(); ++i)
    out.push_back(rat_field(j[i], where + "[" + std::to_string(i) + "]"));
  return out;
}

const json& need(const json& j, const std::string& key,
                 const std::string& where) {
  if (!j.is_object() || !j.contains(key))
    throw JsonError("SchemaError", where + ": missing field '" + key + "'");
  return j.at(key);
}

}  // namespace

json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw JsonError("ParseError", "cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw JsonError("ParseError", path + ": " + e.what());
  }
}

Market market_from_json(const json& j) {
  Market m;
  m.T = need(j, "T", "market").get<std::size_t>();
  m.d = need(j, "d", "market").get<std::size_t>();
  const json& paths = need(j, "paths", "market");
  if (!paths.is_array() || paths.empty())
    throw JsonError("SchemaError", "market.paths: expected a nonempty array");
  for (std::size_t p = 0; p < paths.size(); ++p) {
    std::string where = "market.paths[" + std::to_string(p) + "]";
    PathRecord rec;
    rec.id = need(paths[p], "id", where).get<std::string>();
    const json& S = need(paths[p], "S", where);
    if (!S.is_array())
      throw JsonError("SchemaError", where + ".S: expected an array");
    for (std::size_t t = 0; t < S.size(); ++t)
      rec.S.push_back(ratvec_field(S[t], where + ".S[" + std::to_string(t) + "]"));
    m.paths.push_back(std::move(rec));
  }
  if (j.contains("options")) {
    const json& opts = j.at("options");
    if (!opts.is_array())
      throw JsonError("SchemaError", "market.options: expected an array");
    for (std::size_t o = 0; o < opts.size(); ++o) {
      std::string where = "market.options[" + std::to_string(o) + "]";
      OptionRecord rec;
      rec.name = need(opts[o], "name", where).get<std::string>();
      rec.payoff = ratvec_field(need(opts[o], "payoff", where), where + ".payoff");
      m.options.push_back(std::move(rec));
    }
  }
  return m;
}

std::size_t path_index(const Market& m, const std::string& id) {
  for (std::size_t p = 0; p < m.num_paths(); ++p)
    if (m.paths[p].id == id) return p;
  throw JsonError("SchemaError", "unknown path id '" + id + "'");
}

PriorSet priors_from_json(const json& j, const Market& m,
                          const LevelSetPartition& part) {
  if (!j.is_array() || j.size() != m.T)
    throw JsonError("SchemaError", "priors: expected an array of length T");
  PriorSet pr;
  pr.gens.resize(m.T);
  for (std::size_t t = 0; t < m.T; ++t)
    pr.gens[t].resize(part.levels[t].size());
  for (std::size_t t = 0; t < m.T; ++t) {
    if (!j[t].is_array())
      throw JsonError("SchemaError", "priors[" + std::to_string(t) + "]");
    for (const json& nodeobj : j[t]) {
      std::string where = "priors[" + std::to_string(t) + "]";
      const json& nref = need(nodeobj, "node", where);
      std::size_t rep = path_index(m, need(nref, "path", where + ".node").get<std::string>());
      std::size_t nd = part.node_of(t, rep);
      auto succ = successors(m, part.levels[t][nd], t);
      for (const json& g : need(nodeobj, "generators", where)) {
        RatVec weights(succ.size(), Rat(0));
        for (auto it = g.begin(); it != g.end(); ++it) {
          std::size_t p = path_index(m, it.key());
          bool placed = false;
          for (std::size_t v = 0; v < succ.size(); ++v)
            if (contains(succ[v].paths, p)) {
              weights[v] += rat_field(it.value(), where + ".generators");
              placed = true;
              break;
            }
          if (!placed)
            throw JsonError("SchemaError",
                            where + ": path '" + it.key() +
                                "' is not a successor of the node");
        }
        pr.gens[t][nd].push_back(std::move(weights));
      }
    }
  }
  return pr;
}

PolyMarket poly_from_json(const json& j) {
  PolyMarket pm;
  pm.s0 = ratvec_field(need(j, "s0", "poly"), "poly.s0");
  const std::size_t d = pm.s0.size();
  for (const json& c : need(j, "cells", "poly")) {
    Cell cell;
    cell.lo = ratvec_field(need(c, "lo", "poly.cell"), "poly.cell.lo");
    const json& hi = need(c, "hi", "poly.cell");
    if (!hi.is_array() || hi.size() != d)
      throw JsonError("SchemaError", "poly.cell.hi: expected an array of length d");
    for (const json& h : hi) {
      if (h.is_string() && h.get<std::string>() == "inf")
        cell.hi.push_back(std::nullopt);
      else
        cell.hi.push_back(rat_field(h, "poly.cell.hi"));
    }
    for (const json& b : need(c, "lo_open", "poly.cell"))
      cell.lo_open.push_back(b.get<bool>());
    for (const json& b : need(c, "hi_open", "poly.cell"))
      cell.hi_open.push_back(b.get<bool>());
    pm.cells.push_back(std::move(cell));
  }
  if (j.contains("options")) {
    std::size_t idx = 0;
    for (const json& o : j.at("options")) {
      PolyOption opt;
      opt.name = "phi" + std::to_string(idx++);
      if (!o.is_array())
        throw JsonError("SchemaError",
                        "poly.option: expected an array of per-cell pieces");
      for (const json& piece : o)
        opt.pieces.emplace_back(
            ratvec_field(need(piece, "a", "poly.option.piece"), "poly.option.a"),
            rat_field(need(piece, "b", "poly.option.piece"), "poly.option.b"));
      pm.options.push_back(std::move(opt));
    }
  }
  return pm;
}

PayoffVector claim_from_json(const json& j, const Market& m, std::string* name) {
  if (name) *name = need(j, "name", "claim").get<std::string>();
  PayoffVector g = ratvec_field(need(j, "g", "claim"), "claim.g");
  if (g.size() != m.num_paths())
    throw JsonError("SchemaError", "claim.g: length must match path count");
  return g;
}

std::vector<PathSet> class_sets_from_json(const json& j, const Market& m) {
  if (!j.is_array())
    throw JsonError("SchemaError", "class-sets: expected an array of arrays");
  std::vector<PathSet> out;
  for (const json& c : j) {
    PathSet s;
    for (const json& id : c) s.push_back(path_index(m, id.get<std::string>()));
    std::sort(s.begin(), s.end());
    s.erase(std::unique(s.begin(), s.end()), s.end());
    out.push_back(std::move(s));
  }
  return out;
}

json rat_json(const Rat& r) { return r.str(); }

json ratvec_json(const RatVec& v) {
  json a = json::array();
  for (const auto& x : v) a.push_back(rat_json(x));
  return a;
}

json pathset_json(const Market& m, const PathSet& s) {
  json a = json::array();
  for (std::size_t p : s) a.push_back(m.paths[p].id);
  return a;
}

json measure_json(const Market& m, const Measure& q) {
  json o = json::object();
  for (std::size_t p = 0; p < q.w.size(); ++p)
    if (q.w[p].sign() != 0) o[m.paths[p].id] = rat_json(q.w[p]);
  return o;
}

json strategy_json(const Market& m, const LevelSetPartition& part,
                   const Strategy& s) {
  json o;
  o["h"] = ratvec_json(s.h);
  json H = json::array();
  for (std::size_t t = 0; t < s.H.size(); ++t) {
    json level = json::array();
    for (std::size_t nd = 0; nd < s.H[t].size(); ++nd) {
      json e;
      e["node"] = pathset_json(m, part.levels[t][nd]);
      e["H"] = ratvec_json(s.H[t][nd]);
      level.push_back(std::move(e));
    }
    H.push_back(std::move(level));
  }
  o["H"] = std::move(H);
  return o;
}

json lp_outcome_json(const LpOutcome& out) {
  json o;
  o["status"] = out.status == LpStatus::Optimal      ? "optimal"
                : out.status == LpStatus::Infeasible ? "infeasible"
                                                     : "unbounded";
  if (out.value) o["value"] = rat_json(*out.value);
  if (out.primal) o["primal"] = ratvec_json(*out.primal);
  if (out.dual) o["dual"] = ratvec_json(*out.dual);
  if (out.certificate) o["certificate"] = ratvec_json(*out.certificate);
  return o;
}

}  // namespace rfm
