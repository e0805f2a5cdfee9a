// Command-line front end: loads market/prior/claim files, runs any analysis
// from the library, and emits deterministic JSON (or a flat table) with every
// witness and certificate needed for third-party re-verification. The
// `verify` subcommand re-checks a previously emitted report by arithmetic
// alone, without re-solving anything.

#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>
#include <string>

#include "rfm/arbitrage.hpp"
#include "rfm/efficient_set.hpp"
#include "rfm/json_io.hpp"
#include "rfm/market.hpp"
#include "rfm/oneperiod_poly.hpp"
#include "rfm/priors.hpp"
#include "rfm/superhedge.hpp"

using nlohmann::json;
using namespace rfm;

namespace {

// ---------------------------------------------------------------------------
// Output helpers

void emit_table(const json& j, const std::string& prefix) {
  if (j.is_object()) {
    for (auto it = j.begin(); it != j.end(); ++it)
      emit_table(it.value(), prefix.empty() ? it.key() : prefix + "." + it.key());
  } else if (j.is_array()) {
    for (std::size_t i = 0; i < j.size(); ++i)
      emit_table(j[i], prefix + "[" + std::to_string(i) + "]");
  } else {
    std::cout << prefix << " = "
              << (j.is_string() ? j.get<std::string>() : j.dump()) << "\n";
  }
}

int emit(const json& report, const std::string& format, int code = 0) {
  if (format == "table")
    emit_table(report, "");
  else
    std::cout << report.dump(2) << "\n";
  return code;
}

// ---------------------------------------------------------------------------
// Input helpers

struct Inputs {
  std::string market_path, priors_path, claim_path, class_sets_path;
  std::string scope = "omega";
  std::string format = "json";
};

Market load_market_file(const std::string& path) {
  return market_from_json(load_json_file(path));
}

PathSet resolve_scope(const Inputs& in, const Market& m,
                      const LevelSetPartition& part, const PriorSet* pr) {
  if (in.scope == "omega") return all_paths(m);
  if (in.scope == "omega-star")
    return omega_star_oracle(m, part, all_paths(m)).retained;
  if (in.scope == "quasi-sure") {
    if (!pr)
      throw JsonError("SchemaError",
                      "--scope quasi-sure requires a --priors file");
    return quasi_sure_support(m, part, *pr).omega;
  }
  throw JsonError("SchemaError", "unknown scope '" + in.scope + "'");
}

json verdict_json(const Market& m, const LevelSetPartition& part,
                  const ArbitrageVerdict& v) {
  json o;
  o["notion"] = v.notion;
  o["present"] = v.present;
  if (v.witness) o["witness"] = strategy_json(m, part, *v.witness);
  if (!v.witness_strict.empty())
    o["witness_strict"] = pathset_json(m, v.witness_strict);
  if (v.witness_generator)
    o["witness_generator"] = measure_json(m, *v.witness_generator);
  if (!v.sign_pattern.empty()) o["sign_pattern"] = v.sign_pattern;
  if (!v.note.empty()) o["note"] = v.note;
  json certs = json::array();
  for (const auto& c : v.absence_certificates) certs.push_back(lp_outcome_json(c));
  if (!certs.empty()) o["absence_certificates"] = std::move(certs);
  return o;
}

json price_json(const Market& m, const LevelSetPartition& part,
                const SuperhedgeResult& res) {
  json o;
  o["price"] = res.price.str();
  o["gap"] = rat_json(res.gap);
  if (res.strategy) o["strategy"] = strategy_json(m, part, *res.strategy);
  if (res.dual_measure) o["dual_measure"] = measure_json(m, *res.dual_measure);
  if (res.price.kind == ExtPrice::MinusInf && res.lp && res.lp->certificate)
    o["ray"] = ratvec_json(*res.lp->certificate);
  return o;
}

json poly_verdict_json(const PolyVerdict& v) {
  json o;
  o["notion"] = v.notion;
  o["present"] = v.present;
  if (v.witness) {
    o["witness"]["h"] = ratvec_json(v.witness->h);
    o["witness"]["H"] = ratvec_json(v.witness->H);
  }
  if (v.epsilon) o["epsilon"] = rat_json(*v.epsilon);
  if (!v.boundary_note.empty()) o["boundary_note"] = v.boundary_note;
  if (v.measure) {
    o["measure"]["weights"] = ratvec_json(v.measure->w);
    json pts = json::array();
    for (const auto& p : v.measure_points) pts.push_back(ratvec_json(p));
    o["measure"]["points"] = std::move(pts);
  }
  if (v.lp) o["lp"] = lp_outcome_json(*v.lp);
  return o;
}

// Parsers for report verification (inverse of the helpers above).
RatVec ratvec_parse(const json& j) {
  RatVec v;
  for (const json& x : j) v.push_back(Rat::parse(x.get<std::string>()));
  return v;
}

Strategy strategy_parse(const json& j, const Market& m,
                        const LevelSetPartition& part) {
  Strategy s;
  s.h = ratvec_parse(j.at("h"));
  const json& H = j.at("H");
  s.H.resize(H.size());
  for (std::size_t t = 0; t < H.size(); ++t)
    for (std::size_t nd = 0; nd < H[t].size(); ++nd)
      s.H[t].push_back(ratvec_parse(H[t][nd].at("H")));
  if (s.H.size() != m.T) throw JsonError("SchemaError", "strategy level count");
  for (std::size_t t = 0; t < m.T; ++t)
    if (s.H[t].size() != part.levels[t].size())
      throw JsonError("SchemaError", "strategy node count");
  return s;
}

Measure measure_parse(const json& j, const Market& m) {
  Measure q;
  q.w.assign(m.num_paths(), Rat(0));
  for (auto it = j.begin(); it != j.end(); ++it)
    q.w[path_index(m, it.key())] = Rat::parse(it.value().get<std::string>());
  return q;
}

PathSet pathset_parse(const json& j, const Market& m) {
  PathSet s;
  for (const json& id : j) s.push_back(path_index(m, id.get<std::string>()));
  std::sort(s.begin(), s.end());
  return s;
}

// ---------------------------------------------------------------------------
// Commands

int cmd_price(const Inputs& in) {
  Market m = load_market_file(in.market_path);
  LevelSetPartition part = validate(m);
  std::string claim_name;
  PayoffVector g =
      claim_from_json(load_json_file(in.claim_path), m, &claim_name);
  json rep;
  rep["command"] = "price";
  rep["market"] = in.market_path;
  rep["claim"] = in.claim_path;
  rep["claim_name"] = claim_name;
  rep["scope"] = in.scope;
  SuperhedgeResult res;
  PathSet scope;
  if (in.scope == "quasi-sure") {
    if (in.priors_path.empty())
      throw JsonError("SchemaError",
                      "--scope quasi-sure requires a --priors file");
    PriorSet pr =
        priors_from_json(load_json_file(in.priors_path), m, part);
    QuasiSureResult qs = price_quasisure(m, part, pr, g);
    res = qs.result;
    scope = qs.scope;
    rep["priors"] = in.priors_path;
    rep["extremal_measure"] = measure_json(m, qs.extremal);
  } else {
    scope = resolve_scope(in, m, part, nullptr);
    res = price_pathwise(m, part, scope, g);
  }
  rep["scope_paths"] = pathset_json(m, scope);
  rep.update(price_json(m, part, res));
  return emit(rep, in.format, res.gap == Rat(0) ? 0 : 2);
}

int cmd_arbitrage(const Inputs& in) {
  Market m = load_market_file(in.market_path);
  LevelSetPartition part = validate(m);
  std::optional<PriorSet> pr;
  if (!in.priors_path.empty())
    pr = priors_from_json(load_json_file(in.priors_path), m, part);
  PathSet scope = resolve_scope(in, m, part, pr ? &*pr : nullptr);
  json rep;
  rep["command"] = "arbitrage";
  rep["market"] = in.market_path;
  rep["scope"] = in.scope;
  rep["scope_paths"] = pathset_json(m, scope);
  json verdicts = json::array();
  verdicts.push_back(verdict_json(m, part, detect_usa(m, part, scope)));
  verdicts.push_back(verdict_json(m, part, detect_sa(m, part, scope)));
  verdicts.push_back(verdict_json(m, part, detect_oa(m, part, scope)));
  verdicts.push_back(verdict_json(m, part, detect_1pa(m, part, scope)));
  if (pr) {
    rep["priors"] = in.priors_path;
    verdicts.push_back(verdict_json(m, part, detect_quasi_sure(m, part, *pr)));
    WeakClassicalReport wc = detect_weak_and_classical(m, part, *pr);
    verdicts.push_back(verdict_json(m, part, wc.weak));
    verdicts.push_back(verdict_json(m, part, wc.classical));
    IntAVerdict ia = detect_int_arbitrage(m, part, *pr);
    json iv = verdict_json(m, part, ia.verdict);
    json sched = json::array();
    for (const auto& [eps, feas] : ia.schedule) {
      json e;
      e["epsilon"] = rat_json(eps);
      e["feasible"] = feas;
      sched.push_back(std::move(e));
    }
    iv["schedule"] = std::move(sched);
    verdicts.push_back(std::move(iv));
    std::vector<PathSet> cls;
    if (!in.class_sets_path.empty())
      cls = class_sets_from_json(load_json_file(in.class_sets_path), m);
    RelationsReport rel = lemma_relations_check(m, part, *pr, cls);
    json rj;
    rj["ok"] = rel.ok;
    rj["violations"] = rel.violations;
    json vv = json::object();
    for (const auto& [name, val] : rel.verdicts) vv[name] = val;
    rj["verdicts"] = std::move(vv);
    rep["relations"] = std::move(rj);
    if (!rel.ok) {
      rep["verdicts"] = std::move(verdicts);
      return emit(rep, in.format, 2);
    }
  } else if (!in.class_sets_path.empty()) {
    auto cls = class_sets_from_json(load_json_file(in.class_sets_path), m);
    ClassSVerdict cs = detect_class_s(m, part, scope, cls);
    json per = json::array();
    for (const auto& v : cs.per_gamma) per.push_back(verdict_json(m, part, v));
    rep["class_verdicts"] = std::move(per);
  }
  rep["verdicts"] = std::move(verdicts);
  return emit(rep, in.format);
}

int cmd_efficient_set(const Inputs& in) {
  Market m = load_market_file(in.market_path);
  LevelSetPartition part = validate(m);
  std::optional<PriorSet> pr;
  if (!in.priors_path.empty())
    pr = priors_from_json(load_json_file(in.priors_path), m, part);
  PathSet scope = resolve_scope(in, m, part, pr ? &*pr : nullptr);
  SchemeReport sr = verify_scheme(m, part, scope);
  json rep;
  rep["command"] = "efficient-set";
  rep["market"] = in.market_path;
  rep["scope"] = in.scope;
  rep["scope_paths"] = pathset_json(m, scope);
  rep["retained"] = pathset_json(m, sr.oracle.retained);
  json removed = json::object();
  for (std::size_t p : sr.oracle.removed)
    removed[m.paths[p].id] = sr.oracle.removal_reason.count(p)
                                 ? sr.oracle.removal_reason.at(p)
                                 : "";
  rep["removed"] = std::move(removed);
  json wits = json::object();
  for (const auto& [p, q] : sr.oracle.witness)
    wits[m.paths[p].id] = measure_json(m, q);
  rep["witnesses"] = std::move(wits);
  rep["scheme_steps"] = sr.scheme.steps.size();
  rep["methods_agree"] = sr.match;
  return emit(rep, in.format, sr.match ? 0 : 2);
}

int cmd_ftap(const Inputs& in) {
  Market m = load_market_file(in.market_path);
  LevelSetPartition part = validate(m);
  PriorSet pr = priors_from_json(load_json_file(in.priors_path), m, part);
  json rep;
  rep["command"] = "ftap";
  rep["market"] = in.market_path;
  rep["priors"] = in.priors_path;
  auto report_json = [&](const FtapReport& r) {
    json o;
    json st = json::array();
    for (const auto& s : r.statements) {
      json e;
      e["label"] = s.label;
      e["holds"] = s.holds;
      if (!s.note.empty()) e["note"] = s.note;
      st.push_back(std::move(e));
    }
    o["statements"] = std::move(st);
    o["all_equivalent"] = r.all_equivalent;
    if (r.witness_measure) o["witness_measure"] = measure_json(m, *r.witness_measure);
    if (r.witness_strategy)
      o["witness_strategy"] = strategy_json(m, part, *r.witness_strategy);
    return o;
  };
  FtapReport ftap = ftap_quasi_sure(m, part, pr);
  FtapReport dmw = robust_dmw(m, part, pr);
  rep["quasi_sure_ftap"] = report_json(ftap);
  rep["robust_dmw"] = report_json(dmw);
  rep["all_equivalent"] = ftap.all_equivalent && dmw.all_equivalent;
  if (!in.class_sets_path.empty()) {
    auto cls = class_sets_from_json(load_json_file(in.class_sets_path), m);
    rep["class_equivalence"] = report_json(class_s_equivalence(m, part, pr, cls));
  }
  bool ok = ftap.all_equivalent && dmw.all_equivalent;
  return emit(rep, in.format, ok ? 0 : 2);
}

int cmd_duality_chain(const Inputs& in) {
  Market m = load_market_file(in.market_path);
  LevelSetPartition part = validate(m);
  PriorSet pr = priors_from_json(load_json_file(in.priors_path), m, part);
  PayoffVector g = claim_from_json(load_json_file(in.claim_path), m, nullptr);
  DualityChain ch = duality_chain(m, part, pr, g);
  json rep;
  rep["command"] = "duality-chain";
  rep["market"] = in.market_path;
  rep["priors"] = in.priors_path;
  rep["claim"] = in.claim_path;
  rep["applicable"] = ch.applicable;
  if (!ch.note.empty()) rep["note"] = ch.note;
  json vals = json::array();
  for (const auto& [label, v] : ch.values) {
    json e;
    e["label"] = label;
    e["value"] = v.str();
    vals.push_back(std::move(e));
  }
  rep["values"] = std::move(vals);
  rep["all_equal"] = ch.all_equal;
  return emit(rep, in.format, ch.all_equal ? 0 : 2);
}

int cmd_extension(const Inputs& in) {
  Market m = load_market_file(in.market_path);
  LevelSetPartition part = validate(m);
  PayoffVector g = claim_from_json(load_json_file(in.claim_path), m, nullptr);
  PathSet scope = resolve_scope(in, m, part, nullptr);
  ExtensionReport er = extension_report(m, part, scope, g);
  json rep;
  rep["command"] = "extension";
  rep["market"] = in.market_path;
  rep["claim"] = in.claim_path;
  rep["scope"] = in.scope;
  json nodes = json::array();
  for (const auto& nr : er.nodes) {
    json e;
    e["t"] = nr.t;
    e["node"] = nr.node;
    e["outside_groups"] = nr.outside_groups;
    e["limit_ok"] = nr.limit_ok;
    e["separator_ok"] = nr.separator_ok;
    e["separator"] = ratvec_json(nr.separator);
    nodes.push_back(std::move(e));
  }
  rep["nodes"] = std::move(nodes);
  rep["assumption_compactness_ok"] = true;  // vacuous on finite path sets
  rep["assumption_limit_ok"] = er.assumption_limit_ok;
  rep["assumption_separator_ok"] = er.assumption_separator_ok;
  rep["price_core"] = er.price_core.str();
  rep["price_full"] = er.price_full.str();
  rep["extension_holds"] = er.extension_holds;
  return emit(rep, in.format);
}

int cmd_poly(const Inputs& in) {
  PolyMarket pm = poly_from_json(load_json_file(in.market_path));
  json rep;
  rep["command"] = "poly";
  rep["market"] = in.market_path;
  rep["strict"] = poly_verdict_json(sa_check(pm));
  rep["uniform"] = poly_verdict_json(usa_check(pm));
  bool compact = true;
  for (const auto& c : pm.cells)
    for (const auto& h : c.hi)
      if (!h) compact = false;
  if (compact) {
    rep["supermartingale"] = poly_verdict_json(supermartingale_exists(pm));
    rep["no_short_selling_chain"] = poly_verdict_json(wflvr_check_compact(pm));
  } else {
    rep["note"] = "unbounded cells: supermartingale/limit checks skipped";
  }
  if (!in.claim_path.empty()) {
    json cj = load_json_file(in.claim_path);
    PolyOption claim;
    claim.name = cj.value("name", "claim");
    for (const json& piece : cj.at("pieces"))
      claim.pieces.emplace_back(ratvec_parse(piece.at("a")),
                                Rat::parse(piece.at("b").get<std::string>()));
    rep["claim_name"] = claim.name;
    rep["price"] = poly_price(pm, claim).str();
  }
  return emit(rep, in.format);
}

// ---------------------------------------------------------------------------
// Bundled example replays

int cmd_examples(const std::string& name, const std::string& dir,
                 const std::string& format) {
  auto fx = [&](const std::string& f) { return dir + "/" + f; };
  json rep;
  rep["command"] = "examples";
  rep["name"] = name;
  if (name == "binom") {
    Market m = load_market_file(fx("fix-binom.json"));
    LevelSetPartition part = validate(m);
    PayoffVector call = {Rat(1), Rat(0)};  // (S1 - 1)^+
    rep["call_price"] =
        price_json(m, part, price_pathwise(m, part, all_paths(m), call));
    PriorSet pr = priors_from_json(load_json_file(fx("pf-omega.json")), m, part);
    FtapReport f = ftap_quasi_sure(m, part, pr);
    rep["ftap_all_equivalent"] = f.all_equivalent;
    if (f.witness_measure)
      rep["martingale_measure"] = measure_json(m, *f.witness_measure);
  } else if (name == "gap") {
    Market m = load_market_file(fx("fix-gap.json"));
    LevelSetPartition part = validate(m);
    PayoffVector g = {Rat(1), Rat(0), Rat(0)};
    rep["pathwise"] =
        price_json(m, part, price_pathwise(m, part, all_paths(m), g));
    PriorSet pr =
        priors_from_json(load_json_file(fx("pf-gap-12.json")), m, part);
    rep["quasi_sure"] =
        price_json(m, part, price_quasisure(m, part, pr, g).result);
  } else if (name == "sausa") {
    PolyMarket pm = poly_from_json(load_json_file(fx("fix-sausa.json")));
    rep["strict"] = poly_verdict_json(sa_check(pm));
    rep["uniform"] = poly_verdict_json(usa_check(pm));
  } else if (name == "ex31") {
    PolyMarket pm = poly_from_json(load_json_file(fx("fix-ex31-poly.json")));
    PolyOption unit{"one", {{RatVec{Rat(0)}, Rat(1)}}};
    rep["price_closure"] = poly_price(pm, unit).str();
    PolyMarket empty;
    empty.s0 = pm.s0;
    rep["price_empty_core"] = poly_price(empty, PolyOption{"one", {}}).str();
  } else if (name == "ex32") {
    json probes = json::array();
    for (long n : {4L, 25L, 100L, 400L}) {
      json e;
      e["n"] = n;
      e["min_first_hedge"] = rat_json(divergence_probe(n));
      probes.push_back(std::move(e));
    }
    rep["probes"] = std::move(probes);
  } else if (name == "ex35") {
    Market m = load_market_file(fx("fix-ex35.json"));
    LevelSetPartition part = validate(m);
    PayoffVector g =
        claim_from_json(load_json_file(fx("fix-ex35-claim.json")), m, nullptr);
    rep["price_full"] =
        price_json(m, part, price_pathwise(m, part, all_paths(m), g));
    ExtensionReport er = extension_report(m, part, all_paths(m), g);
    rep["price_core"] = er.price_core.str();
    rep["assumption_separator_ok"] = er.assumption_separator_ok;
    rep["extension_holds"] = er.extension_holds;
    if (!er.nodes.empty())
      rep["root_separator"] = ratvec_json(er.nodes[0].separator);
    // The full-scope superhedging system at capital 1/2 is infeasible; the
    // Farkas certificate is validated by the checked solver.
    StrategySpace sp = strategy_space(m, part);
    LinearProgram half = LinearProgram::minimize(RatVec(sp.num_vars));
    for (std::size_t p = 0; p < m.num_paths(); ++p)
      half.add(sp.coeff[p], Rel::Ge, g[p] - Rat(1, 2));
    rep["capital_half"] = lp_outcome_json(solve_checked(half));
    // Restricted to the flat branch the claim costs nothing to hedge.
    rep["price_flat_branch"] =
        price_pathwise(m, part, {0, 1, 2}, g).price.str();
  } else if (name == "inta") {
    Market m = load_market_file(fx("fix-inta.json"));
    LevelSetPartition part = validate(m);
    PriorSet pr = priors_from_json(load_json_file(fx("pf-inta.json")), m, part);
    IntAVerdict ia = detect_int_arbitrage(m, part, pr);
    rep["interior_arbitrage"] = verdict_json(m, part, ia.verdict);
  } else {
    throw JsonError("SchemaError", "unknown example '" + name + "'");
  }
  return emit(rep, format);
}

// ---------------------------------------------------------------------------
// Report verification (arithmetic only; no solver calls)

struct VerifyState {
  int checks = 0;
  std::vector<std::string> failures;
  void check(bool ok, const std::string& what) {
    ++checks;
    if (!ok) failures.push_back(what);
  }
};

void verify_price_report(const json& rep, VerifyState& vs) {
  Market m = load_market_file(rep.at("market").get<std::string>());
  LevelSetPartition part = validate(m);
  PayoffVector g = claim_from_json(
      load_json_file(rep.at("claim").get<std::string>()), m, nullptr);
  PathSet scope = pathset_parse(rep.at("scope_paths"), m);
  std::string price = rep.at("price").get<std::string>();
  if (price == "-inf") {
    if (scope.empty()) {
      vs.check(true, "empty scope prices at -inf");
      return;
    }
    StrategySpace sp = strategy_space(m, part);
    RatVec ray = ratvec_parse(rep.at("ray"));
    vs.check(ray.size() == 1 + sp.num_vars, "ray width");
    vs.check(ray[0] < Rat(0), "ray lowers the capital");
    for (std::size_t p : scope) {
      Rat drift = ray[0];
      for (std::size_t j = 0; j < sp.num_vars; ++j)
        drift += sp.coeff[p][j] * ray[1 + j];
      vs.check(drift >= Rat(0), "ray keeps feasibility on " + m.paths[p].id);
    }
    return;
  }
  Rat x = Rat::parse(price);
  Strategy s = strategy_parse(rep.at("strategy"), m, part);
  PayoffVector pay = payoff(m, part, s);
  for (std::size_t p : scope)
    vs.check(x + pay[p] >= g[p], "superhedge on " + m.paths[p].id);
  Measure q = measure_parse(rep.at("dual_measure"), m);
  vs.check(is_martingale_measure(m, part, q, scope).ok,
           "dual is a calibrated martingale measure");
  Rat expectation;
  for (std::size_t p : scope) expectation += q.w[p] * g[p];
  vs.check(expectation == x, "dual expectation equals the price");
  vs.check(Rat::parse(rep.at("gap").get<std::string>()) == Rat(0), "zero gap");
}

void verify_arbitrage_report(const json& rep, VerifyState& vs) {
  Market m = load_market_file(rep.at("market").get<std::string>());
  LevelSetPartition part = validate(m);
  PathSet scope = pathset_parse(rep.at("scope_paths"), m);
  for (const json& v : rep.at("verdicts")) {
    std::string notion = v.at("notion").get<std::string>();
    if (!v.at("present").get<bool>() || !v.contains("witness")) continue;
    if (notion != "USA" && notion != "SA" && notion != "OA" && notion != "1pA")
      continue;  // prior-based witnesses live on their own scopes
    Strategy s = strategy_parse(v.at("witness"), m, part);
    PayoffVector pay = payoff(m, part, s);
    if (notion == "USA" || notion == "SA") {
      for (std::size_t p : scope)
        vs.check(pay[p] >= Rat(1), notion + " payoff floor on " + m.paths[p].id);
    } else {
      for (std::size_t p : scope)
        vs.check(pay[p] >= Rat(0), notion + " nonnegative on " + m.paths[p].id);
      PathSet strict = pathset_parse(v.at("witness_strict"), m);
      vs.check(!strict.empty(), notion + " has a strict path");
      for (std::size_t p : strict)
        vs.check(pay[p] >= Rat(1), notion + " strict on " + m.paths[p].id);
    }
  }
}

void verify_efficient_report(const json& rep, VerifyState& vs) {
  Market m = load_market_file(rep.at("market").get<std::string>());
  LevelSetPartition part = validate(m);
  PathSet scope = pathset_parse(rep.at("scope_paths"), m);
  PathSet retained = pathset_parse(rep.at("retained"), m);
  PathSet removed;
  for (auto it = rep.at("removed").begin(); it != rep.at("removed").end(); ++it)
    removed.push_back(path_index(m, it.key()));
  std::sort(removed.begin(), removed.end());
  vs.check(set_union(retained, removed) == scope &&
               set_intersect(retained, removed).empty(),
           "retained/removed partition the scope");
  for (auto it = rep.at("witnesses").begin(); it != rep.at("witnesses").end();
       ++it) {
    std::size_t p = path_index(m, it.key());
    Measure q = measure_parse(it.value(), m);
    vs.check(q.w[p] > Rat(0), "witness charges " + it.key());
    vs.check(is_martingale_measure(m, part, q, retained).ok,
             "witness for " + it.key() + " is calibrated on the retained set");
  }
}

void verify_ftap_report(const json& rep, VerifyState& vs) {
  Market m = load_market_file(rep.at("market").get<std::string>());
  LevelSetPartition part = validate(m);
  PriorSet pr = priors_from_json(
      load_json_file(rep.at("priors").get<std::string>()), m, part);
  PathSet omega = quasi_sure_support(m, part, pr).omega;
  for (const char* key : {"quasi_sure_ftap", "robust_dmw"}) {
    if (!rep.contains(key)) continue;
    const json& r = rep.at(key);
    bool first = true, val = false, same = true;
    for (const json& s : r.at("statements")) {
      bool h = s.at("holds").get<bool>();
      if (first) val = h, first = false;
      else same = same && (h == val);
    }
    vs.check(r.at("all_equivalent").get<bool>() == same,
             std::string(key) + " equivalence flag matches statements");
    if (r.contains("witness_measure")) {
      Measure q = measure_parse(r.at("witness_measure"), m);
      vs.check(is_martingale_measure(m, part, q, omega).ok,
               std::string(key) + " witness measure is calibrated");
    }
    if (r.contains("witness_strategy")) {
      Strategy s = strategy_parse(r.at("witness_strategy"), m, part);
      PayoffVector pay = payoff(m, part, s);
      bool nonneg = true, positive = false;
      for (std::size_t p : omega) {
        nonneg = nonneg && pay[p] >= Rat(0);
        positive = positive || pay[p] > Rat(0);
      }
      vs.check(nonneg && positive,
               std::string(key) + " witness strategy is an arbitrage");
    }
  }
}

int cmd_verify(const std::string& report_path, const std::string& format) {
  json rep = load_json_file(report_path);
  std::string command = rep.at("command").get<std::string>();
  VerifyState vs;
  try {
    if (command == "price")
      verify_price_report(rep, vs);
    else if (command == "arbitrage")
      verify_arbitrage_report(rep, vs);
    else if (command == "efficient-set")
      verify_efficient_report(rep, vs);
    else if (command == "ftap")
      verify_ftap_report(rep, vs);
    else
      throw JsonError("SchemaError",
                      "verification not supported for '" + command + "' reports");
  } catch (const JsonError&) {
    throw;  // malformed report or missing referenced file: an input error
  } catch (const std::exception& e) {
    // A certificate that violates an arithmetic precondition is a failed
    // verification, not a usage error.
    vs.check(false, std::string("exception during re-check: ") + e.what());
  }
  json out;
  out["command"] = "verify";
  out["report"] = report_path;
  out["verified_command"] = command;
  out["checks"] = vs.checks;
  out["failures"] = vs.failures;
  out["pass"] = vs.failures.empty();
  return emit(out, format, vs.failures.empty() ? 0 : 2);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact rational analysis of finite path-space markets"};
  app.require_subcommand(1);

  Inputs in;
  std::string example_name, fixtures_dir, report_path;
  std::uint64_t seed = 0;
  if (const char* env = std::getenv("RFM_FIXTURE_DIR")) fixtures_dir = env;
  if (fixtures_dir.empty()) fixtures_dir = "fixtures";

  auto add_common = [&](CLI::App* c, bool need_market) {
    auto* mopt = c->add_option("--market", in.market_path, "market JSON file");
    if (need_market) mopt->required();
    c->add_option("--priors", in.priors_path, "priors JSON file");
    c->add_option("--claim", in.claim_path, "claim JSON file");
    c->add_option("--class-sets", in.class_sets_path, "class-set JSON file");
    c->add_option("--scope", in.scope, "omega | omega-star | quasi-sure");
    c->add_option("--format", in.format, "json | table");
    c->add_option("--seed", seed, "seed for randomized suites (unused here)");
  };

  CLI::App* price = app.add_subcommand("price", "superhedging price of a claim");
  add_common(price, true);
  CLI::App* arb = app.add_subcommand("arbitrage", "run the arbitrage detectors");
  add_common(arb, true);
  CLI::App* eff =
      app.add_subcommand("efficient-set", "efficient core, both algorithms");
  add_common(eff, true);
  CLI::App* ftap = app.add_subcommand("ftap", "no-arbitrage equivalence reports");
  add_common(ftap, true);
  CLI::App* chain =
      app.add_subcommand("duality-chain", "five-quantity price equalities");
  add_common(chain, true);
  CLI::App* ext =
      app.add_subcommand("extension", "core-to-scope price extension check");
  add_common(ext, true);
  CLI::App* poly =
      app.add_subcommand("poly", "one-period polyhedral market checks");
  add_common(poly, true);
  CLI::App* ex = app.add_subcommand("examples", "replay a bundled example");
  ex->add_option("--name", example_name, "binom | gap | sausa | ex31 | ex32 | ex35 | inta")
      ->required();
  ex->add_option("--fixtures", fixtures_dir, "fixture directory");
  ex->add_option("--format", in.format, "json | table");
  CLI::App* ver = app.add_subcommand("verify", "re-check a JSON report");
  ver->add_option("--report", report_path, "report file")->required();
  ver->add_option("--format", in.format, "json | table");

  CLI11_PARSE(app, argc, argv);

  try {
    if (price->parsed()) {
      if (in.claim_path.empty())
        throw JsonError("SchemaError", "price requires --claim");
      return cmd_price(in);
    }
    if (arb->parsed()) return cmd_arbitrage(in);
    if (eff->parsed()) return cmd_efficient_set(in);
    if (ftap->parsed()) {
      if (in.priors_path.empty())
        throw JsonError("SchemaError", "ftap requires --priors");
      return cmd_ftap(in);
    }
    if (chain->parsed()) {
      if (in.priors_path.empty() || in.claim_path.empty())
        throw JsonError("SchemaError", "duality-chain requires --priors and --claim");
      return cmd_duality_chain(in);
    }
    if (ext->parsed()) {
      if (in.claim_path.empty())
        throw JsonError("SchemaError", "extension requires --claim");
      return cmd_extension(in);
    }
    if (poly->parsed()) return cmd_poly(in);
    if (ex->parsed()) return cmd_examples(example_name, fixtures_dir, in.format);
    if (ver->parsed()) return cmd_verify(report_path, in.format);
  } catch (const PolyError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return std::string(e.code) == "InternalInconsistency" ? 2 : 1;
  } catch (const JsonError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const MarketError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const PriorError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const ArbitrageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const SuperhedgeError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: SchemaError: " << e.what() << "\n";
    return 1;
  } catch (const std::logic_error& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
