#include "disp/io.hpp"
#include "disp/error.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace disp {

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : s) {
    if (ch == sep) { out.push_back(cur); cur.clear(); }
    else cur += ch;
  }
  out.push_back(cur);
  return out;
}

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

double to_double(const std::string& s, const std::string& what) {
  try {
    std::size_t used = 0;
    double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw Error("BadNumber", "cannot parse '" + s + "' as " + what);
  }
}

// key=value pairs separated by commas
double field(const std::string& body, const std::string& key) {
  for (const auto& part : split(body, ',')) {
    auto kv = split(trim(part), '=');
    if (kv.size() == 2 && trim(kv[0]) == key) return to_double(trim(kv[1]), key);
  }
  throw Error("BadGeneratorString", "missing field '" + key + "' in '" + body + "'");
}

const char* kind_name(PieceKind k) {
  switch (k) {
    case PieceKind::SymmetricPgf: return "SymmetricPGF";
    case PieceKind::DuopolyF1: return "DuopolyF1";
    case PieceKind::DuopolyF2: return "DuopolyF2";
    case PieceKind::IndependentGamma: return "IndependentGamma";
  }
  return "?";
}

PieceKind kind_from_name(const std::string& s) {
  if (s == "SymmetricPGF") return PieceKind::SymmetricPgf;
  if (s == "DuopolyF1") return PieceKind::DuopolyF1;
  if (s == "DuopolyF2") return PieceKind::DuopolyF2;
  if (s == "IndependentGamma") return PieceKind::IndependentGamma;
  throw Error("BadProfile", "unknown piece kind '" + s + "'");
}

SolverTag tag_from_name(const std::string& s) {
  for (SolverTag t : {SolverTag::Symmetric, SolverTag::Duopoly, SolverTag::IndependentN,
                      SolverTag::PureBertrand, SolverTag::PureMonopoly})
    if (s == solver_tag_name(t)) return t;
  throw Error("BadProfile", "unknown solver tag '" + s + "'");
}

Json witness_json(const Witness& w) {
  return Json{{"point", w.point}, {"a_value", w.a_value}, {"b_value", w.b_value}};
}

} // namespace

std::string num_str(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return Json(x).dump();
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("BadFile", "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("BadFile", "cannot write '" + path + "'");
  out << content;
}

Json structure_to_json(const ConsiderationStructure& cs) {
  Json j;
  j["n"] = cs.n;
  Json alpha = Json::array();
  for (const auto& [mask, mass] : cs.entries) {
    std::vector<int> idx;
    for (int i = 1; i <= cs.n; ++i)
      if (mask & (FirmSet(1) << (i - 1))) idx.push_back(i);
    alpha.push_back(Json{{"set", idx}, {"mass", mass}});
  }
  j["alpha"] = alpha;
  j["alpha_empty"] = cs.alpha_empty;
  if (cs.independent_lambda) j["independent_lambda"] = *cs.independent_lambda;
  return j;
}

ConsiderationStructure structure_from_json(const Json& j) {
  try {
    if (j.contains("binomial")) {
      const auto& g = j.at("binomial");
      return binomial(g.at("n").get<int>(), g.at("lambda").get<double>());
    }
    if (j.contains("independent")) {
      return independent(j.at("independent").at("lambda").get<std::vector<double>>());
    }
    if (j.contains("spatial")) {
      const auto& g = j.at("spatial");
      return spatial(g.at("n").get<int>(), g.at("k").get<int>());
    }
    int n = j.at("n").get<int>();
    std::vector<std::pair<std::vector<int>, double>> entries;
    for (const auto& e : j.at("alpha"))
      entries.emplace_back(e.at("set").get<std::vector<int>>(), e.at("mass").get<double>());
    std::optional<double> ae;
    if (j.contains("alpha_empty")) ae = j.at("alpha_empty").get<double>();
    ConsiderationStructure cs = from_explicit(n, entries, ae);
    if (j.contains("independent_lambda")) {
      auto lam = j.at("independent_lambda").get<std::vector<double>>();
      ConsiderationStructure gen = independent(lam);
      if (gen.n != cs.n) throw Error("NotIndependent", "lambda tag has the wrong length");
      if (std::abs(gen.alpha_empty - cs.alpha_empty) > 1e-9)
        throw Error("NotIndependent", "masses do not match the lambda tag");
      for (const auto& [mask, mass] : gen.entries)
        if (std::abs(cs.mass_of(mask) - mass) > 1e-9)
          throw Error("NotIndependent", "masses do not match the lambda tag");
      cs.independent_lambda = std::move(lam);
    }
    return cs;
  } catch (const Json::exception& e) {
    throw Error("BadJson", e.what());
  }
}

ConsiderationStructure load_structure(const std::string& source) {
  if (source.rfind("binomial:", 0) == 0) {
    std::string body = source.substr(9);
    return binomial(int(field(body, "n")), field(body, "lambda"));
  }
  if (source.rfind("independent:", 0) == 0) {
    std::string body = source.substr(12);
    if (body.rfind("lambda=", 0) != 0)
      throw Error("BadGeneratorString", "expected independent:lambda=v1,v2,...");
    std::vector<double> lam;
    for (const auto& part : split(body.substr(7), ','))
      lam.push_back(to_double(trim(part), "lambda"));
    return independent(lam);
  }
  if (source.rfind("spatial:", 0) == 0) {
    std::string body = source.substr(8);
    return spatial(int(field(body, "n")), int(field(body, "k")));
  }
  Json j;
  try {
    j = Json::parse(read_text_file(source));
  } catch (const Json::exception& e) {
    throw Error("BadJson", std::string(e.what()) + " in '" + source + "'");
  }
  return structure_from_json(j);
}

DemandSpec parse_demand(const std::string& text) {
  if (text == "unit") return unit_demand();
  if (text.rfind("linear:", 0) == 0) return linear_demand(field(text.substr(7), "b"));
  if (text.rfind("exp:", 0) == 0) return exponential_demand(field(text.substr(4), "beta"));
  if (text.rfind("ces:", 0) == 0) return ces_demand(field(text.substr(4), "eta"));
  if (text.rfind("table:", 0) == 0) {
    std::string path = text.substr(6);
    std::vector<double> p, x;
    for (const auto& raw : split(read_text_file(path), '\n')) {
      std::string line = trim(raw);
      if (line.empty()) continue;
      auto cells = split(line, ',');
      if (cells.size() < 2) throw Error("BadTable", "expected p,x rows in '" + path + "'");
      std::string c0 = trim(cells[0]);
      if (!c0.empty() && (std::isdigit((unsigned char)c0[0]) || c0[0] == '.' || c0[0] == '-')) {
        p.push_back(to_double(c0, "p"));
        x.push_back(to_double(trim(cells[1]), "x"));
      }
    }
    return table_demand(p, x);
  }
  throw Error("UnknownFamily", "unrecognized demand '" + text + "'");
}

Json profile_to_json(const EquilibriumProfile& profile) {
  Json j;
  j["solver"] = solver_tag_name(profile.tag);
  j["n"] = profile.n;
  j["note"] = profile.note;
  Json firms = Json::array();
  for (std::size_t i = 0; i < profile.dists.size(); ++i) {
    const auto& d = profile.dists[i];
    Json f;
    f["firm"] = d.firm;
    f["support"] = Json::array({d.support_lo, d.support_hi});
    f["profit"] = profile.profits[i];
    Json pieces = Json::array();
    for (const auto& pc : d.pieces) {
      Json q;
      q["interval"] = Json::array({pc.mu_lo, pc.mu_hi});
      q["u_range"] = Json::array({pc.u_lo, pc.u_hi});
      q["kind"] = kind_name(pc.kind);
      Json par;
      switch (pc.kind) {
        case PieceKind::SymmetricPgf:
          par["rho"] = pc.par[0];
          par["beta"] = pc.coeffs;
          break;
        case PieceKind::DuopolyF1:
          par["rho1"] = pc.par[0];
          par["rho2"] = pc.par[1];
          break;
        case PieceKind::DuopolyF2:
          par["rho1"] = pc.par[0];
          break;
        case PieceKind::IndependentGamma:
          par["m"] = pc.par[0];
          par["c_m"] = pc.par[1];
          par["mu_lower"] = pc.par[2];
          par["lambda"] = pc.par[3];
          break;
      }
      q["params"] = par;
      pieces.push_back(q);
    }
    f["pieces"] = pieces;
    Json atoms = Json::array();
    for (const auto& a : d.atoms) {
      Json q;
      q["interval"] = Json::array({a.location, a.location});
      q["u_range"] = Json::array({a.u_lo, a.u_hi});
      q["kind"] = "PointMass";
      q["params"] = Json{{"mass", a.mass}};
      atoms.push_back(q);
    }
    f["atoms"] = atoms;
    firms.push_back(f);
  }
  j["firms"] = firms;
  return j;
}

EquilibriumProfile profile_from_json(const Json& j) {
  try {
    EquilibriumProfile p;
    p.tag = tag_from_name(j.at("solver").get<std::string>());
    p.n = j.at("n").get<int>();
    p.note = j.value("note", std::string());
    for (const auto& f : j.at("firms")) {
      MarginDistribution d;
      d.firm = f.at("firm").get<int>();
      d.support_lo = f.at("support").at(0).get<double>();
      d.support_hi = f.at("support").at(1).get<double>();
      for (const auto& q : f.at("pieces")) {
        Piece pc;
        pc.kind = kind_from_name(q.at("kind").get<std::string>());
        pc.mu_lo = q.at("interval").at(0).get<double>();
        pc.mu_hi = q.at("interval").at(1).get<double>();
        pc.u_lo = q.at("u_range").at(0).get<double>();
        pc.u_hi = q.at("u_range").at(1).get<double>();
        const auto& par = q.at("params");
        switch (pc.kind) {
          case PieceKind::SymmetricPgf:
            pc.par[0] = par.at("rho").get<double>();
            pc.coeffs = par.at("beta").get<std::vector<double>>();
            break;
          case PieceKind::DuopolyF1:
            pc.par[0] = par.at("rho1").get<double>();
            pc.par[1] = par.at("rho2").get<double>();
            break;
          case PieceKind::DuopolyF2:
            pc.par[0] = par.at("rho1").get<double>();
            break;
          case PieceKind::IndependentGamma:
            pc.par[0] = par.at("m").get<double>();
            pc.par[1] = par.at("c_m").get<double>();
            pc.par[2] = par.at("mu_lower").get<double>();
            pc.par[3] = par.at("lambda").get<double>();
            break;
        }
        d.pieces.push_back(pc);
      }
      for (const auto& q : f.at("atoms")) {
        if (q.at("kind").get<std::string>() != "PointMass")
          throw Error("BadProfile", "atoms must have kind PointMass");
        Atom a;
        a.location = q.at("interval").at(0).get<double>();
        a.mass = q.at("params").at("mass").get<double>();
        a.u_lo = q.at("u_range").at(0).get<double>();
        a.u_hi = q.at("u_range").at(1).get<double>();
        d.atoms.push_back(a);
      }
      p.dists.push_back(std::move(d));
      p.profits.push_back(f.at("profit").get<double>());
    }
    if (int(p.dists.size()) != p.n) throw Error("BadProfile", "firm count mismatch");
    return p;
  } catch (const Json::exception& e) {
    throw Error("BadJson", e.what());
  }
}

Json verification_to_json(const VerificationReport& rep) {
  Json j;
  j["grid_size"] = rep.grid_size;
  j["tol"] = rep.tol;
  j["pass"] = rep.pass;
  Json firms = Json::array();
  for (const auto& fc : rep.firms)
    firms.push_back(Json{{"firm", fc.firm},
                         {"max_indifference_residual", fc.max_indifference_residual},
                         {"max_deviation_gain", fc.max_deviation_gain},
                         {"worst_mu", fc.worst_mu}});
  j["firms"] = firms;
  return j;
}

Json deviation_to_json(const DeviationReport& rep, double tol) {
  Json j;
  j["grid_size"] = rep.grid_size;
  j["tol"] = tol;
  j["pass"] = rep.pass(tol);
  j["max_gain"] = rep.max_gain;
  j["worst_firm"] = rep.worst_firm;
  j["worst_price"] = rep.worst_price;
  j["firm_gain"] = rep.firm_gain;
  return j;
}

Json report_to_json(const PassThroughReport& rep) {
  Json j;
  j["firm"] = rep.firm;
  j["cost"] = rep.c;
  j["B"] = rep.B;
  j["mean_paid"] = rep.mean_paid;
  j["tau_trans"] = rep.tau_trans;
  if (rep.K) j["K"] = *rep.K;
  else j["K"] = nullptr;
  j["unit_demand"] = rep.unit_demand;
  j["flags"] = rep.flags;
  j["u"] = rep.u;
  j["mu"] = rep.mu;
  j["price"] = rep.price;
  j["tau_q"] = rep.tau_q;
  return j;
}

std::string report_to_csv(const PassThroughReport& rep) {
  std::string out = "u,mu,price,tau_q\n";
  for (std::size_t i = 0; i < rep.u.size(); ++i) {
    out += num_str(rep.u[i]);
    out += ',';
    out += num_str(rep.mu[i]);
    out += ',';
    out += num_str(rep.price[i]);
    out += ',';
    out += num_str(rep.tau_q[i]);
    out += '\n';
  }
  return out;
}

Json envelope_to_json(const std::vector<EnvelopePoint>& pts) {
  Json arr = Json::array();
  for (const auto& p : pts)
    arr.push_back(Json{{"family", p.family},
                       {"param", p.param},
                       {"mu", p.mu},
                       {"tau", p.tau},
                       {"feasible", p.feasible}});
  return arr;
}

std::string envelope_to_csv(const std::vector<EnvelopePoint>& pts) {
  std::string out = "family,param,mu,tau,feasible\n";
  for (const auto& p : pts) {
    out += p.family;
    out += ',';
    out += num_str(p.param);
    out += ',';
    out += num_str(p.mu);
    out += ',';
    out += num_str(p.tau);
    out += ',';
    out += p.feasible ? '1' : '0';
    out += '\n';
  }
  return out;
}

Json critical_to_json(const CriticalElasticity& ce) {
  return Json{{"eta_star", ce.eta_star}, {"cost", ce.c}, {"criterion", ce.criterion}};
}

Json sim_to_json(const SimResult& res) {
  Json j;
  j["consumers"] = res.consumers;
  j["seed"] = res.seed;
  j["market_mean_paid"] = res.market_mean_paid;
  j["market_mean_paid_se"] = res.market_mean_paid_se;
  Json firms = Json::array();
  for (const auto& st : res.firms)
    firms.push_back(Json{{"firm", st.firm},
                         {"posted", st.posted},
                         {"transactions", st.transactions},
                         {"profit", st.profit},
                         {"profit_se", st.profit_se},
                         {"mean_paid", st.mean_paid},
                         {"mean_paid_se", st.mean_paid_se},
                         {"ks_distance", st.ks_distance}});
  j["firms"] = firms;
  return j;
}

std::string sim_cdf_to_csv(const SimResult& res) {
  std::string out = "firm,price,cdf\n";
  for (std::size_t f = 0; f < res.cdf_values.size(); ++f)
    for (std::size_t i = 0; i < res.cdf_prices.size(); ++i) {
      out += std::to_string(f + 1);
      out += ',';
      out += num_str(res.cdf_prices[i]);
      out += ',';
      out += num_str(res.cdf_values[f][i]);
      out += '\n';
    }
  return out;
}

Json mc_to_json(const McPassthrough& mc) {
  Json j;
  j["c_lo"] = mc.c_lo;
  j["c_hi"] = mc.c_hi;
  j["tau"] = mc.tau;
  j["tau_se"] = mc.tau_se;
  j["market_tau"] = mc.market_tau;
  j["market_tau_se"] = mc.market_tau_se;
  return j;
}

Json verdict_to_json(const DominanceVerdict& v) {
  Json j;
  j["relation"] = relation_name(v.relation);
  j["detail"] = v.detail;
  Json ws = Json::array();
  for (const auto& w : v.witnesses) ws.push_back(witness_json(w));
  j["witnesses"] = ws;
  return j;
}

Json pgf_to_json(const PgfDominance& v) {
  Json j;
  j["h_order"] = verdict_to_json(v.h_order);
  j["equal_rho"] = v.equal_rho;
  j["margin_order"] = v.margin_order ? verdict_to_json(*v.margin_order) : Json(nullptr);
  j["note"] = v.note;
  return j;
}

Json twmean_to_json(const TwMeanComparison& v) {
  Json j;
  j["price_order"] = verdict_to_json(v.price_order);
  j["B_a"] = v.B_a;
  j["B_b"] = v.B_b;
  j["mean_a"] = v.mean_a;
  j["mean_b"] = v.mean_b;
  j["consistent"] = v.consistent;
  j["note"] = v.note;
  return j;
}

Json merger_to_json(const MergerDelta& d) {
  Json j;
  j["u"] = d.u;
  Json firms = Json::array();
  for (const auto& f : d.firms)
    firms.push_back(Json{{"firm_pre", f.firm_pre},
                         {"firm_post", f.firm_post},
                         {"min_dp", f.min_dp},
                         {"max_dp", f.max_dp},
                         {"dtau_trans", f.dtau_trans},
                         {"dp", f.dp}});
  j["firms"] = firms;
  return j;
}

std::string merger_to_csv(const MergerDelta& d) {
  std::string out = "firm_pre,firm_post,u,dp\n";
  for (const auto& f : d.firms)
    for (std::size_t i = 0; i < d.u.size(); ++i) {
      out += std::to_string(f.firm_pre);
      out += ',';
      out += std::to_string(f.firm_post);
      out += ',';
      out += num_str(d.u[i]);
      out += ',';
      out += num_str(f.dp[i]);
      out += '\n';
    }
  return out;
}

} // namespace disp
