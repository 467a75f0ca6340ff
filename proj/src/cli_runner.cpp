#include "disp/cli.hpp"
#include "disp/error.hpp"
#include "disp/io.hpp"

#include "CLI11.hpp"

#include <algorithm>
#include <cctype>
#include <ostream>

namespace disp {

namespace {

struct OutOpts {
  std::string path;
  std::string format = "json";
};

void add_out_opts(CLI::App* sub, OutOpts& io, std::vector<std::string> formats) {
  sub->add_option("--out", io.path, "write the result to this file instead of stdout");
  sub->add_option("--format", io.format, "output format")
      ->check(CLI::IsMember(std::move(formats)));
}

void emit(const std::string& text, const OutOpts& io, std::ostream& out) {
  if (io.path.empty()) out << text;
  else write_text_file(io.path, text);
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

std::vector<double> unit_grid(int k) {
  std::vector<double> g(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) g[std::size_t(i)] = double(i) / double(k - 1);
  return g;
}

std::vector<std::pair<int, int>> parse_map(const std::string& text) {
  std::vector<std::pair<int, int>> map;
  std::string cur;
  auto flush = [&] {
    if (cur.empty()) return;
    auto sep = cur.find(':');
    if (sep == std::string::npos)
      throw Error("BadMap", "expected pre:post pairs, got '" + cur + "'");
    map.emplace_back(std::stoi(cur.substr(0, sep)), std::stoi(cur.substr(sep + 1)));
    cur.clear();
  };
  for (char ch : text) {
    if (ch == ',') flush();
    else if (!std::isspace((unsigned char)ch)) cur += ch;
  }
  flush();
  if (map.empty()) throw Error("BadMap", "empty firm map");
  return map;
}

} // namespace

int run_cli(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"margin-game solvers, pass-through reports and verification for "
               "consideration-set pricing models"};
  app.name("dispersion");
  app.require_subcommand(1);

  // solve
  auto* sc_solve = app.add_subcommand("solve", "solve the margin game and emit the profile");
  std::string so_structure;
  int so_quantiles = 0;
  OutOpts so_io;
  sc_solve->add_option("--structure", so_structure, "generator string or JSON file")->required();
  sc_solve->add_option("--quantiles", so_quantiles, "attach a per-firm quantile table")
      ->check(CLI::Range(0, 1000000));
  add_out_opts(sc_solve, so_io, {"json"});

  // passthrough
  auto* sc_pass = app.add_subcommand("passthrough", "quantile and transaction pass-through report");
  std::string pa_structure, pa_demand = "unit";
  double pa_cost = 0;
  int pa_firm = 1, pa_grid = 201;
  OutOpts pa_io;
  sc_pass->add_option("--structure", pa_structure)->required();
  sc_pass->add_option("--demand", pa_demand, "unit | linear:b= | exp:beta= | ces:eta= | table:path");
  sc_pass->add_option("--cost", pa_cost)->check(CLI::Range(0.0, 1.0));
  sc_pass->add_option("--firm", pa_firm)->check(CLI::PositiveNumber);
  sc_pass->add_option("--grid", pa_grid, "u-grid points in the report")->check(CLI::Range(2, 1000000));
  add_out_opts(sc_pass, pa_io, {"json", "csv"});

  // bounds
  auto* sc_bounds = app.add_subcommand("bounds", "pass-through envelope sweep across demand families");
  double bo_cost = 0;
  int bo_grid = 101;
  OutOpts bo_io;
  bo_io.format = "csv";
  sc_bounds->add_option("--cost", bo_cost)->check(CLI::Range(0.0, 1.0));
  sc_bounds->add_option("--grid", bo_grid, "mu-grid points")->check(CLI::Range(2, 1000000));
  add_out_opts(sc_bounds, bo_io, {"json", "csv"});

  // verify
  auto* sc_verify = app.add_subcommand(
      "verify", "equilibrium check: margin-space by default, price-space when --demand is given");
  std::string vr_structure, vr_profile, vr_demand;
  double vr_cost = 0, vr_tol = 0;
  int vr_grid = 0;
  OutOpts vr_io;
  sc_verify->add_option("--structure", vr_structure)->required();
  sc_verify->add_option("--profile", vr_profile, "profile JSON produced by solve");
  sc_verify->add_option("--demand", vr_demand, "check deviations in price space for this demand");
  sc_verify->add_option("--cost", vr_cost)->check(CLI::Range(0.0, 1.0));
  sc_verify->add_option("--tol", vr_tol, "gap tolerance (default 1e-8 margin, 1e-6 price)");
  sc_verify->add_option("--grid", vr_grid, "grid points (default 2001 margin, 5001 price)");
  add_out_opts(sc_verify, vr_io, {"json"});

  // simulate
  auto* sc_sim = app.add_subcommand("simulate", "seeded Monte Carlo against the analytic profile");
  std::string si_structure, si_demand = "unit";
  double si_cost = 0, si_cost_hi = 0;
  long long si_consumers = 100000;
  std::uint64_t si_seed = 1;
  int si_grid = 2001;
  OutOpts si_io;
  sc_sim->add_option("--structure", si_structure)->required();
  sc_sim->add_option("--demand", si_demand);
  sc_sim->add_option("--cost", si_cost)->check(CLI::Range(0.0, 1.0));
  auto* hi_opt = sc_sim->add_option("--cost-hi", si_cost_hi,
                                    "also estimate pass-through between --cost and this cost");
  sc_sim->add_option("--consumers", si_consumers)->check(CLI::PositiveNumber);
  sc_sim->add_option("--seed", si_seed);
  sc_sim->add_option("--grid", si_grid, "price points in the emitted empirical CDF")
      ->check(CLI::Range(2, 1000000));
  add_out_opts(sc_sim, si_io, {"json", "csv"});

  // compare
  auto* sc_cmp = app.add_subcommand("compare", "dominance verdicts and merger price impacts");
  std::string cm_structure, cm_structure_b, cm_demand = "unit", cm_mode = "pgf", cm_map;
  double cm_cost = 0;
  int cm_grid = 0, cm_firm = 1;
  OutOpts cm_io;
  sc_cmp->add_option("--structure", cm_structure, "baseline structure")->required();
  sc_cmp->add_option("--structure-b", cm_structure_b, "comparison structure")->required();
  sc_cmp->add_option("--mode", cm_mode)->check(CLI::IsMember({"pgf", "quantile", "twmean", "merger"}));
  sc_cmp->add_option("--demand", cm_demand, "used by twmean and merger modes");
  sc_cmp->add_option("--cost", cm_cost)->check(CLI::Range(0.0, 1.0));
  sc_cmp->add_option("--firm", cm_firm)->check(CLI::PositiveNumber);
  sc_cmp->add_option("--grid", cm_grid, "grid points (default 2001; 201 for merger/twmean)");
  sc_cmp->add_option("--map", cm_map, "merger firm map, e.g. 1:1,2:2");
  add_out_opts(sc_cmp, cm_io, {"json", "csv"});

  std::reverse(args.begin(), args.end());
  try {
    app.parse(std::move(args));
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return 0;
    }
    err << "error: " << e.what() << "\n";
    return 1;
  }

  try {
    if (*sc_solve) {
      ConsiderationStructure cs = load_structure(so_structure);
      EquilibriumProfile profile = solve(cs);
      Json j = profile_to_json(profile);
      if (so_quantiles > 0) {
        std::vector<double> u = unit_grid(std::max(2, so_quantiles));
        Json q;
        q["u"] = u;
        Json mu = Json::array();
        for (const auto& d : profile.dists) {
          std::vector<double> row(u.size());
          for (std::size_t i = 0; i < u.size(); ++i) row[i] = d.quantile(u[i]);
          mu.push_back(row);
        }
        q["mu"] = mu;
        j["quantiles"] = q;
      }
      emit(dump(j), so_io, out);
      return 0;
    }

    if (*sc_pass) {
      ConsiderationStructure cs = load_structure(pa_structure);
      EquilibriumProfile profile = solve(cs);
      DemandSpec spec = parse_demand(pa_demand);
      PassThroughReport rep = passthrough_report(profile, pa_firm, spec, pa_cost, pa_grid);
      if (pa_io.format == "csv") emit(report_to_csv(rep), pa_io, out);
      else emit(dump(report_to_json(rep)), pa_io, out);
      return 0;
    }

    if (*sc_bounds) {
      std::vector<EnvelopePoint> pts =
          envelope_sweep(default_envelope_families(bo_cost), bo_cost, unit_grid(bo_grid));
      if (bo_io.format == "csv") {
        emit(envelope_to_csv(pts), bo_io, out);
      } else {
        Json j;
        j["cost"] = bo_cost;
        j["grid"] = bo_grid;
        j["envelope"] = envelope_to_json(pts);
        try {
          j["critical_elasticity"] = critical_to_json(critical_elasticity(bo_cost));
        } catch (const Error&) {
          j["critical_elasticity"] = nullptr;
        }
        emit(dump(j), bo_io, out);
      }
      return 0;
    }

    if (*sc_verify) {
      ConsiderationStructure cs = load_structure(vr_structure);
      EquilibriumProfile profile =
          vr_profile.empty() ? solve(cs) : profile_from_json(Json::parse(read_text_file(vr_profile)));
      bool ok;
      Json j;
      if (!vr_demand.empty()) {
        double tol = vr_tol > 0 ? vr_tol : 1e-6;
        int grid = vr_grid > 0 ? vr_grid : 5001;
        DeviationReport rep =
            price_game_deviation_gap(cs, profile, parse_demand(vr_demand), vr_cost, grid);
        ok = rep.pass(tol);
        j = deviation_to_json(rep, tol);
      } else {
        double tol = vr_tol > 0 ? vr_tol : 1e-8;
        int grid = vr_grid > 0 ? vr_grid : 2001;
        VerificationReport rep = verify_equilibrium(cs, profile, grid, tol);
        ok = rep.pass;
        j = verification_to_json(rep);
      }
      j["solver"] = solver_tag_name(profile.tag);
      if (!profile.note.empty()) j["note"] = profile.note;
      emit(dump(j), vr_io, out);
      return ok ? 0 : 2;
    }

    if (*sc_sim) {
      ConsiderationStructure cs = load_structure(si_structure);
      EquilibriumProfile profile = solve(cs);
      SimConfig cfg;
      cfg.consumers = si_consumers;
      cfg.seed = si_seed;
      cfg.c = si_cost;
      cfg.demand = parse_demand(si_demand);
      cfg.price_grid_size = si_grid;
      SimResult res = simulate(cs, profile, cfg);
      if (si_io.format == "csv") {
        emit(sim_cdf_to_csv(res), si_io, out);
      } else {
        Json j = sim_to_json(res);
        if (hi_opt->count() > 0)
          j["mc_passthrough"] = mc_to_json(mc_passthrough(cs, profile, cfg, si_cost, si_cost_hi));
        emit(dump(j), si_io, out);
      }
      return 0;
    }

    if (*sc_cmp) {
      ConsiderationStructure a = load_structure(cm_structure);
      ConsiderationStructure b = load_structure(cm_structure_b);
      if (cm_io.format == "csv" && cm_mode != "merger")
        throw Error("BadFormat", "csv output is only available for merger mode");
      if (cm_mode == "pgf") {
        int grid = cm_grid > 0 ? cm_grid : 2001;
        emit(dump(pgf_to_json(pgf_dominates(a, b, cm_firm, grid))), cm_io, out);
      } else if (cm_mode == "quantile") {
        int grid = cm_grid > 0 ? cm_grid : 2001;
        EquilibriumProfile pa = solve(a), pb = solve(b);
        if (cm_firm > a.n || cm_firm > b.n)
          throw Error("BadFirmIndex", "--firm exceeds a structure's firm count");
        emit(dump(verdict_to_json(quantile_dominates(pa.dists[std::size_t(cm_firm - 1)],
                                                     pb.dists[std::size_t(cm_firm - 1)], grid))),
             cm_io, out);
      } else if (cm_mode == "twmean") {
        int grid = cm_grid > 0 ? cm_grid : 201;
        DemandSpec spec = parse_demand(cm_demand);
        EquilibriumProfile pa = solve(a), pb = solve(b);
        if (cm_firm > a.n || cm_firm > b.n)
          throw Error("BadFirmIndex", "--firm exceeds a structure's firm count");
        PassThroughReport ra = passthrough_report(pa, cm_firm, spec, cm_cost, grid);
        PassThroughReport rb = passthrough_report(pb, cm_firm, spec, cm_cost, grid);
        emit(dump(twmean_to_json(tw_mean_compare(ra, rb))), cm_io, out);
      } else { // merger
        int grid = cm_grid > 0 ? cm_grid : 201;
        if (cm_map.empty()) throw Error("BadMap", "merger mode needs --map pre:post pairs");
        DemandSpec spec = parse_demand(cm_demand);
        EquilibriumProfile pre = solve(a), post = solve(b);
        MergerDelta d = merger_delta(pre, post, parse_map(cm_map), spec, cm_cost, grid);
        if (cm_io.format == "csv") emit(merger_to_csv(d), cm_io, out);
        else emit(dump(merger_to_json(d)), cm_io, out);
      }
      return 0;
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  err << "error: no subcommand\n";
  return 1;
}

} // namespace disp
