// adhm: command-line front end. One subcommand per module campaign; all
// randomness flows from --seed through fixed sub-streams, so identical
// invocations produce byte-identical reports.

#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "adhm/config.hpp"
#include "adhm/f2.hpp"
#include "adhm/flow.hpp"
#include "adhm/moment.hpp"
#include "adhm/report.hpp"
#include "adhm/series.hpp"
#include "adhm/strata.hpp"
#include "adhm/vortex.hpp"

namespace {

using namespace adhm;

const char kUsage[] =
    "usage: adhm <subcommand> [flags]\n"
    "subcommands:\n"
    "  verify-identities --k K --samples N --seed S [--out FILE]\n"
    "  solve-moment      --k K --runs N --tol T --seed S [--out FILE]\n"
    "  spectrum          --input config.json --tol T [--out FILE]\n"
    "  cone-demo         --seed S --size N [--out FILE]\n"
    "  sw-series         --genus G --window A:B [--at-one] [--out FILE]\n"
    "  stability         --input datum.json [--out FILE]\n"
    "  vortex            --grid N --degree D --lambda L --tol T --seed S\n"
    "                    [--out state.json]\n";

// CLI11 needs '=' syntax for values that begin with '-'; fold "--opt value"
// pairs so flags like --lambda -3 and --window -3:3 parse as written.
std::vector<std::string> fold_args(int argc, char** argv) {
  static const char* kValueFlags[] = {
      "--k",     "--samples", "--seed",   "--out",    "--runs",
      "--tol",   "--input",   "--size",   "--genus",  "--window",
      "--grid",  "--degree",  "--lambda"};
  std::vector<std::string> out;
  for (int i = 0; i < argc; ++i) {
    std::string tok = argv[i];
    bool folded = false;
    for (const char* f : kValueFlags)
      if (tok == f && i + 1 < argc) {
        out.push_back(tok + "=" + argv[++i]);
        folded = true;
        break;
      }
    if (!folded) out.push_back(tok);
  }
  return out;
}

int parse_or_usage(CLI::App& app, const std::vector<std::string>& args) {
  std::vector<const char*> argv;
  argv.push_back("adhm");
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    std::cerr << "adhm: " << e.what() << "\n" << kUsage;
    return 2;
  }
  return 0;
}

int finish(RunReport& rep, const std::string& out) {
  emit_report(rep, out);
  return rep.pass() ? 0 : 1;
}

json read_json_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::invalid_argument("cannot open input file: " + path);
  json j;
  f >> j;
  return j;
}

// --------------------------------------------------------------------------

int cmd_verify_identities(const std::vector<std::string>& args) {
  int k = 3, samples = 100;
  uint64_t seed = 1;
  std::string out;
  CLI::App app{"moment-map identity sweep"};
  app.add_option("--k", k);
  app.add_option("--samples", samples);
  app.add_option("--seed", seed);
  app.add_option("--out", out);
  if (int rc = parse_or_usage(app, args)) return rc;
  if (k < 1 || k > 8 || samples < 1) {
    std::cerr << "adhm: verify-identities needs 1 <= k <= 8, samples >= 1\n";
    return 2;
  }

  RunReport rep;
  rep.command = "verify-identities";
  rep.parameters = {{"k", k}, {"samples", samples}, {"seed", seed}};
  auto parts = enumerate_partitions(k);
  for (int i = 0; i < samples; ++i) {
    RandomStream rs(sub_seed(seed, i));
    int r = 1 + i % 3;
    ADHMConfig c = random_config(r, k, rs);
    Matrix g = random_unitary(k, rs);
    double scale = std::max(1.0, mu_quaternionic(c).norm());
    rep.check("chart_agreement", chart_agreement_defect(c) / scale, 1e-10);
    rep.check("equivariance", equivariance_defect(g, c) / scale, 1e-10);

    XiQuaternionic xi = random_xi(k, rs);
    rep.check("norm_identity", check_mu_norm_identity(xi).rel_err(), 1e-10);

    // the linearized identity holds on the zero locus, so sample it there
    const Partition& p = parts[i % parts.size()];
    std::vector<std::array<double, 4>> vals(p.size());
    for (auto& v : vals)
      for (auto& x : v) x = rs.normal();
    XiQuaternionic xi0 = xi_with_spectrum(p, vals, random_unitary(k, rs));
    XiQuaternionic eta = random_xi(k, rs);
    rep.check("linearized_identity",
              check_linearized_identity(xi0, eta).rel_err(), 1e-10);
  }
  rep.results["samples_run"] = samples;
  return finish(rep, out);
}

int cmd_solve_moment(const std::vector<std::string>& args) {
  int k = 2, runs = 20;
  double tol = 1e-10;
  uint64_t seed = 1;
  std::string out;
  CLI::App app{"zero-locus flow campaign"};
  app.add_option("--k", k);
  app.add_option("--runs", runs);
  app.add_option("--tol", tol);
  app.add_option("--seed", seed);
  app.add_option("--out", out);
  if (int rc = parse_or_usage(app, args)) return rc;
  if (k < 1 || k > 6 || runs < 1 || tol <= 0) {
    std::cerr << "adhm: solve-moment needs 1 <= k <= 6, runs >= 1, tol > 0\n";
    return 2;
  }

  RunReport rep;
  rep.command = "solve-moment";
  rep.parameters = {{"k", k}, {"runs", runs}, {"tol", tol}, {"seed", seed}};

  // same start/seed scheme as the census so the two views agree
  std::vector<FlowResult> flows;
  for (int run = 0; run < runs; ++run) {
    RandomStream rs(sub_seed(seed, run));
    ADHMConfig c0 = random_config(1, k, rs);
    double nrm = c0.norm();
    c0.v /= nrm;
    c0.w /= nrm;
    c0.A /= nrm;
    c0.B /= nrm;
    flows.push_back(minimize_mu(c0, tol, 20000, sub_seed(seed, 0x100000 + run)));
  }
  PsiVanishingReport pv = psi_vanishing_report(flows);
  rep.results["rows"] = psi_vanishing_to_json(pv);

  json census = json::object();
  double max_mu = 0, max_ratio = 0;
  for (const auto& row : pv.rows)
    if (row.converged) {
      max_mu = std::max(max_mu, row.final_mu_norm);
      max_ratio = std::max(max_ratio, row.psi_ratio);
      if (!row.partition.empty()) {
        std::string key;
        for (size_t i = 0; i < row.partition.size(); ++i)
          key += (i ? "+" : "") + std::to_string(row.partition[i]);
        census[key] = census.value(key, 0) + 1;
      }
    }
  rep.results["census"] = census;
  rep.check("max_mu_norm", max_mu, tol * (1.0 + 1e-9));
  rep.check("psi_ratio", max_ratio, kPsiRatioBound);
  rep.check("unconverged_runs", static_cast<double>(pv.unconverged), 0.5);
  return finish(rep, out);
}

int cmd_spectrum(const std::vector<std::string>& args) {
  std::string input, out;
  double tol = 1e-8;
  CLI::App app{"joint spectrum of a configuration's quaternionic part"};
  app.add_option("--input", input)->required();
  app.add_option("--tol", tol);
  app.add_option("--out", out);
  if (int rc = parse_or_usage(app, args)) return rc;

  ADHMConfig c = config_from_json(read_json_file(input));
  SpectrumPoint sp = joint_spectrum(xi_of(c), tol);

  RunReport rep;
  rep.command = "spectrum";
  rep.parameters = {{"input", input}, {"tol", tol}};
  json values = json::array();
  for (const auto& v : sp.values) values.push_back({v[0], v[1], v[2], v[3]});
  rep.results["values"] = values;
  rep.results["partition"] = sp.partition;
  rep.results["cluster_tolerance"] = sp.cluster_tolerance;
  rep.check("mu_norm", mu_quaternionic(c).norm(), tol * (1.0 + 1e-9));

  json j = rep.to_json();
  j["values"] = values;
  j["partition"] = sp.partition;
  std::string text = j.dump(2) + "\n";
  if (out.empty()) {
    std::cout << text;
  } else {
    std::ofstream f(out);
    if (!f) throw std::runtime_error("cannot open " + out);
    f << text;
  }
  return rep.pass() ? 0 : 1;
}

int cmd_cone_demo(const std::vector<std::string>& args) {
  uint64_t seed = 1;
  int size = 8;
  std::string out;
  CLI::App app{"random mapping-cone exactness demo"};
  app.add_option("--seed", seed);
  app.add_option("--size", size);
  app.add_option("--out", out);
  if (int rc = parse_or_usage(app, args)) return rc;
  if (size < 1 || size > 64) {
    std::cerr << "adhm: cone-demo needs 1 <= size <= 64\n";
    return 2;
  }

  RandomStream rs(sub_seed(seed, 0));
  F2Complex src = random_complex(-1, 3, size, rs);
  F2Complex tgt = random_complex(-1, 3, size, rs);
  ChainMap f = random_chain_map(src, tgt, rs);
  TriangleData t = triangle_data(f);

  RunReport rep;
  rep.command = "cone-demo";
  rep.parameters = {{"seed", seed}, {"size", size}};
  auto dims_json = [](const std::map<int, int>& m) {
    json j = json::object();
    for (const auto& [d, n] : m) j[std::to_string(d)] = n;
    return j;
  };
  rep.results["h_source"] = dims_json(t.h_src);
  rep.results["h_target"] = dims_json(t.h_tgt);
  rep.results["h_cone"] = dims_json(t.h_cone);
  long long xs = euler_characteristic(src), xt = euler_characteristic(tgt),
            xc = euler_characteristic(t.cone);
  rep.results["euler"] = {{"source", xs}, {"target", xt}, {"cone", xc}};
  rep.require("triangle_exact", t.exact);
  rep.check("euler_additivity",
            static_cast<double>(std::llabs(xc - (xt - xs))), 0.5);
  return finish(rep, out);
}

int cmd_sw_series(const std::vector<std::string>& args) {
  int genus = 1;
  std::string window = "-10:10", out;
  bool at_one = false;
  CLI::App app{"symmetric-product generating series"};
  app.add_option("--genus", genus);
  app.add_option("--window", window);
  app.add_flag("--at-one", at_one);
  app.add_option("--out", out);
  if (int rc = parse_or_usage(app, args)) return rc;

  auto colon = window.find(':');
  if (colon == std::string::npos) {
    std::cerr << "adhm: --window expects A:B\n";
    return 2;
  }
  int lo = 0, hi = 0;
  try {
    lo = std::stoi(window.substr(0, colon));
    hi = std::stoi(window.substr(colon + 1));
  } catch (const std::exception&) {
    std::cerr << "adhm: --window expects integer bounds A:B\n";
    return 2;
  }
  if (lo > hi) {
    std::cerr << "adhm: --window needs A <= B\n";
    return 2;
  }

  LaurentSeries sw = sw_series(genus, lo, hi);
  LaurentSeries pt = pt_series(genus, lo, hi);

  RunReport rep;
  rep.command = "sw-series";
  rep.parameters = {{"genus", genus}, {"window", window}, {"at_one", at_one}};
  json coeffs = series_coeffs_json(sw);
  rep.results["coefficients"] = coeffs;
  rep.require("series_cross_check", sw == pt);
  if (at_one) rep.results["at_one"] = evaluate_at_one(sw, genus);

  json j = rep.to_json();
  for (const auto& [key, value] : coeffs.items()) j[key] = value;
  std::string text = j.dump(2) + "\n";
  if (out.empty()) {
    std::cout << text;
  } else {
    std::ofstream f(out);
    if (!f) throw std::runtime_error("cannot open " + out);
    f << text;
  }
  return rep.pass() ? 0 : 1;
}

int cmd_stability(const std::vector<std::string>& args) {
  std::string input, out;
  CLI::App app{"delta-stability verdict for a bundle datum"};
  app.add_option("--input", input)->required();
  app.add_option("--out", out);
  if (int rc = parse_or_usage(app, args)) return rc;

  json j = read_json_file(input);
  BundleDatum ambient = bundle_datum_from_json(j.at("ambient"));
  double delta = j.at("delta").get<double>();
  double vol = j.at("vol").get<double>();
  bool p1 = j.value("psi1_nonzero", false);
  bool p2 = j.value("psi2_nonzero", false);
  std::vector<BundleDatum> subs;
  for (const auto& js : j.value("subobjects", json::array()))
    subs.push_back(bundle_datum_from_json(js));

  StabilityVerdict v = is_delta_stable(ambient, delta, vol, p1, p2, subs);

  RunReport rep;
  rep.command = "stability";
  rep.parameters = {{"input", input}, {"delta", delta}, {"vol", vol}};
  rep.results["stable"] = v.stable;
  rep.results["violated_clause"] = v.violated_clause;
  rep.results["witness"] =
      v.witness ? bundle_datum_to_json(*v.witness) : json(nullptr);
  return finish(rep, out);
}

int cmd_vortex(const std::vector<std::string>& args) {
  int grid_n = 64, degree = 1;
  double lambda = 3.0, tol = 1e-6;
  uint64_t seed = 1;
  std::string out;
  CLI::App app{"perturbed vortex solve on the flat torus"};
  app.add_option("--grid", grid_n);
  app.add_option("--degree", degree);
  app.add_option("--lambda", lambda);
  app.add_option("--tol", tol);
  app.add_option("--seed", seed);
  app.add_option("--out", out);
  if (int rc = parse_or_usage(app, args)) return rc;

  TorusGrid grid = make_grid(grid_n, degree);
  VortexSolveResult sol = solve_vortex(grid, lambda, seed, tol);
  const VortexState& s = sol.state;
  VortexResidual res = vortex_residual(s);
  IntegralIdentity ii = integral_identity_check(s);
  WindingReport wind = winding_number(s);
  double n1 = std::sqrt(grid.cell()) * s.psi1.norm();
  double n2 = std::sqrt(grid.cell()) * s.psi2.norm();

  RunReport rep;
  rep.command = "vortex";
  rep.parameters = {{"grid", grid_n}, {"degree", degree}, {"lambda", lambda},
                    {"tol", tol},     {"seed", seed}};
  rep.results["iterations_forward"] = sol.report.iterations_forward;
  rep.results["iterations_central"] = sol.report.iterations_central;
  rep.results["residual_norm"] = sol.report.residual_norm;
  rep.results["residual_parts"] = {
      {"dirac1", res.norm1}, {"dirac2", res.norm2}, {"moment", res.norm3}};
  rep.results["psi1_norm"] = n1;
  rep.results["psi2_norm"] = n2;
  rep.results["integral_identity"] = {{"lhs", ii.lhs},
                                      {"rhs", ii.rhs},
                                      {"relative_error", ii.relative_error}};
  rep.results["winding"] = {{"total", wind.total},
                            {"zero_count", wind.zero_count},
                            {"section", wind.used_psi2 ? "psi2" : "psi1"}};

  rep.require("converged", sol.report.converged);
  rep.check("integral_identity", ii.relative_error, 1e-2);
  double lo = std::min(n1, n2), hip = std::max(n1, n2);
  rep.check("dichotomy_ratio", hip > 0 ? lo / hip : 0.0, 1e-3);
  rep.check("winding_defect",
            std::abs(static_cast<double>(wind.total - degree)), 0.5);
  rep.check("zero_count_defect",
            std::abs(static_cast<double>(wind.zero_count - std::abs(degree))),
            0.5);

  if (!out.empty()) {
    std::ofstream f(out);
    if (!f) throw std::runtime_error("cannot open " + out);
    f << state_to_json(s).dump(2) << "\n";
    rep.results["state_file"] = out;
  }
  emit_report(rep, "");
  return rep.pass() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) {
    std::cerr << kUsage;
    return 2;
  }
  std::string cmd = argv[1];
  std::vector<std::string> rest = fold_args(argc - 2, argv + 2);
  try {
    if (cmd == "verify-identities") return cmd_verify_identities(rest);
    if (cmd == "solve-moment") return cmd_solve_moment(rest);
    if (cmd == "spectrum") return cmd_spectrum(rest);
    if (cmd == "cone-demo") return cmd_cone_demo(rest);
    if (cmd == "sw-series") return cmd_sw_series(rest);
    if (cmd == "stability") return cmd_stability(rest);
    if (cmd == "vortex") return cmd_vortex(rest);
  } catch (const std::exception& e) {
    std::cerr << "adhm " << cmd << ": " << e.what() << "\n";
    return 2;
  }
  std::cerr << "adhm: unknown subcommand '" << cmd << "'\n" << kUsage;
  return 2;
}
