#include "commands.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "margcert/entcert.hpp"
#include "margcert/polytopes.hpp"

namespace margcert::cli {

using json_io::Json;

namespace {

std::string fmt(double v, int digits = 10) {
  std::ostringstream s;
  s << std::setprecision(digits) << v;
  return s.str();
}

double pick_tol(const RunConfig& cfg, double fallback) { return cfg.tol > 0.0 ? cfg.tol : fallback; }

template <typename F>
Report timed(const char* name, F&& body) {
  const auto start = std::chrono::steady_clock::now();
  Report r;
  r.command = name;
  body(r);
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

void fail(Report& r, int code, const std::string& message) {
  r.exit_code = std::max(r.exit_code, code);
  r.failures.push_back(message);
}

void add_cert_residuals(Report& r, const std::string& prefix, const entcert::CertResult& c) {
  for (const auto& res : c.residuals) r.check(prefix + res.name, res.ok(), res.value, res.tolerance);
}

}  // namespace

void Report::check(const std::string& name, bool ok, double residual, double tolerance) {
  residuals[name] = {{"value", residual}, {"tolerance", tolerance}, {"ok", ok}};
  if (!ok) {
    failures.push_back(name + ": residual " + fmt(residual) + " (tolerance " + fmt(tolerance) + ")");
    if (exit_code == kOk) exit_code = kVerificationFailed;
  }
}

Json Report::to_json() const {
  return Json{{"command", command},   {"version", kVersion},   {"inputs", inputs},
              {"tolerances", tolerances}, {"results", results}, {"residuals", residuals},
              {"failures", failures}, {"seconds", seconds},    {"exit_code", exit_code}};
}

std::string Report::to_text() const {
  std::ostringstream s;
  s << command << " (margcert " << kVersion << ")\n";
  for (const auto& l : lines) s << "  " << l << "\n";
  for (const auto& f : failures) s << "  FAILED " << f << "\n";
  s << "  " << (exit_code == kOk ? "ok" : "exit code " + std::to_string(exit_code)) << " in " << fmt(seconds, 4)
    << " s\n";
  return s.str();
}

double ineq9_value(double p) {
  const CorrelatorTable t = qkernel::correlators_from_state(qkernel::noisy_w(3, p), qkernel::w_violation_scenario());
  CorrelatorTable marginal = t;
  marginal.has_triples = false;
  return boxes::evaluate_inequality(boxes::marginal_witness_inequality(), marginal);
}

Report cmd_box29(const RunConfig& cfg) {
  return timed("box29", [&](Report& r) {
    const double tol = pick_tol(cfg, 1e-9);
    const double bound_tol = 1e-7;
    r.tolerances = {{"default", tol}, {"extension_bounds", bound_tol}};
    r.inputs = {{"parallel", cfg.parallel}};
    const TripartiteBox box = boxes::box29();

    const auto ns = boxes::is_nonsignaling(box, 1e-12);
    r.check("nonsignaling", ns.nonsignaling, ns.max_violation, 1e-12);
    r.check("positivity", box.min_entry() >= -1e-12, std::max(0.0, -box.min_entry()), 1e-12);
    r.check("normalization", box.normalization_error() <= 1e-12, box.normalization_error(), 1e-12);

    const MarginalTriple m = boxes::marginals(box);
    static const char* names[3] = {"AB", "AC", "BC"};
    const BipartiteBox* pairs[3] = {&m.pab, &m.pac, &m.pbc};
    Json chsh = Json::object();
    for (int k = 0; k < 3; ++k) {
      const double v = boxes::chsh_max(*pairs[k]);
      chsh[names[k]] = v;
      r.check(std::string("chsh_max_") + names[k], std::abs(v - 2.0) <= tol, std::abs(v - 2.0), tol);
      const auto local = polytopes::bipartite_local_membership(*pairs[k]);
      r.check(std::string("bipartite_local_") + names[k], local.member, local.residual, 1e-9);
    }
    r.results["chsh_max"] = chsh;
    r.lines.push_back("CHSH max on AB, AC, BC marginals: " + fmt(chsh["AB"].get<double>()) + ", " +
                      fmt(chsh["AC"].get<double>()) + ", " + fmt(chsh["BC"].get<double>()));

    const auto eb = polytopes::extension_bounds(m, cfg.parallel);
    const CorrelatorTable expected = boxes::box29_correlators();
    double worst = 0.0;
    Json ranges = Json::array();
    for (int x = 0; x < 2; ++x)
      for (int y = 0; y < 2; ++y)
        for (int z = 0; z < 2; ++z) {
          const auto& range = eb.range[x][y][z];
          const double e = expected.triple(x, y, z);
          worst = std::max({worst, std::abs(range.min - e), std::abs(range.max - e)});
          ranges.push_back({{"xyz", {x, y, z}}, {"min", range.min}, {"max", range.max}, {"expected", e}});
        }
    r.results["extension_bounds"] = {{"feasible", eb.feasible}, {"collapsed", eb.collapsed(bound_tol)},
                                      {"ranges", ranges}};
    r.check("extension_bounds_collapse", eb.feasible && worst <= bound_tol, worst, bound_tol);
    r.lines.push_back("triple correlators pinned by the marginals: " +
                      std::string(eb.collapsed(bound_tol) ? "yes" : "no") + " (max deviation " + fmt(worst) + ")");

    const CorrelatorTable t = boxes::correlators_from_box(box);
    const double svet = boxes::evaluate_inequality(boxes::svetlichny_inequality(), t);
    const double svet_max = boxes::svetlichny_max(t);
    const double gyni = boxes::gyni_value(box);
    r.results["svetlichny"] = svet;
    r.results["svetlichny_max"] = svet_max;
    r.results["gyni"] = gyni;
    r.check("svetlichny", std::abs(svet - 16.0 / 3.0) <= tol, std::abs(svet - 16.0 / 3.0), tol);
    r.check("gyni", std::abs(gyni - 4.0 / 3.0) <= tol, std::abs(gyni - 4.0 / 3.0), tol);
    r.lines.push_back("Svetlichny " + fmt(svet) + " (bound 4, best relabeling " + fmt(svet_max) + "), GYNI " +
                      fmt(gyni) + " (bound 1)");

    const auto local = polytopes::box_local_membership(box);
    r.results["box_local_member"] = local.member;
    r.check("box_not_local", !local.member && local.check.valid, local.check.max_violation, 1e-9);
    const auto pi = polytopes::marginal_membership_pi(m);
    r.results["marginals_in_pi"] = pi.member;
    r.check("marginals_not_in_pi", !pi.member && pi.check.valid, pi.check.max_violation, 1e-9);
    r.lines.push_back(std::string("box local: ") + (local.member ? "yes" : "no") +
                      ", marginals admit a local extension: " + (pi.member ? "yes" : "no"));
  });
}

Report cmd_ineq9_scan(const RunConfig& cfg) {
  return timed("ineq9-scan", [&](Report& r) {
    const double tol = pick_tol(cfg, 1e-5);
    r.inputs = {{"p_min", cfg.p_min}, {"p_max", cfg.p_max}, {"steps", cfg.steps}};
    r.tolerances = {{"bisection", tol}};
    if (!(cfg.p_min >= 0.0 && cfg.p_min < cfg.p_max && cfg.p_max <= 1.0) || cfg.steps < 2) {
      fail(r, kParseError, "need 0 <= p_min < p_max <= 1 and steps >= 2");
      return;
    }
    const double bound = boxes::marginal_witness_inequality().bound;
    Json grid = Json::array();
    for (int i = 0; i < cfg.steps; ++i) {
      const double p = cfg.p_min + (cfg.p_max - cfg.p_min) * i / (cfg.steps - 1);
      const double v = ineq9_value(p);
      grid.push_back({{"p", p}, {"value", v}, {"violated", v > bound}});
    }
    r.results["grid"] = grid;
    const double v_lo = ineq9_value(cfg.p_min), v_hi = ineq9_value(cfg.p_max);
    r.results["value_at_p_min"] = v_lo;
    r.results["value_at_p_max"] = v_hi;
    if (v_lo <= bound && v_hi > bound) {
      double lo = cfg.p_min, hi = cfg.p_max;
      while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        (ineq9_value(mid) > bound ? hi : lo) = mid;
      }
      r.results["threshold"] = 0.5 * (lo + hi);
      r.lines.push_back("violation threshold p = " + fmt(0.5 * (lo + hi), 8));
    } else {
      r.results["threshold"] = nullptr;
      r.lines.push_back("no crossing of the bound inside [p_min, p_max]");
    }
    r.lines.push_back("value at p_min " + fmt(v_lo) + ", at p_max " + fmt(v_hi) + " (bound " + fmt(bound) + ")");
  });
}

Report cmd_marginal_membership(const RunConfig& cfg) {
  return timed("marginal-membership", [&](Report& r) {
    const std::string mode = cfg.mode.empty() ? "pi" : cfg.mode;
    r.inputs = {{"input", cfg.input}, {"mode", mode}};
    r.tolerances = {{"certificate", 1e-9}};
    if (mode != "pi" && mode != "pi-prime") {
      fail(r, kParseError, "mode must be pi or pi-prime");
      return;
    }
    MarginalTriple m;
    try {
      std::ifstream in(cfg.input);
      if (!in) throw json_io::SchemaError("cannot open " + cfg.input);
      m = json_io::marginals_from_document(Json::parse(in));
    } catch (const nlohmann::json::exception& e) {
      fail(r, kParseError, std::string("parse error: ") + e.what());
      return;
    } catch (const json_io::SchemaError& e) {
      fail(r, kParseError, std::string("schema error: ") + e.what());
      return;
    } catch (const std::invalid_argument& e) {
      fail(r, kVerificationFailed, e.what());
      return;
    }
    try {
      const auto rep = mode == "pi" ? polytopes::marginal_membership_pi(m)
                                    : polytopes::marginal_membership_pi_prime_relaxed(m);
      r.results["membership"] = json_io::to_json(rep, mode);
      r.check("certificate", rep.check.valid, rep.check.max_violation, 1e-9);
      r.lines.push_back(std::string("mode ") + mode + ": " + (rep.member ? "member" : "non-member") + " (" +
                        rep.check.detail + ")");
    } catch (const std::invalid_argument& e) {
      fail(r, kVerificationFailed, e.what());
    } catch (const std::runtime_error& e) {
      fail(r, kSolverFailure, e.what());
    }
  });
}

Report cmd_sdp_wstate(const RunConfig& cfg) {
  return timed("sdp-wstate", [&](Report& r) {
    const std::string mode = cfg.mode.empty() ? "joint" : cfg.mode;
    r.inputs = {{"n", cfg.n}, {"mode", mode}};
    if (cfg.n < 3 || cfg.n > kMaxQubits || (mode != "joint" && mode != "bisection")) {
      fail(r, kParseError, "need 3 <= n <= 7 and mode joint or bisection");
      return;
    }
    entcert::PStarOptions opt;
    opt.mode = mode == "joint" ? entcert::SolveMode::Joint : entcert::SolveMode::Bisection;
    if (cfg.tol > 0.0) opt.sdp.tol = cfg.tol;
    r.tolerances = {{"sdp", opt.sdp.tol}, {"bisection", opt.bisection_tol}};
    const auto res = entcert::solve_pstar(cfg.n, opt);
    const double psep = entcert::p_sep(cfg.n);
    r.results = {{"p_star", res.p_star},
                 {"p_sep", psep},
                 {"window", {res.p_star, psep}},
                 {"lower", res.lower},
                 {"upper", res.upper},
                 {"formulation", entcert::to_string(res.formulation)},
                 {"ppt_cuts", entcert::to_string(res.cuts)},
                 {"solver_status", sdp::to_string(res.status)},
                 {"iterations", res.iterations},
                 {"solves", res.solves},
                 {"certificate", json_io::to_json(res.cert)}};
    if (res.status != sdp::SdpStatus::Optimal) {
      fail(r, kSolverFailure, "solver status " + sdp::to_string(res.status));
      return;
    }
    add_cert_residuals(r, "", res.cert);
    r.lines.push_back("n = " + std::to_string(cfg.n) + ": p* = " + fmt(res.p_star, 8) + ", p_sep = " + fmt(psep, 8) +
                      " (bracket [" + fmt(res.lower, 10) + ", " + fmt(res.upper, 10) + "])");
    r.lines.push_back("certified window (p*, p_sep] = (" + fmt(res.p_star, 6) + ", " + fmt(psep, 6) + "]");
    if (cfg.n > 3) r.lines.push_back("PPT imposed across " + entcert::to_string(res.cuts));
  });
}

Report cmd_verify_appendix(const RunConfig& cfg) {
  return timed("verify-appendix", [&](Report& r) {
    const double primal_tol = pick_tol(cfg, 1e-9);
    const double dual_tol = 1e-8;
    const double fallback_tol = 1e-5;
    r.tolerances = {{"primal", primal_tol}, {"dual", dual_tol}, {"fallback_sandwich", fallback_tol}};
    const double ps = entcert::appendix_p_star();
    r.results["p_star_exact"] = ps;

    const auto primal = entcert::verify_primal_state(entcert::appendix_primal_state(ps).matrix(), ps, primal_tol);
    r.results["primal"] = json_io::to_json(primal);
    add_cert_residuals(r, "primal.", primal);

    const auto printed = entcert::verify_dual_certificate(entcert::appendix_dual_certificate(), dual_tol);
    const auto off_diag = entcert::verify_dual_certificate(
        entcert::appendix_dual_certificate(entcert::HcReading::OffDiagonalOnly), dual_tol);
    r.results["dual_printed"] = json_io::to_json(printed);
    r.results["dual_printed_offdiagonal_reading_passes"] = off_diag.all_passed();
    r.lines.push_back("primal state at p* = " + fmt(ps, 12) + ": " + (primal.all_passed() ? "feasible" : "infeasible"));
    r.lines.push_back(std::string("printed dual certificate: ") + (printed.all_passed() ? "valid" : "invalid") +
                      ", objective " + fmt(printed.value("objective"), 12));
    if (!off_diag.all_passed())
      r.lines.push_back("reading h.c. as conjugating only off-diagonal terms leaves Q_A with eigenvalue " +
                        fmt(off_diag.value("Q_A_max_eigenvalue"), 6));

    if (printed.all_passed()) {
      const auto s = entcert::weak_duality_sandwich(primal, printed);
      r.results["sandwich"] = {{"primal", s.primal}, {"dual", s.dual}, {"gap", s.gap()}, {"source", "printed"}};
      r.check("sandwich", s.pins(1e-10), std::abs(s.gap()), 1e-10);
      r.check("objective_exact", std::abs(s.dual - ps) <= 1e-10, std::abs(s.dual - ps), 1e-10);
      r.lines.push_back("weak duality: " + fmt(s.primal, 12) + " <= p* <= " + fmt(s.dual, 12));
    } else {
      for (const auto& res : printed.residuals)
        if (!res.ok()) r.lines.push_back("printed certificate fails " + res.name + " by " + fmt(res.value));
      const auto m = entcert::build_marginal_sdp(3, entcert::Formulation::Full);
      const auto out = sdp::solve(m.problem);
      if (out.status != sdp::SdpStatus::Optimal) {
        fail(r, kSolverFailure, "fallback SDP: " + sdp::to_string(out.status));
        return;
      }
      const auto solver = entcert::verify_dual_certificate(entcert::dual_from_solution(m, out), 1e-7);
      r.results["dual_solver"] = json_io::to_json(solver);
      const auto s = entcert::weak_duality_sandwich(primal, solver);
      r.results["sandwich"] = {{"primal", s.primal}, {"dual", s.dual}, {"gap", s.gap()}, {"source", "solver"}};
      r.results["printed_reproducible"] = false;
      r.check("sandwich", s.pins(fallback_tol), std::abs(s.gap()), fallback_tol);
      r.lines.push_back("solver dual certificate: " + fmt(s.primal, 10) + " <= p* <= " + fmt(s.dual, 10));
    }
  });
}

Report cmd_ghz_demo(const RunConfig&) {
  return timed("ghz-demo", [&](Report& r) {
    const auto c = entcert::ghz_marginal_demo();
    r.results["certificate"] = json_io::to_json(c);
    add_cert_residuals(r, "", c);
    r.lines.push_back("common marginal (|00><00| + |11><11|)/2, PPT min eigenvalue " +
                      fmt(c.value("marginal_ppt_min_eig")));
    r.lines.push_back("GHZ PPT min eigenvalues A, B, C: " + fmt(c.value("ghz_ppt_min_eig_A")) + ", " +
                      fmt(c.value("ghz_ppt_min_eig_B")) + ", " + fmt(c.value("ghz_ppt_min_eig_C")));
    r.lines.push_back("mixed PPT min eigenvalues A, B, C: " + fmt(c.value("mixed_ppt_min_eig_A")) + ", " +
                      fmt(c.value("mixed_ppt_min_eig_B")) + ", " + fmt(c.value("mixed_ppt_min_eig_C")));
  });
}

Report run(const RunConfig& cfg) {
  if (cfg.command == "box29") return cmd_box29(cfg);
  if (cfg.command == "ineq9-scan") return cmd_ineq9_scan(cfg);
  if (cfg.command == "marginal-membership") return cmd_marginal_membership(cfg);
  if (cfg.command == "sdp-wstate") return cmd_sdp_wstate(cfg);
  if (cfg.command == "verify-appendix") return cmd_verify_appendix(cfg);
  if (cfg.command == "ghz-demo") return cmd_ghz_demo(cfg);
  Report r;
  r.command = cfg.command;
  fail(r, kParseError, "unknown command " + cfg.command);
  return r;
}

}  // namespace margcert::cli
