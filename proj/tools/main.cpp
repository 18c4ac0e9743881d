#include <exception>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "commands.hpp"

int main(int argc, char** argv) {
  using namespace margcert::cli;
  CLI::App app{"Certify nonlocality and entanglement from two-party marginals"};
  app.require_subcommand(1);
  RunConfig cfg;

  auto common = [&cfg](CLI::App* sub) {
    sub->add_option("--tol", cfg.tol, "Override the command's default tolerance")->check(CLI::PositiveNumber);
    sub->add_flag("--json", cfg.json, "Print the JSON report instead of text");
    sub->add_option("--out", cfg.out, "Also write the JSON report to this path");
  };

  auto* box29 = app.add_subcommand("box29", "Box 29: marginals, extension bounds, witnesses");
  box29->add_flag("--parallel", cfg.parallel, "Solve the extension LPs concurrently");
  common(box29);

  auto* scan = app.add_subcommand("ineq9-scan", "Marginal witness on noisy W states and its threshold");
  scan->add_option("--p-min", cfg.p_min)->check(CLI::Range(0.0, 1.0));
  scan->add_option("--p-max", cfg.p_max)->check(CLI::Range(0.0, 1.0));
  scan->add_option("--steps", cfg.steps)->check(CLI::Range(2, 100000));
  common(scan);

  auto* member = app.add_subcommand("marginal-membership", "LP membership of a marginal triple");
  member->add_option("input", cfg.input, "box.v1 or correlators.v1 file")->required();
  member->add_option("--mode", cfg.mode, "pi or pi-prime")->check(CLI::IsMember({"pi", "pi-prime"}));
  common(member);

  auto* sdpw = app.add_subcommand("sdp-wstate", "Largest p with a PPT completion of noisy W reductions");
  sdpw->add_option("--n", cfg.n, "Number of parties")->check(CLI::Range(3, 7));
  sdpw->add_option("--mode", cfg.mode, "joint or bisection")->check(CLI::IsMember({"joint", "bisection"}));
  sdpw->add_flag("--parallel", cfg.parallel, "Accepted for symmetry; a single solve runs serially");
  common(sdpw);

  auto* appendix = app.add_subcommand("verify-appendix", "Check the analytic primal state and dual certificate");
  common(appendix);

  auto* ghz = app.add_subcommand("ghz-demo", "GHZ versus its separable look-alike");
  common(ghz);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kParseError;
  }
  cfg.command = app.get_subcommands().front()->get_name();

  Report report;
  try {
    report = run(cfg);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kSolverFailure;
  }
  const auto j = report.to_json();
  if (cfg.json)
    std::cout << j.dump(2) << "\n";
  else
    std::cout << report.to_text();
  if (!cfg.out.empty()) {
    std::ofstream out(cfg.out);
    if (!out) {
      std::cerr << "cannot write " << cfg.out << "\n";
      return kParseError;
    }
    out << j.dump(2) << "\n";
  }
  return report.exit_code;
}
