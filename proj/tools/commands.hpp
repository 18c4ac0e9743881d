#pragma once

// Subcommands of the margcert front end. Each returns a Report whose
// exit_code follows: 0 success, 2 parse error, 3 failed verification or
// inconsistent input, 4 solver failure.

#include <string>
#include <vector>

#include "margcert/json_io.hpp"

namespace margcert::cli {

inline constexpr const char* kVersion = "0.1.0";

enum ExitCode : int { kOk = 0, kParseError = 2, kVerificationFailed = 3, kSolverFailure = 4 };

struct RunConfig {
  std::string command;
  int n = 3;
  double p_min = 0.0;
  double p_max = 1.0;
  int steps = 21;
  std::string mode;
  /// Zero selects each command's default tolerance.
  double tol = 0.0;
  bool json = false;
  bool parallel = false;
  std::string out;
  std::string input;
};

struct Report {
  std::string command;
  json_io::Json inputs = json_io::Json::object();
  json_io::Json tolerances = json_io::Json::object();
  json_io::Json results = json_io::Json::object();
  json_io::Json residuals = json_io::Json::object();
  std::vector<std::string> lines;
  std::vector<std::string> failures;
  double seconds = 0.0;
  int exit_code = kOk;

  /// Records a named check; a failing check sets exit code 3 unless a worse code is set.
  void check(const std::string& name, bool ok, double residual, double tolerance);
  json_io::Json to_json() const;
  std::string to_text() const;
};

Report cmd_box29(const RunConfig& cfg);
Report cmd_ineq9_scan(const RunConfig& cfg);
Report cmd_marginal_membership(const RunConfig& cfg);
Report cmd_sdp_wstate(const RunConfig& cfg);
Report cmd_verify_appendix(const RunConfig& cfg);
Report cmd_ghz_demo(const RunConfig& cfg);

/// Dispatches on cfg.command; unknown commands give exit code 2.
Report run(const RunConfig& cfg);

/// Left side of the marginal witness on rho_W(3, p) with the standard angles.
double ineq9_value(double p);

}  // namespace margcert::cli
