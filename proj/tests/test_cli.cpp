#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>

#include <gtest/gtest.h>

#include "commands.hpp"
#include "margcert/json_io.hpp"

using namespace margcert;
using json_io::Json;
namespace fs = std::filesystem;

namespace {

fs::path write_temp(const std::string& name, const std::string& text) {
  const fs::path p = fs::temp_directory_path() / ("margcert_test_" + name);
  std::ofstream(p) << text;
  return p;
}

cli::Report run(const std::string& command, const std::string& input = "", const std::string& mode = "", int n = 3) {
  cli::RunConfig cfg;
  cfg.command = command;
  cfg.input = input;
  cfg.mode = mode;
  cfg.n = n;
  return cli::run(cfg);
}

int shell(const std::string& args) {
  const int status = std::system((std::string(MARGCERT_BIN) + " " + args + " > /dev/null 2>&1").c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST(JsonBox, RoundTrip) {
  std::mt19937 rng(1);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  TripartiteBox b;
  for (double& v : b.data()) v = u(rng);
  const TripartiteBox back = json_io::box_from_json(Json::parse(json_io::to_json(b).dump()));
  EXPECT_EQ(back.data(), b.data());
}

TEST(JsonBox, SchemaErrors) {
  EXPECT_THROW(json_io::box_from_json(Json{{"format", "box.v2"}}), json_io::SchemaError);
  Json j = json_io::to_json(boxes::uniform_box());
  j["probabilities"].erase(0);
  EXPECT_THROW(json_io::box_from_json(j), json_io::SchemaError);
  j = json_io::to_json(boxes::uniform_box());
  j["probabilities"][3] = "x";
  EXPECT_THROW(json_io::box_from_json(j), json_io::SchemaError);
  j = json_io::to_json(boxes::uniform_box());
  j["parties"] = 4;
  EXPECT_THROW(json_io::box_from_json(j), json_io::SchemaError);
}

TEST(JsonCorrelators, RoundTripWithAndWithoutTriples) {
  CorrelatorTable t = boxes::box29_correlators();
  CorrelatorTable back = json_io::correlators_from_json(Json::parse(json_io::to_json(t).dump()));
  EXPECT_EQ(back.singles, t.singles);
  EXPECT_EQ(back.doubles, t.doubles);
  EXPECT_EQ(back.triples, t.triples);
  EXPECT_TRUE(back.has_triples);
  t.has_triples = false;
  back = json_io::correlators_from_json(json_io::to_json(t));
  EXPECT_FALSE(back.has_triples);
}

TEST(JsonCorrelators, RejectsOutOfRange) {
  Json j = json_io::to_json(boxes::box29_correlators());
  j["singles"]["A"][0] = 1.5;
  EXPECT_THROW(json_io::correlators_from_json(j), json_io::SchemaError);
  j = json_io::to_json(boxes::box29_correlators());
  j["doubles"].erase("BC");
  EXPECT_THROW(json_io::correlators_from_json(j), json_io::SchemaError);
}

TEST(JsonMatrix, RoundTrip) {
  std::mt19937 rng(2);
  std::normal_distribution<double> g;
  ComplexMatrix m(3, 5);
  for (int i = 0; i < 3; ++i)
    for (int k = 0; k < 5; ++k) m(i, k) = Complex(g(rng), g(rng));
  EXPECT_EQ(json_io::matrix_from_json(Json::parse(json_io::matrix_to_json(m).dump())), m);
  EXPECT_THROW(json_io::matrix_from_json(Json{{"rows", 2}, {"cols", 2}, {"data", Json::array()}}), json_io::SchemaError);
}

TEST(JsonCertificate, RoundTrip) {
  const entcert::CertResult c = entcert::verify_dual_certificate(entcert::appendix_dual_certificate());
  const entcert::CertResult back = json_io::cert_from_json(Json::parse(json_io::to_json(c).dump()));
  EXPECT_EQ(back.kind, c.kind);
  EXPECT_EQ(back.verdict, c.verdict);
  EXPECT_EQ(back.p_star, c.p_star);
  ASSERT_EQ(back.residuals.size(), c.residuals.size());
  for (const auto& r : c.residuals) {
    ASSERT_NE(back.residual(r.name), nullptr) << r.name;
    EXPECT_EQ(back.residual(r.name)->value, r.value);
    EXPECT_EQ(back.residual(r.name)->tolerance, r.tolerance);
  }
  EXPECT_EQ(back.values.size(), c.values.size());
  ASSERT_EQ(back.matrices.size(), c.matrices.size());
  for (std::size_t k = 0; k < c.matrices.size(); ++k) EXPECT_EQ(back.matrices[k].second, c.matrices[k].second);
  EXPECT_EQ(back.notes, c.notes);
  EXPECT_EQ(json_io::to_json(back), json_io::to_json(c));
}

TEST(JsonMembership, Fields) {
  const auto rep = polytopes::marginal_membership_pi(boxes::marginals(boxes::box29()));
  const Json j = Json::parse(json_io::to_json(rep, "pi").dump());
  EXPECT_EQ(j.at("format"), "membership.v1");
  EXPECT_FALSE(j.at("member").get<bool>());
  EXPECT_EQ(j.at("certificate").size(), j.at("certificate_rows").size());
  EXPECT_TRUE(j.at("check").at("valid").get<bool>());
}

TEST(MarginalsFromDocument, SignalingBoxIsInconsistentInput) {
  TripartiteBox sig;
  for (int x = 0; x < 2; ++x) for (int y = 0; y < 2; ++y) for (int z = 0; z < 2; ++z) sig(y, 0, 0, x, y, z) = 1.0;
  EXPECT_THROW(json_io::marginals_from_document(json_io::to_json(sig)), std::invalid_argument);
  EXPECT_THROW(json_io::marginals_from_document(Json{{"format", "other.v1"}}), json_io::SchemaError);
}

TEST(Commands, Box29) {
  const cli::Report r = run("box29");
  EXPECT_EQ(r.exit_code, cli::kOk) << r.to_text();
  EXPECT_NEAR(r.results.at("svetlichny").get<double>(), 16.0 / 3.0, 1e-12);
  EXPECT_NEAR(r.results.at("gyni").get<double>(), 4.0 / 3.0, 1e-12);
  EXPECT_TRUE(r.results.at("extension_bounds").at("collapsed").get<bool>());
  EXPECT_FALSE(r.results.at("box_local_member").get<bool>());
  const Json j = Json::parse(r.to_json().dump());
  EXPECT_EQ(j.at("version"), cli::kVersion);
  EXPECT_TRUE(j.at("tolerances").is_object());
}

TEST(Commands, Ineq9Scan) {
  const cli::Report r = run("ineq9-scan");
  EXPECT_EQ(r.exit_code, cli::kOk) << r.to_text();
  EXPECT_NEAR(r.results.at("threshold").get<double>(), 0.9548, 1e-3);
  EXPECT_GT(r.results.at("value_at_p_max").get<double>(), 4.0);
  EXPECT_LE(r.results.at("value_at_p_min").get<double>(), 4.0);
  EXPECT_NEAR(cli::ineq9_value(0.0), 0.0, 1e-15);
  EXPECT_GT(cli::ineq9_value(1.0), 4.0);
}

TEST(Commands, MarginalMembership) {
  const fs::path b29 = write_temp("b29.json", json_io::to_json(boxes::box29()).dump());
  const fs::path uni = write_temp("uni.json", json_io::to_json(boxes::uniform_box()).dump());
  cli::Report r = run("marginal-membership", b29.string(), "pi");
  EXPECT_EQ(r.exit_code, cli::kOk);
  EXPECT_FALSE(r.results.at("membership").at("member").get<bool>());
  for (const char* mode : {"pi", "pi-prime"}) {
    r = run("marginal-membership", uni.string(), mode);
    EXPECT_EQ(r.exit_code, cli::kOk);
    EXPECT_TRUE(r.results.at("membership").at("member").get<bool>()) << mode;
  }
  CorrelatorTable w = qkernel::correlators_from_state(qkernel::noisy_w(3, 0.97), qkernel::w_violation_scenario());
  w.has_triples = false;
  const fs::path wfile = write_temp("w097.json", json_io::to_json(w).dump());
  r = run("marginal-membership", wfile.string(), "pi");
  EXPECT_EQ(r.exit_code, cli::kOk);
  EXPECT_FALSE(r.results.at("membership").at("member").get<bool>());
}

TEST(Commands, MarginalMembershipErrors) {
  EXPECT_EQ(run("marginal-membership", "/nonexistent/file.json").exit_code, cli::kParseError);
  const fs::path junk = write_temp("junk.json", "{not json");
  EXPECT_EQ(run("marginal-membership", junk.string()).exit_code, cli::kParseError);
  TripartiteBox sig;
  for (int x = 0; x < 2; ++x) for (int y = 0; y < 2; ++y) for (int z = 0; z < 2; ++z) sig(y, 0, 0, x, y, z) = 1.0;
  const fs::path sfile = write_temp("sig.json", json_io::to_json(sig).dump());
  EXPECT_EQ(run("marginal-membership", sfile.string()).exit_code, cli::kVerificationFailed);
}

TEST(Commands, SdpWStateModesAgree) {
  const cli::Report joint = run("sdp-wstate", "", "joint", 3);
  const cli::Report bis = run("sdp-wstate", "", "bisection", 3);
  ASSERT_EQ(joint.exit_code, cli::kOk) << joint.to_text();
  ASSERT_EQ(bis.exit_code, cli::kOk) << bis.to_text();
  EXPECT_NEAR(joint.results.at("p_star").get<double>(), 0.4899, 1e-4);
  EXPECT_NEAR(joint.results.at("p_sep").get<double>(), 0.5482, 1e-4);
  EXPECT_NEAR(joint.results.at("p_star").get<double>(), bis.results.at("p_star").get<double>(), 1e-5);
  EXPECT_EQ(run("sdp-wstate", "", "joint", 9).exit_code, cli::kParseError);
}

TEST(Commands, SdpWStateFourParties) {
  const cli::Report r = run("sdp-wstate", "", "joint", 4);
  ASSERT_EQ(r.exit_code, cli::kOk);
  EXPECT_NEAR(r.results.at("p_star").get<double>(), 0.6180, 1e-3);
  EXPECT_NEAR(r.results.at("p_sep").get<double>(), 0.7071, 1e-4);
}

TEST(Commands, VerifyAppendix) {
  const cli::Report r = run("verify-appendix");
  EXPECT_EQ(r.exit_code, cli::kOk) << r.to_text();
  const Json& s = r.results.at("sandwich");
  EXPECT_NEAR(s.at("primal").get<double>(), 3.0 / (2.0 + std::sqrt(17.0)), 1e-10);
  EXPECT_NEAR(s.at("dual").get<double>(), 3.0 / (2.0 + std::sqrt(17.0)), 1e-10);
  const entcert::CertResult primal = json_io::cert_from_json(r.results.at("primal"));
  EXPECT_TRUE(primal.all_passed());
}

TEST(Commands, GhzDemoAndUnknown) {
  EXPECT_EQ(run("ghz-demo").exit_code, cli::kOk);
  EXPECT_EQ(run("no-such-command").exit_code, cli::kParseError);
}

TEST(Commands, LpReportsAreBitIdentical) {
  cli::RunConfig cfg;
  cfg.command = "box29";
  Json a = cli::run(cfg).to_json(), b = cli::run(cfg).to_json();
  a.erase("seconds");
  b.erase("seconds");
  EXPECT_EQ(a.dump(), b.dump());
}

TEST(Binary, ExitCodes) {
  EXPECT_EQ(shell("ghz-demo"), 0);
  EXPECT_EQ(shell("ghz-demo --json"), 0);
  EXPECT_EQ(shell("no-such-command"), 2);
  EXPECT_EQ(shell("marginal-membership /nonexistent/file.json"), 2);
  EXPECT_EQ(shell("sdp-wstate --n 12"), 2);
}

TEST(Binary, JsonOutputFile) {
  const fs::path out = fs::temp_directory_path() / "margcert_test_box29_report.json";
  fs::remove(out);
  ASSERT_EQ(shell("box29 --out " + out.string()), 0);
  std::ifstream in(out);
  const Json j = Json::parse(in);
  EXPECT_EQ(j.at("command"), "box29");
  EXPECT_EQ(j.at("exit_code"), 0);
}
