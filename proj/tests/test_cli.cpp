#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>
#include <unistd.h>

#include "solitonforge/cli/commands.hpp"
#include "solitonforge/cli/config.hpp"
#include "solitonforge/cli/export.hpp"
#include "solitonforge/error.hpp"
#include "support.hpp"

using namespace solitonforge;
namespace fs = std::filesystem;

namespace {

const fs::path& scratch_root() {
  static const fs::path root = fs::temp_directory_path() / ("solitonforge_test_" + std::to_string(::getpid()));
  return root;
}

struct ScratchCleanup {
  ~ScratchCleanup() {
    std::error_code ec;
    fs::remove_all(scratch_root(), ec);
  }
} cleanup;

fs::path scratch(const std::string& name) {
  const fs::path dir = scratch_root() / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

fs::path write_file(const fs::path& path, const std::string& text) {
  std::ofstream(path) << text;
  return path;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct CliResult {
  int code;
  std::string out, err;
};

CliResult run(std::vector<std::string> args) {
  args.insert(args.begin(), "solitonforge");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

Error parse_error(const std::string& text) {
  try {
    cli::parse_config_text(text);
  } catch (const Error& e) {
    return e;
  }
  FAIL("config was accepted");
  return Error("test", Errc::IoError, "");
}

const char* kBryant = R"({"factors": [{"dim": 2, "lambda": 1}]})";
const char* kTwoFactor = R"({
  "factors": [{"dim": 2, "lambda": 1}, {"dim": 3, "lambda": 2}],
  "seed": {"eps0": -1e-4, "eps": [1e-4]},
  "output": {"plots": ["g", "u_dot"]}
})";

}  // namespace

TEST_CASE("minimal config gets documented defaults") {
  const auto cfg = cli::parse_config_text(kBryant);
  CHECK(cfg.spec.rank() == 1);
  CHECK(cfg.spec.gauge_C == -1.0);
  CHECK(cfg.spec.seed_coeffs[0] == -1e-4);
  CHECK(cfg.spec.step.abs_tol == 1e-10);
  CHECK(cfg.spec.step.rel_tol == 1e-10);
  CHECK(cfg.spec.origin_tol == 1e-8);
  CHECK(cfg.spec.mode == model::Mode::Soliton);
  CHECK(cfg.output.format == cli::Format::Csv);
  CHECK(cfg.output.thin == 1);
}

TEST_CASE("lambda defaults to dim - 1") {
  const auto cfg = cli::parse_config_text(R"({"factors": [{"dim": 4}, {"dim": 3}]})");
  CHECK(cfg.spec.factors[0].einstein_const == 3.0);
  CHECK(cfg.spec.factors[1].einstein_const == 2.0);
  CHECK(cfg.spec.seed_coeffs == std::vector<double>{-1e-4, 1e-4});
}

TEST_CASE("strict parsing") {
  auto e = parse_error(R"({"factors": [{"dim": 2}], "epsilon_expander": 1})");
  CHECK(e.qualified_code() == "cli.ParseError");
  CHECK(e.detail().find("epsilon_expander") != std::string::npos);

  e = parse_error(R"({"factors": [{"dim": 2, "lamda": 1}]})");
  CHECK(e.detail().find("lamda") != std::string::npos);
  CHECK(e.detail().find("factors[0]") != std::string::npos);

  e = parse_error("{\n  \"factors\": [\n    {\"dim\": 2,}\n  ]\n}");
  CHECK(e.code() == Errc::ParseError);
  CHECK(e.detail().find("line 3") != std::string::npos);

  e = parse_error(R"({"factors": [{"dim": "two"}]})");
  CHECK(e.detail().find("factors[0].dim") != std::string::npos);

  e = parse_error(R"({"factors": [{"dim": 2}, {"dim": 3}], "seed": {"eps": [1e-4, 2e-4]}})");
  CHECK(e.detail().find("seed.eps") != std::string::npos);

  e = parse_error(R"({"factors": [{"dim": 2}], "integration": {"abs_tol": "tight"}})");
  CHECK(e.detail().find("integration.abs_tol") != std::string::npos);
}

TEST_CASE("validation errors carry the model code") {
  auto e = parse_error(R"({"factors": [{"dim": 1, "lambda": 0.5}]})");
  CHECK(e.qualified_code() == "cli.ValidationError");
  CHECK(e.detail().find("model.DimensionTooSmall") != std::string::npos);
  e = parse_error(R"({"factors": [{"dim": 3, "lambda": 1}]})");
  CHECK(e.detail().find("model.BadNormalization") != std::string::npos);
  e = parse_error(R"({"factors": [{"dim": 2}], "gauge_C": 1})");
  CHECK(e.detail().find("model.NonNegativeGauge") != std::string::npos);
}

TEST_CASE("missing config file is an IO error") {
  try {
    cli::parse_config("/nonexistent/solitonforge.json");
    FAIL("expected IoError");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::IoError);
  }
}

TEST_CASE("command-line overrides") {
  auto cfg = cli::parse_config_text(kTwoFactor);
  cli::CommandLine cl;
  cl.tol = 1e-9;
  cl.seed_eps0 = -2e-4;
  cl.seed_eps = {"2=3e-4"};
  cli::apply_overrides(cl, cfg);
  CHECK(cfg.spec.step.abs_tol == 1e-9);
  CHECK(cfg.spec.step.rel_tol == 1e-9);
  CHECK(cfg.spec.seed_coeffs == std::vector<double>{-2e-4, 3e-4});

  cl = {};
  cl.seed_eps = {"3=1e-4"};
  CHECK_THROWS_AS(cli::apply_overrides(cl, cfg), Error);
  cl.seed_eps = {"2:1e-4"};
  CHECK_THROWS_AS(cli::apply_overrides(cl, cfg), Error);
  cl.seed_eps = {"2=-1e-4"};
  try {
    cli::apply_overrides(cl, cfg);
    FAIL("expected ValidationError");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::ValidationError);
  }
}

TEST_CASE("output directory precedence") {
  auto cfg = cli::parse_config_text(kBryant);
  cli::CommandLine cl;
  ::unsetenv(cli::kOutputEnv);
  CHECK(cli::output_dir(cl, cfg) == fs::path("solitonforge_out"));
  ::setenv(cli::kOutputEnv, "/tmp/from_env", 1);
  CHECK(cli::output_dir(cl, cfg) == fs::path("/tmp/from_env"));
  cfg.output.dir = "from_config";
  CHECK(cli::output_dir(cl, cfg) == fs::path("from_config"));
  cl.out = fs::path("from_flag");
  CHECK(cli::output_dir(cl, cfg) == fs::path("from_flag"));
  ::unsetenv(cli::kOutputEnv);
}

TEST_CASE("profile CSV: column order and exact round trip") {
  CHECK(cli::profile_columns(2) ==
        std::vector<std::string>{"s",       "t",       "X_1",       "X_2",       "Y_1",   "Y_2",     "L",
                                 "H",       "g_1",     "g_2",       "g_dot_1",   "g_dot_2", "g_ddot_1", "g_ddot_2",
                                 "u",       "u_dot",   "u_ddot"});
  const auto& P = testsupport::soliton({2, 3});
  const auto table = cli::profile_table(P.traj, P.profile);
  REQUIRE(table.rows.size() == P.profile.rows.size());
  const auto dir = scratch("roundtrip");
  cli::write_csv(dir / "profile.csv", table);
  std::ifstream in(dir / "profile.csv");
  std::string header;
  std::getline(in, header);
  CHECK(header == "s,t,X_1,X_2,Y_1,Y_2,L,H,g_1,g_2,g_dot_1,g_dot_2,g_ddot_1,g_ddot_2,u,u_dot,u_ddot");
  const auto back = cli::read_csv(dir / "profile.csv");
  CHECK(back.header == table.header);
  REQUIRE(back.rows.size() == table.rows.size());
  bool identical = true;
  for (std::size_t k = 0; k < table.rows.size(); ++k)
    for (std::size_t c = 0; c < table.rows[k].size(); ++c) identical = identical && back.rows[k][c] == table.rows[k][c];
  CHECK(identical);

  const auto thin = cli::profile_table(P.traj, P.profile, 100);
  CHECK(thin.rows.back() == table.rows.back());
  CHECK(thin.rows.size() == (table.rows.size() + 98) / 100 + 1);
}

TEST_CASE("malformed CSV is an IO error") {
  const auto dir = scratch("badcsv");
  write_file(dir / "bad.csv", "a,b\n1,x\n");
  CHECK_THROWS_AS(cli::read_csv(dir / "bad.csv"), Error);
  CHECK_THROWS_AS(cli::read_csv(dir / "missing.csv"), Error);
}

TEST_CASE("plot series start at the smallest reconstructed t") {
  const auto& P = testsupport::soliton({2, 3});
  const auto dir = scratch("plots");
  const auto files = cli::write_plot_series(dir, P.profile, {"g", "u"});
  CHECK(fs::exists(dir / "g1_vs_t.dat"));
  CHECK(fs::exists(dir / "g2_vs_t.dat"));
  CHECK(fs::exists(dir / "u_vs_t.dat"));
  std::ifstream in(dir / "g1_vs_t.dat");
  std::string line;
  std::getline(in, line);
  CHECK(line == "# t g1");
  double t = 0.0, v = 0.0;
  in >> t >> v;
  CHECK(t == P.profile.rows.front().t);
  CHECK(t > 0.0);
  CHECK(v == P.profile.rows.front().g[0]);
  CHECK_THROWS_AS(cli::write_plot_series(dir, P.profile, {"bogus"}), Error);
}

TEST_CASE("solve is deterministic") {
  const auto dir = scratch("determinism");
  const auto cfg = write_file(dir / "c.json", kTwoFactor);
  REQUIRE(run({"solve", "--config", cfg.string(), "--out", (dir / "a").string()}).code == 0);
  REQUIRE(run({"solve", "--config", cfg.string(), "--out", (dir / "b").string()}).code == 0);
  const auto a = slurp(dir / "a" / "profile.csv");
  CHECK(!a.empty());
  CHECK(a == slurp(dir / "b" / "profile.csv"));
  CHECK(fs::exists(dir / "a" / "summary.json"));
  CHECK(fs::exists(dir / "a" / "u_dot_vs_t.dat"));
}

TEST_CASE("verify exit status follows the report") {
  const auto dir = scratch("verify");
  const auto good = write_file(dir / "bryant.json", kBryant);
  auto r = run({"verify", "--config", good.string(), "--out", (dir / "ok").string()});
  CHECK(r.code == cli::kOk);
  CHECK(r.out.find("FAIL") == std::string::npos);
  const auto report = nlohmann::json::parse(slurp(dir / "ok" / "verify.json"));
  CHECK(report.at("passed") == true);
  CHECK(report.at("checks").size() == verify::check_ids().size());

  // Negative bounds on the sphere's own curvature make the sign check fail.
  const auto bad = write_file(dir / "bad.json", R"({"factors": [{"dim": 2}], "sectional_bounds": [[-50, -50]]})");
  r = run({"verify", "--config", bad.string(), "--out", (dir / "bad").string()});
  CHECK(r.code == cli::kCheckFailed);
  CHECK(r.out.find("FAIL sectional") != std::string::npos);
  CHECK(nlohmann::json::parse(slurp(dir / "bad" / "verify.json")).at("passed") == false);
}

TEST_CASE("exit codes for configuration and IO problems") {
  const auto dir = scratch("codes");
  const auto d1 = write_file(dir / "d1.json", R"({"factors": [{"dim": 1, "lambda": 0.5}]})");
  auto r = run({"verify", "--config", d1.string(), "--out", (dir / "o").string()});
  CHECK(r.code == cli::kConfigError);
  CHECK(r.err.find("DimensionTooSmall") != std::string::npos);

  r = run({"solve", "--config", (dir / "missing.json").string()});
  CHECK(r.code == cli::kIoError);

  r = run({"explode", "--config", d1.string()});
  CHECK(r.code == cli::kConfigError);
  r = run({"solve"});
  CHECK(r.code == cli::kConfigError);

  const auto unknown = write_file(dir / "u.json", R"({"factors": [{"dim": 2}], "epsilon_expander": 1})");
  r = run({"solve", "--config", unknown.string()});
  CHECK(r.code == cli::kConfigError);
  CHECK(r.err.find("epsilon_expander") != std::string::npos);

  const auto good = write_file(dir / "good.json", kBryant);
  r = run({"solve", "--config", good.string(), "--seed-eps0", "1e-4"});
  CHECK(r.code == cli::kConfigError);
  CHECK(r.err.find("BadSeedSign") != std::string::npos);

  // Too small a step budget is a numerical failure.
  const auto tight = write_file(dir / "tight.json", R"({"factors": [{"dim": 2}], "integration": {"max_steps": 5}})");
  r = run({"solve", "--config", tight.string(), "--out", (dir / "t").string()});
  CHECK(r.code == cli::kNumericalError);
  CHECK(r.err.find("flow.StepLimitExceeded") != std::string::npos);

  // An output path that is a regular file cannot be used as a directory.
  write_file(dir / "occupied", "x");
  r = run({"solve", "--config", good.string(), "--out", (dir / "occupied").string()});
  CHECK(r.code == cli::kIoError);
}

TEST_CASE("curvature, oracle and ricci-flat commands") {
  const auto dir = scratch("commands");
  const auto cfg = write_file(dir / "c.json", kTwoFactor);
  auto r = run({"curvature", "--config", cfg.string(), "--out", (dir / "curv").string(), "--format", "json"});
  CHECK(r.code == 0);
  CHECK(fs::exists(dir / "curv" / "curvature.json"));
  CHECK(fs::exists(dir / "curv" / "profile.json"));
  const auto summary = nlohmann::json::parse(slurp(dir / "curv" / "curvature_summary.json"));
  CHECK(summary.at("soliton_residual_max").get<double>() <= 1e-6);
  CHECK(summary.at("asymptotics").is_object());

  r = run({"oracle", "--config", cfg.string(), "--out", (dir / "oracle").string()});
  CHECK(r.code == 0);
  const auto oj = nlohmann::json::parse(slurp(dir / "oracle" / "oracle.json"));
  CHECK(oj.at("conservation_drift").get<double>() <= 1e-8);

  const auto rf = write_file(dir / "rf.json", R"({"mode": "ricci-flat", "factors": [{"dim": 2}, {"dim": 5}]})");
  r = run({"ricci-flat", "--config", rf.string(), "--out", (dir / "rf").string()});
  CHECK(r.code == 0);
  const auto rj = nlohmann::json::parse(slurp(dir / "rf" / "ricci_flat.json"));
  CHECK(rj.at("passed") == true);
  CHECK(rj.at("max_abs_ricci").get<double>() <= 1e-6);
}

TEST_CASE("sweep writes one output set per grid point") {
  const auto dir = scratch("sweep");
  const auto cfg = write_file(dir / "c.json", kTwoFactor);
  const auto r = run({"sweep", "--config", cfg.string(), "--out", dir.string()});
  CHECK(r.code == 0);
  const auto sj = nlohmann::json::parse(slurp(dir / "sweep.json"));
  REQUIRE(sj.at("points").size() == 5);
  CHECK(sj.at("pairwise_distinct") == true);
  for (const auto& p : sj.at("points")) CHECK(fs::exists(dir / p.at("dir").get<std::string>() / "profile.csv"));
}
