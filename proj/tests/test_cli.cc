#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <string>

#include "mg1bayes/io.hpp"

// End-to-end checks of the installed binary through a real shell: files on
// disk, exit codes, and byte-for-byte determinism.

namespace {

using namespace mg1bayes;
namespace fs = std::filesystem;

struct RunResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

fs::path work_dir() {
  static fs::path dir = [] {
    fs::path d = fs::temp_directory_path() / "mg1bayes_cli_test";
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

RunResult run_cli(const std::string& args) {
  static int counter = 0;
  fs::path out = work_dir() / ("stdout_" + std::to_string(counter) + ".txt");
  fs::path err = work_dir() / ("stderr_" + std::to_string(counter) + ".txt");
  ++counter;
  std::string cmd = std::string(MG1BAYES_CLI_PATH) + " " + args + " > " + out.string() +
                    " 2> " + err.string();
  int rc = std::system(cmd.c_str());
  RunResult res;
  res.exit_code = WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
  res.out = io::read_text_file(out.string());
  res.err = io::read_text_file(err.string());
  return res;
}

std::string slurp(const fs::path& p) { return io::read_text_file(p.string()); }

TEST(Cli, VersionString) {
  RunResult r = run_cli("--version");
  EXPECT_EQ(r.exit_code, 0);
  EXPECT_EQ(r.out, "mg1bayes 1.0.0 (config format v1)\n");
}

TEST(Cli, SimulateWritesDeterministicSample) {
  fs::path d1 = work_dir() / "sim1";
  fs::path d2 = work_dir() / "sim2";
  RunResult r1 = run_cli("simulate --n 5 --seed 42 --out " + d1.string());
  ASSERT_EQ(r1.exit_code, 0) << r1.err;
  EXPECT_EQ(r1.out, (d1 / "sample.csv").string() + "\n");
  SampleData data = io::read_sample_csv((d1 / "sample.csv").string());
  EXPECT_EQ(data.inter_arrivals.size(), 5u);
  EXPECT_EQ(data.services.size(), 5u);
  EXPECT_FALSE(data.any_censored());

  RunResult r2 = run_cli("simulate --n 5 --seed 42 --out " + d2.string());
  ASSERT_EQ(r2.exit_code, 0);
  EXPECT_EQ(slurp(d1 / "sample.csv"), slurp(d2 / "sample.csv"));

  RunResult r3 = run_cli("simulate --n 5 --seed 43 --out " + d2.string());
  ASSERT_EQ(r3.exit_code, 0);
  EXPECT_NE(slurp(d1 / "sample.csv"), slurp(d2 / "sample.csv"));
}

TEST(Cli, InferOnHandFixture) {
  fs::path dir = work_dir() / "infer";
  fs::create_directories(dir);
  fs::path csv = dir / "fixture.csv";
  // Three unit arrivals and three unit services: lambda_hat = (1+3)/(1+3) = 1,
  // posterior mean service time = (c mu_H + sum s)/(c + n) = (1 + 3)/4 = 1.
  io::write_text_file(csv.string(),
                      "a,s,censored\n1,1,0\n1,1,0\n1,1,0\n");
  RunResult r = run_cli("infer --data " + csv.string() + " --draws 200 --seed 5 --out " +
                        dir.string());
  ASSERT_EQ(r.exit_code, 0) << r.err;
  nlohmann::json j = nlohmann::json::parse(slurp(dir / "summary.json"));
  EXPECT_NEAR(j.at("lambda_hat").get<double>(), 1.0, 1e-12);
  EXPECT_NEAR(j.at("mu_hat").get<double>(), 1.0, 1e-2);
  EXPECT_EQ(j.at("n_arrivals").get<int>(), 3);
  EXPECT_EQ(j.at("n_services").get<int>(), 3);
  EXPECT_TRUE(j.contains("p_stable"));
  EXPECT_TRUE(j.contains("rho_hat"));
  EXPECT_TRUE(fs::exists(dir / "ghat.csv"));
  EXPECT_TRUE(fs::exists(dir / "posterior.json"));

  // Same command, same bytes.
  fs::path dir2 = work_dir() / "infer2";
  RunResult r2 = run_cli("infer --data " + csv.string() + " --draws 200 --seed 5 --out " +
                         dir2.string());
  ASSERT_EQ(r2.exit_code, 0);
  EXPECT_EQ(slurp(dir / "summary.json"), slurp(dir2 / "summary.json"));
  EXPECT_EQ(slurp(dir / "posterior.json"), slurp(dir2 / "posterior.json"));
}

TEST(Cli, InferWithNoDataReportsThePrior) {
  fs::path dir = work_dir() / "prior_only";
  fs::create_directories(dir);
  fs::path csv = dir / "empty.csv";
  io::write_text_file(csv.string(), "a,s,censored\n");
  RunResult r = run_cli("infer --data " + csv.string() + " --draws 200 --out " + dir.string());
  ASSERT_EQ(r.exit_code, 0) << r.err;
  nlohmann::json j = nlohmann::json::parse(slurp(dir / "summary.json"));
  EXPECT_NEAR(j.at("lambda_hat").get<double>(), 1.0, 1e-12);  // Gamma(1,1) prior mean
  EXPECT_NEAR(j.at("mu_hat").get<double>(), 1.0, 1e-3);       // Dirichlet Exp(1) guess
  EXPECT_EQ(j.at("n_services").get<int>(), 0);
  EXPECT_GE(j.at("p_stable").get<double>(), 0.0);
}

TEST(Cli, TransformsReproducesKnownWaitingValue) {
  fs::path dir = work_dir() / "transforms";
  fs::create_directories(dir);
  // lambda_hat = 1/2 against the Exp(1) service guess with no data: the
  // waiting LST at z = 1 must be the rate-1/2, rate-1 value 2/3.
  io::write_text_file((dir / "cfg.ini").string(), "[lambda_prior]\na = 1\nb = 2\n");
  io::write_text_file((dir / "empty.csv").string(), "a,s,censored\n");
  RunResult inf = run_cli("infer --data " + (dir / "empty.csv").string() + " --config " +
                          (dir / "cfg.ini").string() + " --draws 200 --out " + dir.string());
  ASSERT_EQ(inf.exit_code, 0) << inf.err;
  RunResult tr = run_cli("transforms --posterior " + (dir / "posterior.json").string() +
                         " --out " + dir.string());
  ASSERT_EQ(tr.exit_code, 0) << tr.err;

  std::string table = slurp(dir / "transforms.csv");
  EXPECT_EQ(table.substr(0, 10), "z,g,w,q,n\n");
  double w1 = -1.0;
  std::size_t start = 0;
  while (start < table.size()) {
    std::size_t end = table.find('\n', start);
    if (end == std::string::npos) end = table.size();
    std::string line = table.substr(start, end - start);
    start = end + 1;
    if (line.rfind("1,", 0) == 0) {
      auto fields = io::detail::split(line, ',');
      ASSERT_EQ(fields.size(), 5u);
      w1 = io::detail::parse_number(fields[2], "w");
    }
  }
  ASSERT_GE(w1, 0.0) << "no z = 1 row in transforms.csv";
  EXPECT_NEAR(w1, 2.0 / 3.0, 1e-3);
}

TEST(Cli, ConsistencyExperimentWritesRequestedRows) {
  fs::path dir = work_dir() / "experiment";
  fs::create_directories(dir);
  io::write_text_file((dir / "cfg.ini").string(),
                      "[service_prior]\ncells = 300\n"
                      "[experiment]\nn_list = 10, 20\nseeds = 1, 2\n");
  RunResult r = run_cli("experiment --kind consistency --config " + (dir / "cfg.ini").string() +
                        " --out " + dir.string());
  ASSERT_EQ(r.exit_code, 0) << r.err;
  std::string table = slurp(dir / "consistency.csv");
  int lines = 0;
  for (char ch : table) lines += ch == '\n';
  EXPECT_EQ(lines, 5);  // header + 4 rows
  EXPECT_EQ(table.substr(0, 7), "n,seed,");
}

TEST(Cli, ErrorsUseDistinctExitCodes) {
  fs::path dir = work_dir() / "errors";
  fs::create_directories(dir);

  RunResult unknown = run_cli("experiment --kind frobnicate --out " + dir.string());
  EXPECT_EQ(unknown.exit_code, 2);
  EXPECT_NE(unknown.err.find("frobnicate"), std::string::npos);

  fs::path bad = dir / "bad.csv";
  io::write_text_file(bad.string(), "a,s,censored\n1,1,0\n1,oops,0\n");
  RunResult malformed = run_cli("infer --data " + bad.string() + " --out " + dir.string());
  EXPECT_EQ(malformed.exit_code, 1);
  EXPECT_NE(malformed.err.find(":3:"), std::string::npos) << malformed.err;

  RunResult missing = run_cli("infer --out " + dir.string());
  EXPECT_EQ(missing.exit_code, 2);

  RunResult nodata = run_cli("infer --data " + (dir / "nope.csv").string() + " --out " +
                             dir.string());
  EXPECT_EQ(nodata.exit_code, 1);
}

}  // namespace
