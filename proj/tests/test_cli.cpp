#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli.hpp"
#include "pulsesynth/pulse_io.hpp"

namespace fs = std::filesystem;
namespace cli = pulsesynth::cli;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "pulsesynth");
  std::ostringstream out;
  std::ostringstream err;
  const int code = cli::run(std::move(args), out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("pulsesynth-cli-" + name);
  fs::remove_all(p);
  return p;
}

}  // namespace

TEST(Cli, UsageErrorsExitWithTwo) {
  EXPECT_EQ(run({}).code, cli::kUsage);
  EXPECT_EQ(run({"optimize", "--time", "1"}).code, cli::kUsage);  // missing --gate
  EXPECT_EQ(run({"optimize", "--gate", "qft", "--time", "0"}).code, cli::kUsage);
  const auto bad_gate = run({"optimize", "--gate", "fredkin", "--time", "1"});
  EXPECT_EQ(bad_gate.code, cli::kUsage);
  EXPECT_NE(bad_gate.err.find("fredkin"), std::string::npos);
  EXPECT_EQ(run({"optimize", "--gate", "qft", "--topology", "torus", "--time", "1"}).code, cli::kUsage);
  EXPECT_EQ(run({"optimize", "--gate", "qft", "--n", "3", "--J", "1,2,3", "--time", "1"}).code, cli::kUsage);
  EXPECT_EQ(run({"optimize", "--gate", "qft", "--functional", "su:nope", "--time", "1"}).code, cli::kUsage);
  EXPECT_EQ(run({"sweep", "--gate", "qft", "--t-start", "2", "--t-stop", "1"}).code, cli::kUsage);
  EXPECT_EQ(run({"baseline", "--family", "qft"}).code, cli::kUsage);
  EXPECT_EQ(run({"baseline", "--family", "qft", "--topology", "chain", "--tau", "1"}).code, cli::kUsage);
  EXPECT_EQ(run({"verify", "/nonexistent/pulse.txt"}).code, cli::kUsage);
}

TEST(Cli, HelpAndVersion) {
  EXPECT_EQ(run({"--help"}).code, cli::kSuccess);
  const auto v = run({"--version"});
  EXPECT_EQ(v.code, cli::kSuccess);
  EXPECT_NE(v.out.find("0.1.0"), std::string::npos);
}

TEST(Cli, OptimizeWritesFilesThatVerify) {
  const fs::path dir = scratch("optimize");
  const auto r = run({"optimize", "--gate", "cnot", "--topology", "complete", "--n", "2", "--time", "0.7",
                      "--restarts", "3", "--out", dir.string()});
  ASSERT_EQ(r.code, cli::kSuccess) << r.out << r.err;
  EXPECT_NE(r.out.find("converged=yes"), std::string::npos);
  ASSERT_TRUE(fs::exists(dir / "pulse.txt"));
  ASSERT_TRUE(fs::exists(dir / "trace.csv"));
  const auto v = run({"verify", (dir / "pulse.txt").string()});
  EXPECT_EQ(v.code, cli::kSuccess) << v.out;
  EXPECT_NE(v.out.find("OK"), std::string::npos);

  const auto b = run({"baseline", "--result", (dir / "pulse.txt").string()});
  EXPECT_EQ(b.code, cli::kSuccess) << b.err;
  EXPECT_NE(b.out.find("0.71"), std::string::npos) << b.out;  // 0.5 / 0.7
}

TEST(Cli, TamperedPulseFailsVerification) {
  const fs::path dir = scratch("tamper");
  ASSERT_EQ(run({"optimize", "--gate", "qft", "--n", "2", "--time", "0.5", "--restarts", "1",
                 "--max-iterations", "5", "--out", dir.string()})
                .code,
            cli::kNotConverged);
  auto rec = pulsesynth::load_pulse_record(dir / "pulse.txt");
  rec.fidelity += 1e-6;
  pulsesynth::save_pulse_record(dir / "pulse.txt", rec, pulsesynth::RunManifest::create("x"));
  const auto v = run({"verify", (dir / "pulse.txt").string()});
  EXPECT_EQ(v.code, cli::kNotConverged);
  EXPECT_NE(v.out.find("MISMATCH"), std::string::npos);
}

TEST(Cli, ConfigFileSuppliesDefaultsAndFlagsOverride) {
  const fs::path dir = scratch("config");
  fs::create_directories(dir);
  {
    std::ofstream cfg(dir / "run.cfg");
    cfg << "# optimizer settings\ngate=qft\nn=2\ntopology=chain\ntime=0.5\nrestarts=1\nmax-iterations=3\n";
  }
  const auto from_file = run({"optimize", "--config", (dir / "run.cfg").string()});
  EXPECT_EQ(from_file.code, cli::kNotConverged) << from_file.err;
  EXPECT_NE(from_file.out.find("T=0.5"), std::string::npos);
  EXPECT_NE(from_file.out.find("iterations=3"), std::string::npos);

  const auto overridden = run({"optimize", "--config", (dir / "run.cfg").string(), "--max-iterations", "2"});
  EXPECT_NE(overridden.out.find("iterations=2"), std::string::npos) << overridden.out;

  EXPECT_EQ(run({"optimize", "--config", (dir / "missing.cfg").string()}).code, cli::kUsage);
}

TEST(Cli, ExpandConfigPlacesTokensAfterSubcommand) {
  const fs::path dir = scratch("expand");
  fs::create_directories(dir);
  {
    std::ofstream cfg(dir / "c.cfg");
    cfg << "gate=qft\nno-warm-start=\n";
  }
  const auto args = cli::expand_config({"pulsesynth", "sweep", "--config=" + (dir / "c.cfg").string(), "--n", "3"});
  EXPECT_EQ(args, (std::vector<std::string>{"pulsesynth", "sweep", "--gate=qft", "--no-warm-start", "--n", "3"}));
}

TEST(Cli, BaselineTables) {
  const auto t = run({"baseline", "--family", "qft", "--topology", "chain"});
  EXPECT_EQ(t.code, cli::kSuccess);
  EXPECT_NE(t.out.find("17.56"), std::string::npos);
  const auto s = run({"baseline", "--family", "cn_not", "--topology", "complete", "--n", "6", "--tau", "4.59"});
  EXPECT_EQ(s.code, cli::kSuccess);
  EXPECT_NE(s.out.find("6.75"), std::string::npos);
}

TEST(Cli, Selftest) {
  const auto r = run({"selftest", "--problems", "6", "--samples", "10"});
  EXPECT_EQ(r.code, cli::kSuccess) << r.out;
  EXPECT_EQ(r.out.find("FAIL"), std::string::npos);
  EXPECT_NE(r.out.find("PASS"), std::string::npos);
}
