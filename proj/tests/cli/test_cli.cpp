#include "cli_runner.hpp"

#include "eotbench/pair_io.hpp"
#include "eotbench/tensor_io.hpp"

#include <gtest/gtest.h>

#include <chrono>
#include <regex>

using namespace eotbench;
using eotbench::testing::CliResult;
using eotbench::testing::ScratchDir;
using eotbench::testing::slurp;

namespace {

const std::string kCli = EOTBENCH_CLI_PATH;

CliResult cli(const std::string& args) { return eotbench::testing::run_cli(kCli, args); }

double report_value(const std::string& text) {
  std::smatch m;
  EXPECT_TRUE(std::regex_search(text, m, std::regex("value: ([-+0-9.eE]+|nan|inf)"))) << text;
  return m.empty() ? std::nan("") : std::stod(m[1]);
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    pair_ = dir_ / "pair.json";
    ASSERT_EQ(cli("build preset-mixtures --dim 2 --eps 1 --seed 7 -o " + pair_).exit_code, 0);
  }

  ScratchDir dir_{"cli"};
  std::string pair_;
};

}  // namespace

TEST_F(CliTest, PresetBuildIsReproducible) {
  const auto again = dir_ / "again.json";
  ASSERT_EQ(cli("build preset-mixtures --dim 2 --eps 1 --seed 7 -o " + again).exit_code, 0);
  EXPECT_EQ(slurp(pair_), slurp(again));
  const auto pair = load_pair(pair_);
  EXPECT_EQ(pair.dim(), 2);
  EXPECT_EQ(pair.epsilon(), 1.0);
}

TEST_F(CliTest, SixteenDimensionalPresetRecordsScalarMatrix) {
  const auto p = dir_ / "d16.json";
  ASSERT_EQ(cli("build preset-mixtures --dim 16 --eps 0.1 -o " + p).exit_code, 0);
  const auto pair = load_pair(p);
  for (const auto& c : pair.potential().components()) {
    ASSERT_TRUE(c.matrix.is_scalar());
    EXPECT_EQ(c.matrix.scalar_value(), 1.0 / 16.0);
  }
}

TEST_F(CliTest, MissingEpsIsUsageError) {
  const auto r = cli("build preset-mixtures --dim 2 -o " + (dir_ / "x.json"));
  EXPECT_EQ(r.exit_code, 2);
  EXPECT_NE(r.output.find("code=usage"), std::string::npos) << r.output;
}

TEST_F(CliTest, BadPairFileIsReported) {
  const auto bad = dir_ / "bad.json";
  std::ofstream(bad) << "{\"format_version\": 1}";
  const auto r = cli("validate " + bad);
  EXPECT_EQ(r.exit_code, 1);
  EXPECT_NE(r.output.find("code=format"), std::string::npos) << r.output;
}

TEST_F(CliTest, SampleJointZeroCount) {
  const auto out = dir_ / "j.bin";
  ASSERT_EQ(cli("sample joint --pair " + pair_ + " --count 0 --seed 1 -o " + out).exit_code, 0);
  const auto t = read_samples(out);
  EXPECT_EQ(t.rows(), 0);
}

TEST_F(CliTest, ConditionalShapeAndGrouping) {
  const auto xs = dir_ / "x.csv";
  std::ofstream(xs) << "x0,x1\n0,0\n1,1\n-2,0.5\n";
  const auto out = dir_ / "c.bin";
  ASSERT_EQ(cli("sample conditional --pair " + pair_ + " --x-file " + xs + " --count 10 --seed 3 -o " + out).exit_code, 0);
  const auto t = read_samples(out);
  EXPECT_EQ(t.rows(), 30);
  EXPECT_EQ(t.cols(), 2);
  // Grouping: the first block only depends on the first probe.
  const auto xs1 = dir_ / "x1.csv";
  std::ofstream(xs1) << "0,0\n";
  const auto out1 = dir_ / "c1.bin";
  ASSERT_EQ(cli("sample conditional --pair " + pair_ + " --x-file " + xs1 + " --count 10 --seed 3 -o " + out1).exit_code, 0);
  EXPECT_EQ(read_samples(out1), SampleMatrix(t.topRows(10)));
}

TEST_F(CliTest, CsvExport) {
  const auto out = dir_ / "s.csv";
  ASSERT_EQ(cli("sample source --pair " + pair_ + " --count 5 --seed 1 --csv -o " + out).exit_code, 0);
  const auto bin = dir_ / "s.bin";
  ASSERT_EQ(cli("sample source --pair " + pair_ + " --count 5 --seed 1 -o " + bin).exit_code, 0);
  EXPECT_EQ(read_samples(out), read_samples(bin));
}

TEST_F(CliTest, GroundTruthVersusIndependentPlan) {
  const auto base = "evaluate cbw2uvp --pair " + pair_ + " --test-count 20 --samples-per-x 1000 --variance-samples 20000 --seed 5 ";
  const auto truth = cli(base + "--baseline ground-truth");
  const auto indep = cli(base + "--baseline independent");
  ASSERT_EQ(truth.exit_code, 0) << truth.output;
  ASSERT_EQ(indep.exit_code, 0) << indep.output;
  const double t = report_value(truth.output);
  const double i = report_value(indep.output);
  EXPECT_GT(t, 0.0);
  EXPECT_LT(t, 1.0);
  EXPECT_GE(i, 10.0 * t);
  const auto analytic = cli(base + "--baseline analytic");
  EXPECT_EQ(report_value(analytic.output), 0.0);
}

TEST_F(CliTest, KlAgainstExportedOptimalDrift) {
  const auto server = "'" + kCli + " drift-server --pair " + pair_ + "'";
  const auto r = cli("evaluate kl --pair " + pair_ + " --cand-drift-endpoint " + server + " --steps 50 --paths 500 --seed 2");
  ASSERT_EQ(r.exit_code, 0) << r.output;
  EXPECT_LE(std::abs(report_value(r.output)), 1e-10);
  const auto offset = "'" + kCli + " drift-server --pair " + pair_ + " --offset 0.3,0.4'";
  const auto o = cli("evaluate kl --pair " + pair_ + " --cand-drift-endpoint " + offset + " --steps 50 --paths 500 --seed 2 --reverse");
  ASSERT_EQ(o.exit_code, 0) << o.output;
  EXPECT_NEAR(report_value(o.output), 0.125, 0.125 * 0.02);
}

TEST_F(CliTest, KlFromStoredTrajectories) {
  const auto traj = dir_ / "traj.bin";
  ASSERT_EQ(cli("simulate --pair " + pair_ + " --steps 20 --paths 50 --seed 4 -o " + traj).exit_code, 0);
  // The simulator's own trajectories with zero candidate drift.
  auto paths = read_trajectories(traj);
  for (auto& p : paths) p.setZero();
  const auto drifts = dir_ / "drifts.bin";
  write_trajectories(drifts, paths);
  const auto r = cli("evaluate kl --pair " + pair_ + " --trajectories " + traj + " --drifts " + drifts);
  ASSERT_EQ(r.exit_code, 0) << r.output;
  EXPECT_GT(report_value(r.output), 0.0);
}

TEST_F(CliTest, ReferenceVectors) {
  const auto a = dir_ / "a.json", b = dir_ / "b.json";
  ASSERT_EQ(cli("export-refs --pair " + pair_ + " --probe-seed 9 -o " + a).exit_code, 0);
  ASSERT_EQ(cli("export-refs --pair " + pair_ + " --probe-seed 9 -o " + b).exit_code, 0);
  EXPECT_EQ(slurp(a), slurp(b));
  const auto ok = cli("verify-refs --pair " + pair_ + " --refs " + a);
  EXPECT_EQ(ok.exit_code, 0) << ok.output;
  auto text = slurp(pair_);
  const auto pos = text.find("\"weights\": [");
  text.insert(pos + 12, "1");
  const auto tampered = dir_ / "tampered.json";
  std::ofstream(tampered) << text;
  const auto bad = cli("verify-refs --pair " + tampered + " --refs " + a);
  EXPECT_EQ(bad.exit_code, 1);
  EXPECT_NE(bad.output.find("digest_mismatch"), std::string::npos) << bad.output;
}

TEST_F(CliTest, ReverseSampleShapes) {
  const auto ys = dir_ / "y.csv";
  std::ofstream(ys) << "1,1\n-1,2\n";
  const auto out = dir_ / "r.bin";
  ASSERT_EQ(cli("reverse-sample --pair " + pair_ + " --y-file " + ys + " --chains 4 --steps 20 --seed 1 -o " + out).exit_code, 0);
  EXPECT_EQ(read_samples(out).rows(), 8);
  const auto all = dir_ / "all.bin";
  ASSERT_EQ(cli("reverse-sample --pair " + pair_ + " --y-file " + ys + " --chains 4 --steps 20 --seed 1 --all-states -o " + all).exit_code, 0);
  EXPECT_EQ(read_samples(all).rows(), 8 * 20);
}

TEST_F(CliTest, BridgeTrajectories) {
  const auto out = dir_ / "b.bin";
  ASSERT_EQ(cli("sample bridge --pair " + pair_ + " --count 3 --steps 10 --seed 1 -o " + out).exit_code, 0);
  const auto t = read_trajectories(out);
  ASSERT_EQ(t.size(), 3u);
  EXPECT_EQ(t[0].rows(), 11);
}

TEST_F(CliTest, FromDataRecipe) {
  const auto target = dir_ / "moons.bin";
  SampleMatrix pts(200, 2);
  for (Index i = 0; i < 200; ++i) pts.row(i) << std::cos(0.01 * i), std::sin(0.01 * i);
  write_tensor(target, pts);
  const auto out = dir_ / "data.json";
  const auto r = cli("build from-data --target " + target + " --clusters 10 --eps 0.05 --restarts 2 --seed 1 -o " + out);
  ASSERT_EQ(r.exit_code, 0) << r.output;
  EXPECT_EQ(load_pair(out).size(), 10u);
}

TEST_F(CliTest, EndToEndRoundTripUnderOneMinute) {
  const auto start = std::chrono::steady_clock::now();
  const auto y = dir_ / "y.bin", ref = dir_ / "ref.bin";
  ASSERT_EQ(cli("sample target --pair " + pair_ + " --count 10000 --seed 1 -o " + y).exit_code, 0);
  ASSERT_EQ(cli("sample target --pair " + pair_ + " --count 10000 --seed 2 -o " + ref).exit_code, 0);
  const auto ends = dir_ / "ends.bin";
  ASSERT_EQ(cli("simulate --pair " + pair_ + " --paths 10000 --endpoints --seed 3 -o " + ends).exit_code, 0);
  for (const auto& pred : {y, ends}) {
    const auto r = cli("evaluate bw2uvp --pred " + pred + " --ref " + ref + " --format csv");
    ASSERT_EQ(r.exit_code, 0) << r.output;
    EXPECT_EQ(r.output.rfind("metric,value,normalization,seed,settings", 0), 0u) << r.output;
  }
  const auto m = cli("evaluate mmd --a " + y + " --b " + ref);
  ASSERT_EQ(m.exit_code, 0) << m.output;
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  EXPECT_LT(seconds, 60.0);
}

TEST_F(CliTest, ThreadCountDoesNotChangeOutput) {
  const auto a = dir_ / "a.bin", b = dir_ / "b.bin";
  ASSERT_EQ(cli("--threads 1 simulate --pair " + pair_ + " --paths 3000 --steps 20 --endpoints --seed 5 -o " + a).exit_code, 0);
  ASSERT_EQ(cli("--threads 8 simulate --pair " + pair_ + " --paths 3000 --steps 20 --endpoints --seed 5 -o " + b).exit_code, 0);
  EXPECT_EQ(slurp(a), slurp(b));
}
