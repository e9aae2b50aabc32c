#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <string>

#include "contactkit/io.hpp"
#include "contactkit/sensing.hpp"
#include "test_support.hpp"

namespace {

int run_cli(const std::string& args) {
  const std::string cmd = std::string(CONTACTKIT_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST(Cli, UsageErrorsExitTwo) {
  EXPECT_EQ(run_cli(""), 2);
  EXPECT_EQ(run_cli("frobnicate"), 2);
  EXPECT_EQ(run_cli("run --config /nonexistent/run.ini"), 2);
  EXPECT_EQ(run_cli("run"), 2);
  EXPECT_EQ(run_cli("--help"), 0);
}

TEST(Cli, RunWritesReportAndReturnsCriteriaStatus) {
  const auto dir = ck_test::scratch_dir("cli_run");
  EXPECT_EQ(run_cli("run --config " + ck_test::config_path("gravity_verification.ini").string() + " --out " +
                    (dir / "ok").string() + " --seed 11 --quiet"),
            0);
  const std::string report = contactkit::read_text_file(dir / "ok" / "report.json");
  EXPECT_NE(report.find("\"seed\": 11"), std::string::npos);

  contactkit::write_text_file(dir / "strict.ini",
                              "[scenario]\nid = gravity_verification\nseed = 1\n[gravity]\nsamples_per_pose = 20\n"
                              "[thresholds]\ncompensated_span = < 1e-12\n");
  EXPECT_EQ(run_cli("run --config " + (dir / "strict.ini").string() + " --out " + (dir / "strict").string()), 1);

  contactkit::write_text_file(dir / "bad.ini", "[scenario]\nid = juggling\n");
  EXPECT_EQ(run_cli("run --config " + (dir / "bad.ini").string() + " --out " + (dir / "bad").string()), 2);
}

TEST(Cli, CalibrateExitCodes) {
  const auto dir = ck_test::scratch_dir("cli_calibrate");
  EXPECT_EQ(run_cli("calibrate " + ck_test::fixture("calibration_samples.csv").string() + " --out " +
                    (dir / "payload.json").string()),
            0);
  EXPECT_NEAR(contactkit::load_payload(dir / "payload.json").mass, 0.5, 1e-12);
  contactkit::write_text_file(dir / "empty.csv", "");
  EXPECT_EQ(run_cli("calibrate " + (dir / "empty.csv").string()), 2);
  // Rotations about z only: gravity direction never changes.
  std::string text = "r6d_a1x,r6d_a1y,r6d_a1z,r6d_a2x,r6d_a2y,r6d_a2z,fx,fy,fz,tx,ty,tz\n";
  for (int i = 0; i < 5; ++i) {
    const double a = 0.5 * i;
    text += contactkit::format_double(std::cos(a)) + "," + contactkit::format_double(std::sin(a)) + ",0," +
            contactkit::format_double(-std::sin(a)) + "," + contactkit::format_double(std::cos(a)) +
            ",0,0,0,-4.9,0,0,0\n";
  }
  contactkit::write_text_file(dir / "coplanar.csv", text);
  EXPECT_EQ(run_cli("calibrate " + (dir / "coplanar.csv").string() + " --out " + (dir / "p2.json").string()), 1);
}

TEST(Cli, ValidateInspectPlot) {
  const auto fixture = ck_test::fixture("golden_episode").string();
  EXPECT_EQ(run_cli("validate " + fixture), 0);
  EXPECT_EQ(run_cli("inspect " + fixture), 0);
  EXPECT_EQ(run_cli("validate /nonexistent/episode"), 2);

  const auto dir = ck_test::scratch_dir("cli_validate");
  std::filesystem::copy(fixture, dir / "ep", std::filesystem::copy_options::recursive);
  contactkit::write_text_file(dir / "ep" / "wrench.csv", "t,fx,fy,fz,tx,ty,tz\n0.1,0,0,0,0,0,0\n0.05,0,0,0,0,0,0\n");
  EXPECT_EQ(run_cli("validate " + (dir / "ep").string()), 1);

  EXPECT_EQ(run_cli("plot-data " + fixture + " --figure spectrogram"), 2);
  EXPECT_EQ(run_cli("plot-data " + fixture + " --figure tactile-norm --out " + (dir / "plots").string()), 2);
  EXPECT_EQ(run_cli("list --config " + std::string(CONTACTKIT_CONFIG_DIR)), 0);
}
