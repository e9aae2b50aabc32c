#include <gtest/gtest.h>

#include <cmath>
#include <thread>

#include "contactkit/episodes.hpp"
#include "contactkit/errors.hpp"
#include "contactkit/io.hpp"
#include "test_support.hpp"

using namespace contactkit;

namespace {

EpisodeManifest two_stream_manifest() {
  EpisodeManifest m;
  m.episode_id = "unit";
  m.config_hash = "0123456789abcdef";
  m.streams = {{"pose", 100.0, pose_columns(), StreamKind::kPose},
               {"wrench", 1000.0, wrench_columns(), StreamKind::kWrench}};
  return m;
}

std::vector<double> values(std::size_t n, double base) {
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = base + 0.1 * static_cast<double>(i);
  return v;
}

}  // namespace

TEST(EpisodeRecord, RecordValidation) {
  EpisodeRecord ep(two_stream_manifest());
  ep.record("pose", 0.0, values(9, 1.0));
  EXPECT_THROW(ep.record("pose", 0.0, values(9, 1.0)), InvalidArgument);  // not increasing
  EXPECT_THROW(ep.record("pose", 0.01, values(8, 1.0)), InvalidArgument);
  EXPECT_THROW(ep.record("nope", 0.01, values(9, 1.0)), InvalidArgument);
  EXPECT_THROW(ep.record("pose", std::nan(""), values(9, 1.0)), InvalidArgument);
  EXPECT_EQ(ep.samples("pose").size(), 1u);
}

TEST(EpisodeRecord, ManifestValidation) {
  EpisodeManifest m = two_stream_manifest();
  m.streams.push_back({"pose", 10.0, pose_columns(), StreamKind::kPose});
  EXPECT_THROW(EpisodeRecord{m}, InvalidArgument);
  StreamSpec bad{"a/b", 10.0, {"x"}, StreamKind::kGripper};
  EXPECT_THROW(bad.validate(), InvalidArgument);
  StreamSpec img{"cam", 10.0, {"a", "b"}, StreamKind::kImageRef};
  EXPECT_THROW(img.validate(), InvalidArgument);
  StreamSpec rate{"g", 0.0, {"x"}, StreamKind::kGripper};
  EXPECT_THROW(rate.validate(), InvalidArgument);
  EXPECT_THROW(stream_kind_from_string("video"), FormatError);
  EXPECT_EQ(tactile_columns().size(), 126u);
  EXPECT_EQ(action_stream_columns().size(), 13u);
}

TEST(EpisodeFiles, ExportLoadIsValueExact) {
  std::mt19937_64 rng(71);
  EpisodeManifest m = two_stream_manifest();
  m.streams.push_back({"camera", 30.0, {"path"}, StreamKind::kImageRef});
  EpisodeRecord ep(m);
  double t = 0.0;
  for (int i = 0; i < 300; ++i) {
    t += ck_test::uniform(rng, 1e-4, 2e-3);
    std::vector<double> w(6);
    for (double& x : w) x = ck_test::uniform(rng, -1e3, 1e3) * std::pow(10.0, ck_test::uniform(rng, -12, 3));
    ep.record("wrench", t, w);
    if (i % 10 == 0) {
      std::vector<double> p(9);
      for (double& x : p) x = ck_test::uniform(rng, -1, 1);
      ep.record("pose", t, p);
      ep.record_ref("camera", t, "frames/" + std::to_string(i) + ".png");
    }
  }
  const auto dir = ck_test::scratch_dir("episode_roundtrip");
  export_csv(ep, dir);
  const EpisodeRecord back = load_episode(dir);
  EXPECT_TRUE(back == ep);
  EXPECT_EQ(back.manifest().config_hash, m.config_hash);
  EXPECT_TRUE(validate_episode_dir(dir).empty());
}

TEST(EpisodeFiles, GoldenFixture) {
  const auto dir = ck_test::fixture("golden_episode");
  ASSERT_TRUE(validate_episode_dir(dir).empty());
  const EpisodeRecord ep = load_episode(dir);
  EXPECT_EQ(ep.manifest().episode_id, "golden-3row");
  EXPECT_EQ(ep.manifest().config_hash, "00000000deadbeef");
  ASSERT_EQ(ep.samples("pose").size(), 3u);
  ASSERT_EQ(ep.samples("wrench").size(), 3u);
  EXPECT_EQ(ep.samples("pose")[2].values[2], 0.0995);
  EXPECT_EQ(ep.samples("wrench")[1].values[2], 9.875);
  EXPECT_EQ(ep.samples("wrench")[2].t, 0.125);
  EXPECT_EQ(ep.samples("camera")[1].ref, "frames/000001.png");
  const auto [lo, hi] = ep.span();
  EXPECT_EQ(lo, 0.0);
  EXPECT_EQ(hi, 0.2);

  const AlignedFrame f = align(ep, 0.15, {"pose", "wrench", "camera"});
  EXPECT_EQ(f.at("pose").source_t, 0.1);
  EXPECT_EQ(f.at("wrench").source_t, 0.125);
  EXPECT_NEAR(f.at("wrench").staleness, 0.025, 1e-15);
  EXPECT_EQ(f.at("camera").ref, "frames/000001.png");
  EXPECT_THROW(align(ep, 0.01, {"wrench"}), InvalidArgument);
}

TEST(EpisodeFiles, LoadErrorsNameTheProblem) {
  const auto dir = ck_test::scratch_dir("episode_errors");
  EpisodeRecord ep(two_stream_manifest());
  ep.record("pose", 0.0, values(9, 0.0));
  ep.record("wrench", 0.0, values(6, 0.0));
  export_csv(ep, dir);

  std::filesystem::remove(dir / "wrench.csv");
  try {
    load_episode(dir);
    FAIL() << "expected FormatError";
  } catch (const FormatError& e) {
    EXPECT_NE(std::string(e.what()).find("wrench"), std::string::npos);
  }
  write_text_file(dir / "wrench.csv", "t,fx,fy,fz,tx,ty\n0,1,2,3,4,5\n");
  EXPECT_THROW(load_episode(dir), FormatError);
  write_text_file(dir / "manifest.json", "{ not json");
  try {
    load_episode(dir);
    FAIL() << "expected FormatError";
  } catch (const FormatError& e) {
    EXPECT_NE(std::string(e.what()).find("corrupt manifest"), std::string::npos);
  }
}

TEST(EpisodeFiles, ValidateCollectsEveryViolation) {
  const auto dir = ck_test::scratch_dir("episode_validate");
  EpisodeRecord ep(two_stream_manifest());
  for (int i = 0; i < 5; ++i) {
    ep.record("pose", 0.01 * i, values(9, i));
    ep.record("wrench", 0.001 * i, values(6, i));
  }
  export_csv(ep, dir);
  write_text_file(dir / "pose.csv",
                  "t,x,y,z,r6d_a1x,r6d_a1y,r6d_a1z,r6d_a2x,r6d_a2y,r6d_a2z\n"
                  "0,0,0,0,1,0,0,0,1,0\n0.02,0,0,0,1,0,0,0,1,0\n0.01,0,0,0,1,0,0,0,1,0\n0.03,0,0,x,1,0,0,0,1,0\n");
  std::filesystem::remove(dir / "wrench.csv");
  const auto v = validate_episode_dir(dir);
  ASSERT_GE(v.size(), 3u);
  bool monotone = false, parse = false, missing = false;
  for (const Violation& x : v) {
    if (x.stream == "pose" && x.row == 3) monotone = true;
    if (x.stream == "pose" && x.row == 4) parse = true;
    if (x.stream == "wrench") missing = true;
  }
  EXPECT_TRUE(monotone);
  EXPECT_TRUE(parse);
  EXPECT_TRUE(missing);
}

TEST(Alignment, StalenessBoundOnJitteredStreams) {
  // Streams at 100 Hz and 30 Hz with +-20% timestamp jitter.
  const double jitter = 0.2;
  EpisodeManifest m;
  m.episode_id = "jitter";
  m.streams = {{"fast", 100.0, {"v"}, StreamKind::kGripper}, {"slow", 30.0, {"v"}, StreamKind::kGripper}};
  EpisodeRecord ep(m);
  std::mt19937_64 rng(72);
  for (const StreamSpec& s : m.streams) {
    const double period = 1.0 / s.rate_hz;
    double t = 0.0;
    for (int i = 0; t < 5.0; ++i) {
      ep.record(s.name, t, std::vector<double>{static_cast<double>(i)});
      t += period * (1.0 + ck_test::uniform(rng, -jitter, jitter));
    }
  }
  const double first = std::max(ep.samples("fast").front().t, ep.samples("slow").front().t);
  const double last = ep.span().second;
  std::vector<double> queries;
  for (double t = first; t <= last; t += 1e-4) queries.push_back(t);
  for (const StreamSpec& s : m.streams) {
    for (const Sample& x : ep.samples(s.name)) queries.push_back(x.t);
  }
  for (const double t : queries) {
    const AlignedFrame f = align(ep, t, {"fast", "slow"});
    for (const AlignedEntry& e : f.entries) {
      const double period = 1.0 / ep.stream(e.stream).rate_hz;
      ASSERT_GE(e.staleness, 0.0);
      ASSERT_LT(e.staleness, period * (1.0 + jitter));
      ASSERT_LE(e.source_t, t);
      // Zero-order hold: the next sample, if any, is after the query.
      const auto& rows = ep.samples(e.stream);
      const auto idx = static_cast<std::size_t>(e.values[0]);
      if (idx + 1 < rows.size()) ASSERT_GT(rows[idx + 1].t, t);
    }
  }
}

TEST(ActionReplay, ChunksArePaddedWithLastStep) {
  EpisodeManifest m;
  m.episode_id = "actions";
  m.streams = {{"action", 10.0, action_stream_columns(), StreamKind::kAction}};
  EpisodeRecord ep(m);
  for (int i = 0; i < 10; ++i) {
    ActionStep s;
    s.delta_xyz = Vec3(0.001 * (i + 1), 0, 0);
    s.gripper_width = 0.01 * i;
    const auto row = s.to_row();
    ep.record("action", 0.1 * i, row);
  }
  const auto chunks = replay_actions(ep, 4);
  ASSERT_EQ(chunks.size(), 3u);
  EXPECT_EQ(chunks[2].padding, 2);
  EXPECT_EQ(chunks[2].steps.size(), 4u);
  EXPECT_EQ(chunks[2].steps[3].gripper_width, 0.09);

  const ActionChunk tail = action_chunk_at(ep, 8, 4);
  EXPECT_EQ(tail.padding, 2);
  EXPECT_EQ(tail.steps[1].delta_xyz.x(), 0.010);
  // Padding holds position instead of drifting.
  EXPECT_EQ(tail.steps[3].delta_xyz, Vec3::Zero());
  EXPECT_EQ(action_steps(ep).size(), 10u);
}

TEST(IngestQueue, ConcurrentProducersKeepPerStreamOrder) {
  IngestQueue q;
  std::vector<std::thread> producers;
  producers.emplace_back([&] {
    for (int i = 0; i < 1000; ++i) q.push("pose", 0.001 * i, values(9, i));
  });
  producers.emplace_back([&] {
    for (int i = 0; i < 5000; ++i) q.push("wrench", 0.0002 * i, values(6, i));
  });
  EpisodeRecord ep(two_stream_manifest());
  std::size_t written = 0;
  for (int spin = 0; spin < 100; ++spin) written += q.drain_into(ep);
  for (std::thread& t : producers) t.join();
  written += q.drain_into(ep);
  EXPECT_EQ(written, 6000u);
  EXPECT_EQ(ep.samples("pose").size(), 1000u);
  EXPECT_EQ(ep.samples("wrench").size(), 5000u);
  EXPECT_EQ(ep.samples("wrench")[4999].values[0], 4999.0);
}
