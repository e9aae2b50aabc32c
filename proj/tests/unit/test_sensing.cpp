#include <gtest/gtest.h>

#include <cmath>

#include "contactkit/errors.hpp"
#include "contactkit/io.hpp"
#include "contactkit/sensing.hpp"
#include "test_support.hpp"

using namespace contactkit;

namespace {

IdentifiedPayload make_payload(std::mt19937_64& rng) {
  IdentifiedPayload p;
  p.mass = ck_test::uniform(rng, 0.1, 2.0);
  p.com = ck_test::random_vec3(rng, -0.05, 0.05);
  for (int i = 0; i < 6; ++i) p.bias[i] = ck_test::uniform(rng, -1, 1);
  return p;
}

// Weight in the sensor frame and its moment about the sensor origin.
Wrench oracle_reading(const IdentifiedPayload& p, const Mat3& r) {
  const Vec3 f = r.transpose() * (p.mass * Vec3(0, 0, -9.81));
  return {f + p.bias.head<3>(), p.com.cross(f) + p.bias.tail<3>(), WrenchFrame::kSensor};
}

}  // namespace

TEST(Identification, NoiseFreeRoundTrip) {
  std::mt19937_64 rng(61);
  for (int trial = 0; trial < 100; ++trial) {
    const IdentifiedPayload truth = make_payload(rng);
    std::vector<CalibrationSample> samples;
    for (int i = 0; i < 10; ++i) {
      const Mat3 r = ck_test::random_rotation(rng);
      samples.push_back({r, oracle_reading(truth, r)});
    }
    const IdentifiedPayload id = identify_payload(samples);
    EXPECT_LT(std::abs(id.mass - truth.mass) / truth.mass, 1e-9);
    EXPECT_LT((id.com - truth.com).norm() / truth.com.norm(), 1e-9);
    EXPECT_LT((id.bias - truth.bias).norm() / truth.bias.norm(), 1e-9);
    EXPECT_LT(id.residual_rms.maxCoeff(), 1e-9);
  }
}

TEST(Identification, FixtureFile) {
  const auto samples = load_calibration_samples(ck_test::fixture("calibration_samples.csv"));
  ASSERT_EQ(samples.size(), 7u);
  const IdentifiedPayload id = identify_payload(samples);
  EXPECT_NEAR(id.mass, 0.5, 1e-12);
  EXPECT_LT((id.com - Vec3(0.01, -0.02, 0.03)).norm(), 1e-12);
  EXPECT_LT((id.bias - (Vec6() << 0.3, -0.2, 0.1, 0.01, 0.02, -0.03).finished()).norm(), 1e-12);
}

TEST(Identification, RankDeficientPoseSetsThrow) {
  const IdentifiedPayload truth{0.4, Vec3(0, 0, 0.03), Vec6::Zero(), Vec6::Zero()};
  std::vector<CalibrationSample> coplanar;
  for (const double a : {0.0, 0.7, 1.4, 2.1, 2.8}) {
    const Mat3 r = rot_z(a);  // gravity direction never changes
    coplanar.push_back({r, oracle_reading(truth, r)});
  }
  EXPECT_THROW(identify_payload(coplanar), IdentificationError);
  std::vector<CalibrationSample> planar;
  for (const double a : {0.0, 1.0, 2.0, 3.0, 4.0}) {
    const Mat3 r = rot_x(a);  // gravity stays in one plane
    planar.push_back({r, oracle_reading(truth, r)});
  }
  EXPECT_THROW(identify_payload(planar), IdentificationError);
  EXPECT_THROW(identify_payload(std::vector<CalibrationSample>(3)), IdentificationError);
}

TEST(Compensation, RemovesGravityAtAnyPose) {
  std::mt19937_64 rng(62);
  const IdentifiedPayload p = make_payload(rng);
  const WrenchFrameModel frame;  // sensor coincides with the end-effector
  for (int i = 0; i < 200; ++i) {
    const Mat3 r = ck_test::random_rotation(rng);
    const Wrench w = compensate_wrench(oracle_reading(p, r), p, r, frame);
    EXPECT_LT(w.vector().norm(), 1e-12);
    EXPECT_EQ(w.frame, WrenchFrame::kEndEffector);
  }
}

TEST(Compensation, AdjointMovesTorqueReferencePoint) {
  std::mt19937_64 rng(63);
  for (int i = 0; i < 100; ++i) {
    const Pose s_to_ee{ck_test::random_rotation(rng), ck_test::random_vec3(rng, -0.1, 0.1)};
    const Vec3 f = ck_test::random_vec3(rng, -10, 10), t = ck_test::random_vec3(rng, -1, 1);
    const Wrench out = transform_wrench({f, t, WrenchFrame::kSensor}, {s_to_ee, false});
    // Same physical wrench: force rotated, torque about the new origin.
    const Vec3 f_ee = s_to_ee.rotation * f;
    const Vec3 t_ee = s_to_ee.rotation * t + s_to_ee.translation.cross(f_ee);
    EXPECT_LT((out.force - f_ee).norm(), 1e-12);
    EXPECT_LT((out.torque - t_ee).norm(), 1e-12);
    const Wrench rot_only = transform_wrench({f, t, WrenchFrame::kSensor}, {s_to_ee, true});
    EXPECT_LT((rot_only.torque - s_to_ee.rotation * t).norm(), 1e-12);
  }
}

TEST(Compensation, NoisySpanShrinks) {
  std::mt19937_64 rng(64);
  const IdentifiedPayload truth{0.342, Vec3(0.01, 0, 0.04), Vec6::Zero(), Vec6::Zero()};
  std::normal_distribution<double> noise(0.0, 0.05);
  std::vector<CalibrationSample> samples;
  for (const Mat3& r : {Mat3(Mat3::Identity()), rot_x(M_PI), rot_x(M_PI / 2), rot_x(-M_PI / 2), rot_y(M_PI / 2),
                        rot_y(-M_PI / 2)}) {
    for (int k = 0; k < 200; ++k) {
      Wrench w = oracle_reading(truth, r);
      for (int a = 0; a < 3; ++a) w.force[a] += noise(rng);
      samples.push_back({r, w});
    }
  }
  const IdentifiedPayload id = identify_payload(samples);
  EXPECT_NEAR(id.mass, truth.mass, 1e-3);
  EXPECT_NEAR(id.residual_rms[2], 0.05, 0.01);
}

TEST(Sensing, AverageWrench) {
  std::vector<Wrench> ws = {{Vec3(1, 2, 3), Vec3(0, 0, 1), WrenchFrame::kSensor},
                            {Vec3(3, 2, 1), Vec3(0, 0, -1), WrenchFrame::kSensor}};
  const Wrench avg = average_wrench(ws);
  EXPECT_EQ(avg.force, Vec3(2, 2, 2));
  EXPECT_EQ(avg.torque, Vec3::Zero());
  EXPECT_THROW(average_wrench(std::vector<Wrench>{}), InvalidArgument);
}

TEST(Tactile, MarkerMagnitude) {
  TactileFrame f{std::vector<double>(kTactileDim, 0.0)};
  EXPECT_EQ(marker_motion_magnitude(f), 0.0);
  f.marker_offsets[0] = 3.0;
  f.marker_offsets[125] = 4.0;
  EXPECT_DOUBLE_EQ(marker_motion_magnitude(f), 5.0);
  EXPECT_THROW(marker_motion_magnitude(TactileFrame{std::vector<double>(125, 0.0)}), DimensionError);
}

TEST(SensingFiles, CalibrationAndPayloadRoundTrip) {
  std::mt19937_64 rng(65);
  const auto dir = ck_test::scratch_dir("sensing_files");
  const IdentifiedPayload p = make_payload(rng);
  std::vector<CalibrationSample> samples;
  for (int i = 0; i < 6; ++i) {
    const Mat3 r = ck_test::random_rotation(rng);
    samples.push_back({r, oracle_reading(p, r)});
  }
  save_calibration_samples(dir / "cal.csv", samples);
  const auto back = load_calibration_samples(dir / "cal.csv");
  ASSERT_EQ(back.size(), samples.size());
  for (std::size_t i = 0; i < back.size(); ++i) {
    EXPECT_EQ(back[i].raw.vector(), samples[i].raw.vector());
    EXPECT_LT((back[i].orientation - samples[i].orientation).norm(), 1e-15);
  }
  save_payload(dir / "payload.json", p);
  const IdentifiedPayload q = load_payload(dir / "payload.json");
  EXPECT_EQ(q.mass, p.mass);
  EXPECT_EQ(q.com, p.com);
  EXPECT_EQ(q.bias, p.bias);
}

TEST(SensingFiles, MalformedCalibrationFiles) {
  const auto dir = ck_test::scratch_dir("sensing_bad");
  write_text_file(dir / "empty.csv", "");
  EXPECT_THROW(load_calibration_samples(dir / "empty.csv"), FormatError);
  write_text_file(dir / "header.csv", "a,b,c\n1,2,3\n");
  EXPECT_THROW(load_calibration_samples(dir / "header.csv"), FormatError);
  write_text_file(dir / "short.csv", "r6d_a1x,r6d_a1y,r6d_a1z,r6d_a2x,r6d_a2y,r6d_a2z,fx,fy,fz,tx,ty,tz\n1,0,0,0,1,0,1,2\n");
  EXPECT_THROW(load_calibration_samples(dir / "short.csv"), FormatError);
  write_text_file(dir / "parallel.csv",
                  "r6d_a1x,r6d_a1y,r6d_a1z,r6d_a2x,r6d_a2y,r6d_a2z,fx,fy,fz,tx,ty,tz\n1,0,0,2,0,0,0,0,0,0,0,0\n");
  EXPECT_THROW(load_calibration_samples(dir / "parallel.csv"), FormatError);
}
