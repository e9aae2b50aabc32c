#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "contactkit/errors.hpp"
#include "contactkit/geometry.hpp"
#include "contactkit/io.hpp"
#include "test_support.hpp"

using namespace contactkit;

TEST(Rot6D, RoundTripRecoversRotation) {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 500; ++i) {
    const Mat3 r = ck_test::random_rotation(rng);
    const Mat3 back = decode_rot6d(encode_rot6d(r));
    EXPECT_LT((back - r).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(Rot6D, DecodeOrthonormalisesArbitraryColumns) {
  std::mt19937_64 rng(12);
  for (int i = 0; i < 200; ++i) {
    Rot6D r6{ck_test::random_vec3(rng, -2, 2), ck_test::random_vec3(rng, -2, 2)};
    const Mat3 r = decode_rot6d(r6);
    EXPECT_TRUE(is_rotation(r, 1e-12));
    // First column keeps the direction of a1.
    EXPECT_LT((r.col(0) - r6.a1.normalized()).norm(), 1e-12);
  }
}

TEST(Rot6D, DegenerateInputsThrow) {
  EXPECT_THROW(decode_rot6d({Vec3::Zero(), Vec3::UnitY()}), InvalidArgument);
  EXPECT_THROW(decode_rot6d({Vec3::UnitX(), 2.0 * Vec3::UnitX()}), InvalidArgument);
  EXPECT_THROW(decode_rot6d({Vec3::UnitX(), Vec3::Zero()}), InvalidArgument);
  const double nan = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(decode_rot6d({Vec3(nan, 0, 0), Vec3::UnitY()}), InvalidArgument);
}

TEST(So3, LogExpRoundTrip) {
  std::mt19937_64 rng(13);
  for (int i = 0; i < 500; ++i) {
    const Vec3 axis = ck_test::random_vec3(rng, -1, 1).normalized();
    const double angle = ck_test::uniform(rng, 0.0, M_PI - 1e-3);
    const Vec3 w = axis * angle;
    EXPECT_LT((so3_log(so3_exp(w)) - w).norm(), 1e-9);
  }
}

TEST(So3, LogNearPiKeepsAngleAndAxis) {
  for (const double eps : {0.0, 1e-9, 1e-7, 1e-5}) {
    for (const Vec3& axis : {Vec3(1, 0, 0), Vec3(0, 1, 0), Vec3(1, 1, 1).normalized(), Vec3(-0.3, 0.2, 0.9).normalized()}) {
      const Mat3 r = Eigen::AngleAxisd(M_PI - eps, axis).toRotationMatrix();
      const Vec3 w = so3_log(r);
      EXPECT_NEAR(w.norm(), M_PI - eps, 1e-6);
      // Either sign of the axis is the same rotation at exactly pi.
      EXPECT_LT(std::min((w.normalized() - axis).norm(), (w.normalized() + axis).norm()), 1e-5);
      EXPECT_LT((so3_exp(w) - r).cwiseAbs().maxCoeff(), 1e-6);
    }
  }
}

TEST(So3, SmallAngleIsLinear) {
  const Vec3 w(1e-12, -2e-12, 3e-12);
  EXPECT_LT((so3_log(so3_exp(w)) - w).norm(), 1e-20);
  EXPECT_EQ(so3_log(Mat3::Identity()), Vec3::Zero());
}

TEST(Pose, InverseAndCompose) {
  std::mt19937_64 rng(14);
  const Pose a{ck_test::random_rotation(rng), ck_test::random_vec3(rng, -1, 1)};
  const Pose id = a * a.inverse();
  EXPECT_LT((id.rotation - Mat3::Identity()).norm(), 1e-12);
  EXPECT_LT(id.translation.norm(), 1e-12);
  EXPECT_TRUE(is_valid_pose(a));
  Pose bad = a;
  bad.rotation(0, 0) += 0.1;
  EXPECT_FALSE(is_valid_pose(bad));
  EXPECT_FALSE(is_rotation(-Mat3::Identity()));
}

TEST(Io, FormatDoubleIsLossless) {
  std::mt19937_64 rng(15);
  for (int i = 0; i < 2000; ++i) {
    const double x = std::ldexp(ck_test::uniform(rng, -1, 1), static_cast<int>(ck_test::uniform(rng, -60, 60)));
    EXPECT_EQ(parse_double(format_double(x)), x);
  }
  EXPECT_EQ(format_double(0.1), "0.1");
  EXPECT_EQ(format_double(2.0), "2");
}

TEST(Io, ParseDoubleRejectsTrailingText) {
  EXPECT_THROW(parse_double("1.5x"), FormatError);
  EXPECT_THROW(parse_double(""), FormatError);
  EXPECT_THROW(parse_double("abc"), FormatError);
}

TEST(Io, Fnv1aKnownVectors) {
  EXPECT_EQ(fnv1a_hex(""), "cbf29ce484222325");
  EXPECT_EQ(fnv1a_hex("a"), "af63dc4c8601ec8c");
  EXPECT_EQ(fnv1a_hex("foobar"), "85944171f73967e8");
}

TEST(Io, SplitAndTrim) {
  EXPECT_EQ(split("a,,b", ','), (std::vector<std::string>{"a", "", "b"}));
  EXPECT_EQ(trim("  x y \t\n"), "x y");
}
