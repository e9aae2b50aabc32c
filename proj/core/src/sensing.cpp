#include "contactkit/sensing.hpp"

#include <cmath>
#include <sstream>

#include <json.hpp>

#include "contactkit/errors.hpp"
#include "contactkit/io.hpp"

namespace contactkit {

namespace {

constexpr int kParams = 10;  // m, b_f(3), m*com(3), b_t(3)
constexpr double kDirectionRankTol = 1e-6;
constexpr char kCalibrationHeader[] = "r6d_a1x,r6d_a1y,r6d_a1z,r6d_a2x,r6d_a2y,r6d_a2z,fx,fy,fz,tx,ty,tz";

std::string vec_text(const Vec3& v) {
  std::ostringstream out;
  out << "(" << format_double(v.x()) << ", " << format_double(v.y()) << ", " << format_double(v.z()) << ")";
  return out.str();
}

void check_direction_span(std::span<const CalibrationSample> samples, const Vec3& gravity) {
  if (samples.size() < 4) {
    throw IdentificationError("payload identification needs >= 4 poses, got " + std::to_string(samples.size()));
  }
  MatX dirs(static_cast<Eigen::Index>(samples.size()), 3);
  for (std::size_t k = 0; k < samples.size(); ++k) {
    dirs.row(static_cast<Eigen::Index>(k)) = (samples[k].orientation.transpose() * gravity).normalized().transpose();
  }
  Eigen::JacobiSVD<MatX> svd(dirs, Eigen::ComputeFullV);
  const Vec3 sv = svd.singularValues();
  int rank = 0;
  for (int i = 0; i < 3; ++i) rank += sv[i] > kDirectionRankTol * sv[0] ? 1 : 0;
  if (rank == 3) return;

  const Mat3 v = svd.matrixV();
  std::ostringstream msg;
  msg << "rank-deficient pose set: gravity directions in the sensor frame span " << rank << "D";
  if (rank == 1) {
    msg << " (all along " << vec_text(v.col(0)) << "); the mass/force-bias split and the COM components "
        << "across that axis are unobservable";
  } else {
    msg << " (coplanar, plane normal " << vec_text(v.col(2)) << "); the torque bias and COM component along "
        << "that normal are not separable";
  }
  throw IdentificationError(msg.str());
}

}  // namespace

Wrench gravity_wrench(const IdentifiedPayload& payload, const Mat3& r, const Vec3& gravity) {
  Wrench w;
  w.frame = WrenchFrame::kSensor;
  const Vec3 weight = r.transpose() * (payload.mass * gravity);
  w.force = weight + payload.bias.head<3>();
  w.torque = payload.com.cross(weight) + payload.bias.tail<3>();
  return w;
}

IdentifiedPayload identify_payload(std::span<const CalibrationSample> samples, const Vec3& gravity) {
  check_direction_span(samples, gravity);

  const Eigen::Index rows = 6 * static_cast<Eigen::Index>(samples.size());
  MatX a = MatX::Zero(rows, kParams);
  VecX y(rows);
  for (std::size_t k = 0; k < samples.size(); ++k) {
    const Eigen::Index r0 = 6 * static_cast<Eigen::Index>(k);
    const Vec3 d = samples[k].orientation.transpose() * gravity;
    a.block<3, 1>(r0, 0) = d;
    a.block<3, 3>(r0, 1) = Mat3::Identity();
    a.block<3, 3>(r0 + 3, 4) = -skew(d);
    a.block<3, 3>(r0 + 3, 7) = Mat3::Identity();
    y.segment<3>(r0) = samples[k].raw.force;
    y.segment<3>(r0 + 3) = samples[k].raw.torque;
  }

  const Eigen::ColPivHouseholderQR<MatX> qr(a);
  if (qr.rank() < kParams) {
    throw IdentificationError("rank-deficient pose set: regressor rank " + std::to_string(qr.rank()) +
                              " < " + std::to_string(kParams));
  }
  const VecX x = qr.solve(y);

  IdentifiedPayload p;
  p.mass = x[0];
  p.bias.head<3>() = x.segment<3>(1);
  const Vec3 first_moment = x.segment<3>(4);
  p.bias.tail<3>() = x.segment<3>(7);
  p.com = p.mass != 0.0 ? Vec3(first_moment / p.mass) : Vec3::Zero();

  const VecX residual = y - a * x;
  Vec6 sq = Vec6::Zero();
  for (std::size_t k = 0; k < samples.size(); ++k) {
    sq += residual.segment<6>(6 * static_cast<Eigen::Index>(k)).cwiseAbs2();
  }
  p.residual_rms = (sq / static_cast<double>(samples.size())).cwiseSqrt();
  return p;
}

Wrench transform_wrench(const Wrench& w, const WrenchFrameModel& frame) {
  const Mat3& r = frame.sensor_to_ee.rotation;
  Wrench out;
  out.frame = WrenchFrame::kEndEffector;
  out.force = r * w.force;
  out.torque = r * w.torque;
  if (!frame.rotation_only) out.torque += frame.sensor_to_ee.translation.cross(out.force);
  return out;
}

Wrench compensate_wrench(const Wrench& raw, const IdentifiedPayload& payload, const Mat3& r,
                         const WrenchFrameModel& frame, const Vec3& gravity) {
  const Wrench grav = gravity_wrench(payload, r, gravity);
  return transform_wrench({raw.force - grav.force, raw.torque - grav.torque, WrenchFrame::kSensor}, frame);
}

Wrench average_wrench(std::span<const Wrench> readings) {
  if (readings.empty()) throw InvalidArgument("average_wrench: no readings");
  Vec6 sum = Vec6::Zero();
  for (const Wrench& w : readings) sum += w.vector();
  return Wrench::FromVector(sum / static_cast<double>(readings.size()), readings.front().frame);
}

double marker_motion_magnitude(const TactileFrame& frame) {
  if (frame.marker_offsets.size() != kTactileDim) {
    throw DimensionError("tactile frame must have 126 values, got " + std::to_string(frame.marker_offsets.size()));
  }
  double sq = 0.0;
  for (const double v : frame.marker_offsets) sq += v * v;
  return std::sqrt(sq);
}

std::vector<CalibrationSample> load_calibration_samples(const std::filesystem::path& path) {
  std::istringstream in(read_text_file(path));
  std::string line;
  if (!std::getline(in, line) || trim(line).empty()) {
    throw FormatError(path.string() + ": empty calibration file");
  }
  if (trim(line) != kCalibrationHeader) {
    throw FormatError(path.string() + ": unexpected header, expected '" + kCalibrationHeader + "'");
  }
  std::vector<CalibrationSample> out;
  int row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (trim(line).empty()) continue;
    const std::vector<std::string> fields = split(trim(line), ',');
    if (fields.size() != 12) {
      throw FormatError(path.string() + ": row " + std::to_string(row) + " has " +
                        std::to_string(fields.size()) + " fields, expected 12");
    }
    double v[12];
    for (int i = 0; i < 12; ++i) v[i] = parse_double(fields[i], path.string() + " row " + std::to_string(row));
    CalibrationSample s;
    try {
      s.orientation = decode_rot6d({{v[0], v[1], v[2]}, {v[3], v[4], v[5]}});
    } catch (const InvalidArgument& e) {
      throw FormatError(path.string() + ": row " + std::to_string(row) + ": " + e.what());
    }
    s.raw = {{v[6], v[7], v[8]}, {v[9], v[10], v[11]}, WrenchFrame::kSensor};
    out.push_back(s);
  }
  if (out.empty()) throw FormatError(path.string() + ": no samples");
  return out;
}

void save_calibration_samples(const std::filesystem::path& path, std::span<const CalibrationSample> samples) {
  std::ostringstream out;
  out << kCalibrationHeader << "\n";
  for (const CalibrationSample& s : samples) {
    const Rot6D r6 = encode_rot6d(s.orientation);
    out << format_doubles({r6.a1.x(), r6.a1.y(), r6.a1.z(), r6.a2.x(), r6.a2.y(), r6.a2.z(), s.raw.force.x(),
                           s.raw.force.y(), s.raw.force.z(), s.raw.torque.x(), s.raw.torque.y(), s.raw.torque.z()},
                          ',')
        << "\n";
  }
  write_text_file(path, out.str());
}

void save_payload(const std::filesystem::path& path, const IdentifiedPayload& p) {
  const auto arr = [](const auto& v) {
    std::vector<double> out(v.data(), v.data() + v.size());
    return out;
  };
  nlohmann::json j;
  j["mass"] = p.mass;
  j["com"] = arr(p.com);
  j["bias"] = arr(p.bias);
  j["residual_rms"] = arr(p.residual_rms);
  write_text_file(path, j.dump(2) + "\n");
}

IdentifiedPayload load_payload(const std::filesystem::path& path) {
  try {
    const nlohmann::json j = nlohmann::json::parse(read_text_file(path));
    IdentifiedPayload p;
    p.mass = j.at("mass").get<double>();
    const auto com = j.at("com").get<std::vector<double>>();
    const auto bias = j.at("bias").get<std::vector<double>>();
    if (com.size() != 3 || bias.size() != 6) throw FormatError("payload: com needs 3 and bias 6 values");
    p.com = Vec3(com[0], com[1], com[2]);
    for (int i = 0; i < 6; ++i) p.bias[i] = bias[i];
    if (j.contains("residual_rms")) {
      const auto rms = j.at("residual_rms").get<std::vector<double>>();
      if (rms.size() == 6) {
        for (int i = 0; i < 6; ++i) p.residual_rms[i] = rms[i];
      }
    }
    return p;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(path.string() + ": corrupt payload file: " + e.what());
  }
}

}  // namespace contactkit
