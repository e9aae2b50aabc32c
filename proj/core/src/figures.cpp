#include "contactkit/figures.hpp"

#include <algorithm>

#include "contactkit/errors.hpp"
#include "contactkit/io.hpp"
#include "contactkit/sensing.hpp"

namespace contactkit {

namespace {

const std::vector<Sample>& require(const EpisodeRecord& episode, const std::string& stream, const std::string& kind) {
  if (!episode.has_stream(stream)) {
    throw FormatError("figure '" + kind + "' needs stream '" + stream + "', which episode '" +
                      episode.manifest().episode_id + "' does not have");
  }
  return episode.samples(stream);
}

std::size_t column(const EpisodeRecord& episode, const std::string& stream, const std::string& name) {
  const std::vector<std::string>& cols = episode.stream(stream).columns;
  const auto it = std::find(cols.begin(), cols.end(), name);
  if (it == cols.end()) throw FormatError("stream '" + stream + "' has no column '" + name + "'");
  return static_cast<std::size_t>(it - cols.begin());
}

FigureTable fz_wiping(const EpisodeRecord& e) {
  const auto& raw = require(e, "wrench_raw", "fz-wiping");
  require(e, "wrench", "fz-wiping");
  FigureTable f{"fz-wiping", {"t", "Fz_raw", "Fz_compensated"}, {}};
  for (const Sample& s : raw) {
    const double fz_comp = align(e, s.t, {"wrench"}).at("wrench").values[2];
    f.rows.push_back({s.t, s.values[2], fz_comp});
  }
  return f;
}

FigureTable tactile_norm(const EpisodeRecord& e) {
  const auto& tactile = require(e, "tactile", "tactile-norm");
  FigureTable f{"tactile-norm", {"t", "marker_norm"}, {}};
  for (const Sample& s : tactile) f.rows.push_back({s.t, marker_motion_magnitude({s.values})});
  return f;
}

FigureTable gravity_comp(const EpisodeRecord& e) {
  const auto& raw = require(e, "wrench_raw", "gravity-comp");
  require(e, "wrench", "gravity-comp");
  FigureTable f{"gravity-comp", {"t", "fx_raw", "fy_raw", "fz_raw", "fx_comp", "fy_comp", "fz_comp"}, {}};
  for (const Sample& s : raw) {
    const std::vector<double>& c = align(e, s.t, {"wrench"}).at("wrench").values;
    f.rows.push_back({s.t, s.values[0], s.values[1], s.values[2], c[0], c[1], c[2]});
  }
  return f;
}

FigureTable grasp_force(const EpisodeRecord& e) {
  const auto& grip = require(e, "gripper", "grasp-force");
  const std::size_t f_col = column(e, "gripper", "F_int");
  const std::size_t w_col = column(e, "gripper", "width");
  const bool with_ref = e.has_stream("reference");
  FigureTable f{"grasp-force", {"t", "F_int", "width"}, {}};
  if (with_ref) f.columns.push_back("F_ref");
  for (const Sample& s : grip) {
    std::vector<double> row = {s.t, s.values[f_col], s.values[w_col]};
    if (with_ref) row.push_back(align(e, s.t, {"reference"}).at("reference").values[0]);
    f.rows.push_back(std::move(row));
  }
  return f;
}

}  // namespace

std::string FigureTable::to_csv() const {
  std::string out;
  for (std::size_t c = 0; c < columns.size(); ++c) out += (c ? "," : "") + columns[c];
  out += "\n";
  for (const auto& row : rows) out += format_doubles(row, ',') + "\n";
  return out;
}

const std::vector<std::string>& figure_kinds() {
  static const std::vector<std::string> kinds = {"fz-wiping", "tactile-norm", "gravity-comp", "grasp-force"};
  return kinds;
}

FigureTable figure_data(const EpisodeRecord& episode, const std::string& kind) {
  if (kind == "fz-wiping") return fz_wiping(episode);
  if (kind == "tactile-norm") return tactile_norm(episode);
  if (kind == "gravity-comp") return gravity_comp(episode);
  if (kind == "grasp-force") return grasp_force(episode);
  throw InvalidArgument("unknown figure kind '" + kind + "'");
}

}  // namespace contactkit
