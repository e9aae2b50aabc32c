#include "contactkit/episodes.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include <json.hpp>

#include "contactkit/errors.hpp"
#include "contactkit/io.hpp"
#include "contactkit/bilateral.hpp"

namespace contactkit {

namespace {

using nlohmann::json;

const std::map<StreamKind, std::string>& kind_names() {
  static const std::map<StreamKind, std::string> names = {
      {StreamKind::kPose, "pose"},       {StreamKind::kWrench, "wrench"}, {StreamKind::kGripper, "gripper"},
      {StreamKind::kTactile, "tactile"}, {StreamKind::kAction, "action"}, {StreamKind::kImageRef, "image_ref"}};
  return names;
}

std::string csv_header(const StreamSpec& spec) {
  std::string h = "t";
  for (const std::string& c : spec.columns) h += "," + c;
  return h;
}

std::string stream_file(const std::string& name) { return name + ".csv"; }

EpisodeManifest parse_manifest(const std::string& text) {
  EpisodeManifest m;
  const json j = json::parse(text);
  m.format_version = j.at("format_version").get<std::string>();
  if (m.format_version != kEpisodeFormatVersion) {
    throw FormatError("manifest: unsupported format_version '" + m.format_version + "'");
  }
  m.episode_id = j.at("episode_id").get<std::string>();
  m.start_time = j.at("start_time").get<double>();
  m.config_hash = j.at("config_hash").get<std::string>();
  for (const json& s : j.at("streams")) {
    StreamSpec spec;
    spec.name = s.at("name").get<std::string>();
    spec.kind = stream_kind_from_string(s.at("kind").get<std::string>());
    spec.rate_hz = s.at("rate_hz").get<double>();
    spec.columns = s.at("columns").get<std::vector<std::string>>();
    m.streams.push_back(spec);
  }
  return m;
}

}  // namespace

std::string to_string(StreamKind kind) { return kind_names().at(kind); }

StreamKind stream_kind_from_string(const std::string& text) {
  for (const auto& [kind, name] : kind_names()) {
    if (name == text) return kind;
  }
  throw FormatError("unknown stream kind '" + text + "'");
}

void StreamSpec::validate() const {
  if (name.empty()) throw InvalidArgument("stream name must not be empty");
  if (name.find_first_of("/\\,. ") != std::string::npos) {
    throw InvalidArgument("stream name '" + name + "' must not contain path separators, commas, dots or spaces");
  }
  if (!(rate_hz > 0.0)) throw InvalidArgument("stream '" + name + "': rate_hz must be > 0");
  if (columns.empty()) throw InvalidArgument("stream '" + name + "': schema must not be empty");
  if (kind == StreamKind::kImageRef && columns.size() != 1) {
    throw InvalidArgument("stream '" + name + "': image_ref streams have exactly one column");
  }
}

std::vector<std::string> pose_columns() {
  return {"x", "y", "z", "r6d_a1x", "r6d_a1y", "r6d_a1z", "r6d_a2x", "r6d_a2y", "r6d_a2z"};
}
std::vector<std::string> wrench_columns() { return {"fx", "fy", "fz", "tx", "ty", "tz"}; }
std::vector<std::string> gripper_columns() {
  return std::vector<std::string>(kBilateralColumns.begin(), kBilateralColumns.end());
}
std::vector<std::string> tactile_columns() {
  std::vector<std::string> cols;
  for (int i = 0; i < 63; ++i) {
    cols.push_back("m" + std::to_string(i) + "_u");
    cols.push_back("m" + std::to_string(i) + "_v");
  }
  return cols;
}
std::vector<std::string> action_stream_columns() {
  const auto& c = action_columns();
  return std::vector<std::string>(c.begin(), c.end());
}

EpisodeRecord::EpisodeRecord(EpisodeManifest manifest) : manifest_(std::move(manifest)) {
  std::set<std::string> names;
  for (const StreamSpec& s : manifest_.streams) {
    s.validate();
    if (!names.insert(s.name).second) throw InvalidArgument("duplicate stream name '" + s.name + "'");
    data_[s.name];
  }
}

bool EpisodeRecord::has_stream(const std::string& name) const { return data_.count(name) > 0; }

const StreamSpec& EpisodeRecord::stream(const std::string& name) const {
  for (const StreamSpec& s : manifest_.streams) {
    if (s.name == name) return s;
  }
  throw InvalidArgument("unknown stream '" + name + "'");
}

const std::vector<Sample>& EpisodeRecord::samples(const std::string& name) const {
  const auto it = data_.find(name);
  if (it == data_.end()) throw InvalidArgument("unknown stream '" + name + "'");
  return it->second;
}

const StreamSpec* EpisodeRecord::find_kind(StreamKind kind) const {
  for (const StreamSpec& s : manifest_.streams) {
    if (s.kind == kind) return &s;
  }
  return nullptr;
}

Sample& EpisodeRecord::append_checked(const std::string& stream, double t) {
  const auto it = data_.find(stream);
  if (it == data_.end()) throw InvalidArgument("record: unknown stream '" + stream + "'");
  if (!std::isfinite(t)) throw InvalidArgument("record: non-finite timestamp on '" + stream + "'");
  if (!it->second.empty() && !(t > it->second.back().t)) {
    std::ostringstream msg;
    msg << "record: non-monotonic timestamp on '" << stream << "': " << format_double(t)
        << " after " << format_double(it->second.back().t);
    throw InvalidArgument(msg.str());
  }
  it->second.push_back({t, {}, {}});
  return it->second.back();
}

void EpisodeRecord::record(const std::string& stream_name, double t, std::span<const double> values) {
  const StreamSpec& spec = stream(stream_name);
  if (spec.kind == StreamKind::kImageRef) throw InvalidArgument("record: use record_ref for image_ref streams");
  if (values.size() != spec.columns.size()) {
    throw InvalidArgument("record: stream '" + stream_name + "' expects " + std::to_string(spec.columns.size()) +
                          " values, got " + std::to_string(values.size()));
  }
  Sample& s = append_checked(stream_name, t);
  s.values.assign(values.begin(), values.end());
}

void EpisodeRecord::record_ref(const std::string& stream_name, double t, const std::string& ref) {
  const StreamSpec& spec = stream(stream_name);
  if (spec.kind != StreamKind::kImageRef) throw InvalidArgument("record_ref: '" + stream_name + "' is not image_ref");
  if (ref.find_first_of(",\n\r") != std::string::npos) {
    throw InvalidArgument("record_ref: reference must not contain commas or newlines");
  }
  append_checked(stream_name, t).ref = ref;
}

std::pair<double, double> EpisodeRecord::span() const {
  double lo = 0.0;
  double hi = 0.0;
  bool any = false;
  for (const auto& [name, rows] : data_) {
    if (rows.empty()) continue;
    lo = any ? std::min(lo, rows.front().t) : rows.front().t;
    hi = any ? std::max(hi, rows.back().t) : rows.back().t;
    any = true;
  }
  return {lo, hi};
}

bool EpisodeRecord::operator==(const EpisodeRecord& other) const {
  const EpisodeManifest& a = manifest_;
  const EpisodeManifest& b = other.manifest_;
  if (a.format_version != b.format_version || a.episode_id != b.episode_id || a.start_time != b.start_time ||
      a.config_hash != b.config_hash || a.streams.size() != b.streams.size()) {
    return false;
  }
  for (std::size_t i = 0; i < a.streams.size(); ++i) {
    const StreamSpec& x = a.streams[i];
    const StreamSpec& y = b.streams[i];
    if (x.name != y.name || x.kind != y.kind || x.rate_hz != y.rate_hz || x.columns != y.columns) return false;
  }
  for (const auto& [name, rows] : data_) {
    const std::vector<Sample>& other_rows = other.samples(name);
    if (rows.size() != other_rows.size()) return false;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (rows[i].t != other_rows[i].t || rows[i].values != other_rows[i].values || rows[i].ref != other_rows[i].ref) {
        return false;
      }
    }
  }
  return true;
}

const AlignedEntry& AlignedFrame::at(const std::string& stream) const {
  for (const AlignedEntry& e : entries) {
    if (e.stream == stream) return e;
  }
  throw InvalidArgument("aligned frame has no stream '" + stream + "'");
}

AlignedFrame align(const EpisodeRecord& episode, double t_query, const std::vector<std::string>& streams) {
  AlignedFrame frame;
  frame.t = t_query;
  for (const std::string& name : streams) {
    const std::vector<Sample>& rows = episode.samples(name);
    const auto it = std::upper_bound(rows.begin(), rows.end(), t_query,
                                     [](double t, const Sample& s) { return t < s.t; });
    if (it == rows.begin()) {
      throw InvalidArgument("align: t=" + format_double(t_query) + " precedes the first sample of '" + name + "'");
    }
    const Sample& s = *std::prev(it);
    frame.entries.push_back({name, s.t, t_query - s.t, s.values, s.ref});
  }
  return frame;
}

std::vector<ActionStep> action_steps(const EpisodeRecord& episode) {
  const StreamSpec* spec = episode.find_kind(StreamKind::kAction);
  if (spec == nullptr) throw InvalidArgument("episode '" + episode.manifest().episode_id + "' has no action stream");
  std::vector<ActionStep> steps;
  for (const Sample& s : episode.samples(spec->name)) steps.push_back(ActionStep::from_row(s.values));
  return steps;
}

std::vector<ActionChunk> replay_actions(const EpisodeRecord& episode, int chunk_len) {
  if (chunk_len < 1) throw InvalidArgument("replay_actions: chunk_len must be >= 1");
  const std::vector<ActionStep> steps = action_steps(episode);
  std::vector<ActionChunk> chunks;
  for (std::size_t start = 0; start < steps.size(); start += static_cast<std::size_t>(chunk_len)) {
    ActionChunk chunk;
    const std::size_t end = std::min(steps.size(), start + static_cast<std::size_t>(chunk_len));
    chunk.steps.assign(steps.begin() + static_cast<std::ptrdiff_t>(start), steps.begin() + static_cast<std::ptrdiff_t>(end));
    while (static_cast<int>(chunk.steps.size()) < chunk_len) {
      chunk.steps.push_back(chunk.steps.back());
      ++chunk.padding;
    }
    chunks.push_back(std::move(chunk));
  }
  return chunks;
}

ActionChunk action_chunk_at(const EpisodeRecord& episode, std::size_t start, int chunk_len) {
  if (chunk_len < 1) throw InvalidArgument("action_chunk_at: chunk_len must be >= 1");
  const std::vector<ActionStep> steps = action_steps(episode);
  if (start >= steps.size()) throw InvalidArgument("action_chunk_at: start beyond the action stream");
  ActionChunk chunk;
  for (int i = 0; i < chunk_len; ++i) {
    const std::size_t idx = start + static_cast<std::size_t>(i);
    if (idx < steps.size()) {
      chunk.steps.push_back(steps[idx]);
    } else {
      // Repeating the final absolute pose means zero further translation.
      ActionStep hold = steps.back();
      hold.delta_xyz.setZero();
      chunk.steps.push_back(hold);
      ++chunk.padding;
    }
  }
  return chunk;
}

void export_csv(const EpisodeRecord& episode, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  const EpisodeManifest& m = episode.manifest();
  json j;
  j["format_version"] = m.format_version;
  j["episode_id"] = m.episode_id;
  j["start_time"] = m.start_time;
  j["config_hash"] = m.config_hash;
  j["streams"] = json::array();
  for (const StreamSpec& s : m.streams) {
    j["streams"].push_back({{"name", s.name},
                            {"kind", to_string(s.kind)},
                            {"rate_hz", s.rate_hz},
                            {"columns", s.columns},
                            {"file", stream_file(s.name)}});
  }
  write_text_file(dir / "manifest.json", j.dump(2) + "\n");

  for (const StreamSpec& s : m.streams) {
    std::string text = csv_header(s) + "\n";
    for (const Sample& row : episode.samples(s.name)) {
      text += format_double(row.t);
      if (s.kind == StreamKind::kImageRef) {
        text += "," + row.ref;
      } else {
        for (const double v : row.values) text += "," + format_double(v);
      }
      text += "\n";
    }
    write_text_file(dir / stream_file(s.name), text);
  }
}

EpisodeRecord load_episode(const std::filesystem::path& dir) {
  const std::filesystem::path manifest_path = dir / "manifest.json";
  if (!std::filesystem::exists(manifest_path)) throw FormatError("corrupt manifest: " + manifest_path.string() + " missing");
  EpisodeManifest manifest;
  try {
    manifest = parse_manifest(read_text_file(manifest_path));
  } catch (const json::exception& e) {
    throw FormatError(std::string("corrupt manifest: ") + e.what());
  }
  EpisodeRecord episode(manifest);
  for (const StreamSpec& s : manifest.streams) {
    const std::filesystem::path file = dir / stream_file(s.name);
    if (!std::filesystem::exists(file)) {
      throw FormatError("stream '" + s.name + "': data file " + file.filename().string() + " is missing");
    }
    std::istringstream in(read_text_file(file));
    std::string line;
    std::getline(in, line);
    if (trim(line) != csv_header(s)) {
      throw FormatError("stream '" + s.name + "': schema mismatch, header '" + trim(line) + "' vs '" + csv_header(s) + "'");
    }
    int row = 0;
    while (std::getline(in, line)) {
      if (trim(line).empty()) continue;
      ++row;
      const std::vector<std::string> fields = split(trim(line), ',');
      if (fields.size() != s.columns.size() + 1) {
        throw FormatError("stream '" + s.name + "' row " + std::to_string(row) + ": schema mismatch, " +
                          std::to_string(fields.size()) + " fields");
      }
      const double t = parse_double(fields[0], "stream '" + s.name + "' row " + std::to_string(row) + " t");
      try {
        if (s.kind == StreamKind::kImageRef) {
          episode.record_ref(s.name, t, fields[1]);
        } else {
          std::vector<double> values;
          values.reserve(s.columns.size());
          for (std::size_t i = 1; i < fields.size(); ++i) {
            values.push_back(parse_double(fields[i], "stream '" + s.name + "' row " + std::to_string(row)));
          }
          episode.record(s.name, t, values);
        }
      } catch (const InvalidArgument& e) {
        throw FormatError("stream '" + s.name + "' row " + std::to_string(row) + ": " + e.what());
      }
    }
  }
  return episode;
}

std::vector<Violation> validate_episode_dir(const std::filesystem::path& dir) {
  std::vector<Violation> out;
  if (!std::filesystem::is_directory(dir)) {
    out.push_back({"", 0, "episode directory " + dir.string() + " does not exist"});
    return out;
  }
  EpisodeManifest manifest;
  try {
    manifest = parse_manifest(read_text_file(dir / "manifest.json"));
  } catch (const std::exception& e) {
    out.push_back({"", 0, std::string("corrupt manifest: ") + e.what()});
    return out;
  }
  std::set<std::string> names;
  for (const StreamSpec& s : manifest.streams) {
    try {
      s.validate();
    } catch (const InvalidArgument& e) {
      out.push_back({s.name, 0, e.what()});
    }
    if (!names.insert(s.name).second) out.push_back({s.name, 0, "duplicate stream name"});

    const std::filesystem::path file = dir / stream_file(s.name);
    if (!std::filesystem::exists(file)) {
      out.push_back({s.name, 0, "data file " + file.filename().string() + " is missing"});
      continue;
    }
    std::istringstream in(read_text_file(file));
    std::string line;
    std::getline(in, line);
    if (trim(line) != csv_header(s)) {
      out.push_back({s.name, 0, "schema mismatch: header '" + trim(line) + "' expected '" + csv_header(s) + "'"});
      continue;
    }
    int row = 0;
    std::optional<double> last_t;
    while (std::getline(in, line)) {
      if (trim(line).empty()) continue;
      ++row;
      const std::vector<std::string> fields = split(trim(line), ',');
      if (fields.size() != s.columns.size() + 1) {
        out.push_back({s.name, row, "expected " + std::to_string(s.columns.size() + 1) + " fields, got " +
                                        std::to_string(fields.size())});
        continue;
      }
      double t = 0.0;
      try {
        t = parse_double(fields[0], "t");
        if (s.kind != StreamKind::kImageRef) {
          for (std::size_t i = 1; i < fields.size(); ++i) parse_double(fields[i], s.columns[i - 1]);
        }
      } catch (const FormatError& e) {
        out.push_back({s.name, row, e.what()});
        continue;
      }
      if (last_t && !(t > *last_t)) {
        out.push_back({s.name, row, "non-monotonic timestamp " + format_double(t) + " after " + format_double(*last_t)});
      }
      last_t = t;
    }
  }
  return out;
}

void IngestQueue::push(std::string stream, double t, std::vector<double> values) {
  const std::lock_guard<std::mutex> lock(mutex_);
  items_.push_back({std::move(stream), t, std::move(values)});
}

std::size_t IngestQueue::drain_into(EpisodeRecord& episode) {
  std::vector<Item> batch;
  {
    const std::lock_guard<std::mutex> lock(mutex_);
    batch.swap(items_);
  }
  for (const Item& item : batch) episode.record(item.stream, item.t, item.values);
  return batch.size();
}

}  // namespace contactkit
