#pragma once

#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "contactkit/compliance.hpp"

namespace contactkit {

inline constexpr char kEpisodeFormatVersion[] = "contactkit-episode/1";

enum class StreamKind { kPose, kWrench, kGripper, kTactile, kAction, kImageRef };

std::string to_string(StreamKind kind);
StreamKind stream_kind_from_string(const std::string& text);

struct StreamSpec {
  std::string name;
  double rate_hz = 1.0;
  std::vector<std::string> columns;
  StreamKind kind = StreamKind::kPose;

  void validate() const;
};

// Column sets for the documented stream kinds.
std::vector<std::string> pose_columns();
std::vector<std::string> wrench_columns();
std::vector<std::string> gripper_columns();
std::vector<std::string> tactile_columns();
std::vector<std::string> action_stream_columns();

struct Sample {
  double t = 0.0;
  std::vector<double> values;
  std::string ref;  // image_ref streams only
};

struct EpisodeManifest {
  std::string format_version = kEpisodeFormatVersion;
  std::string episode_id;
  double start_time = 0.0;
  std::string config_hash;
  std::vector<StreamSpec> streams;
};

class EpisodeRecord {
 public:
  explicit EpisodeRecord(EpisodeManifest manifest);

  const EpisodeManifest& manifest() const { return manifest_; }
  bool has_stream(const std::string& name) const;
  const StreamSpec& stream(const std::string& name) const;
  const std::vector<Sample>& samples(const std::string& name) const;
  // First stream of the given kind, if any.
  const StreamSpec* find_kind(StreamKind kind) const;

  // Appends a row. Throws InvalidArgument for an unknown stream, a value
  // count that does not match the schema, or t not after the stream's last t.
  void record(const std::string& stream, double t, std::span<const double> values);
  void record_ref(const std::string& stream, double t, const std::string& ref);

  // Earliest and latest timestamp over all streams.
  std::pair<double, double> span() const;

  bool operator==(const EpisodeRecord& other) const;

 private:
  Sample& append_checked(const std::string& stream, double t);

  EpisodeManifest manifest_;
  std::map<std::string, std::vector<Sample>> data_;
};

struct AlignedEntry {
  std::string stream;
  double source_t = 0.0;
  double staleness = 0.0;
  std::vector<double> values;
  std::string ref;
};

struct AlignedFrame {
  double t = 0.0;
  std::vector<AlignedEntry> entries;

  const AlignedEntry& at(const std::string& stream) const;
};

// Zero-order hold: for each stream the latest sample with source_t <= t_query.
// Throws InvalidArgument when t_query precedes a stream's first sample.
AlignedFrame align(const EpisodeRecord& episode, double t_query, const std::vector<std::string>& streams);

// Consecutive chunks of the action stream; the last partial chunk is padded
// by repeating its final step.
std::vector<ActionChunk> replay_actions(const EpisodeRecord& episode, int chunk_len);

// Chunk starting at action row `start`, as a policy re-planning from that row
// would emit it. Rows past the end repeat the last row and count as padding.
ActionChunk action_chunk_at(const EpisodeRecord& episode, std::size_t start, int chunk_len);

std::vector<ActionStep> action_steps(const EpisodeRecord& episode);

// manifest.json + one <stream>.csv per stream.
void export_csv(const EpisodeRecord& episode, const std::filesystem::path& dir);
EpisodeRecord load_episode(const std::filesystem::path& dir);

struct Violation {
  std::string stream;  // empty for manifest-level problems
  int row = 0;         // 1-based data row, 0 when not row-specific
  std::string message;
};

// Collects every schema, presence and monotonicity problem instead of
// stopping at the first.
std::vector<Violation> validate_episode_dir(const std::filesystem::path& dir);

// Multi-producer ingestion buffer drained by the single episode writer.
class IngestQueue {
 public:
  void push(std::string stream, double t, std::vector<double> values);
  // Moves everything queued so far into the episode, in arrival order per
  // stream. Returns the number of rows written.
  std::size_t drain_into(EpisodeRecord& episode);

 private:
  struct Item {
    std::string stream;
    double t;
    std::vector<double> values;
  };
  std::mutex mutex_;
  std::vector<Item> items_;
};

}  // namespace contactkit
