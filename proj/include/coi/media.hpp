#pragma once

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace coi {

class ManifestError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ChunkRecord {
  std::size_t index = 0;
  std::vector<double> sizes_kbit;  // one per bitrate, nondecreasing
  double interestingness = 1.0;    // [1, 5]
};

// The per-video metadata a client would pull before a session: the bitrate
// ladder, per-chunk sizes for every rendition, and a per-chunk
// interestingness score.
struct VideoManifest {
  std::string name;
  double chunk_duration_s = 4.0;
  std::vector<double> bitrates_kbps;  // strictly ascending
  std::vector<ChunkRecord> chunks;

  std::size_t num_chunks() const { return chunks.size(); }
  // Index of an exact ladder entry; throws ManifestError if absent.
  std::size_t bitrate_index(double bitrate_kbps) const;
  double max_chunk_size_kbit() const;
  double total_duration_s() const { return chunk_duration_s * static_cast<double>(chunks.size()); }
};

std::vector<double> default_bitrate_ladder();  // {350, 600, 1000, 2000, 3000} kbps

void validate_manifest(const VideoManifest& manifest);

// JSON document: {"name", "chunk_duration_s", "bitrates_kbps": [...],
//                 "chunks": [{"sizes_kbit": [...], "interestingness": x}, ...]}
VideoManifest load_manifest(std::istream& in);
VideoManifest load_manifest_file(const std::string& path);
void serialize_manifest(const VideoManifest& manifest, std::ostream& out);

// Optional sidecar: CSV "chunk_index,interestingness" rows override the
// manifest's scores in place.
void apply_interest_overrides(VideoManifest& manifest, std::istream& in);

struct InterestDistribution {
  // Interestingness = 1 + 4 * Beta(a, b); the default skews low so mapped
  // weights concentrate in [1, 2] with mean near 1.5.
  double beta_a = 2.0;
  double beta_b = 5.0;
  // Consecutive chunks sharing one draw, mimicking scene-level engagement;
  // 1 = independent per chunk. The per-chunk marginal stays Beta(a, b).
  std::size_t scene_length = 1;
};

struct ManifestConfig {
  std::string name = "synthetic";
  std::size_t num_chunks = 200;
  double chunk_duration_s = 4.0;
  std::vector<double> bitrates_kbps = default_bitrate_ladder();
  double size_noise = 0.05;  // fraction in [0, 0.5); one draw per chunk, shared across bitrates
  InterestDistribution interest;
};

VideoManifest generate_manifest(const ManifestConfig& config, std::uint64_t seed);

}  // namespace coi
