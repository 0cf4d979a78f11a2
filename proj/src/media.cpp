#include "coi/media.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>

#include <json.hpp>

#include "coi/io_util.hpp"
#include "coi/rng.hpp"

namespace coi {

std::size_t VideoManifest::bitrate_index(double bitrate_kbps) const {
  for (std::size_t i = 0; i < bitrates_kbps.size(); ++i)
    if (bitrates_kbps[i] == bitrate_kbps) return i;
  throw ManifestError("bitrate " + format_double(bitrate_kbps) + " not in ladder");
}

double VideoManifest::max_chunk_size_kbit() const {
  double max_size = 0.0;
  for (const ChunkRecord& c : chunks)
    for (double s : c.sizes_kbit) max_size = std::max(max_size, s);
  return max_size;
}

std::vector<double> default_bitrate_ladder() { return {350.0, 600.0, 1000.0, 2000.0, 3000.0}; }

void validate_manifest(const VideoManifest& manifest) {
  if (!(manifest.chunk_duration_s > 0.0)) throw ManifestError("chunk duration must be positive");
  if (manifest.bitrates_kbps.empty()) throw ManifestError("bitrate ladder is empty");
  for (std::size_t i = 0; i < manifest.bitrates_kbps.size(); ++i) {
    if (manifest.bitrates_kbps[i] <= 0.0) throw ManifestError("non-positive bitrate in ladder");
    if (i > 0 && manifest.bitrates_kbps[i] <= manifest.bitrates_kbps[i - 1])
      throw ManifestError("bitrate ladder must be strictly ascending");
  }
  if (manifest.chunks.empty()) throw ManifestError("manifest has no chunks");
  for (std::size_t t = 0; t < manifest.chunks.size(); ++t) {
    const ChunkRecord& chunk = manifest.chunks[t];
    if (chunk.sizes_kbit.size() != manifest.bitrates_kbps.size())
      throw ManifestError("size arity mismatch at chunk " + std::to_string(t) + ": expected " +
                          std::to_string(manifest.bitrates_kbps.size()) + " sizes, got " +
                          std::to_string(chunk.sizes_kbit.size()));
    for (std::size_t b = 0; b < chunk.sizes_kbit.size(); ++b) {
      if (!(chunk.sizes_kbit[b] > 0.0))
        throw ManifestError("non-positive size at chunk " + std::to_string(t));
      if (b > 0 && chunk.sizes_kbit[b] < chunk.sizes_kbit[b - 1])
        throw ManifestError("sizes not nondecreasing in bitrate at chunk " + std::to_string(t));
    }
    if (!(chunk.interestingness >= 1.0 && chunk.interestingness <= 5.0))
      throw ManifestError("interestingness out of range [1,5] at chunk " + std::to_string(t));
  }
}

VideoManifest load_manifest(std::istream& in) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ManifestError(std::string("manifest JSON parse failure: ") + e.what());
  }
  VideoManifest manifest;
  try {
    manifest.name = doc.value("name", std::string{});
    manifest.chunk_duration_s = doc.at("chunk_duration_s").get<double>();
    manifest.bitrates_kbps = doc.at("bitrates_kbps").get<std::vector<double>>();
    std::size_t index = 0;
    for (const auto& chunk_doc : doc.at("chunks")) {
      ChunkRecord chunk;
      chunk.index = index++;
      chunk.sizes_kbit = chunk_doc.at("sizes_kbit").get<std::vector<double>>();
      chunk.interestingness = chunk_doc.at("interestingness").get<double>();
      manifest.chunks.push_back(std::move(chunk));
    }
  } catch (const nlohmann::json::exception& e) {
    throw ManifestError(std::string("manifest schema violation: ") + e.what());
  }
  validate_manifest(manifest);
  return manifest;
}

VideoManifest load_manifest_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ManifestError("cannot open manifest file: " + path);
  return load_manifest(in);
}

void serialize_manifest(const VideoManifest& manifest, std::ostream& out) {
  nlohmann::json doc;
  doc["name"] = manifest.name;
  doc["chunk_duration_s"] = manifest.chunk_duration_s;
  doc["bitrates_kbps"] = manifest.bitrates_kbps;
  nlohmann::json chunks = nlohmann::json::array();
  for (const ChunkRecord& chunk : manifest.chunks) {
    chunks.push_back({{"sizes_kbit", chunk.sizes_kbit},
                      {"interestingness", chunk.interestingness}});
  }
  doc["chunks"] = std::move(chunks);
  out << doc.dump(2) << '\n';
}

void apply_interest_overrides(VideoManifest& manifest, std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  bool first_content_line = true;
  while (std::getline(in, line)) {
    ++line_no;
    auto fields = split_csv_line(line);
    if (fields.size() == 1 && fields[0].empty()) continue;
    if (fields.size() != 2)
      throw ManifestError("malformed override line " + std::to_string(line_no));
    auto index = parse_double(fields[0]);
    auto value = parse_double(fields[1]);
    if (first_content_line && !index.has_value()) {
      first_content_line = false;
      continue;
    }
    first_content_line = false;
    if (!index.has_value() || !value.has_value())
      throw ManifestError("malformed override line " + std::to_string(line_no));
    const auto chunk_index = static_cast<std::size_t>(*index);
    if (chunk_index >= manifest.chunks.size() || *index != std::floor(*index))
      throw ManifestError("override line " + std::to_string(line_no) + ": bad chunk index");
    if (!(*value >= 1.0 && *value <= 5.0))
      throw ManifestError("override line " + std::to_string(line_no) +
                          ": interestingness out of range [1,5]");
    manifest.chunks[chunk_index].interestingness = *value;
  }
}

VideoManifest generate_manifest(const ManifestConfig& config, std::uint64_t seed) {
  if (config.num_chunks < 1) throw ManifestError("num_chunks must be >= 1");
  if (!(config.size_noise >= 0.0 && config.size_noise < 0.5))
    throw ManifestError("size noise must be in [0, 0.5)");
  if (!(config.chunk_duration_s > 0.0)) throw ManifestError("chunk duration must be positive");
  if (!(config.interest.beta_a > 0.0 && config.interest.beta_b > 0.0))
    throw ManifestError("interest distribution shapes must be positive");
  if (config.interest.scene_length < 1)
    throw ManifestError("interest scene length must be >= 1");

  Rng rng(seed);
  VideoManifest manifest;
  manifest.name = config.name;
  manifest.chunk_duration_s = config.chunk_duration_s;
  manifest.bitrates_kbps = config.bitrates_kbps;
  manifest.chunks.reserve(config.num_chunks);
  double scene_interest = 0.0;
  for (std::size_t t = 0; t < config.num_chunks; ++t) {
    ChunkRecord chunk;
    chunk.index = t;
    const double noise = config.size_noise == 0.0
                             ? 0.0
                             : rng.uniform(-config.size_noise, config.size_noise);
    for (double bitrate : config.bitrates_kbps)
      chunk.sizes_kbit.push_back(bitrate * config.chunk_duration_s * (1.0 + noise));
    if (t % config.interest.scene_length == 0)
      scene_interest = 1.0 + 4.0 * rng.beta(config.interest.beta_a, config.interest.beta_b);
    chunk.interestingness = scene_interest;
    manifest.chunks.push_back(std::move(chunk));
  }
  validate_manifest(manifest);
  return manifest;
}

}  // namespace coi
