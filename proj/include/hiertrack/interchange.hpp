#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "hiertrack/kv_file.hpp"
#include "hiertrack/memory_bank.hpp"
#include "hiertrack/point_field.hpp"
#include "hiertrack/selector.hpp"

// Line-delimited JSON records. Every record carries "type" and
// "schema_version"; readers skip types they do not know.
namespace hiertrack::io {

using Json = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;

Json to_json(const BinaryMask& m);
BinaryMask mask_from_json(const Json& j);
Json to_json(const BBox& b);
BBox bbox_from_json(const Json& j);
Json to_json(const TrackBundle& b);
TrackBundle bundle_from_json(const Json& j);
Json to_json(const FrameDecision& d);
FrameDecision decision_from_json(const Json& j);
Json to_json(const MemoryEntry& e);
MemoryEntry entry_from_json(const Json& j);

struct Header {
  int width = 0;
  int height = 0;
  int frame_count = 0;
  std::string track_source = "none";  // "oracle", "recorded" or "none"
  std::optional<KeyValueFile> scene;  // present for simulated input
  std::uint64_t seed = 0;
};

struct GtRecord {
  int frame_index = 0;
  bool visible = false;
  BBox bbox;
  BinaryMask mask;

  friend bool operator==(const GtRecord&, const GtRecord&) = default;
};

struct MemorySnapshot {
  int frame_index = 0;
  MemoryEntry prompt;
  std::vector<MemoryEntry> short_term;
  std::vector<MemoryEntry> long_term;

  friend bool operator==(const MemorySnapshot&, const MemorySnapshot&) = default;
};

MemorySnapshot snapshot(int frame_index, const MemoryBank& bank);

/// Everything a reader recovered from one file.
struct Dump {
  std::optional<Header> header;
  std::optional<BinaryMask> prompt;
  int prompt_frame = 0;
  std::vector<GtRecord> gt;
  std::map<int, std::vector<Proposal>> proposals;
  std::vector<TrackBundle> tracks;
  std::vector<FrameDecision> decisions;
  std::vector<MemorySnapshot> memory;
  std::vector<Json> other;  // known but free-form records such as summaries
  long skipped = 0;         // unknown record types
};

class Writer {
 public:
  explicit Writer(std::ostream& out) : out_(out) {}

  void header(const Header& h);
  void prompt(int frame_index, const BinaryMask& mask);
  void gt(const GtRecord& g);
  void proposal(int frame_index, int index, const Proposal& p);
  void tracks(const TrackBundle& b);
  void decision(const FrameDecision& d);
  void memory(const MemorySnapshot& m);
  /// Writes `body` with the type tag and schema version prepended.
  void record(const std::string& type, const Json& body);

 private:
  std::ostream& out_;
};

/// Throws SchemaVersionMismatch for a foreign version and ParseError for
/// malformed lines. Warnings about skipped records go to `warnings` if given.
Dump read_dump(std::istream& in, std::ostream* warnings = nullptr);
Dump read_dump_file(const std::string& path, std::ostream* warnings = nullptr);

}  // namespace hiertrack::io
