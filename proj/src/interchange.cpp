#include "hiertrack/interchange.hpp"

#include <fstream>
#include <istream>
#include <ostream>

#include "hiertrack/error.hpp"

namespace hiertrack::io {

namespace {

template <typename T>
T field(const Json& j, const char* key) {
  if (!j.contains(key)) throw Error(Errc::ParseError, std::string("missing field '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::ParseError, std::string("field '") + key + "': " + e.what());
  }
}

Json opt_double(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

}  // namespace

Json to_json(const BinaryMask& m) {
  Json runs = Json::array();
  for (const Run& r : m.runs()) runs.push_back(Json::array({r.start, r.length}));
  return Json{{"width", m.width()}, {"height", m.height()}, {"runs", std::move(runs)}};
}

BinaryMask mask_from_json(const Json& j) {
  std::vector<Run> runs;
  for (const Json& r : field<Json>(j, "runs")) {
    if (!r.is_array() || r.size() != 2) throw Error(Errc::ParseError, "run must be [start, length]");
    runs.push_back({r[0].get<std::int64_t>(), r[1].get<std::int64_t>()});
  }
  return BinaryMask::from_runs(field<int>(j, "width"), field<int>(j, "height"), std::move(runs));
}

Json to_json(const BBox& b) { return Json::array({b.cx, b.cy, b.w, b.h}); }

BBox bbox_from_json(const Json& j) {
  if (!j.is_array() || j.size() != 4) throw Error(Errc::ParseError, "bbox must be [cx, cy, w, h]");
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>(), j[3].get<double>()};
}

Json to_json(const TrackBundle& b) {
  Json points = Json::array();
  for (const PointTrack& t : b.points) {
    Json xy = Json::array();
    for (const Point2& p : t.positions) xy.push_back(Json::array({p.x, p.y}));
    Json vis = Json::array();
    for (bool v : t.visible) vis.push_back(v);
    points.push_back(Json{{"query", Json::array({t.query.x, t.query.y})}, {"xy", std::move(xy)}, {"vis", std::move(vis)}});
  }
  return Json{{"origin_frame", b.origin_frame}, {"frames", b.frames}, {"points", std::move(points)}};
}

TrackBundle bundle_from_json(const Json& j) {
  TrackBundle b;
  b.origin_frame = field<int>(j, "origin_frame");
  b.frames = field<std::vector<int>>(j, "frames");
  for (const Json& p : field<Json>(j, "points")) {
    PointTrack t;
    const auto xy = field<std::vector<std::vector<double>>>(p, "xy");
    t.visible = field<std::vector<bool>>(p, "vis");
    if (xy.size() != b.frames.size() || t.visible.size() != b.frames.size()) {
      throw Error(Errc::ParseError, "track length differs from frame list");
    }
    for (const auto& q : xy) {
      if (q.size() != 2) throw Error(Errc::ParseError, "track position must be [x, y]");
      t.positions.push_back({q[0], q[1]});
    }
    if (p.contains("query")) {
      const auto q = field<std::vector<double>>(p, "query");
      if (q.size() != 2) throw Error(Errc::ParseError, "query must be [x, y]");
      t.query = {q[0], q[1]};
    } else {
      // Bridge exports may omit the query; it is the origin-frame position.
      for (std::size_t k = 0; k < b.frames.size(); ++k) {
        if (b.frames[k] == b.origin_frame) t.query = t.positions[k];
      }
    }
    b.points.push_back(std::move(t));
  }
  return b;
}

Json to_json(const FrameDecision& d) {
  Json scores = Json::array();
  for (const ScoreBreakdown& s : d.breakdowns) {
    scores.push_back(Json{{"s_iou", s.s_iou},
                          {"s_coarse", s.s_coarse},
                          {"s_fine", opt_double(s.s_fine)},
                          {"s_conf", s.s_conf},
                          {"fine_used", s.fine_used}});
  }
  return Json{{"frame", d.frame_index},     {"chosen", d.chosen},
              {"visible", d.visible},       {"bbox", to_json(d.chosen_bbox)},
              {"fine_used", d.fine_used},   {"kf_updated", d.kf_updated},
              {"track_failure", d.track_failure}, {"scores", std::move(scores)}};
}

FrameDecision decision_from_json(const Json& j) {
  FrameDecision d;
  d.frame_index = field<int>(j, "frame");
  d.chosen = field<int>(j, "chosen");
  d.visible = field<bool>(j, "visible");
  d.chosen_bbox = bbox_from_json(field<Json>(j, "bbox"));
  d.fine_used = field<bool>(j, "fine_used");
  d.kf_updated = field<bool>(j, "kf_updated");
  d.track_failure = field<bool>(j, "track_failure");
  for (const Json& s : field<Json>(j, "scores")) {
    ScoreBreakdown b;
    b.s_iou = field<double>(s, "s_iou");
    b.s_coarse = field<double>(s, "s_coarse");
    if (!s.contains("s_fine")) throw Error(Errc::ParseError, "missing field 's_fine'");
    if (!s["s_fine"].is_null()) b.s_fine = field<double>(s, "s_fine");
    b.s_conf = field<double>(s, "s_conf");
    b.fine_used = field<bool>(s, "fine_used");
    d.breakdowns.push_back(b);
  }
  return d;
}

Json to_json(const MemoryEntry& e) {
  return Json{{"frame", e.frame_index},       {"s_conf", e.s_conf},
              {"s_iou", e.s_iou},             {"distinctive", e.distinctive},
              {"separation", e.separation},   {"mask", to_json(e.mask)}};
}

MemoryEntry entry_from_json(const Json& j) {
  MemoryEntry e;
  e.frame_index = field<int>(j, "frame");
  e.s_conf = field<double>(j, "s_conf");
  e.s_iou = field<double>(j, "s_iou");
  e.distinctive = field<bool>(j, "distinctive");
  e.separation = field<double>(j, "separation");
  e.mask = mask_from_json(field<Json>(j, "mask"));
  return e;
}

MemorySnapshot snapshot(int frame_index, const MemoryBank& bank) {
  MemorySnapshot s;
  s.frame_index = frame_index;
  s.prompt = bank.prompt;
  s.short_term.assign(bank.short_term.begin(), bank.short_term.end());
  s.long_term = bank.long_term;
  return s;
}

void Writer::record(const std::string& type, const Json& body) {
  Json j{{"type", type}, {"schema_version", kSchemaVersion}};
  for (auto it = body.begin(); it != body.end(); ++it) j[it.key()] = it.value();
  out_ << j.dump() << '\n';
  if (!out_) throw Error(Errc::IOFailure, "write failed");
}

void Writer::header(const Header& h) {
  Json body{{"width", h.width},
            {"height", h.height},
            {"frame_count", h.frame_count},
            {"track_source", h.track_source},
            {"seed", h.seed}};
  if (h.scene) {
    Json scene = Json::object();
    for (const auto& [k, v] : h.scene->entries()) scene[k] = v;
    body["scene"] = std::move(scene);
  }
  record("header", body);
}

void Writer::prompt(int frame_index, const BinaryMask& mask) {
  record("prompt", Json{{"frame", frame_index}, {"mask", to_json(mask)}});
}

void Writer::gt(const GtRecord& g) {
  record("gt", Json{{"frame", g.frame_index}, {"visible", g.visible}, {"bbox", to_json(g.bbox)}, {"mask", to_json(g.mask)}});
}

void Writer::proposal(int frame_index, int index, const Proposal& p) {
  record("proposal", Json{{"frame", frame_index},
                          {"index", index},
                          {"s_iou", p.s_iou},
                          {"objectness", p.objectness},
                          {"mask", to_json(p.mask)}});
}

void Writer::tracks(const TrackBundle& b) { record("tracks", to_json(b)); }

void Writer::decision(const FrameDecision& d) { record("decision", to_json(d)); }

void Writer::memory(const MemorySnapshot& m) {
  Json short_term = Json::array();
  for (const MemoryEntry& e : m.short_term) short_term.push_back(to_json(e));
  Json long_term = Json::array();
  for (const MemoryEntry& e : m.long_term) long_term.push_back(to_json(e));
  record("memory", Json{{"frame", m.frame_index},
                        {"prompt", to_json(m.prompt)},
                        {"short", std::move(short_term)},
                        {"long", std::move(long_term)}});
}

Dump read_dump(std::istream& in, std::ostream* warnings) {
  Dump dump;
  std::string line;
  long line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const std::string where = "line " + std::to_string(line_no) + ": ";
    Json j;
    try {
      j = Json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw Error(Errc::ParseError, where + e.what());
    }
    if (!j.is_object()) throw Error(Errc::ParseError, where + "record is not an object");
    if (!j.contains("schema_version") || !j["schema_version"].is_number_integer()) {
      throw Error(Errc::ParseError, where + "missing schema_version");
    }
    if (j["schema_version"].get<int>() != kSchemaVersion) {
      throw Error(Errc::SchemaVersionMismatch,
                  where + "version " + j["schema_version"].dump() + ", expected " + std::to_string(kSchemaVersion));
    }
    if (!j.contains("type") || !j["type"].is_string()) throw Error(Errc::ParseError, where + "missing type");
    const std::string type = j["type"].get<std::string>();

    try {
      if (type == "header") {
        Header h;
        h.width = field<int>(j, "width");
        h.height = field<int>(j, "height");
        h.frame_count = field<int>(j, "frame_count");
        h.track_source = field<std::string>(j, "track_source");
        h.seed = field<std::uint64_t>(j, "seed");
        if (j.contains("scene")) {
          KeyValueFile kv;
          for (auto it = j["scene"].begin(); it != j["scene"].end(); ++it) kv.set(it.key(), it.value().get<std::string>());
          h.scene = std::move(kv);
        }
        dump.header = std::move(h);
      } else if (type == "prompt") {
        dump.prompt_frame = field<int>(j, "frame");
        dump.prompt = mask_from_json(field<Json>(j, "mask"));
      } else if (type == "gt") {
        dump.gt.push_back({field<int>(j, "frame"), field<bool>(j, "visible"), bbox_from_json(field<Json>(j, "bbox")),
                           mask_from_json(field<Json>(j, "mask"))});
      } else if (type == "proposal") {
        const int frame = field<int>(j, "frame");
        const int index = field<int>(j, "index");
        auto& list = dump.proposals[frame];
        if (index != static_cast<int>(list.size())) {
          throw Error(Errc::ParseError, "proposal index " + std::to_string(index) + " out of order");
        }
        list.push_back({mask_from_json(field<Json>(j, "mask")), field<double>(j, "s_iou"), field<double>(j, "objectness")});
      } else if (type == "tracks") {
        dump.tracks.push_back(bundle_from_json(j));
      } else if (type == "decision") {
        dump.decisions.push_back(decision_from_json(j));
      } else if (type == "memory") {
        MemorySnapshot m;
        m.frame_index = field<int>(j, "frame");
        m.prompt = entry_from_json(field<Json>(j, "prompt"));
        for (const Json& e : field<Json>(j, "short")) m.short_term.push_back(entry_from_json(e));
        for (const Json& e : field<Json>(j, "long")) m.long_term.push_back(entry_from_json(e));
        dump.memory.push_back(std::move(m));
      } else if (type == "summary" || type == "metrics" || type == "ablation" || type == "sweep") {
        dump.other.push_back(std::move(j));
      } else {
        ++dump.skipped;
        if (warnings) *warnings << "warning: " << where << "skipping unknown record type '" << type << "'\n";
      }
    } catch (const Error& e) {
      if (e.code() == Errc::InvalidMask) throw Error(Errc::ParseError, where + e.what());
      if (e.code() == Errc::ParseError) throw Error(Errc::ParseError, where + e.what());
      throw;
    } catch (const nlohmann::json::exception& e) {
      throw Error(Errc::ParseError, where + e.what());
    }
  }
  return dump;
}

Dump read_dump_file(const std::string& path, std::ostream* warnings) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::IOFailure, "cannot open " + path);
  return read_dump(in, warnings);
}

}  // namespace hiertrack::io
