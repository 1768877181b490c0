#include "hiertrack/synth_world.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <random>

#include "hiertrack/error.hpp"

namespace hiertrack::synth {

namespace {

std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t mix(std::uint64_t seed, std::initializer_list<std::int64_t> parts) {
  std::uint64_t h = splitmix(seed);
  for (std::int64_t p : parts) h = splitmix(h ^ static_cast<std::uint64_t>(p));
  return h;
}

double uniform01(std::mt19937_64& rng) { return std::uniform_real_distribution<double>(0.0, 1.0)(rng); }

[[noreturn]] void invalid(const std::string& what) { throw Error(Errc::InvalidScene, what); }

Role parse_role(const std::string& s) {
  if (s == "target") return Role::Target;
  if (s == "distractor") return Role::Distractor;
  if (s == "occluder") return Role::Occluder;
  invalid("unknown role '" + s + "'");
}

const char* role_name(Role r) {
  switch (r) {
    case Role::Target: return "target";
    case Role::Distractor: return "distractor";
    case Role::Occluder: return "occluder";
  }
  return "target";
}

Shape parse_shape(const std::string& s) {
  if (s == "rectangle") return Shape::Rectangle;
  if (s == "ellipse") return Shape::Ellipse;
  invalid("unknown shape '" + s + "'");
}

std::size_t param_count(MotionKind k) {
  switch (k) {
    case MotionKind::Linear: return 2;
    case MotionKind::Arc: return 3;
    case MotionKind::Sinusoid: return 5;
  }
  return 0;
}

const char* motion_name(MotionKind k) {
  switch (k) {
    case MotionKind::Linear: return "linear";
    case MotionKind::Arc: return "arc";
    case MotionKind::Sinusoid: return "sinusoid";
  }
  return "linear";
}

MotionSegment parse_segment(const std::string& value) {
  const auto tok = split_ws(value);
  if (tok.size() < 2) invalid("segment needs '<start_frame> <kind> <params...>'");
  MotionSegment seg;
  seg.start_frame = static_cast<int>(parse_long(tok[0], "segment start"));
  if (tok[1] == "linear") {
    seg.kind = MotionKind::Linear;
  } else if (tok[1] == "arc") {
    seg.kind = MotionKind::Arc;
  } else if (tok[1] == "sinusoid") {
    seg.kind = MotionKind::Sinusoid;
  } else {
    invalid("unknown motion kind '" + tok[1] + "'");
  }
  if (tok.size() != 2 + param_count(seg.kind)) invalid("wrong parameter count for " + tok[1]);
  for (std::size_t i = 0; i < param_count(seg.kind); ++i) seg.params[i] = parse_double(tok[2 + i], "segment");
  if (seg.kind == MotionKind::Sinusoid && seg.params[4] <= 0.0) invalid("sinusoid period must be positive");
  return seg;
}

std::pair<double, double> parse_pair(const std::string& value, const std::string& what) {
  const auto tok = split_ws(value);
  if (tok.size() != 2) invalid(what + " needs two numbers");
  return {parse_double(tok[0], what), parse_double(tok[1], what)};
}

FrameWindow parse_window(const std::string& value) {
  const auto tok = split_ws(value);
  if (tok.size() != 2) invalid("event window needs '<first> <last>'");
  FrameWindow w{static_cast<int>(parse_long(tok[0], "window")), static_cast<int>(parse_long(tok[1], "window"))};
  if (w.last < w.first) invalid("event window ends before it starts");
  return w;
}

// Splits "object.<id>.<rest>" keys; ids keep first-appearance order.
std::string object_id(const std::string& key) {
  const auto rest = key.substr(7);
  return rest.substr(0, rest.find('.'));
}

Point2 segment_displacement(const MotionSegment& s, double dt) {
  const auto& p = s.params;
  switch (s.kind) {
    case MotionKind::Linear:
      return {p[0] * dt, p[1] * dt};
    case MotionKind::Arc:
      return {p[0] * (std::cos(p[2] + p[1] * dt) - std::cos(p[2])),
              p[0] * (std::sin(p[2] + p[1] * dt) - std::sin(p[2]))};
    case MotionKind::Sinusoid: {
      const double wave = std::sin(2.0 * std::numbers::pi * dt / p[4]);
      return {p[0] * dt + p[2] * wave, p[1] * dt + p[3] * wave};
    }
  }
  return {};
}

void append_run(std::vector<Run>& runs, std::int64_t start, std::int64_t len) {
  if (len <= 0) return;
  if (!runs.empty() && runs.back().start + runs.back().length == start) {
    runs.back().length += len;
  } else {
    runs.push_back({start, len});
  }
}

}  // namespace

const ObjectSpec& Scene::target() const {
  auto it = std::find_if(objects.begin(), objects.end(), [](const ObjectSpec& o) { return o.role == Role::Target; });
  if (it == objects.end()) invalid("scene has no target");
  return *it;
}

bool Scene::target_hidden(int frame) const {
  auto in = [frame](const FrameWindow& w) { return w.contains(frame); };
  return std::any_of(occlusions.begin(), occlusions.end(), in) ||
         std::any_of(disappearances.begin(), disappearances.end(), in);
}

Scene scene_from_kv(const KeyValueFile& kv) {
  Scene s;
  for (const auto& [key, value] : kv.entries()) {
    const bool top = key == "name" || key == "width" || key == "height" || key == "frames" || key == "seed";
    if (!top && !key.starts_with("sim.") && !key.starts_with("object.") && !key.starts_with("event.")) {
      invalid("unknown key '" + key + "'");
    }
  }
  auto req = [&](const char* key) {
    auto v = kv.get(key);
    if (!v) invalid(std::string("missing key '") + key + "'");
    return *v;
  };
  s.name = kv.get("name").value_or("unnamed");
  s.width = static_cast<int>(parse_long(req("width"), "width"));
  s.height = static_cast<int>(parse_long(req("height"), "height"));
  s.frame_count = static_cast<int>(parse_long(req("frames"), "frames"));
  s.seed = static_cast<std::uint64_t>(parse_long(kv.get("seed").value_or("0"), "seed"));

  SimParams& sim = s.sim;
  const std::map<std::string, double*> sim_keys = {
      {"sim.shift_gain", &sim.shift_gain},         {"sim.morph_gain", &sim.morph_gain},
      {"sim.iou_noise", &sim.iou_noise},           {"sim.affinity_scale", &sim.affinity_scale},
      {"sim.quality_knee", &sim.quality_knee},     {"sim.part_probability", &sim.part_probability},
      {"sim.track_noise", &sim.track_noise},
  };
  for (const auto& [key, value] : kv.with_prefix("sim.")) {
    auto it = sim_keys.find(key);
    if (it == sim_keys.end()) invalid("unknown simulator key '" + key + "'");
    *it->second = parse_double(value, key);
  }

  std::vector<std::string> order;
  std::map<std::string, std::vector<KeyValueFile::Entry>> by_object;
  for (const auto& e : kv.with_prefix("object.")) {
    const std::string id = object_id(e.first);
    if (!by_object.contains(id)) order.push_back(id);
    by_object[id].push_back(e);
  }
  for (const std::string& id : order) {
    ObjectSpec obj;
    obj.id = id;
    const std::string base = "object." + id + ".";
    std::map<long, MotionSegment> segments;
    std::map<long, DriftChange> drifts;
    for (const auto& [key, value] : by_object[id]) {
      const std::string field = key.substr(base.size());
      if (field == "role") {
        obj.role = parse_role(value);
      } else if (field == "shape") {
        obj.shape = parse_shape(value);
      } else if (field == "size") {
        std::tie(obj.width, obj.height) = parse_pair(value, key);
      } else if (field == "start") {
        auto [x, y] = parse_pair(value, key);
        obj.start = {x, y};
      } else if (field == "appearance") {
        obj.appearance = parse_double(value, key);
      } else if (field == "drift") {
        obj.drift = parse_double(value, key);
      } else if (field.starts_with("segment.")) {
        segments[parse_long(field.substr(8), key)] = parse_segment(value);
      } else if (field.starts_with("drift_change.")) {
        auto [f, rate] = parse_pair(value, key);
        drifts[parse_long(field.substr(13), key)] = DriftChange{static_cast<int>(f), rate};
      } else {
        invalid("unknown object field '" + key + "'");
      }
    }
    for (auto& [_, seg] : segments) obj.segments.push_back(seg);
    for (auto& [_, d] : drifts) obj.drift_changes.push_back(d);
    s.objects.push_back(std::move(obj));
  }

  for (const auto& [key, value] : kv.with_prefix("event.")) {
    if (key.starts_with("event.occlusion.")) {
      s.occlusions.push_back(parse_window(value));
    } else if (key.starts_with("event.disappearance.")) {
      s.disappearances.push_back(parse_window(value));
    } else {
      invalid("unknown event '" + key + "'");
    }
  }
  return s;
}

KeyValueFile scene_to_kv(const Scene& s) {
  KeyValueFile kv;
  kv.set("name", s.name);
  kv.set("width", std::to_string(s.width));
  kv.set("height", std::to_string(s.height));
  kv.set("frames", std::to_string(s.frame_count));
  kv.set("seed", std::to_string(s.seed));
  kv.set("sim.shift_gain", format_double(s.sim.shift_gain));
  kv.set("sim.morph_gain", format_double(s.sim.morph_gain));
  kv.set("sim.iou_noise", format_double(s.sim.iou_noise));
  kv.set("sim.affinity_scale", format_double(s.sim.affinity_scale));
  kv.set("sim.quality_knee", format_double(s.sim.quality_knee));
  kv.set("sim.part_probability", format_double(s.sim.part_probability));
  kv.set("sim.track_noise", format_double(s.sim.track_noise));
  for (const ObjectSpec& o : s.objects) {
    const std::string base = "object." + o.id + ".";
    kv.set(base + "role", role_name(o.role));
    kv.set(base + "shape", o.shape == Shape::Rectangle ? "rectangle" : "ellipse");
    kv.set(base + "size", format_double(o.width) + " " + format_double(o.height));
    kv.set(base + "start", format_double(o.start.x) + " " + format_double(o.start.y));
    kv.set(base + "appearance", format_double(o.appearance));
    kv.set(base + "drift", format_double(o.drift));
    for (std::size_t i = 0; i < o.segments.size(); ++i) {
      const MotionSegment& seg = o.segments[i];
      std::string v = std::to_string(seg.start_frame) + " " + motion_name(seg.kind);
      for (std::size_t p = 0; p < param_count(seg.kind); ++p) v += " " + format_double(seg.params[p]);
      kv.set(base + "segment." + std::to_string(i), v);
    }
    for (std::size_t i = 0; i < o.drift_changes.size(); ++i) {
      kv.set(base + "drift_change." + std::to_string(i),
             std::to_string(o.drift_changes[i].start_frame) + " " + format_double(o.drift_changes[i].rate));
    }
  }
  for (std::size_t i = 0; i < s.occlusions.size(); ++i) {
    kv.set("event.occlusion." + std::to_string(i),
           std::to_string(s.occlusions[i].first) + " " + std::to_string(s.occlusions[i].last));
  }
  for (std::size_t i = 0; i < s.disappearances.size(); ++i) {
    kv.set("event.disappearance." + std::to_string(i),
           std::to_string(s.disappearances[i].first) + " " + std::to_string(s.disappearances[i].last));
  }
  return kv;
}

Scene load_scene(const std::filesystem::path& path) { return scene_from_kv(KeyValueFile::load(path)); }

std::vector<Scene> load_scene_library(const std::filesystem::path& dir) {
  std::vector<std::filesystem::path> files;
  if (!std::filesystem::is_directory(dir)) throw Error(Errc::IOFailure, "not a directory: " + dir.string());
  for (const auto& e : std::filesystem::directory_iterator(dir)) {
    if (e.path().extension() == ".scene") files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  std::vector<Scene> out;
  for (const auto& f : files) out.push_back(load_scene(f));
  return out;
}

Point2 object_center(const ObjectSpec& obj, int frame) {
  Point2 p = obj.start;
  for (std::size_t i = 0; i < obj.segments.size(); ++i) {
    const MotionSegment& seg = obj.segments[i];
    if (seg.start_frame >= frame) break;
    const int end = i + 1 < obj.segments.size() ? std::min(frame, obj.segments[i + 1].start_frame) : frame;
    const Point2 d = segment_displacement(seg, static_cast<double>(end - seg.start_frame));
    p.x += d.x;
    p.y += d.y;
  }
  return p;
}

double appearance_code(const ObjectSpec& obj, int frame) {
  double a = obj.appearance;
  double rate = obj.drift;
  int from = 0;
  for (const DriftChange& c : obj.drift_changes) {
    if (c.start_frame >= frame) break;
    a += rate * (c.start_frame - from);
    from = c.start_frame;
    rate = c.rate;
  }
  a += rate * (frame - from);
  return std::clamp(a, 0.0, 1.0);
}

BinaryMask rasterize(Shape shape, Point2 c, double w, double h, int width, int height) {
  std::vector<Run> runs;
  if (w <= 0.0 || h <= 0.0) return BinaryMask(width, height);
  // Pixel centers inside [c - size/2, c + size/2) for rectangles.
  const int y0 = std::max(0, static_cast<int>(std::ceil(c.y - h / 2.0)));
  const int y1 = std::min(height - 1, static_cast<int>(std::ceil(c.y + h / 2.0)) - 1);
  for (int y = y0; y <= y1; ++y) {
    double lo = 0.0, hi = 0.0;
    if (shape == Shape::Rectangle) {
      lo = std::ceil(c.x - w / 2.0);
      hi = std::ceil(c.x + w / 2.0) - 1.0;
    } else {
      const double dy = (y - c.y) / (h / 2.0);
      if (dy * dy > 1.0) continue;
      const double half = (w / 2.0) * std::sqrt(1.0 - dy * dy);
      lo = std::ceil(c.x - half);
      hi = std::floor(c.x + half);
    }
    const int x0 = std::max(0, static_cast<int>(lo));
    const int x1 = std::min(width - 1, static_cast<int>(hi));
    if (lo > width - 1 || hi < 0 || x1 < x0) continue;
    append_run(runs, static_cast<std::int64_t>(y) * width + x0, x1 - x0 + 1);
  }
  return BinaryMask::from_runs(width, height, std::move(runs));
}

Sequence generate_sequence(const Scene& scene) {
  if (scene.width <= 0 || scene.height <= 0) invalid("frame size must be positive");
  if (scene.frame_count <= 0) invalid("frame_count must be positive");
  const auto targets = std::count_if(scene.objects.begin(), scene.objects.end(),
                                     [](const ObjectSpec& o) { return o.role == Role::Target; });
  if (targets != 1) invalid("scene needs exactly one target, has " + std::to_string(targets));
  for (const ObjectSpec& o : scene.objects) {
    if (o.width <= 0.0 || o.height <= 0.0) invalid("object '" + o.id + "' has non-positive size");
    for (std::size_t i = 1; i < o.segments.size(); ++i) {
      if (o.segments[i].start_frame < o.segments[i - 1].start_frame) invalid("segments out of order");
    }
  }
  if (scene.target_hidden(0)) invalid("target must be visible on the prompt frame");

  const ObjectSpec& target = scene.target();
  Sequence seq;
  seq.scene = scene;
  seq.frames.reserve(static_cast<std::size_t>(scene.frame_count));
  const double W = scene.width, H = scene.height;
  for (int f = 0; f < scene.frame_count; ++f) {
    FrameTruth ft;
    BinaryMask occluders(scene.width, scene.height);
    for (const ObjectSpec& o : scene.objects) {
      const Point2 c = object_center(o, f);
      if (c.x < -0.5 * W || c.x > 1.5 * W || c.y < -0.5 * H || c.y > 1.5 * H) {
        invalid("object '" + o.id + "' leaves the inflated frame at frame " + std::to_string(f));
      }
      if (o.role == Role::Occluder) {
        occluders = mask_union(occluders, rasterize(o.shape, c, o.width, o.height, scene.width, scene.height));
      }
    }
    ft.target_center = object_center(target, f);
    ft.target_appearance = appearance_code(target, f);
    const BinaryMask target_raster =
        rasterize(target.shape, ft.target_center, target.width, target.height, scene.width, scene.height);
    const bool hidden = scene.target_hidden(f);
    ft.target = hidden ? BinaryMask(scene.width, scene.height) : mask_subtract(target_raster, occluders);
    ft.visible = !ft.target.empty();
    if (ft.visible) ft.bbox = mask_to_bbox(ft.target);
    if (f == 0 && !ft.visible) invalid("target must be visible on the prompt frame");

    for (const ObjectSpec& o : scene.objects) {
      if (o.role != Role::Distractor) continue;
      BinaryMask m = rasterize(o.shape, object_center(o, f), o.width, o.height, scene.width, scene.height);
      m = mask_subtract(m, occluders);
      // Distractors pass behind the target.
      if (!hidden) m = mask_subtract(m, target_raster);
      ft.distractors.push_back(std::move(m));
      ft.distractor_appearance.push_back(appearance_code(o, f));
    }
    seq.frames.push_back(std::move(ft));
  }
  return seq;
}

double memory_affinity(const Sequence& seq, int frame_index, std::span<const MemoryEntry> conditioning) {
  const SimParams& sim = seq.scene.sim;
  const double current = seq.frames.at(static_cast<std::size_t>(frame_index)).target_appearance;
  double best = 0.0;
  for (const MemoryEntry& e : conditioning) {
    if (e.mask.empty() || e.frame_index < 0 || e.frame_index >= seq.scene.frame_count) continue;
    const FrameTruth& ft = seq.frames[static_cast<std::size_t>(e.frame_index)];
    // The stored mask carries the appearance of whatever it actually covers.
    double overlap = ft.visible ? mask_iou(e.mask, ft.target) : 0.0;
    double code = ft.target_appearance;
    for (std::size_t d = 0; d < ft.distractors.size(); ++d) {
      if (ft.distractors[d].empty()) continue;
      const double o = mask_iou(e.mask, ft.distractors[d]);
      if (o > overlap) {
        overlap = o;
        code = ft.distractor_appearance[d];
      }
    }
    const double quality = std::min(1.0, overlap / sim.quality_knee);
    best = std::max(best, quality * std::exp(-std::abs(current - code) / sim.affinity_scale));
  }
  return best;
}

std::vector<Proposal> synth_proposals(const Sequence& seq, int frame_index,
                                      std::span<const MemoryEntry> conditioning, std::uint64_t seed) {
  const Scene& scene = seq.scene;
  if (frame_index < 0 || frame_index >= scene.frame_count) {
    throw Error(Errc::InvalidScene, "frame " + std::to_string(frame_index) + " out of range");
  }
  const FrameTruth& ft = seq.frames[static_cast<std::size_t>(frame_index)];
  const ObjectSpec& target = scene.target();
  const SimParams& sim = scene.sim;

  // Every draw happens up front so the random path is independent of memory.
  std::mt19937_64 rng(mix(seed, {frame_index, 0x5052}));
  const double u_dir = uniform01(rng);
  const double u_mag = uniform01(rng);
  const double u_morph = uniform01(rng);
  const double u_coin = uniform01(rng);
  const double u_side = uniform01(rng);
  std::array<double, 3> u_noise{}, u_obj{};
  for (auto& u : u_noise) u = uniform01(rng);
  for (auto& u : u_obj) u = uniform01(rng);

  const int W = scene.width, H = scene.height;
  BinaryMask occluders(W, H);
  for (const ObjectSpec& o : scene.objects) {
    if (o.role == Role::Occluder) {
      occluders = mask_union(occluders, rasterize(o.shape, object_center(o, frame_index), o.width, o.height, W, H));
    }
  }

  const double pert = perturbation_scale(memory_affinity(seq, frame_index, conditioning));
  BinaryMask a(W, H);
  Point2 a_center = ft.target_center;
  double a_w = target.width, a_h = target.height;
  if (ft.visible) {
    const double mag = pert * sim.shift_gain * std::min(target.width, target.height) * u_mag;
    const double ang = 2.0 * std::numbers::pi * u_dir;
    a_center = {ft.target_center.x + mag * std::cos(ang), ft.target_center.y + mag * std::sin(ang)};
    const double r = pert * sim.morph_gain * (2.0 * u_morph - 1.0);
    a_w = std::max(1.0, target.width + 2.0 * r);
    a_h = std::max(1.0, target.height + 2.0 * r);
    a = mask_subtract(rasterize(target.shape, a_center, a_w, a_h, W, H), occluders);
  }

  BinaryMask b(W, H);
  double nearest = std::numeric_limits<double>::infinity();
  std::size_t di = 0;
  for (const ObjectSpec& o : scene.objects) {
    if (o.role != Role::Distractor) continue;
    const BinaryMask& m = ft.distractors[di++];
    if (m.empty()) continue;
    const Point2 c = object_center(o, frame_index);
    const double d = std::hypot(c.x - ft.target_center.x, c.y - ft.target_center.y);
    if (d < nearest) {
      nearest = d;
      b = m;
    }
  }

  BinaryMask c(W, H);
  if (!a.empty()) {
    if (u_coin < sim.part_probability) {
      // One half of A's box: left, right, top or bottom.
      const BBox box = mask_to_bbox(a);
      const int side = std::min(3, static_cast<int>(u_side * 4.0));
      Point2 hc{box.cx, box.cy};
      double hw = box.w, hh = box.h;
      if (side < 2) {
        hw = box.w / 2.0;
        hc.x = box.cx + (side == 0 ? -1.0 : 1.0) * box.w / 4.0;
      } else {
        hh = box.h / 2.0;
        hc.y = box.cy + (side == 2 ? -1.0 : 1.0) * box.h / 4.0;
      }
      c = mask_intersect(a, rasterize(Shape::Rectangle, hc, hw, hh, W, H));
      if (c.empty()) c = a;
    } else if (!b.empty()) {
      c = mask_union(a, b);
    } else {
      c = mask_subtract(rasterize(target.shape, a_center, a_w + 4.0, a_h + 4.0, W, H), occluders);
    }
  }

  std::vector<Proposal> out(3);
  out[0].mask = std::move(a);
  out[1].mask = std::move(b);
  out[2].mask = std::move(c);
  for (std::size_t k = 0; k < 3; ++k) {
    double amp = sim.iou_noise;
    if (k == 1 && !ft.visible) amp *= 2.0;
    const double truth = mask_iou(out[k].mask, ft.target);
    out[k].s_iou = std::clamp(truth + amp * (2.0 * u_noise[k] - 1.0), 0.0, 1.0);
    out[k].objectness = out[k].mask.empty() ? 0.1 * u_obj[k] : 0.8 + 0.2 * u_obj[k];
  }
  return out;
}

TrackBundle oracle_tracks(const Sequence& seq, const PointSet& points, std::span<const int> frames,
                          double noise, std::uint64_t seed) {
  const int origin = points.frame_index;
  if (origin < 0 || origin >= seq.scene.frame_count) {
    throw Error(Errc::TrackSourceFailure, "origin frame out of range");
  }
  const FrameTruth& at_origin = seq.frames[static_cast<std::size_t>(origin)];
  TrackBundle out;
  out.origin_frame = origin;
  out.frames.assign(frames.begin(), frames.end());
  for (std::size_t i = 0; i < points.points.size(); ++i) {
    const Point2 q = points.points[i];
    PointTrack pt;
    pt.query = q;
    const bool on_target = at_origin.visible &&
                           at_origin.target.contains(static_cast<int>(std::lround(q.x)),
                                                     static_cast<int>(std::lround(q.y)));
    for (int f : frames) {
      Point2 pos = q;
      bool vis = false;
      if (f >= 0 && f < seq.scene.frame_count) {
        const FrameTruth& ft = seq.frames[static_cast<std::size_t>(f)];
        pos = {q.x - (at_origin.target_center.x - ft.target_center.x),
               q.y - (at_origin.target_center.y - ft.target_center.y)};
        if (noise > 0.0) {
          std::mt19937_64 rng(mix(seed, {origin, f, static_cast<std::int64_t>(i), 0x5452}));
          std::normal_distribution<double> jitter(0.0, noise);
          pos.x += jitter(rng);
          pos.y += jitter(rng);
        }
        vis = on_target && ft.visible &&
              ft.target.contains(static_cast<int>(std::lround(pos.x)), static_cast<int>(std::lround(pos.y)));
      }
      pt.positions.push_back(pos);
      pt.visible.push_back(vis);
    }
    out.points.push_back(std::move(pt));
  }
  return out;
}

TrackBundle OracleTrackSource::track(int origin_frame, std::span<const Point2> points,
                                     std::span<const int> frames) {
  PointSet ps{{points.begin(), points.end()}, origin_frame};
  return oracle_tracks(seq_, ps, frames, seq_.scene.sim.track_noise, seed_);
}

}  // namespace hiertrack::synth
