#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "hiertrack/kv_file.hpp"
#include "hiertrack/mask_geometry.hpp"
#include "hiertrack/memory_bank.hpp"
#include "hiertrack/point_field.hpp"
#include "hiertrack/proposal_source.hpp"

namespace hiertrack::synth {

enum class Shape { Rectangle, Ellipse };
enum class Role { Target, Distractor, Occluder };
enum class MotionKind { Linear, Arc, Sinusoid };

/// Motion from `start_frame` until the next segment starts.
///   Linear:   params = {vx, vy}
///   Arc:      params = {radius, omega (rad/frame), phase (rad)}
///   Sinusoid: params = {vx, vy, ax, ay, period}
struct MotionSegment {
  int start_frame = 0;
  MotionKind kind = MotionKind::Linear;
  std::array<double, 5> params{};
};

struct DriftChange {
  int start_frame = 0;
  double rate = 0.0;
};

struct ObjectSpec {
  std::string id;
  Role role = Role::Target;
  Shape shape = Shape::Rectangle;
  double width = 10.0;
  double height = 10.0;
  Point2 start;
  std::vector<MotionSegment> segments;
  double appearance = 0.5;
  double drift = 0.0;
  std::vector<DriftChange> drift_changes;
};

/// Inclusive frame range.
struct FrameWindow {
  int first = 0;
  int last = 0;
  bool contains(int f) const { return f >= first && f <= last; }
};

/// Knobs of the proposal generator.
struct SimParams {
  double shift_gain = 1.0;      // max A displacement, fraction of min(w, h), at zero affinity
  double morph_gain = 3.0;      // max A dilation/erosion in pixels at zero affinity
  double iou_noise = 0.1;       // bound on |s_iou - true IoU|
  double affinity_scale = 0.2;  // appearance distance scale in the affinity kernel
  double quality_knee = 1.0;    // memory entries with IoU >= knee count fully
  double part_probability = 0.3;
  double track_noise = 0.5;     // oracle tracker jitter std, pixels
};

struct Scene {
  std::string name;
  int width = 0;
  int height = 0;
  int frame_count = 0;
  std::uint64_t seed = 0;
  std::vector<ObjectSpec> objects;
  std::vector<FrameWindow> occlusions;
  std::vector<FrameWindow> disappearances;
  SimParams sim;

  const ObjectSpec& target() const;
  bool target_hidden(int frame) const;
};

Scene scene_from_kv(const KeyValueFile& kv);
KeyValueFile scene_to_kv(const Scene& scene);
Scene load_scene(const std::filesystem::path& path);
/// Scene files (*.scene) in `dir`, sorted by file name.
std::vector<Scene> load_scene_library(const std::filesystem::path& dir);

Point2 object_center(const ObjectSpec& obj, int frame);
double appearance_code(const ObjectSpec& obj, int frame);
BinaryMask rasterize(Shape shape, Point2 center, double w, double h, int width, int height);

struct FrameTruth {
  BinaryMask target;  // empty while hidden
  BBox bbox;
  bool visible = false;
  Point2 target_center;
  double target_appearance = 0.0;
  std::vector<BinaryMask> distractors;
  std::vector<double> distractor_appearance;
};

struct Sequence {
  Scene scene;
  std::vector<FrameTruth> frames;
};

/// Throws InvalidScene.
Sequence generate_sequence(const Scene& scene);

/// max over entries of quality * exp(-|a_target(frame) - a_content| / scale),
/// where the content is whichever scene object the entry's mask covers best.
double memory_affinity(const Sequence& seq, int frame_index, std::span<const MemoryEntry> conditioning);

inline double perturbation_scale(double affinity) { return 1.0 - affinity; }

/// Proposals A (perturbed target), B (nearest distractor), C (granularity variant).
std::vector<Proposal> synth_proposals(const Sequence& seq, int frame_index,
                                      std::span<const MemoryEntry> conditioning, std::uint64_t seed);

/// Backward rigid-motion tracks of `points` (queried at points.frame_index).
TrackBundle oracle_tracks(const Sequence& seq, const PointSet& points, std::span<const int> frames,
                          double noise, std::uint64_t seed);

class SynthProposalSource final : public ProposalSource {
 public:
  SynthProposalSource(const Sequence& seq, std::uint64_t seed) : seq_(seq), seed_(seed) {}
  int width() const override { return seq_.scene.width; }
  int height() const override { return seq_.scene.height; }
  int frame_count() const override { return seq_.scene.frame_count; }
  BinaryMask prompt_mask() const override { return seq_.frames.front().target; }
  std::vector<Proposal> proposals(int frame_index, std::span<const MemoryEntry> conditioning) override {
    return synth_proposals(seq_, frame_index, conditioning, seed_);
  }

 private:
  const Sequence& seq_;
  std::uint64_t seed_;
};

class OracleTrackSource final : public TrackSource {
 public:
  OracleTrackSource(const Sequence& seq, std::uint64_t seed) : seq_(seq), seed_(seed) {}
  TrackCapability capability() const override { return {0, true}; }
  TrackBundle track(int origin_frame, std::span<const Point2> points, std::span<const int> frames) override;

 private:
  const Sequence& seq_;
  std::uint64_t seed_;
};

}  // namespace hiertrack::synth
