#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "hiertrack/config.hpp"
#include "hiertrack/eval_metrics.hpp"
#include "hiertrack/interchange.hpp"
#include "hiertrack/memory_bank.hpp"
#include "hiertrack/proposal_source.hpp"
#include "hiertrack/synth_world.hpp"

namespace hiertrack {

/// Wall-clock cost of one tracked frame. `step_ms` covers the selector call
/// only; `frame_ms` also covers proposal generation and memory admission.
struct FrameTiming {
  double step_ms = 0.0;
  double frame_ms = 0.0;
};

struct RunResult {
  std::vector<FrameDecision> decisions;  // one per frame, the prompt frame first
  std::vector<std::pair<int, int>> occupancy;  // (short, long) after each frame
  std::vector<FrameTiming> timing;             // frames after the prompt
  long fine_frames = 0;
  long track_failures = 0;
  MemoryBank final_bank;

  /// Share of tracked (non-prompt) frames that escalated to the fine path.
  double fine_fraction() const;
};

/// Called after every frame, prompt included, with the bank after admission.
using FrameObserver =
    std::function<void(const FrameDecision&, std::span<const Proposal>, const MemoryBank&)>;

/// One-pass run from the prompt frame. Throws MissingPrompt if the source has an
/// empty prompt mask.
RunResult run_sequence(ProposalSource& proposals, TrackSource& tracks, const Config& cfg,
                       const FrameObserver& observer = {});

/// Serves proposals read from a dump; conditioning is ignored.
class RecordedProposalSource final : public ProposalSource {
 public:
  explicit RecordedProposalSource(const io::Dump& dump);
  int width() const override { return width_; }
  int height() const override { return height_; }
  int frame_count() const override { return frame_count_; }
  BinaryMask prompt_mask() const override { return prompt_; }
  std::vector<Proposal> proposals(int frame_index, std::span<const MemoryEntry> conditioning) override;

 private:
  int width_ = 0;
  int height_ = 0;
  int frame_count_ = 0;
  BinaryMask prompt_;
  std::map<int, std::vector<Proposal>> frames_;
};

std::vector<io::GtRecord> gt_records(const synth::Sequence& seq);

/// Pairs decisions with GT by frame index. Throws LengthMismatch when the
/// counts differ and FrameIndexGap when indices are not 0..n-1 on both sides.
metrics::SequenceResult align(std::span<const FrameDecision> decisions, std::span<const io::GtRecord> gt);

/// Mean box overlap, in percent, over visible frames after the end of the
/// first hidden window. nullopt when the scene never hides the target.
std::optional<double> post_reappearance_iou(const synth::Scene& scene, const metrics::SequenceResult& r);

struct SceneRun {
  RunResult run;
  metrics::SequenceResult eval;
};

/// Closed-loop run of a scene with the synthetic segmenter and oracle tracker.
SceneRun run_scene(const synth::Sequence& seq, const Config& cfg, const FrameObserver& observer = {});

/// Runs `n` tasks on up to `jobs` threads; each index runs exactly once.
void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& task);

/// The 16 toggle combinations, all-off first, in binary order kf, pt, sm, lm.
std::vector<Toggles> all_toggle_combos();

struct Report {
  double auc = 0.0;
  double precision = 0.0;
  double norm_precision = 0.0;
  metrics::FScore f;
};

Report report(const metrics::SequenceResult& r);

struct AblationRow {
  std::string scene;
  Toggles toggles;
  Report metrics;
  double fine_fraction = 0.0;
  long track_failures = 0;
  std::optional<double> post_reappearance_iou;
  std::vector<FrameDecision> decisions;
};

/// One row per (scene, toggles) pair, scene-major, independent of `jobs`.
std::vector<AblationRow> ablate(std::span<const synth::Sequence> scenes, const Config& base,
                                std::span<const Toggles> combos, int jobs);

/// Mean AUC per toggle combination over the rows.
double mean_auc(std::span<const AblationRow> rows, const Toggles& toggles,
                std::span<const std::string> scenes = {});

enum class SweepParam { PtFrames, Tau, Intervals };

SweepParam parse_sweep_param(const std::string& name);
std::string sweep_param_name(SweepParam p);

struct SweepRow {
  double value = 0.0;
  std::optional<double> value2;  // k_sm for the interval grid
  double auc = 0.0;              // mean over scenes
  double fine_fraction = 0.0;    // mean over scenes
};

/// For Intervals `grid` holds k_lm values and `grid2` k_sm values. Throws
/// EmptyGrid.
std::vector<SweepRow> sweep(std::span<const synth::Sequence> scenes, const Config& base, SweepParam param,
                            std::span<const double> grid, std::span<const double> grid2, int jobs);

/// Sequence dump for a scene: header with the scene, prompt, GT and open-loop
/// proposals (each frame conditioned on the prompt and the previous GT mask).
void write_simulation(std::ostream& out, const synth::Scene& scene, std::optional<std::uint64_t> seed);

struct TrackOutcome {
  RunResult run;
  bool live = false;  // closed loop with the synthetic world
  std::string track_source;
};

/// Runs the selector over a dump. With a scene header and `replay` false the
/// world is regenerated and run closed loop; otherwise the recorded proposals
/// are replayed with recorded tracks, or none. Decisions, optional memory
/// snapshots and a summary are written to `out`.
TrackOutcome track_dump(const io::Dump& in, const Config& cfg, bool replay, bool with_memory, std::ostream& out);

void write_report(io::Writer& w, const Report& r);

}  // namespace hiertrack
