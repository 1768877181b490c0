#include "hiertrack/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <deque>
#include <exception>
#include <memory>
#include <mutex>
#include <ostream>
#include <thread>

#include "hiertrack/error.hpp"

namespace hiertrack {

namespace {

using Clock = std::chrono::steady_clock;

double ms_between(Clock::time_point a, Clock::time_point b) {
  return std::chrono::duration<double, std::milli>(b - a).count();
}

FrameDecision prompt_decision(int frame_index, const BinaryMask& prompt) {
  FrameDecision d;
  d.frame_index = frame_index;
  d.chosen = -1;
  d.chosen_bbox = mask_to_bbox(prompt);
  d.visible = true;
  return d;
}

}  // namespace

double RunResult::fine_fraction() const {
  const auto tracked = decisions.size() > 1 ? decisions.size() - 1 : 0;
  return tracked == 0 ? 0.0 : static_cast<double>(fine_frames) / static_cast<double>(tracked);
}

RunResult run_sequence(ProposalSource& source, TrackSource& tracks, const Config& cfg,
                       const FrameObserver& observer) {
  cfg.validate();
  const SelectorConfig sel = cfg.effective_selector();
  const MemoryConfig mem = cfg.effective_memory();
  const BinaryMask prompt = source.prompt_mask();
  if (prompt.empty()) throw Error(Errc::MissingPrompt, "prompt mask is empty");

  RunResult out;
  const int n = source.frame_count();
  out.decisions.reserve(static_cast<std::size_t>(n));

  MemoryBank bank = make_bank(prompt, 0);
  KalmanState kf;
  if (sel.motion_enabled) kf = kf_init(mask_to_bbox(prompt), sel.kf);
  std::deque<HistoryFrame> history{{0, prompt}};
  const auto keep = static_cast<std::size_t>(sel.fine.pt_frames);

  out.decisions.push_back(prompt_decision(0, prompt));
  out.occupancy.emplace_back(0, 0);
  if (observer) observer(out.decisions.back(), {}, bank);

  std::vector<HistoryFrame> history_view;
  for (int t = 1; t < n; ++t) {
    const auto t0 = Clock::now();
    const std::vector<MemoryEntry> cond = conditioning_set(bank);
    const std::vector<Proposal> props = source.proposals(t, cond);
    history_view.assign(history.begin(), history.end());

    const auto t1 = Clock::now();
    StepResult r = step(t, props, kf, tracks, history_view, sel);
    const auto t2 = Clock::now();

    kf = r.kf;
    bank = admit(std::move(bank), r.decision, props, mem);
    if (r.decision.visible) {
      history.push_back({t, props[static_cast<std::size_t>(r.decision.chosen)].mask});
      while (history.size() > keep) history.pop_front();
    }
    const auto t3 = Clock::now();

    out.timing.push_back({ms_between(t1, t2), ms_between(t0, t3)});
    if (r.decision.fine_used) ++out.fine_frames;
    if (r.decision.track_failure) ++out.track_failures;
    out.occupancy.emplace_back(static_cast<int>(bank.short_term.size()), static_cast<int>(bank.long_term.size()));
    out.decisions.push_back(std::move(r.decision));
    if (observer) observer(out.decisions.back(), props, bank);
  }
  out.final_bank = std::move(bank);
  return out;
}

RecordedProposalSource::RecordedProposalSource(const io::Dump& dump) : frames_(dump.proposals) {
  if (!dump.prompt) throw Error(Errc::MissingPrompt, "dump has no prompt record");
  if (dump.prompt_frame != 0) throw Error(Errc::MissingPrompt, "prompt must be on frame 0");
  prompt_ = *dump.prompt;
  width_ = prompt_.width();
  height_ = prompt_.height();
  if (dump.header) {
    frame_count_ = dump.header->frame_count;
  } else {
    frame_count_ = frames_.empty() ? 1 : frames_.rbegin()->first + 1;
  }
}

std::vector<Proposal> RecordedProposalSource::proposals(int frame_index, std::span<const MemoryEntry>) {
  const auto it = frames_.find(frame_index);
  if (it == frames_.end() || it->second.empty()) {
    throw Error(Errc::NoProposals, "no proposals recorded for frame " + std::to_string(frame_index));
  }
  return it->second;
}

std::vector<io::GtRecord> gt_records(const synth::Sequence& seq) {
  std::vector<io::GtRecord> out;
  out.reserve(seq.frames.size());
  for (std::size_t f = 0; f < seq.frames.size(); ++f) {
    const auto& fr = seq.frames[f];
    out.push_back({static_cast<int>(f), fr.visible, fr.bbox, fr.target});
  }
  return out;
}

metrics::SequenceResult align(std::span<const FrameDecision> decisions, std::span<const io::GtRecord> gt) {
  if (decisions.size() != gt.size()) {
    throw Error(Errc::LengthMismatch, std::to_string(decisions.size()) + " predictions vs " +
                                          std::to_string(gt.size()) + " ground-truth frames");
  }
  const std::size_t n = gt.size();
  std::vector<const FrameDecision*> by_pred(n, nullptr);
  std::vector<const io::GtRecord*> by_gt(n, nullptr);
  for (const FrameDecision& d : decisions) {
    if (d.frame_index < 0 || static_cast<std::size_t>(d.frame_index) >= n || by_pred[d.frame_index]) {
      throw Error(Errc::FrameIndexGap, "prediction frame " + std::to_string(d.frame_index) + " out of sequence");
    }
    by_pred[d.frame_index] = &d;
  }
  for (const io::GtRecord& g : gt) {
    if (g.frame_index < 0 || static_cast<std::size_t>(g.frame_index) >= n || by_gt[g.frame_index]) {
      throw Error(Errc::FrameIndexGap, "ground-truth frame " + std::to_string(g.frame_index) + " out of sequence");
    }
    by_gt[g.frame_index] = &g;
  }
  metrics::SequenceResult r(n);
  for (std::size_t i = 0; i < n; ++i) {
    const FrameDecision& d = *by_pred[i];
    const auto* best = d.chosen_breakdown();
    r[i].pred = d.chosen_bbox;
    r[i].pred_visible = d.visible;
    r[i].confidence = best ? best->s_conf : 1.0;
    r[i].gt = by_gt[i]->bbox;
    r[i].gt_visible = by_gt[i]->visible;
  }
  return r;
}

std::optional<double> post_reappearance_iou(const synth::Scene& scene, const metrics::SequenceResult& r) {
  int first_end = -1;
  for (int f = 0; f < static_cast<int>(r.size()); ++f) {
    if (scene.target_hidden(f)) {
      first_end = f;
      while (first_end + 1 < static_cast<int>(r.size()) && scene.target_hidden(first_end + 1)) ++first_end;
      break;
    }
  }
  if (first_end < 0) return std::nullopt;
  double sum = 0.0;
  long n = 0;
  for (std::size_t f = static_cast<std::size_t>(first_end) + 1; f < r.size(); ++f) {
    if (!r[f].gt_visible) continue;
    sum += metrics::frame_overlap(r[f]);
    ++n;
  }
  if (n == 0) return std::nullopt;
  return 100.0 * sum / static_cast<double>(n);
}

SceneRun run_scene(const synth::Sequence& seq, const Config& cfg, const FrameObserver& observer) {
  const std::uint64_t seed = cfg.seed.value_or(seq.scene.seed);
  synth::SynthProposalSource proposals(seq, seed);
  synth::OracleTrackSource tracks(seq, seed);
  SceneRun out;
  out.run = run_sequence(proposals, tracks, cfg, observer);
  const auto gt = gt_records(seq);
  out.eval = align(out.run.decisions, gt);
  return out;
}

void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& task) {
  const std::size_t workers = std::min<std::size_t>(n, static_cast<std::size_t>(std::max(1, jobs)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) task(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          task(i);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

std::vector<Toggles> all_toggle_combos() {
  std::vector<Toggles> out;
  for (int bits = 0; bits < 16; ++bits) {
    out.push_back({(bits & 8) != 0, (bits & 4) != 0, (bits & 2) != 0, (bits & 1) != 0});
  }
  return out;
}

Report report(const metrics::SequenceResult& r) {
  return {metrics::success_auc(r), metrics::precision(r), metrics::norm_precision(r), metrics::f_score(r)};
}

std::vector<AblationRow> ablate(std::span<const synth::Sequence> scenes, const Config& base,
                                std::span<const Toggles> combos, int jobs) {
  std::vector<AblationRow> rows(scenes.size() * combos.size());
  parallel_for(rows.size(), jobs, [&](std::size_t i) {
    const synth::Sequence& seq = scenes[i / combos.size()];
    Config cfg = base;
    cfg.toggles = combos[i % combos.size()];
    SceneRun sr = run_scene(seq, cfg);
    AblationRow& row = rows[i];
    row.scene = seq.scene.name;
    row.toggles = cfg.toggles;
    row.metrics = report(sr.eval);
    row.fine_fraction = sr.run.fine_fraction();
    row.track_failures = sr.run.track_failures;
    row.post_reappearance_iou = post_reappearance_iou(seq.scene, sr.eval);
    row.decisions = std::move(sr.run.decisions);
  });
  return rows;
}

double mean_auc(std::span<const AblationRow> rows, const Toggles& toggles, std::span<const std::string> scenes) {
  double sum = 0.0;
  long n = 0;
  for (const AblationRow& row : rows) {
    if (!(row.toggles == toggles)) continue;
    if (!scenes.empty() && std::find(scenes.begin(), scenes.end(), row.scene) == scenes.end()) continue;
    sum += row.metrics.auc;
    ++n;
  }
  if (n == 0) throw Error(Errc::EmptySequence, "no ablation rows for " + toggles.label());
  return sum / static_cast<double>(n);
}

SweepParam parse_sweep_param(const std::string& name) {
  if (name == "pt_frames") return SweepParam::PtFrames;
  if (name == "tau") return SweepParam::Tau;
  if (name == "intervals") return SweepParam::Intervals;
  throw Error(Errc::InvalidConfig, "unknown sweep parameter '" + name + "'");
}

std::string sweep_param_name(SweepParam p) {
  switch (p) {
    case SweepParam::PtFrames: return "pt_frames";
    case SweepParam::Tau: return "tau";
    case SweepParam::Intervals: return "intervals";
  }
  return "?";
}

std::vector<SweepRow> sweep(std::span<const synth::Sequence> scenes, const Config& base, SweepParam param,
                            std::span<const double> grid, std::span<const double> grid2, int jobs) {
  if (grid.empty() || (param == SweepParam::Intervals && grid2.empty())) {
    throw Error(Errc::EmptyGrid, "sweep grid is empty");
  }
  if (scenes.empty()) throw Error(Errc::EmptySequence, "no scenes to sweep");

  std::vector<SweepRow> rows;
  std::vector<Config> configs;
  for (double v : grid) {
    if (param == SweepParam::Intervals) {
      for (double v2 : grid2) {
        Config c = base;
        c.memory.k_lm = static_cast<int>(v);
        c.memory.k_sm = static_cast<int>(v2);
        c.validate();
        configs.push_back(c);
        rows.push_back({v, v2, 0.0, 0.0});
      }
      continue;
    }
    Config c = base;
    if (param == SweepParam::PtFrames) {
      c.selector.fine.pt_frames = static_cast<int>(v);
    } else {
      c.selector.tau = v;
    }
    c.validate();
    configs.push_back(c);
    rows.push_back({v, std::nullopt, 0.0, 0.0});
  }

  const std::size_t per = scenes.size();
  std::vector<std::pair<double, double>> cells(rows.size() * per);
  parallel_for(cells.size(), jobs, [&](std::size_t i) {
    SceneRun sr = run_scene(scenes[i % per], configs[i / per]);
    cells[i] = {metrics::success_auc(sr.eval), sr.run.fine_fraction()};
  });
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t s = 0; s < per; ++s) {
      rows[r].auc += cells[r * per + s].first;
      rows[r].fine_fraction += cells[r * per + s].second;
    }
    rows[r].auc /= static_cast<double>(per);
    rows[r].fine_fraction /= static_cast<double>(per);
  }
  return rows;
}

void write_simulation(std::ostream& out, const synth::Scene& scene, std::optional<std::uint64_t> seed) {
  const synth::Sequence seq = synth::generate_sequence(scene);
  const std::uint64_t s = seed.value_or(scene.seed);
  io::Writer w(out);
  io::Header h;
  h.width = scene.width;
  h.height = scene.height;
  h.frame_count = scene.frame_count;
  h.track_source = "oracle";
  h.scene = synth::scene_to_kv(scene);
  h.seed = s;
  w.header(h);
  w.prompt(0, seq.frames.front().target);
  const auto gt = gt_records(seq);
  for (const auto& g : gt) w.gt(g);

  MemoryEntry prompt_entry;
  prompt_entry.frame_index = 0;
  prompt_entry.mask = seq.frames.front().target;
  for (int t = 1; t < scene.frame_count; ++t) {
    MemoryEntry previous;
    previous.frame_index = t - 1;
    previous.mask = seq.frames[static_cast<std::size_t>(t - 1)].target;
    std::vector<MemoryEntry> cond{prompt_entry};
    if (t > 1) cond.push_back(previous);
    const auto props = synth::synth_proposals(seq, t, cond, s);
    for (std::size_t i = 0; i < props.size(); ++i) w.proposal(t, static_cast<int>(i), props[i]);
  }
}

void write_report(io::Writer& w, const Report& r) {
  w.record("metrics", io::Json{{"auc", r.auc},
                               {"precision", r.precision},
                               {"norm_precision", r.norm_precision},
                               {"pr", r.f.pr},
                               {"re", r.f.re},
                               {"f", r.f.f},
                               {"f_threshold", r.f.threshold}});
}

TrackOutcome track_dump(const io::Dump& in, const Config& cfg, bool replay, bool with_memory, std::ostream& out) {
  TrackOutcome outcome;
  io::Writer w(out);
  const FrameObserver observer = [&](const FrameDecision& d, std::span<const Proposal>, const MemoryBank& bank) {
    w.decision(d);
    if (with_memory) w.memory(io::snapshot(d.frame_index, bank));
  };

  io::Header header;
  if (in.header) header = *in.header;

  if (!replay && in.header && in.header->scene) {
    synth::Scene scene = synth::scene_from_kv(*in.header->scene);
    const synth::Sequence seq = synth::generate_sequence(scene);
    Config run_cfg = cfg;
    if (!run_cfg.seed) run_cfg.seed = in.header->seed;
    header.track_source = "oracle";
    header.seed = *run_cfg.seed;
    w.header(header);
    SceneRun sr = run_scene(seq, run_cfg, observer);
    outcome.run = std::move(sr.run);
    outcome.live = true;
  } else {
    RecordedProposalSource proposals(in);
    std::unique_ptr<TrackSource> tracks;
    if (in.tracks.empty()) {
      tracks = std::make_unique<NullTrackSource>();
      header.track_source = "none";
    } else {
      tracks = std::make_unique<RecordedTrackSource>(in.tracks);
      header.track_source = "recorded";
    }
    header.width = proposals.width();
    header.height = proposals.height();
    header.frame_count = proposals.frame_count();
    w.header(header);
    outcome.run = run_sequence(proposals, *tracks, cfg, observer);
  }
  outcome.track_source = header.track_source;

  io::Json occupancy = io::Json::array();
  for (const auto& [s, l] : outcome.run.occupancy) occupancy.push_back(io::Json::array({s, l}));
  w.record("summary", io::Json{{"frames", outcome.run.decisions.size()},
                               {"toggles", cfg.toggles.label()},
                               {"fine_used_fraction", outcome.run.fine_fraction()},
                               {"track_failures", outcome.run.track_failures},
                               {"occupancy", std::move(occupancy)}});
  return outcome;
}

}  // namespace hiertrack
