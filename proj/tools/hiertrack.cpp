// Command-line front end: simulate, track, eval, ablate, sweep.

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <numeric>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "hiertrack/error.hpp"
#include "hiertrack/pipeline.hpp"

using namespace hiertrack;

namespace {

constexpr int kInputError = 2;
constexpr int kSchemaError = 3;

struct ConfigFlags {
  std::string path;
  std::vector<std::string> overrides;
  std::string toggles;
  std::optional<std::uint64_t> seed;
};

void add_config_flags(CLI::App* cmd, ConfigFlags& f) {
  cmd->add_option("-c,--config", f.path, "key=value config file (default: $HIERTRACK_CONFIG)");
  cmd->add_option("--set", f.overrides, "override a config key, e.g. --set kf.r=2");
  cmd->add_option("--toggles", f.toggles, "kf,pt,sm,lm subset, 'all' or 'none'");
  cmd->add_option("--seed", f.seed, "seed override");
}

Config load_config(const ConfigFlags& f) {
  Config cfg;
  std::string path = f.path;
  if (path.empty()) {
    if (const char* env = std::getenv("HIERTRACK_CONFIG")) path = env;
  }
  if (!path.empty()) cfg = Config::from_kv(KeyValueFile::load(path));
  for (const auto& o : f.overrides) apply_override(cfg, o);
  if (!f.toggles.empty()) cfg.toggles = Toggles::parse(f.toggles);
  if (f.seed) cfg.seed = f.seed;
  cfg.validate();
  return cfg;
}

// Opens `path` for writing, or falls back to stdout for "" and "-".
class Output {
 public:
  explicit Output(const std::string& path) {
    if (path.empty() || path == "-") return;
    file_.open(path, std::ios::binary);
    if (!file_) throw Error(Errc::IOFailure, "cannot write " + path);
  }
  std::ostream& stream() { return file_.is_open() ? static_cast<std::ostream&>(file_) : std::cout; }
  bool is_stdout() const { return !file_.is_open(); }

 private:
  std::ofstream file_;
};

std::vector<double> parse_grid(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!trim(item).empty()) out.push_back(parse_double(item, "grid"));
  }
  return out;
}

std::vector<synth::Sequence> load_sequences(const std::string& dir) {
  std::vector<synth::Sequence> out;
  for (const auto& scene : synth::load_scene_library(dir)) out.push_back(synth::generate_sequence(scene));
  if (out.empty()) throw Error(Errc::InvalidScene, "no *.scene files in " + dir);
  return out;
}

double percentile(std::vector<double> v, double q) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const auto idx = static_cast<std::size_t>(std::ceil(q * static_cast<double>(v.size()))) - 1;
  return v[std::min(idx, v.size() - 1)];
}

void print_report(std::ostream& os, const Report& r) {
  os << std::fixed << std::setprecision(2) << "AUC      " << r.auc << "\n"
     << "P@20     " << r.precision << "\n"
     << "P_norm   " << r.norm_precision << "\n"
     << "Pr/Re/F  " << std::setprecision(4) << r.f.pr << " / " << r.f.re << " / " << r.f.f << "\n";
  os.unsetf(std::ios::floatfield);
}

int cmd_simulate(const std::string& scene_path, const std::string& out_path, std::optional<std::uint64_t> seed) {
  const synth::Scene scene = synth::load_scene(scene_path);
  Output out(out_path);
  write_simulation(out.stream(), scene, seed);
  return 0;
}

int cmd_track(const std::string& in_path, const ConfigFlags& flags, const std::string& out_path, bool replay,
              bool with_memory, const std::string& latency_path) {
  const Config cfg = load_config(flags);
  const io::Dump in = io::read_dump_file(in_path, &std::cerr);
  Output out(out_path);
  const TrackOutcome t = track_dump(in, cfg, replay, with_memory, out.stream());

  for (const auto& d : t.run.decisions) {
    if (d.track_failure) std::cerr << "frame " << d.frame_index << ": TrackSourceFailure, coarse score kept\n";
  }
  std::vector<double> step_ms;
  for (const auto& ft : t.run.timing) step_ms.push_back(ft.step_ms);
  const double mean = step_ms.empty() ? 0.0 : std::accumulate(step_ms.begin(), step_ms.end(), 0.0) / step_ms.size();

  std::ostream& log = out.is_stdout() ? std::cerr : std::cout;
  log << "frames " << t.run.decisions.size() << " (" << (t.live ? "live" : "replay") << ", tracks "
      << t.track_source << ", toggles " << cfg.toggles.label() << ")\n"
      << "fine_used fraction " << t.run.fine_fraction() << ", track failures " << t.run.track_failures << "\n"
      << "step latency mean " << mean << " ms, p95 " << percentile(step_ms, 0.95) << " ms\n";
  if (!latency_path.empty()) {
    std::ofstream lat(latency_path);
    if (!lat) throw Error(Errc::IOFailure, "cannot write " + latency_path);
    lat << "frame,step_ms,frame_ms\n";
    for (std::size_t i = 0; i < t.run.timing.size(); ++i) {
      lat << i + 1 << "," << t.run.timing[i].step_ms << "," << t.run.timing[i].frame_ms << "\n";
    }
  }
  return 0;
}

int cmd_eval(const std::string& pred_path, const std::string& gt_path, const std::string& out_path) {
  const io::Dump pred = io::read_dump_file(pred_path, &std::cerr);
  const io::Dump gt = io::read_dump_file(gt_path, &std::cerr);
  const Report r = report(align(pred.decisions, gt.gt));
  print_report(out_path.empty() ? std::cout : std::cerr, r);
  if (!out_path.empty()) {
    Output out(out_path);
    io::Writer w(out.stream());
    write_report(w, r);
  }
  return 0;
}

int cmd_ablate(const std::string& dir, const ConfigFlags& flags, const std::string& out_path, int jobs) {
  const Config cfg = load_config(flags);
  const auto seqs = load_sequences(dir);
  const auto combos = all_toggle_combos();
  const auto rows = ablate(seqs, cfg, combos, jobs);

  Output out(out_path);
  io::Writer w(out.stream());
  for (const auto& row : rows) {
    io::Json body{{"scene", row.scene},
                  {"toggles", row.toggles.label()},
                  {"auc", row.metrics.auc},
                  {"precision", row.metrics.precision},
                  {"norm_precision", row.metrics.norm_precision},
                  {"f", row.metrics.f.f},
                  {"fine_used_fraction", row.fine_fraction},
                  {"track_failures", row.track_failures}};
    body["post_reappearance_iou"] = row.post_reappearance_iou ? io::Json(*row.post_reappearance_iou) : io::Json(nullptr);
    io::Json decisions = io::Json::array();
    for (const auto& d : row.decisions) decisions.push_back(io::to_json(d));
    body["decisions"] = std::move(decisions);
    w.record("ablation", body);
  }

  std::ostream& table = out.is_stdout() ? std::cerr : std::cout;
  table << std::left << std::setw(12) << "toggles" << "mean AUC\n";
  for (const auto& t : combos) {
    table << std::setw(12) << t.label() << std::fixed << std::setprecision(2) << mean_auc(rows, t) << "\n";
  }
  return 0;
}

int cmd_sweep(const std::string& dir, const ConfigFlags& flags, const std::string& param_name,
              const std::string& grid_text, const std::string& grid2_text, const std::string& out_path, int jobs) {
  const Config cfg = load_config(flags);
  const SweepParam param = parse_sweep_param(param_name);
  const auto grid = parse_grid(grid_text);
  const auto grid2 = parse_grid(grid2_text);
  if (grid.empty() || (param == SweepParam::Intervals && grid2.empty())) {
    throw Error(Errc::EmptyGrid, "sweep grid is empty");
  }
  const auto seqs = load_sequences(dir);
  const auto rows = sweep(seqs, cfg, param, grid, grid2, jobs);

  Output out(out_path);
  io::Writer w(out.stream());
  for (const auto& r : rows) {
    io::Json body{{"param", sweep_param_name(param)}, {"value", r.value}};
    if (r.value2) body["value2"] = *r.value2;
    body["auc"] = r.auc;
    body["fine_used_fraction"] = r.fine_fraction;
    w.record("sweep", body);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hierarchical proposal selection over synthetic or recorded segmenter output"};
  app.require_subcommand(1);

  std::string scene_path, out_path, in_path, pred_path, gt_path, scenes_dir, latency_path;
  std::string param, grid, grid2;
  std::optional<std::uint64_t> sim_seed;
  bool replay = false, with_memory = false;
  int jobs = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  ConfigFlags track_flags, ablate_flags, sweep_flags;

  auto* sim = app.add_subcommand("simulate", "write a scene's GT, prompt and proposals as a dump");
  sim->add_option("scene", scene_path, "scene file")->required();
  sim->add_option("-o,--out", out_path, "output dump (default stdout)");
  sim->add_option("--seed", sim_seed, "seed override");

  auto* track = app.add_subcommand("track", "run the selector over a dump");
  track->add_option("input", in_path, "input dump")->required();
  track->add_option("-o,--out", out_path, "decision dump (default stdout)");
  track->add_flag("--replay", replay, "use recorded proposals even when the scene is known");
  track->add_flag("--memory", with_memory, "also dump the memory bank after every frame");
  track->add_option("--latency-out", latency_path, "per-frame latency CSV");
  add_config_flags(track, track_flags);

  auto* eval = app.add_subcommand("eval", "score a decision dump against GT records");
  eval->add_option("pred", pred_path, "decision dump")->required();
  eval->add_option("gt", gt_path, "dump with gt records")->required();
  eval->add_option("-o,--out", out_path, "metrics record output");

  auto* abl = app.add_subcommand("ablate", "all 16 toggle combinations over a scene library");
  abl->add_option("scenes", scenes_dir, "directory of *.scene files")->required();
  abl->add_option("-o,--out", out_path, "ablation dump (default stdout)");
  abl->add_option("-j,--jobs", jobs, "worker threads");
  add_config_flags(abl, ablate_flags);

  auto* swp = app.add_subcommand("sweep", "AUC over a parameter grid");
  swp->add_option("scenes", scenes_dir, "directory of *.scene files")->required();
  swp->add_option("--param", param, "pt_frames, tau or intervals")->required();
  swp->add_option("--grid", grid, "comma-separated values (k_lm for intervals)")->required();
  swp->add_option("--grid2", grid2, "k_sm values for intervals");
  swp->add_option("-o,--out", out_path, "sweep dump (default stdout)");
  swp->add_option("-j,--jobs", jobs, "worker threads");
  add_config_flags(swp, sweep_flags);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kInputError;
  }

  try {
    if (*sim) return cmd_simulate(scene_path, out_path, sim_seed);
    if (*track) return cmd_track(in_path, track_flags, out_path, replay, with_memory, latency_path);
    if (*eval) return cmd_eval(pred_path, gt_path, out_path);
    if (*abl) return cmd_ablate(scenes_dir, ablate_flags, out_path, jobs);
    if (*swp) return cmd_sweep(scenes_dir, sweep_flags, param, grid, grid2, out_path, jobs);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    const bool schema = e.code() == Errc::SchemaVersionMismatch || e.code() == Errc::ParseError;
    return schema ? kSchemaError : kInputError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInputError;
  }
  return 0;
}
