#include "hiertrack/config.hpp"

#include <functional>
#include <map>
#include <sstream>

#include "hiertrack/error.hpp"

namespace hiertrack {

Toggles Toggles::parse(const std::string& text) {
  const std::string t = trim(text);
  if (t == "all") return Toggles{};
  Toggles out{false, false, false, false};
  if (t == "none" || t.empty()) return out;
  std::stringstream ss(t);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    for (char& ch : item) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
    if (item == "kf") {
      out.kf = true;
    } else if (item == "pt") {
      out.pt = true;
    } else if (item == "sm") {
      out.sm = true;
    } else if (item == "lm") {
      out.lm = true;
    } else {
      throw Error(Errc::InvalidConfig, "unknown toggle '" + item + "'");
    }
  }
  return out;
}

std::string Toggles::label() const {
  std::string out;
  auto add = [&](bool on, const char* name) {
    if (!on) return;
    if (!out.empty()) out += ",";
    out += name;
  };
  add(kf, "kf");
  add(pt, "pt");
  add(sm, "sm");
  add(lm, "lm");
  return out.empty() ? "none" : out;
}

namespace {

using Setter = std::function<void(Config&, const std::string&)>;
using Getter = std::function<std::string(const Config&)>;

struct Field {
  Setter set;
  Getter get;
};

template <typename T>
Field real(T Config::*group, double T::*member) {
  return {[=](Config& c, const std::string& v) { (c.*group).*member = parse_double(v, "config"); },
          [=](const Config& c) { return format_double((c.*group).*member); }};
}

template <typename T>
Field integer(T Config::*group, int T::*member) {
  return {[=](Config& c, const std::string& v) { (c.*group).*member = static_cast<int>(parse_long(v, "config")); },
          [=](const Config& c) { return std::to_string((c.*group).*member); }};
}

Field kalman(double KalmanConfig::*member) {
  return {[=](Config& c, const std::string& v) { c.selector.kf.*member = parse_double(v, "config"); },
          [=](const Config& c) { return format_double(c.selector.kf.*member); }};
}

Field fine_real(double FineConfig::*member) {
  return {[=](Config& c, const std::string& v) { c.selector.fine.*member = parse_double(v, "config"); },
          [=](const Config& c) { return format_double(c.selector.fine.*member); }};
}

Field fine_int(int FineConfig::*member) {
  return {[=](Config& c, const std::string& v) { c.selector.fine.*member = static_cast<int>(parse_long(v, "config")); },
          [=](const Config& c) { return std::to_string(c.selector.fine.*member); }};
}

const std::vector<std::pair<std::string, Field>>& fields() {
  static const std::vector<std::pair<std::string, Field>> table = {
      {"alpha", real(&Config::selector, &SelectorConfig::alpha)},
      {"beta", real(&Config::selector, &SelectorConfig::beta)},
      {"tau", real(&Config::selector, &SelectorConfig::tau)},
      {"visibility_floor", real(&Config::selector, &SelectorConfig::visibility_floor)},
      {"kf_update_floor",
       {[](Config& c, const std::string& v) {
          if (trim(v) == "tau") {
            c.selector.kf_update_floor.reset();
          } else {
            c.selector.kf_update_floor = parse_double(v, "kf_update_floor");
          }
        },
        [](const Config& c) {
          return c.selector.kf_update_floor ? format_double(*c.selector.kf_update_floor) : std::string("tau");
        }}},
      {"n_points", fine_int(&FineConfig::n_points)},
      {"pt_frames", fine_int(&FineConfig::pt_frames)},
      {"rbf_level", fine_real(&FineConfig::rbf_level)},
      {"sigma_scale", fine_real(&FineConfig::sigma_scale)},
      {"sigma_floor", fine_real(&FineConfig::sigma_floor)},
      {"theta_iou", real(&Config::memory, &MemoryConfig::theta_iou)},
      {"theta_motion", real(&Config::memory, &MemoryConfig::theta_motion)},
      {"theta_dist", real(&Config::memory, &MemoryConfig::theta_dist)},
      {"n_sm", integer(&Config::memory, &MemoryConfig::n_sm)},
      {"n_lm", integer(&Config::memory, &MemoryConfig::n_lm)},
      {"k_sm", integer(&Config::memory, &MemoryConfig::k_sm)},
      {"k_lm", integer(&Config::memory, &MemoryConfig::k_lm)},
      {"kf.q_pos", kalman(&KalmanConfig::q_pos)},
      {"kf.q_size", kalman(&KalmanConfig::q_size)},
      {"kf.r", kalman(&KalmanConfig::r)},
      {"kf.p0_pos", kalman(&KalmanConfig::p0_pos)},
      {"kf.p0_vel", kalman(&KalmanConfig::p0_vel)},
      {"kf.min_box_size", kalman(&KalmanConfig::min_box_size)},
      {"seed",
       {[](Config& c, const std::string& v) {
          if (trim(v) == "scene") {
            c.seed.reset();
          } else {
            c.seed = static_cast<std::uint64_t>(parse_long(v, "seed"));
          }
        },
        [](const Config& c) { return c.seed ? std::to_string(*c.seed) : std::string("scene"); }}},
      {"toggles",
       {[](Config& c, const std::string& v) { c.toggles = Toggles::parse(v); },
        [](const Config& c) { return c.toggles.label(); }}},
  };
  return table;
}

const Field& field(const std::string& key) {
  for (const auto& [name, f] : fields()) {
    if (name == key) return f;
  }
  throw Error(Errc::InvalidConfig, "unknown config key '" + key + "'");
}

}  // namespace

Config Config::from_kv(const KeyValueFile& kv, Config base) {
  for (const auto& [key, value] : kv.entries()) {
    try {
      field(key).set(base, value);
    } catch (const Error& e) {
      if (e.code() == Errc::ParseError) throw Error(Errc::InvalidConfig, e.what());
      throw;
    }
  }
  base.validate();
  return base;
}

KeyValueFile Config::to_kv() const {
  KeyValueFile kv;
  for (const auto& [name, f] : fields()) kv.set(name, f.get(*this));
  return kv;
}

void Config::validate() const {
  auto fail = [](const std::string& why) { throw Error(Errc::InvalidConfig, why); };
  const auto& s = selector;
  if (s.alpha < 0.0 || s.beta < 0.0 || s.alpha + s.beta > 1.0) fail("need alpha, beta >= 0 and alpha + beta <= 1");
  if (s.tau < 0.0 || s.tau > 1.0) fail("tau must lie in [0, 1]");
  if (s.fine.n_points < 1) fail("n_points must be >= 1");
  if (s.fine.pt_frames < 1) fail("pt_frames must be >= 1");
  if (!(s.fine.sigma_floor > 0.0) || s.fine.sigma_scale < 0.0) fail("rbf bandwidth must be positive");
  if (memory.n_sm < 1 || memory.n_lm < 1) fail("memory capacities must be >= 1");
  if (memory.k_sm < 1 || memory.k_lm < 1) fail("memory intervals must be >= 1");
  if (s.kf.min_box_size <= 0.0) fail("kf.min_box_size must be positive");
  if (s.kf.q_pos < 0.0 || s.kf.q_size < 0.0 || s.kf.r < 0.0 || s.kf.p0_pos < 0.0 || s.kf.p0_vel < 0.0) {
    fail("Kalman noise terms must be non-negative");
  }
}

SelectorConfig Config::effective_selector() const {
  SelectorConfig s = selector;
  if (!toggles.kf) s.alpha = 0.0;
  if (!toggles.pt) {
    s.beta = 0.0;
    s.fine_enabled = false;
  }
  // The filter still runs for the motion gate of the memory bank.
  s.motion_enabled = toggles.kf || toggles.sm || toggles.lm;
  return s;
}

MemoryConfig Config::effective_memory() const {
  MemoryConfig m = memory;
  m.short_filtered = toggles.sm;
  m.long_enabled = toggles.lm;
  return m;
}

void apply_override(Config& cfg, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos) throw Error(Errc::InvalidConfig, "override needs key=value: " + assignment);
  KeyValueFile kv;
  kv.set(trim(assignment.substr(0, eq)), trim(assignment.substr(eq + 1)));
  cfg = Config::from_kv(kv, cfg);
}

}  // namespace hiertrack
