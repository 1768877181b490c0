#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "hiertrack/kv_file.hpp"
#include "hiertrack/memory_bank.hpp"
#include "hiertrack/selector.hpp"

namespace hiertrack {

/// Ablation switches: KF off forces alpha = 0; PT off forces beta = 0 and
/// disables escalation; SM off keeps only the latest frame, unfiltered; LM off
/// leaves the long bank empty.
struct Toggles {
  bool kf = true;
  bool pt = true;
  bool sm = true;
  bool lm = true;

  /// "all", "none", or a comma list such as "kf,sm".
  static Toggles parse(const std::string& text);
  std::string label() const;

  friend bool operator==(const Toggles&, const Toggles&) = default;
};

struct Config {
  SelectorConfig selector;
  MemoryConfig memory;
  std::optional<std::uint64_t> seed;  // unset: use the scene's seed
  Toggles toggles;

  /// Unknown keys are rejected; keys absent from `kv` keep their defaults.
  static Config from_kv(const KeyValueFile& kv, Config base = {});
  KeyValueFile to_kv() const;
  /// Throws InvalidConfig.
  void validate() const;

  /// Selector settings after applying the toggles.
  SelectorConfig effective_selector() const;
  MemoryConfig effective_memory() const;
};

/// Applies a single `key=value` override.
void apply_override(Config& cfg, const std::string& assignment);

}  // namespace hiertrack
