#include "hiertrack/kv_file.hpp"

#include <algorithm>
#include <cerrno>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "hiertrack/error.hpp"

namespace hiertrack {

std::string trim(std::string_view text) {
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = text.find_last_not_of(" \t\r\n");
  return std::string(text.substr(first, last - first + 1));
}

std::vector<std::string> split_ws(std::string_view text) {
  std::vector<std::string> out;
  std::istringstream in{std::string(text)};
  std::string tok;
  while (in >> tok) out.push_back(tok);
  return out;
}

KeyValueFile KeyValueFile::parse(std::string_view text) {
  KeyValueFile kv;
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const std::string t = trim(line);
    if (t.empty()) continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      throw Error(Errc::ParseError, "line " + std::to_string(lineno) + ": expected key = value");
    }
    std::string key = trim(std::string_view(t).substr(0, eq));
    if (key.empty()) throw Error(Errc::ParseError, "line " + std::to_string(lineno) + ": empty key");
    kv.set(std::move(key), trim(std::string_view(t).substr(eq + 1)));
  }
  return kv;
}

KeyValueFile KeyValueFile::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::IOFailure, "cannot open " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

void KeyValueFile::set(std::string key, std::string value) {
  auto it = std::find_if(entries_.begin(), entries_.end(), [&](const Entry& e) { return e.first == key; });
  if (it != entries_.end()) {
    it->second = std::move(value);
  } else {
    entries_.emplace_back(std::move(key), std::move(value));
  }
}

std::optional<std::string> KeyValueFile::get(std::string_view key) const {
  auto it = std::find_if(entries_.begin(), entries_.end(), [&](const Entry& e) { return e.first == key; });
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

std::vector<KeyValueFile::Entry> KeyValueFile::with_prefix(std::string_view prefix) const {
  std::vector<Entry> out;
  for (const Entry& e : entries_) {
    if (std::string_view(e.first).substr(0, prefix.size()) == prefix) out.push_back(e);
  }
  return out;
}

std::string KeyValueFile::dump() const {
  std::string out;
  for (const auto& [k, v] : entries_) out += k + " = " + v + "\n";
  return out;
}

double parse_double(std::string_view text, std::string_view what) {
  const std::string s = trim(text);
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size() || errno == ERANGE || !std::isfinite(v)) {
    throw Error(Errc::ParseError, std::string(what) + ": not a finite number: '" + s + "'");
  }
  return v;
}

long parse_long(std::string_view text, std::string_view what) {
  const std::string s = trim(text);
  long v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) {
    throw Error(Errc::ParseError, std::string(what) + ": not an integer: '" + s + "'");
  }
  return v;
}

bool parse_bool(std::string_view text, std::string_view what) {
  const std::string s = trim(text);
  if (s == "1" || s == "true" || s == "on" || s == "yes") return true;
  if (s == "0" || s == "false" || s == "off" || s == "no") return false;
  throw Error(Errc::ParseError, std::string(what) + ": not a boolean: '" + s + "'");
}

std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

}  // namespace hiertrack
