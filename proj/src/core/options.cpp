#include "options.hpp"

#include <charconv>
#include <cmath>

#include "error.hpp"
#include "raw_io.hpp"

namespace spa {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

[[noreturn]] void bad_value(std::string_view key, std::string_view value, std::string_view expected) {
  throw ConfigError("option '" + std::string(key) + "': '" + std::string(value) + "' is not " + std::string(expected));
}

template <class T>
T parse_number(std::string_view key, std::string_view text, std::string_view expected) {
  text = trim(text);
  T value{};
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (text.empty() || ec != std::errc{} || ptr != end) bad_value(key, text, expected);
  return value;
}

}  // namespace

std::vector<double> parse_real_list(std::string_view text, std::string_view what) {
  std::vector<double> out;
  text = trim(text);
  if (text.empty()) return out;
  while (true) {
    const auto comma = text.find(',');
    const double v = parse_number<double>(what, text.substr(0, comma), "a list of numbers");
    if (!std::isfinite(v)) bad_value(what, text, "a list of finite numbers");
    out.push_back(v);
    if (comma == std::string_view::npos) break;
    text = text.substr(comma + 1);
  }
  return out;
}

void Options::set(std::string key, std::string value) {
  const auto k = trim(key);
  if (k.empty()) throw ConfigError("empty option key");
  values_[std::string(k)] = std::string(trim(value));
}

void Options::load_file(const std::filesystem::path& path) {
  std::string text;
  try {
    text = raw_io::read_file(path);
  } catch (const DataError&) {
    throw ConfigError("cannot read config file " + path.string());
  }
  parse(text, path.string());
}

void Options::parse(std::string_view text, std::string_view origin) {
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos || trim(line.substr(0, eq)).empty()) {
      throw ConfigError(std::string(origin) + ":" + std::to_string(line_no) + ": expected 'key = value'");
    }
    set(std::string(line.substr(0, eq)), std::string(line.substr(eq + 1)));
  }
}

bool Options::has(std::string_view key) const { return values_.find(key) != values_.end(); }

std::optional<std::string> Options::find(std::string_view key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return std::nullopt;
  return it->second;
}

std::string Options::get_string(std::string_view key, std::string fallback) const {
  return find(key).value_or(std::move(fallback));
}

std::string Options::require_string(std::string_view key) const {
  auto v = find(key);
  if (!v || v->empty()) throw ConfigError("missing required option '" + std::string(key) + "'");
  return *v;
}

double Options::get_double(std::string_view key, double fallback) const {
  const auto v = find(key);
  if (!v) return fallback;
  const double d = parse_number<double>(key, *v, "a number");
  if (!std::isfinite(d)) bad_value(key, *v, "a finite number");
  return d;
}

std::int64_t Options::get_int(std::string_view key, std::int64_t fallback) const {
  const auto v = find(key);
  if (!v) return fallback;
  return parse_number<std::int64_t>(key, *v, "an integer");
}

std::uint64_t Options::get_u64(std::string_view key, std::uint64_t fallback) const {
  const auto v = find(key);
  if (!v) return fallback;
  std::string_view t = trim(*v);
  // Scientific notation such as 1e6 is convenient for photon counts.
  if (t.find_first_of("eE.") != std::string_view::npos) {
    const double d = parse_number<double>(key, t, "a non-negative integer");
    if (!(d >= 0.0) || d != std::floor(d) || d > 1.8e19) bad_value(key, t, "a non-negative integer");
    return static_cast<std::uint64_t>(d);
  }
  return parse_number<std::uint64_t>(key, t, "a non-negative integer");
}

bool Options::get_bool(std::string_view key, bool fallback) const {
  const auto v = find(key);
  if (!v) return fallback;
  if (*v == "1" || *v == "true" || *v == "yes" || *v == "on") return true;
  if (*v == "0" || *v == "false" || *v == "no" || *v == "off") return false;
  bad_value(key, *v, "a boolean");
}

std::vector<double> Options::get_list(std::string_view key, std::vector<double> fallback) const {
  const auto v = find(key);
  if (!v) return fallback;
  return parse_real_list(*v, key);
}

void Options::require_known(std::initializer_list<std::string_view> allowed, std::string_view command) const {
  for (const auto& [key, value] : values_) {
    bool known = false;
    for (auto a : allowed) known = known || a == key;
    if (!known) throw ConfigError(std::string(command) + ": unknown option '" + key + "'");
  }
}

}  // namespace spa
