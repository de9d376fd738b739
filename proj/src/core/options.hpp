#pragma once

#include <cstdint>
#include <filesystem>
#include <initializer_list>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace spa {

/// Flat string key-value configuration. Files use one `key = value` per
/// line; `#` starts a comment. Typed getters throw ConfigError on malformed
/// values.
class Options {
 public:
  void set(std::string key, std::string value);
  void load_file(const std::filesystem::path& path);
  void parse(std::string_view text, std::string_view origin = "<text>");

  bool has(std::string_view key) const;
  std::optional<std::string> find(std::string_view key) const;

  std::string get_string(std::string_view key, std::string fallback) const;
  std::string require_string(std::string_view key) const;
  double get_double(std::string_view key, double fallback) const;
  std::int64_t get_int(std::string_view key, std::int64_t fallback) const;
  std::uint64_t get_u64(std::string_view key, std::uint64_t fallback) const;
  bool get_bool(std::string_view key, bool fallback) const;
  /// Comma-separated reals.
  std::vector<double> get_list(std::string_view key, std::vector<double> fallback) const;

  /// ConfigError naming the first key not in `allowed`.
  void require_known(std::initializer_list<std::string_view> allowed, std::string_view command) const;

  const std::map<std::string, std::string, std::less<>>& values() const noexcept { return values_; }

 private:
  std::map<std::string, std::string, std::less<>> values_;
};

std::vector<double> parse_real_list(std::string_view text, std::string_view what);

}  // namespace spa
