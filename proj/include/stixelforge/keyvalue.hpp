#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "stixelforge/core.hpp"

namespace stixelforge::kv {

struct Entry {
  std::string key;
  std::string value;
  int line = 0;
};

/// Flat `key = value` text. Blank lines and `#` comments are ignored; keys may
/// repeat (repeated keys form lists, kept in file order).
class Document {
 public:
  Document() = default;
  explicit Document(std::vector<Entry> entries) : entries_(std::move(entries)) {}

  static Document parse(std::string_view text);

  const std::vector<Entry>& entries() const noexcept { return entries_; }

  /// Last value for `key`, if any.
  const Entry* find(std::string_view key) const;
  std::vector<const Entry*> all(std::string_view key) const;

  std::optional<double> get_double(std::string_view key) const;
  std::optional<long long> get_int(std::string_view key) const;
  std::optional<std::string> get_string(std::string_view key) const;

  void set(std::string key, std::string value);

 private:
  std::vector<Entry> entries_;
};

/// Whitespace separated numbers. Throws Errc::ParseError (with `line`) on junk.
std::vector<double> parse_numbers(std::string_view text, int line = 0);
double parse_double(std::string_view text, int line = 0);
long long parse_int(std::string_view text, int line = 0);

}  // namespace stixelforge::kv
