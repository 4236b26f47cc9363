#include "stixelforge/keyvalue.hpp"

#include <charconv>
#include <cmath>

namespace stixelforge::kv {
namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

[[noreturn]] void parse_fail(int line, const std::string& what) {
  raise(Errc::ParseError, (line > 0 ? "line " + std::to_string(line) + ": " : std::string()) + what);
}

}  // namespace

Document Document::parse(std::string_view text) {
  std::vector<Entry> entries;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) parse_fail(line_no, "expected key = value");
    const auto key = trim(line.substr(0, eq));
    if (key.empty()) parse_fail(line_no, "empty key");
    entries.push_back(Entry{std::string(key), std::string(trim(line.substr(eq + 1))), line_no});
  }
  return Document(std::move(entries));
}

const Entry* Document::find(std::string_view key) const {
  for (auto it = entries_.rbegin(); it != entries_.rend(); ++it) {
    if (it->key == key) return &*it;
  }
  return nullptr;
}

std::vector<const Entry*> Document::all(std::string_view key) const {
  std::vector<const Entry*> out;
  for (const auto& e : entries_) {
    if (e.key == key) out.push_back(&e);
  }
  return out;
}

std::optional<double> Document::get_double(std::string_view key) const {
  const auto* e = find(key);
  if (!e) return std::nullopt;
  return parse_double(e->value, e->line);
}

std::optional<long long> Document::get_int(std::string_view key) const {
  const auto* e = find(key);
  if (!e) return std::nullopt;
  return parse_int(e->value, e->line);
}

std::optional<std::string> Document::get_string(std::string_view key) const {
  const auto* e = find(key);
  if (!e) return std::nullopt;
  return e->value;
}

void Document::set(std::string key, std::string value) {
  entries_.push_back(Entry{std::move(key), std::move(value), 0});
}

double parse_double(std::string_view text, int line) {
  text = trim(text);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty()) {
    parse_fail(line, "not a number: '" + std::string(text) + "'");
  }
  if (!std::isfinite(v)) parse_fail(line, "non-finite number");
  return v;
}

long long parse_int(std::string_view text, int line) {
  text = trim(text);
  long long v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty()) {
    parse_fail(line, "not an integer: '" + std::string(text) + "'");
  }
  return v;
}

std::vector<double> parse_numbers(std::string_view text, int line) {
  std::vector<double> out;
  std::size_t pos = 0;
  while (pos < text.size()) {
    const auto start = text.find_first_not_of(" \t\r\n", pos);
    if (start == std::string_view::npos) break;
    auto end = text.find_first_of(" \t\r\n", start);
    if (end == std::string_view::npos) end = text.size();
    out.push_back(parse_double(text.substr(start, end - start), line));
    pos = end;
  }
  return out;
}

}  // namespace stixelforge::kv
