#pragma once

#include <charconv>
#include <cmath>
#include <string>
#include <string_view>
#include <system_error>

namespace nlsim {

/// Shortest round-trip decimal form of a double; non-finite values become JSON null.
inline std::string format_double(double v) {
  if (!std::isfinite(v)) return "null";
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc{}) return "null";
  return std::string(buf, ptr);
}

/// Builds one flat JSON object with keys in insertion order.
class NdjsonLine {
 public:
  NdjsonLine& add(std::string_view key, double v) {
    open(key);
    out_ += format_double(v);
    return *this;
  }
  NdjsonLine& add(std::string_view key, bool v) {
    open(key);
    out_ += v ? "true" : "false";
    return *this;
  }
  NdjsonLine& add(std::string_view key, std::string_view v) {
    open(key);
    out_ += '"';
    for (char c : v) {
      if (c == '"' || c == '\\') out_ += '\\';
      out_ += c;
    }
    out_ += '"';
    return *this;
  }
  NdjsonLine& add(std::string_view key, const char* v) { return add(key, std::string_view(v)); }
  std::string str() const { return out_ + "}"; }

 private:
  void open(std::string_view key) {
    out_ += out_.size() == 1 ? "\"" : ",\"";
    out_ += key;
    out_ += "\":";
  }
  std::string out_ = "{";
};

}  // namespace nlsim
