#include <openssl/evp.h>

#include <array>
#include <charconv>
#include <cstdio>

#include "cometa/date.hpp"
#include "cometa/digest.hpp"
#include "cometa/error.hpp"

namespace cometa {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kNotFound: return "not-found";
    case ErrorKind::kConfiguration: return "configuration";
    case ErrorKind::kInvalidInput: return "invalid-input";
    case ErrorKind::kRetryable: return "retryable";
    case ErrorKind::kEmptyCorpus: return "empty-corpus";
    case ErrorKind::kDegenerateGraph: return "degenerate-graph";
    case ErrorKind::kIo: return "io";
  }
  return "unknown";
}

Date::Date(int year, unsigned month, unsigned day)
    : days_(std::chrono::year{year} / std::chrono::month{month} / std::chrono::day{day}) {}

std::optional<Date> Date::parse(std::string_view text) {
  if (text.size() > 10 && text[10] == 'T') text = text.substr(0, 10);
  if (text.size() != 10 || text[4] != '-' || text[7] != '-') return std::nullopt;
  auto number = [&](std::size_t pos, std::size_t len, int& out) {
    const auto* first = text.data() + pos;
    const auto* last = first + len;
    for (const auto* p = first; p != last; ++p) {
      if (*p < '0' || *p > '9') return false;
    }
    return std::from_chars(first, last, out).ec == std::errc{};
  };
  int y = 0, m = 0, d = 0;
  if (!number(0, 4, y) || !number(5, 2, m) || !number(8, 2, d)) return std::nullopt;
  const std::chrono::year_month_day ymd{std::chrono::year{y},
                                        std::chrono::month{static_cast<unsigned>(m)},
                                        std::chrono::day{static_cast<unsigned>(d)}};
  if (!ymd.ok()) return std::nullopt;
  return Date(std::chrono::sys_days(ymd));
}

Date Date::today() {
  return Date(std::chrono::floor<std::chrono::days>(std::chrono::system_clock::now()));
}

std::string Date::to_string() const {
  const std::chrono::year_month_day ymd(days_);
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
  return buf;
}

std::string sha256_hex(std::string_view data) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
  unsigned int len = 0;
  EVP_Digest(data.data(), data.size(), md.data(), &len, EVP_sha256(), nullptr);
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(len * 2);
  for (unsigned int i = 0; i < len; ++i) {
    out += kHex[md[i] >> 4];
    out += kHex[md[i] & 0xF];
  }
  return out;
}

std::string format_double(double value) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, res.ptr);
}

}  // namespace cometa
