#pragma once

#include <string>
#include <string_view>

namespace cometa {

/// Lower-case hex SHA-256 of `data`.
std::string sha256_hex(std::string_view data);

/// Shortest decimal text that reads back to the same double.
std::string format_double(double value);

}  // namespace cometa
