#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace spdlm::io {

/// Fixed 17-significant-digit rendering, e.g. "1.0000000000000000e+00".
[[nodiscard]] std::string format_real(double value);

/// Joins already formatted fields with commas.
[[nodiscard]] std::string join_csv(const std::vector<std::string>& fields);

/// Splits a CSV row on commas (no quoting; all fields here are numeric).
[[nodiscard]] std::vector<std::string> split_csv(std::string_view row);

}  // namespace spdlm::io
