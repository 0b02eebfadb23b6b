#include "spdlm/io.hpp"

#include <cstdio>

namespace spdlm::io {

std::string format_real(double value) {
    char buffer[40];
    const int n = std::snprintf(buffer, sizeof buffer, "%.16e", value);
    return std::string(buffer, static_cast<std::size_t>(n));
}

std::string join_csv(const std::vector<std::string>& fields) {
    std::string out;
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i != 0) {
            out += ',';
        }
        out += fields[i];
    }
    return out;
}

std::vector<std::string> split_csv(std::string_view row) {
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
        const auto comma = row.find(',', start);
        fields.emplace_back(row.substr(start, comma == std::string_view::npos ? row.npos : comma - start));
        if (comma == std::string_view::npos) {
            break;
        }
        start = comma + 1;
    }
    return fields;
}

}  // namespace spdlm::io
