#pragma once

#include "convarb/error.hpp"

#include <json.hpp>

#include <string>

namespace convarb::detail {

using ojson = nlohmann::ordered_json;

inline std::string line_context(const std::string& text, std::size_t byte) {
    std::size_t line = 1, start = 0;
    for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
        if (text[i] == '\n') {
            ++line;
            start = i + 1;
        }
    }
    std::size_t end = text.find('\n', start);
    if (end == std::string::npos) end = text.size();
    const std::size_t col = byte >= start ? byte - start + 1 : 1;
    return "line " + std::to_string(line) + ", column " + std::to_string(col) + ": " + text.substr(start, end - start);
}

/// Parses JSON, converting syntax errors into DomainError with line context.
inline ojson parse_json(const std::string& text, const std::string& what) {
    try {
        return ojson::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw DomainError(what + " parse error at " + line_context(text, e.byte == 0 ? 0 : e.byte - 1) + " (" +
                          e.what() + ")");
    }
}

}  // namespace convarb::detail
