#pragma once

#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>

#include <json.hpp>

#include "lightcast/errors.hpp"

namespace lightcast {

// Minimal TOML reader covering what run configs need: [dotted.tables],
// key = value with bare or quoted keys, dotted keys, strings, integers,
// floats, booleans and (possibly multiline) homogeneous arrays. No date
// types and no inline tables; quote timestamps as strings instead.

namespace toml_detail {

inline void fail(std::size_t line, const std::string& what) {
    throw IoError("toml line " + std::to_string(line) + ": " + what);
}

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

inline std::string_view strip_comment(std::string_view s) {
    bool in_string = false;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] == '"' && (i == 0 || s[i - 1] != '\\')) in_string = !in_string;
        if (s[i] == '#' && !in_string) return s.substr(0, i);
    }
    return s;
}

inline std::string parse_basic_string(std::string_view text, std::size_t line) {
    if (text.size() < 2 || text.front() != '"' || text.back() != '"')
        fail(line, "expected a double-quoted string");
    std::string out;
    for (std::size_t i = 1; i + 1 < text.size(); ++i) {
        char c = text[i];
        if (c == '\\') {
            if (i + 2 >= text.size() + 1) fail(line, "dangling escape");
            ++i;
            switch (text[i]) {
                case 'n': c = '\n'; break;
                case 't': c = '\t'; break;
                case 'r': c = '\r'; break;
                case '"': c = '"'; break;
                case '\\': c = '\\'; break;
                default: fail(line, "unsupported escape sequence");
            }
        }
        out.push_back(c);
    }
    return out;
}

inline nlohmann::json parse_scalar(std::string_view text, std::size_t line) {
    text = trim(text);
    if (text.empty()) fail(line, "missing value");
    if (text.front() == '"') return parse_basic_string(text, line);
    if (text == "true") return true;
    if (text == "false") return false;
    {
        std::int64_t i = 0;
        const auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), i);
        if (ec == std::errc() && p == text.data() + text.size()) return i;
    }
    {
        double d = 0;
        const auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), d);
        if (ec == std::errc() && p == text.data() + text.size()) return d;
    }
    fail(line, "cannot parse value '" + std::string(text) + "'");
    return {};
}

inline nlohmann::json parse_value(std::string_view text, std::size_t line) {
    text = trim(text);
    if (!text.empty() && text.front() == '[') {
        if (text.back() != ']') fail(line, "unterminated array");
        nlohmann::json arr = nlohmann::json::array();
        std::string_view body = text.substr(1, text.size() - 2);
        std::size_t start = 0;
        bool in_string = false;
        int depth = 0;
        for (std::size_t i = 0; i <= body.size(); ++i) {
            const bool at_end = i == body.size();
            const char c = at_end ? ',' : body[i];
            if (!at_end && c == '"' && (i == 0 || body[i - 1] != '\\')) in_string = !in_string;
            if (!in_string && c == '[') ++depth;
            if (!in_string && c == ']') --depth;
            if (c == ',' && !in_string && depth == 0) {
                const auto piece = trim(body.substr(start, i - start));
                if (!piece.empty()) arr.push_back(parse_value(piece, line));
                start = i + 1;
            }
        }
        return arr;
    }
    return parse_scalar(text, line);
}

inline std::vector<std::string> split_key_path(std::string_view key, std::size_t line) {
    std::vector<std::string> parts;
    std::string current;
    bool in_string = false;
    for (char c : key) {
        if (c == '"') {
            in_string = !in_string;
            continue;
        }
        if (c == '.' && !in_string) {
            parts.push_back(std::string(trim(current)));
            current.clear();
            continue;
        }
        current.push_back(c);
    }
    parts.push_back(std::string(trim(current)));
    for (const auto& p : parts)
        if (p.empty()) fail(line, "empty key segment");
    return parts;
}

} // namespace toml_detail

inline nlohmann::json parse_toml(const std::string& text) {
    nlohmann::json root = nlohmann::json::object();
    nlohmann::json* table = &root;

    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string_view view = toml_detail::trim(toml_detail::strip_comment(line));
        if (view.empty()) continue;

        if (view.front() == '[') {
            if (view.back() != ']') toml_detail::fail(line_no, "unterminated table header");
            const auto path = toml_detail::split_key_path(view.substr(1, view.size() - 2), line_no);
            table = &root;
            for (const auto& part : path) table = &(*table)[part];
            if (!table->is_object() && !table->is_null())
                toml_detail::fail(line_no, "table redefines a value");
            continue;
        }

        const auto eq = [&] {
            bool in_string = false;
            for (std::size_t i = 0; i < view.size(); ++i) {
                if (view[i] == '"') in_string = !in_string;
                if (view[i] == '=' && !in_string) return i;
            }
            return std::string_view::npos;
        }();
        if (eq == std::string_view::npos) toml_detail::fail(line_no, "expected 'key = value'");

        std::string value_text(toml_detail::trim(view.substr(eq + 1)));
        // multiline array: keep consuming lines until the brackets balance
        auto unbalanced = [](const std::string& s) {
            int depth = 0;
            bool in_string = false;
            for (std::size_t i = 0; i < s.size(); ++i) {
                if (s[i] == '"' && (i == 0 || s[i - 1] != '\\')) in_string = !in_string;
                if (in_string) continue;
                if (s[i] == '[') ++depth;
                if (s[i] == ']') --depth;
            }
            return depth > 0;
        };
        while (unbalanced(value_text)) {
            std::string more;
            if (!std::getline(in, more)) toml_detail::fail(line_no, "unterminated array");
            ++line_no;
            value_text += ' ';
            value_text += std::string(toml_detail::trim(toml_detail::strip_comment(more)));
        }

        const auto path = toml_detail::split_key_path(toml_detail::trim(view.substr(0, eq)), line_no);
        nlohmann::json* slot = table;
        for (std::size_t i = 0; i + 1 < path.size(); ++i) slot = &(*slot)[path[i]];
        (*slot)[path.back()] = toml_detail::parse_value(value_text, line_no);
    }
    return root;
}

inline nlohmann::json load_toml(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return parse_toml(text);
}

} // namespace lightcast
