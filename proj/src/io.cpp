#include "lamtrack/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "lamtrack/errors.hpp"

namespace lamtrack {

std::string format_real(double x, int digits) {
    if (!std::isfinite(x)) return "null";
    if (x == 0) return "0";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", digits, x);
    return buf;
}

namespace {

void dump(const nlohmann::json& j, int indent, std::string& out) {
    std::string pad(indent + 2, ' '), close(indent, ' ');
    switch (j.type()) {
        case nlohmann::json::value_t::object: {
            if (j.empty()) {
                out += "{}";
                return;
            }
            out += "{\n";
            bool first = true;
            for (auto it = j.begin(); it != j.end(); ++it) {
                if (!first) out += ",\n";
                first = false;
                out += pad + nlohmann::json(it.key()).dump() + ": ";
                dump(it.value(), indent + 2, out);
            }
            out += "\n" + close + "}";
            return;
        }
        case nlohmann::json::value_t::array: {
            if (j.empty()) {
                out += "[]";
                return;
            }
            bool flat = true;
            for (const auto& x : j) flat = flat && !x.is_structured();
            if (flat) {
                out += "[";
                for (size_t i = 0; i < j.size(); ++i) {
                    if (i) out += ", ";
                    dump(j[i], indent + 2, out);
                }
                out += "]";
                return;
            }
            out += "[\n";
            for (size_t i = 0; i < j.size(); ++i) {
                if (i) out += ",\n";
                out += pad;
                dump(j[i], indent + 2, out);
            }
            out += "\n" + close + "]";
            return;
        }
        case nlohmann::json::value_t::number_float: out += format_real(j.get<double>()); return;
        default: out += j.dump(); return;
    }
}

}  // namespace

std::string canonical_dump(const nlohmann::json& j) {
    std::string out;
    dump(j, 0, out);
    out += "\n";
    return out;
}

nlohmann::json parse_json(const std::string& text, const std::string& name) {
    try {
        return nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        size_t line = 1, col = 1;
        for (size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
            if (text[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
        throw ParseError(name + ":" + std::to_string(line) + ":" + std::to_string(col) + ": malformed JSON");
    }
}

nlohmann::json read_json_file(const std::string& path) {
    std::stringstream ss;
    if (path == "-") {
        ss << std::cin.rdbuf();
    } else {
        std::ifstream in(path);
        if (!in) throw ParseError(path + ": cannot open");
        ss << in.rdbuf();
    }
    return parse_json(ss.str(), path);
}

}  // namespace lamtrack
