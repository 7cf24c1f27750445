#pragma once

// INI configuration read with Boost.PropertyTree: `[section]` headers,
// `key = value` lines, full-line `#` or `;` comments. Keys are addressed as
// "section.key".

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "anodiff/error.hpp"
#include "anodiff/grid.hpp"

namespace anodiff {

namespace detail {

inline std::string trim(std::string_view s) {
    std::size_t b = 0;
    std::size_t e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return std::string(s.substr(b, e - b));
}

inline std::vector<std::string> split(std::string_view s, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    for (;;) {
        const std::size_t pos = s.find(sep, start);
        out.push_back(trim(s.substr(start, pos == std::string_view::npos ? s.npos : pos - start)));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

}  // namespace detail

/// Flat view of a parsed config: "section.key" -> value.
class ConfigDocument {
public:
    static ConfigDocument parse(std::string_view text) {
        namespace pt = boost::property_tree;
        pt::ptree tree;
        std::istringstream in{std::string(text)};
        try {
            pt::read_ini(in, tree);
        } catch (const pt::ini_parser_error& e) {
            throw ConfigError("config line " + std::to_string(e.line()) + ": " + e.message());
        }
        ConfigDocument doc;
        for (const auto& [section, body] : tree) {
            if (body.empty()) throw ConfigError("key '" + section + "' appears before any [section]");
            for (const auto& [key, value] : body) doc.entries_[section + "." + key] = value.data();
        }
        return doc;
    }

    static ConfigDocument load_file(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw ConfigError("cannot open config file '" + path + "'");
        std::ostringstream ss;
        ss << in.rdbuf();
        return parse(ss.str());
    }

    /// Applies a `section.key=value` override.
    void apply_override(std::string_view assignment) {
        const std::size_t eq = assignment.find('=');
        if (eq == std::string_view::npos) {
            throw ConfigError("override '" + std::string(assignment) + "' must look like section.key=value");
        }
        const std::string path = detail::trim(assignment.substr(0, eq));
        if (path.find('.') == std::string::npos || path.front() == '.' || path.back() == '.') {
            throw ConfigError("override key '" + path + "' must be a dotted path section.key");
        }
        set(path, detail::trim(assignment.substr(eq + 1)));
    }

    void set(const std::string& path, std::string value) { entries_[path] = std::move(value); }

    bool has(const std::string& path) const { return entries_.count(path) != 0; }

    const std::map<std::string, std::string>& entries() const { return entries_; }

private:
    std::map<std::string, std::string> entries_;
};

/// Typed access to a ConfigDocument that remembers which keys were read, so
/// leftovers can be rejected as unknown.
class ConfigReader {
public:
    explicit ConfigReader(const ConfigDocument& doc) : doc_(doc) {}

    bool has(const std::string& path) const { return doc_.has(path); }

    std::string get_string(const std::string& path, const std::string& fallback) {
        return has(path) ? raw(path) : fallback;
    }
    std::string require_string(const std::string& path) { return raw(path); }

    double get_double(const std::string& path, double fallback) {
        return has(path) ? to_double(path, raw(path)) : fallback;
    }
    double require_double(const std::string& path) { return to_double(path, raw(path)); }

    std::size_t get_size(const std::string& path, std::size_t fallback) {
        if (!has(path)) return fallback;
        const std::string v = raw(path);
        std::size_t out = 0;
        const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
        if (ec != std::errc() || ptr != v.data() + v.size()) {
            throw ConfigError(where(path) + ": expected a non-negative integer, got '" + v + "'");
        }
        return out;
    }

    bool get_bool(const std::string& path, bool fallback) {
        if (!has(path)) return fallback;
        std::string v = raw(path);
        std::transform(v.begin(), v.end(), v.begin(), [](unsigned char c) { return std::tolower(c); });
        if (v == "true" || v == "yes" || v == "on" || v == "1") return true;
        if (v == "false" || v == "no" || v == "off" || v == "0") return false;
        throw ConfigError(where(path) + ": expected a boolean, got '" + v + "'");
    }

    /// Comma- or whitespace-separated numbers.
    std::vector<double> get_doubles(const std::string& path, std::vector<double> fallback) {
        if (!has(path)) return fallback;
        std::string v = raw(path);
        std::replace(v.begin(), v.end(), ',', ' ');
        std::vector<double> out;
        std::istringstream ss(v);
        std::string tok;
        while (ss >> tok) out.push_back(to_double(path, tok));
        return out;
    }

    /// Points written as "x y; x y; ..." (a comma may replace the space).
    std::vector<Point> get_points(const std::string& path, std::vector<Point> fallback) {
        if (!has(path)) return fallback;
        const std::string v = raw(path);
        std::vector<Point> out;
        if (detail::trim(v).empty()) return out;
        for (std::string item : detail::split(v, ';')) {
            if (item.empty()) continue;
            std::replace(item.begin(), item.end(), ',', ' ');
            std::istringstream ss(item);
            std::string a;
            std::string b;
            std::string extra;
            if (!(ss >> a >> b) || (ss >> extra)) {
                throw ConfigError(where(path) + ": expected 'x y' pairs separated by ';', got '" + item + "'");
            }
            out.push_back({to_double(path, a), to_double(path, b)});
        }
        return out;
    }

    /// Throws on any key that was never read.
    void reject_unknown() const {
        for (const auto& [path, entry] : doc_.entries()) {
            if (!used_.count(path)) throw ConfigError(where(path) + ": unknown key '" + path + "'");
        }
    }

    std::string where(const std::string& path) const { return path; }

private:
    std::string raw(const std::string& path) {
        const auto it = doc_.entries().find(path);
        if (it == doc_.entries().end()) throw ConfigError("missing required key '" + path + "'");
        used_.insert(path);
        return it->second;
    }

    double to_double(const std::string& path, const std::string& v) const {
        try {
            std::size_t used = 0;
            const double d = std::stod(v, &used);
            if (used != v.size() || !std::isfinite(d)) throw std::invalid_argument(v);
            return d;
        } catch (const std::exception&) {
            throw ConfigError(where(path) + ": expected a number, got '" + v + "'");
        }
    }

    const ConfigDocument& doc_;
    std::set<std::string> used_;
};

}  // namespace anodiff
