#pragma once

// Minimal flat TOML reader: [section] headers, key = value pairs, # comments,
// quoted or bare scalar values.  Covers exactly the configuration surface of
// the CLI (flat per-subcommand tables); nested tables, arrays and dates are
// out of scope.  Parse errors carry the line number.

#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>
#include <string>

#include "hscale/errors.hpp"

namespace hscale {

struct ConfigError : Error {
    using Error::Error;
};

class FlatToml {
  public:
    static FlatToml parse(const std::string& text) {
        FlatToml out;
        std::istringstream in(text);
        std::string line, section;
        int lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            std::string s = strip_comment(line, lineno);
            s = trim(s);
            if (s.empty()) continue;
            if (s.front() == '[') {
                if (s.back() != ']')
                    throw ConfigError("config line " + std::to_string(lineno) +
                                      ": unterminated section header");
                section = trim(s.substr(1, s.size() - 2));
                if (section.empty())
                    throw ConfigError("config line " + std::to_string(lineno) +
                                      ": empty section name");
                out.values_[section];
                continue;
            }
            auto eq = s.find('=');
            if (eq == std::string::npos)
                throw ConfigError("config line " + std::to_string(lineno) +
                                  ": expected key = value");
            std::string key = trim(s.substr(0, eq));
            std::string value = trim(s.substr(eq + 1));
            if (key.empty())
                throw ConfigError("config line " + std::to_string(lineno) + ": empty key");
            if (value.empty())
                throw ConfigError("config line " + std::to_string(lineno) + ": empty value");
            if (value.front() == '"') {
                if (value.size() < 2 || value.back() != '"')
                    throw ConfigError("config line " + std::to_string(lineno) +
                                      ": unterminated string");
                value = value.substr(1, value.size() - 2);
            }
            out.values_[section][key] = value;
        }
        return out;
    }

    static FlatToml parse_file(const std::string& path) {
        std::ifstream in(path, std::ios::binary);
        if (!in.good()) throw ConfigError("cannot open config file '" + path + "'");
        std::stringstream buf;
        buf << in.rdbuf();
        return parse(buf.str());
    }

    bool has(const std::string& section, const std::string& key) const {
        auto it = values_.find(section);
        return it != values_.end() && it->second.count(key) > 0;
    }

    std::string get_string(const std::string& section, const std::string& key,
                           const std::string& fallback) const {
        auto it = values_.find(section);
        if (it == values_.end()) return fallback;
        auto kt = it->second.find(key);
        return kt == it->second.end() ? fallback : kt->second;
    }

    double get_double(const std::string& section, const std::string& key,
                      double fallback) const {
        if (!has(section, key)) return fallback;
        const std::string& v = values_.at(section).at(key);
        char* end = nullptr;
        double x = std::strtod(v.c_str(), &end);
        if (end == v.c_str() || *end != '\0')
            throw ConfigError("config [" + section + "] " + key + ": '" + v +
                              "' is not a number");
        return x;
    }

    long long get_int(const std::string& section, const std::string& key,
                      long long fallback) const {
        if (!has(section, key)) return fallback;
        const std::string& v = values_.at(section).at(key);
        char* end = nullptr;
        long long x = std::strtoll(v.c_str(), &end, 10);
        if (end == v.c_str() || *end != '\0')
            throw ConfigError("config [" + section + "] " + key + ": '" + v +
                              "' is not an integer");
        return x;
    }

  private:
    static std::string strip_comment(const std::string& line, int lineno) {
        bool in_string = false;
        for (std::size_t i = 0; i < line.size(); ++i) {
            if (line[i] == '"') in_string = !in_string;
            if (line[i] == '#' && !in_string) return line.substr(0, i);
        }
        if (in_string)
            throw ConfigError("config line " + std::to_string(lineno) +
                              ": unterminated string");
        return line;
    }

    static std::string trim(const std::string& s) {
        std::size_t b = s.find_first_not_of(" \t\r");
        if (b == std::string::npos) return "";
        std::size_t e = s.find_last_not_of(" \t\r");
        return s.substr(b, e - b + 1);
    }

    std::map<std::string, std::map<std::string, std::string>> values_;
};

}  // namespace hscale
