#include "qj/config.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

namespace qj {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

double parse_double(const std::string& token, const std::string& where) {
    char* end = nullptr;
    const double v = std::strtod(token.c_str(), &end);
    if (end == token.c_str() || *end != '\0')
        throw ConfigError(where + ": not a number: '" + token + "'");
    return v;
}

}  // namespace

Config Config::parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_string(ss.str(), path);
}

Config Config::parse_string(const std::string& text, const std::string& origin) {
    Config cfg;
    cfg.origin_ = origin;
    std::istringstream in(text);
    std::string line;
    std::string section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigError(origin + ":" + std::to_string(lineno) + ": unterminated section header");
            section = trim(line.substr(1, line.size() - 2));
            cfg.sections_[section];
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError(origin + ":" + std::to_string(lineno) + ": expected 'key = value'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty())
            throw ConfigError(origin + ":" + std::to_string(lineno) + ": empty key");
        auto& sec = cfg.sections_[section];
        if (!sec.values.count(key)) sec.order.push_back(key);
        sec.values[key] = value;
    }
    return cfg;
}

bool Config::has(const std::string& section, const std::string& key) const {
    const auto it = sections_.find(section);
    return it != sections_.end() && it->second.values.count(key) > 0;
}

std::string Config::get_str(const std::string& section, const std::string& key) const {
    const auto it = sections_.find(section);
    if (it == sections_.end() || !it->second.values.count(key))
        throw ConfigError(origin_ + ": missing key [" + section + "] " + key);
    return it->second.values.at(key);
}

std::string Config::get_str(const std::string& section, const std::string& key,
                            const std::string& fallback) const {
    return has(section, key) ? get_str(section, key) : fallback;
}

double Config::get_num(const std::string& section, const std::string& key) const {
    return parse_double(get_str(section, key), origin_ + " [" + section + "] " + key);
}

double Config::get_num(const std::string& section, const std::string& key, double fallback) const {
    return has(section, key) ? get_num(section, key) : fallback;
}

long Config::get_int(const std::string& section, const std::string& key, long fallback) const {
    if (!has(section, key)) return fallback;
    const double v = get_num(section, key);
    return static_cast<long>(v);
}

std::vector<double> Config::get_vec(const std::string& section, const std::string& key) const {
    std::istringstream in(get_str(section, key));
    std::vector<double> out;
    std::string token;
    while (in >> token)
        out.push_back(parse_double(token, origin_ + " [" + section + "] " + key));
    return out;
}

std::vector<double> Config::get_vec(const std::string& section, const std::string& key,
                                    const std::vector<double>& fallback) const {
    return has(section, key) ? get_vec(section, key) : fallback;
}

std::vector<std::string> Config::keys(const std::string& section) const {
    const auto it = sections_.find(section);
    if (it == sections_.end()) return {};
    return it->second.order;
}

}  // namespace qj
