#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace qj {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Plain-text config: `[section]` headers followed by `key = value` lines,
// `#` comments. Vector values are whitespace-separated numbers. Decimal
// parsing goes through strtod, i.e. correctly rounded.
class Config {
public:
    static Config parse_file(const std::string& path);
    static Config parse_string(const std::string& text, const std::string& origin = "<string>");

    bool has(const std::string& section, const std::string& key) const;

    std::string get_str(const std::string& section, const std::string& key) const;
    std::string get_str(const std::string& section, const std::string& key,
                        const std::string& fallback) const;

    double get_num(const std::string& section, const std::string& key) const;
    double get_num(const std::string& section, const std::string& key, double fallback) const;

    long get_int(const std::string& section, const std::string& key, long fallback) const;

    std::vector<double> get_vec(const std::string& section, const std::string& key) const;
    std::vector<double> get_vec(const std::string& section, const std::string& key,
                                const std::vector<double>& fallback) const;

    // Keys of one section, in file order (used to pick up free-form weight maps).
    std::vector<std::string> keys(const std::string& section) const;

    const std::string& origin() const { return origin_; }

private:
    struct Section {
        std::vector<std::string> order;
        std::map<std::string, std::string> values;
    };
    std::map<std::string, Section> sections_;
    std::string origin_;
};

}  // namespace qj
