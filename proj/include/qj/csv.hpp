#pragma once

#include <cstdio>
#include <fstream>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace qj {

// CSV writer with fixed %.17g numeric formatting: equal values always
// produce equal bytes, which the reproducibility checks rely on.
class CsvWriter {
public:
    CsvWriter(const std::string& path, const std::vector<std::string>& header) : out_(path) {
        if (!out_) throw std::runtime_error("cannot open for writing: " + path);
        for (size_t i = 0; i < header.size(); ++i) {
            if (i) out_ << ',';
            out_ << header[i];
        }
        out_ << '\n';
    }

    void row(std::span<const double> values) {
        char buf[32];
        for (size_t i = 0; i < values.size(); ++i) {
            if (i) out_ << ',';
            std::snprintf(buf, sizeof(buf), "%.17g", values[i]);
            out_ << buf;
        }
        out_ << '\n';
    }

    void row(std::initializer_list<double> values) {
        row(std::span<const double>(values.begin(), values.size()));
    }

    static std::string format(double v) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.17g", v);
        return buf;
    }

private:
    std::ofstream out_;
};

}  // namespace qj
