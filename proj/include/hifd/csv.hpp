#pragma once

// Minimal CSV writer with deterministic number formatting ("%.12g"),
// so equal seeds give byte-identical output files.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <string>

#include "hifd/errors.hpp"

namespace hifd {

[[nodiscard]] inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

class CsvWriter {
public:
    CsvWriter() = default;

    CsvWriter(const std::filesystem::path& path, const std::string& header) {
        open(path, header);
    }

    void open(const std::filesystem::path& path, const std::string& header) {
        out_.open(path);
        if (!out_) throw ConfigError("cannot open output file: " + path.string());
        out_ << header << "\n";
    }

    [[nodiscard]] bool is_open() const { return out_.is_open(); }

    class Row {
    public:
        explicit Row(std::ofstream& out) : out_(out) {}
        Row& col(double v) { return raw(format_double(v)); }
        Row& col(int v) { return raw(std::to_string(v)); }
        Row& col(bool v) { return raw(v ? "1" : "0"); }
        Row& col(const std::string& v) { return raw(v); }
        ~Row() { out_ << "\n"; }

    private:
        Row& raw(const std::string& s) {
            if (!first_) out_ << ",";
            first_ = false;
            out_ << s;
            return *this;
        }
        std::ofstream& out_;
        bool first_ = true;
    };

    Row row() { return Row(out_); }

private:
    std::ofstream out_;
};

}  // namespace hifd
