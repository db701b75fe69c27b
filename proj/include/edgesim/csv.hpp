#pragma once

#include <cstdio>
#include <ostream>
#include <string>

namespace edgesim {

// Compact float formatting shared by every CSV artifact so that identical
// runs produce byte-identical files.
inline std::string csv_num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return std::string(buf);
}

inline std::string csv_num(std::int64_t v) { return std::to_string(v); }
inline std::string csv_num(int v) { return std::to_string(v); }

class CsvWriter {
public:
    explicit CsvWriter(std::ostream& out) : out_(out) {}

    template <typename... Cols>
    void row(const Cols&... cols) {
        bool first = true;
        ((out_ << (first ? "" : ",") << cell(cols), first = false), ...);
        out_ << "\n";
    }

private:
    static std::string cell(const std::string& s) { return s; }
    static std::string cell(const char* s) { return s; }
    static std::string cell(double v) { return csv_num(v); }
    static std::string cell(int v) { return csv_num(v); }
    static std::string cell(std::int64_t v) { return csv_num(v); }

    std::ostream& out_;
};

}  // namespace edgesim
