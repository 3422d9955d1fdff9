#pragma once

#include <fstream>
#include <sstream>
#include <string>
#include <type_traits>

#include "jacobimax/config.hpp"

namespace jacobimax {

std::string format_double(double x);

/// Writes text to path.
void write_file(const std::string& path, const std::string& text);

/// Derives "<stem>_<suffix>.<ext>" from an output path.
std::string sibling_path(const std::string& path, const std::string& suffix);

/// CSV sink with the resolved configuration embedded as leading # comments,
/// C locale, '.' decimal point, round-trip precision.
class CsvWriter {
public:
    CsvWriter(std::string path, const ExperimentConfig& cfg, const std::string& header)
        : path_(std::move(path)) {
        os_ << "# jacobimax output\n";
        std::istringstream iss(cfg.resolved_text());
        std::string line;
        while (std::getline(iss, line)) os_ << "# " << line << '\n';
        os_ << header << '\n';
    }
    ~CsvWriter() {
        try {
            flush();
        } catch (...) {
        }
    }

    template <typename... Ts>
    void row(const Ts&... fields) {
        bool first = true;
        ((write_field(first, fields), first = false), ...);
        os_ << '\n';
    }

    std::string str() const { return os_.str(); }

    void flush() {
        if (flushed_ || path_.empty()) return;
        write_file(path_, os_.str());
        flushed_ = true;
    }

private:
    void write_field(bool first, double x) {
        if (!first) os_ << ',';
        os_ << format_double(x);
    }
    void write_field(bool first, const std::string& s) {
        if (!first) os_ << ',';
        os_ << s;
    }
    void write_field(bool first, const char* s) {
        if (!first) os_ << ',';
        os_ << s;
    }
    template <typename T, std::enable_if_t<std::is_integral_v<T>, int> = 0>
    void write_field(bool first, T x) {
        if (!first) os_ << ',';
        os_ << x;
    }

    std::string path_;
    std::ostringstream os_;
    bool flushed_ = false;
};

}  // namespace jacobimax
