#pragma once

#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "clk/errors.hpp"

namespace clk {

/// UTF-8 CSV with a header row, '.' decimal separator, bit-stable %.17g floats.
class CsvWriter {
  public:
    CsvWriter(const std::string& path, const std::vector<std::string>& header) : out_(path) {
        if (!out_) throw ConfigError("cannot open CSV output '" + path + "'");
        for (std::size_t i = 0; i < header.size(); ++i) out_ << (i ? "," : "") << header[i];
        out_ << "\n";
    }

    CsvWriter& field(const std::string& s) {
        sep();
        out_ << s;
        return *this;
    }
    CsvWriter& field(double v) {
        char buf[40];
        std::snprintf(buf, sizeof buf, "%.17g", v);
        sep();
        out_ << buf;
        return *this;
    }
    CsvWriter& field(std::size_t v) {
        sep();
        out_ << v;
        return *this;
    }
    CsvWriter& field(int v) {
        sep();
        out_ << v;
        return *this;
    }
    void end_row() {
        out_ << "\n";
        first_ = true;
    }

  private:
    void sep() {
        if (!first_) out_ << ",";
        first_ = false;
    }
    std::ofstream out_;
    bool first_ = true;
};

}  // namespace clk
