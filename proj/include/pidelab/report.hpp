#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "pidelab/common.hpp"

namespace pidelab {

inline constexpr const char* kToolVersion = "0.1.0";

inline uint64_t fnv1a(const std::string& s) {
    uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

/// CSV with a header row, '.' decimals, no locale; cells rendered with
/// shortest round-trip doubles so reruns are byte-identical.
class CsvWriter {
  public:
    explicit CsvWriter(std::vector<std::string> header) : header_(std::move(header)) {}

    class Row {
      public:
        explicit Row(CsvWriter& w) : w_(w) {}
        Row& cell(const std::string& s) {
            cells_.push_back(s);
            return *this;
        }
        Row& cell(double v) { return cell(format_double(v)); }
        Row& cell(long v) { return cell(std::to_string(v)); }
        Row& cell(int v) { return cell(std::to_string(v)); }
        Row& status(bool pass) { return cell(pass ? std::string("PASS") : std::string("FAIL")); }
        ~Row() { w_.rows_.push_back(std::move(cells_)); }

      private:
        CsvWriter& w_;
        std::vector<std::string> cells_;
    };

    Row row() { return Row(*this); }

    bool all_pass() const {
        for (const auto& r : rows_)
            for (const auto& c : r)
                if (c == "FAIL") return false;
        return true;
    }

    std::string to_string() const {
        std::string out;
        auto join = [&](const std::vector<std::string>& cells) {
            for (size_t i = 0; i < cells.size(); ++i) {
                if (i) out += ',';
                out += cells[i];
            }
            out += '\n';
        };
        join(header_);
        for (const auto& r : rows_) join(r);
        return out;
    }

    void write_file(const std::filesystem::path& path) const {
        std::ofstream os(path, std::ios::binary);
        if (!os) throw std::runtime_error("cannot open " + path.string());
        os << to_string();
    }

  private:
    std::vector<std::string> header_;
    std::vector<std::vector<std::string>> rows_;
};

}  // namespace pidelab
