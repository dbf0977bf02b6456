#pragma once

#include <cstdint>
#include <cstdio>
#include <string>
#include <vector>

#include "mkv/errors.hpp"

namespace mkv {

// Self-describing binary field dump: magic, version, dimensions, spacings,
// (beta, eps, t) and the row-major payload. Little-endian host layout.
struct FieldContainer {
    std::vector<std::uint64_t> dims;
    std::vector<double> spacings;
    double beta = 0.0;
    double eps = 0.0;
    double time = 0.0;
    std::vector<double> payload;

    void write(const std::string& path) const;
    static FieldContainer read(const std::string& path);

    std::size_t expected_cells() const {
        std::size_t c = 1;
        for (auto d : dims) c *= static_cast<std::size_t>(d);
        return c;
    }
};

// Line-oriented CSV writer with deterministic float formatting (%.17g).
class CsvWriter {
public:
    CsvWriter(const std::string& path, const std::vector<std::string>& header);
    ~CsvWriter();
    CsvWriter(const CsvWriter&) = delete;
    CsvWriter& operator=(const CsvWriter&) = delete;

    void row(const std::vector<double>& values);
    void raw_row(const std::string& line);
    const std::string& path() const { return path_; }

private:
    std::string path_;
    std::FILE* f_ = nullptr;
    std::size_t columns_ = 0;
};

std::string format_double(double v);

// Reads a whole text file / writes one atomically enough for our purposes.
std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

bool file_exists(const std::string& path);
void make_directories(const std::string& path);

}  // namespace mkv
