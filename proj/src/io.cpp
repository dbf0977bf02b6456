#include "mkv/io.hpp"

#include <cinttypes>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace mkv {

namespace {
constexpr char kMagic[4] = {'M', 'K', 'V', 'F'};
constexpr std::uint32_t kVersion = 1;

template <typename T>
void put(std::FILE* f, const T& v) {
    if (std::fwrite(&v, sizeof(T), 1, f) != 1) throw IoError("short write");
}

template <typename T>
T get(std::FILE* f) {
    T v;
    if (std::fread(&v, sizeof(T), 1, f) != 1) throw IoError("short read");
    return v;
}
}  // namespace

void FieldContainer::write(const std::string& path) const {
    std::FILE* f = std::fopen(path.c_str(), "wb");
    if (!f) throw IoError("cannot open for writing: " + path);
    try {
        if (std::fwrite(kMagic, 1, 4, f) != 4) throw IoError("short write");
        put(f, kVersion);
        put(f, static_cast<std::uint32_t>(dims.size()));
        for (auto d : dims) put(f, d);
        if (spacings.size() != dims.size())
            throw IoError("FieldContainer: spacings/dims mismatch");
        for (auto s : spacings) put(f, s);
        put(f, beta);
        put(f, eps);
        put(f, time);
        put(f, static_cast<std::uint64_t>(payload.size()));
        if (!payload.empty() &&
            std::fwrite(payload.data(), sizeof(double), payload.size(), f) !=
                payload.size())
            throw IoError("short write");
    } catch (...) {
        std::fclose(f);
        throw;
    }
    std::fclose(f);
}

FieldContainer FieldContainer::read(const std::string& path) {
    std::FILE* f = std::fopen(path.c_str(), "rb");
    if (!f) throw IoError("cannot open for reading: " + path);
    FieldContainer c;
    try {
        char magic[4];
        if (std::fread(magic, 1, 4, f) != 4 || std::memcmp(magic, kMagic, 4) != 0)
            throw IoError("bad magic in field container: " + path);
        const auto version = get<std::uint32_t>(f);
        if (version != kVersion) throw IoError("unsupported container version");
        const auto nd = get<std::uint32_t>(f);
        c.dims.resize(nd);
        for (auto& d : c.dims) d = get<std::uint64_t>(f);
        c.spacings.resize(nd);
        for (auto& s : c.spacings) s = get<double>(f);
        c.beta = get<double>(f);
        c.eps = get<double>(f);
        c.time = get<double>(f);
        const auto count = get<std::uint64_t>(f);
        c.payload.resize(count);
        if (count > 0 &&
            std::fread(c.payload.data(), sizeof(double), count, f) != count)
            throw IoError("short read in payload");
    } catch (...) {
        std::fclose(f);
        throw;
    }
    std::fclose(f);
    return c;
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

CsvWriter::CsvWriter(const std::string& path, const std::vector<std::string>& header)
    : path_(path), columns_(header.size()) {
    f_ = std::fopen(path.c_str(), "wb");
    if (!f_) throw IoError("cannot open for writing: " + path);
    std::string line;
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (i) line += ',';
        line += header[i];
    }
    line += '\n';
    std::fwrite(line.data(), 1, line.size(), f_);
}

CsvWriter::~CsvWriter() {
    if (f_) std::fclose(f_);
}

void CsvWriter::row(const std::vector<double>& values) {
    if (values.size() != columns_) throw IoError("CsvWriter: column count mismatch");
    std::string line;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) line += ',';
        line += format_double(values[i]);
    }
    line += '\n';
    std::fwrite(line.data(), 1, line.size(), f_);
}

void CsvWriter::raw_row(const std::string& line) {
    std::fwrite(line.data(), 1, line.size(), f_);
    std::fputc('\n', f_);
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open for writing: " + path);
    out << content;
}

bool file_exists(const std::string& path) {
    return std::filesystem::exists(path);
}

void make_directories(const std::string& path) {
    std::error_code ec;
    std::filesystem::create_directories(path, ec);
    if (ec) throw IoError("cannot create directory: " + path + ": " + ec.message());
}

}  // namespace mkv
