#pragma once

#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace rotkit::io {

/// Append-only JSON-lines writer; one serialized object per line.
class JsonlWriter {
public:
    explicit JsonlWriter(const std::string& path) : out_(path) {
        if (!out_) throw std::runtime_error("cannot open " + path + " for writing");
    }
    void write_line(const std::string& json) { out_ << json << '\n'; }
    void flush() { out_.flush(); }

private:
    std::ofstream out_;
};

inline std::vector<std::string> read_jsonl(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line))
        if (!line.empty()) lines.push_back(line);
    return lines;
}

/// CSV writer with a fixed header; numeric cells use max precision so files
/// round-trip for metric recomputation.
class CsvWriter {
public:
    CsvWriter(const std::string& path, const std::vector<std::string>& columns)
        : out_(path) {
        if (!out_) throw std::runtime_error("cannot open " + path + " for writing");
        for (std::size_t i = 0; i < columns.size(); ++i)
            out_ << (i ? "," : "") << columns[i];
        out_ << '\n';
    }

    void write_row(const std::vector<double>& values) {
        std::ostringstream row;
        row.precision(17);
        for (std::size_t i = 0; i < values.size(); ++i) row << (i ? "," : "") << values[i];
        out_ << row.str() << '\n';
    }

    void write_row(const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) out_ << (i ? "," : "") << cells[i];
        out_ << '\n';
    }

    void flush() { out_.flush(); }

private:
    std::ofstream out_;
};

struct CsvFile {
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;

    int column_index(const std::string& name) const {
        for (std::size_t i = 0; i < columns.size(); ++i)
            if (columns[i] == name) return static_cast<int>(i);
        return -1;
    }
};

inline CsvFile read_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    CsvFile file;
    std::string line;
    bool header = true;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        if (header) {
            file.columns = std::move(cells);
            header = false;
        } else {
            file.rows.push_back(std::move(cells));
        }
    }
    return file;
}

inline void ensure_directory(const std::string& path) {
    std::filesystem::create_directories(path);
}

}  // namespace rotkit::io
