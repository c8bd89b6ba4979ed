#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "sciprep/error.hpp"

namespace sciprep {

inline std::vector<std::string> read_lines(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("missing input file: " + path);
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line))
        if (!line.empty()) lines.push_back(line);
    return lines;
}

inline std::size_t count_lines(const std::string& path) {
    std::ifstream in(path);
    if (!in) return 0;
    std::size_t n = 0;
    std::string line;
    while (std::getline(in, line))
        if (!line.empty()) ++n;
    return n;
}

inline void write_text(const std::string& path, const std::string& content) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::trunc);
        if (!out) throw DataError("cannot write " + tmp);
        out << content;
    }
    std::filesystem::rename(tmp, path);
}

inline void write_lines(const std::string& path, const std::vector<std::string>& lines) {
    std::string content;
    for (const auto& line : lines) {
        content += line;
        content += '\n';
    }
    write_text(path, content);
}

inline void append_lines(const std::string& path, const std::vector<std::string>& lines) {
    std::ofstream out(path, std::ios::app);
    if (!out) throw DataError("cannot append to " + path);
    for (const auto& line : lines) out << line << '\n';
}

} // namespace sciprep
