#include "soec/csv.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace soec::csv {

std::string format_double(double x) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), x);
    if (ec != std::errc{}) throw std::runtime_error("format_double: to_chars failed");
    return std::string(buf, ptr);
}

int Table::column(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i)
        if (header[i] == name) return static_cast<int>(i);
    return -1;
}

namespace {

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    std::stringstream ss(line);
    while (std::getline(ss, cell, ',')) out.push_back(cell);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

std::string strip_cr(std::string s) {
    if (!s.empty() && s.back() == '\r') s.pop_back();
    return s;
}

}  // namespace

Table read_numeric(const std::filesystem::path& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in) throw std::runtime_error("csv: cannot open " + file.string());

    Table t;
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("csv: empty file " + file.string());
    t.header = split_line(strip_cr(line));

    std::size_t data_row = 0;
    while (std::getline(in, line)) {
        line = strip_cr(line);
        if (line.empty()) continue;
        ++data_row;
        const auto cells = split_line(line);
        if (cells.size() != t.header.size())
            throw std::runtime_error("csv: " + file.string() + ": row " + std::to_string(data_row) +
                                     " has " + std::to_string(cells.size()) + " cells, expected " +
                                     std::to_string(t.header.size()));
        std::vector<double> row(cells.size());
        for (std::size_t c = 0; c < cells.size(); ++c) {
            const std::string& s = cells[c];
            const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), row[c]);
            if (ec != std::errc{} || ptr != s.data() + s.size())
                throw std::runtime_error("csv: " + file.string() + ": row " +
                                         std::to_string(data_row) + ", column '" + t.header[c] +
                                         "': not a number: '" + s + "'");
        }
        t.rows.push_back(std::move(row));
    }
    return t;
}

void write_numeric(const std::filesystem::path& file, const std::vector<std::string>& header,
                   const std::vector<std::vector<double>>& rows) {
    std::ofstream out(file, std::ios::binary);  // binary keeps LF endings everywhere
    if (!out) throw std::runtime_error("csv: cannot write " + file.string());
    for (std::size_t i = 0; i < header.size(); ++i)
        out << (i ? "," : "") << header[i];
    out << '\n';
    for (const auto& row : rows) {
        if (row.size() != header.size())
            throw std::runtime_error("csv: row width does not match header in " + file.string());
        for (std::size_t i = 0; i < row.size(); ++i)
            out << (i ? "," : "") << format_double(row[i]);
        out << '\n';
    }
    if (!out) throw std::runtime_error("csv: write failed for " + file.string());
}

}  // namespace soec::csv
