#pragma once

#include <filesystem>
#include <string>
#include <vector>

// CSV plumbing shared by the dataset and reporting code. Numbers are written
// with std::to_chars shortest round-trip form, so save -> load -> save is
// byte-stable and doubles survive exactly. Files use LF line endings.

namespace soec::csv {

std::string format_double(double x);

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;

    // Column position by header name; -1 when absent.
    int column(const std::string& name) const;
};

// Reads a numeric CSV. Non-numeric cells raise std::runtime_error naming the
// 1-based data row and column.
Table read_numeric(const std::filesystem::path& file);

void write_numeric(const std::filesystem::path& file, const std::vector<std::string>& header,
                   const std::vector<std::vector<double>>& rows);

}  // namespace soec::csv
