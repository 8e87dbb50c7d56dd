// csvio.hpp — deterministic CSV output: comma-separated, '.' decimal,
// scientific notation with 17 significant digits.

#pragma once

#include <string>
#include <vector>

namespace qnmqed::csvio {

std::string format_number(double v);

struct Table {
    std::vector<std::string> header;  // symbol_unit column names
    std::vector<std::vector<double>> rows;
    // free-form cells (used by label columns); when set, string cells override
    std::vector<std::vector<std::string>> text_rows;

    std::string to_csv() const;
};

void write_file(const std::string& path, const std::string& content);
std::string read_file(const std::string& path);

}  // namespace qnmqed::csvio
