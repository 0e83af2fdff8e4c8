#include "morphcloud/csv.hpp"

#include <cstdlib>
#include <fstream>

#include "morphcloud/errors.hpp"

namespace morphcloud {
namespace {

std::string trim(const std::string& s) {
    size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

} // namespace

std::vector<std::string> split_csv_line(const std::string& line) {
    if (trim(line).empty()) return {};
    std::vector<std::string> cells;
    size_t start = 0;
    for (;;) {
        size_t comma = line.find(',', start);
        if (comma == std::string::npos) {
            cells.push_back(trim(line.substr(start)));
            break;
        }
        cells.push_back(trim(line.substr(start, comma - start)));
        start = comma + 1;
    }
    return cells;
}

double parse_csv_number(const std::string& cell, const std::string& path, size_t lineno) {
    if (cell.empty())
        throw Error(Errc::MalformedCsv,
                    path + ":" + std::to_string(lineno) + ": empty numeric field");
    const char* begin = cell.c_str();
    char* end = nullptr;
    double v = std::strtod(begin, &end);
    if (end != begin + cell.size())
        throw Error(Errc::MalformedCsv, path + ":" + std::to_string(lineno) +
                                            ": not a number: '" + cell + "'");
    return v;
}

namespace {

bool parses_as_number(const std::string& cell) {
    char* end = nullptr;
    (void)std::strtod(cell.c_str(), &end);
    return end != cell.c_str() && *end == '\0';
}

} // namespace

void for_each_csv_row(const std::string& path, size_t min_cells, size_t numeric_cell,
                      const std::function<void(const std::vector<std::string>&, size_t)>& fn) {
    std::ifstream in(path);
    if (!in) throw Error(Errc::MissingFile, "cannot open '" + path + "'");
    std::string line;
    size_t lineno = 0;
    bool first_row = true;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line[0] == '#') continue;
        std::vector<std::string> cells = split_csv_line(line);
        if (cells.empty()) continue;
        if (cells.size() < min_cells)
            throw Error(Errc::MalformedCsv, path + ":" + std::to_string(lineno) + ": expected " +
                                                std::to_string(min_cells) + " cells, got " +
                                                std::to_string(cells.size()));
        bool is_header = first_row && !parses_as_number(cells[numeric_cell]);
        first_row = false;
        if (is_header) continue;
        fn(cells, lineno);
    }
}

} // namespace morphcloud
