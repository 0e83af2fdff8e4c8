#pragma once

#include <functional>
#include <string>
#include <vector>

namespace morphcloud {

// Splits a CSV line on commas, trimming surrounding whitespace from every cell.
// A line that is empty (or whitespace only) yields an empty vector.
std::vector<std::string> split_csv_line(const std::string& line);

// Strict numeric parse of a CSV cell; throws MalformedCsv mentioning file:line.
double parse_csv_number(const std::string& cell, const std::string& path, size_t lineno);

// Iterates the data rows of a CSV file, skipping blank lines and '#' comments.
// The first surviving row is skipped as a header exactly when its cell at
// numeric_cell does not parse as a number, so a malformed first data row still
// fails loudly. Rows shorter than min_cells throw MalformedCsv; a missing file
// throws MissingFile. fn receives the cells and the 1-based line number.
void for_each_csv_row(const std::string& path, size_t min_cells, size_t numeric_cell,
                      const std::function<void(const std::vector<std::string>&, size_t)>& fn);

} // namespace morphcloud
