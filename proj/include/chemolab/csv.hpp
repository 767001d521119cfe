#pragma once

#include <fstream>
#include <string>
#include <vector>

namespace chemo {

/// UTF-8 CSV with a header row and deterministic %.17g number formatting, so
/// identical runs produce bit-identical files.
class CsvWriter {
public:
    CsvWriter(const std::string& path, std::vector<std::string> columns);

    void write_row(const std::vector<double>& values);
    /// Mixed row: strings are written verbatim (no quoting needed for the
    /// fixed vocabulary used here).
    void write_row_mixed(const std::vector<std::string>& values);

    static std::string format(double value);

private:
    std::ofstream out_;
    std::size_t n_columns_;
};

} // namespace chemo
