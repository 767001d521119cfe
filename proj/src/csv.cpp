#include "chemolab/csv.hpp"

#include <cstdio>

#include "chemolab/errors.hpp"

namespace chemo {

CsvWriter::CsvWriter(const std::string& path, std::vector<std::string> columns)
    : out_(path), n_columns_(columns.size()) {
    if (!out_)
        throw EvaluationError("CsvWriter: cannot open '" + path + "'");
    for (std::size_t i = 0; i < columns.size(); ++i)
        out_ << (i ? "," : "") << columns[i];
    out_ << "\n";
}

std::string CsvWriter::format(double value) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", value);
    return buf;
}

void CsvWriter::write_row(const std::vector<double>& values) {
    if (values.size() != n_columns_)
        throw EvaluationError("CsvWriter: row width mismatch");
    for (std::size_t i = 0; i < values.size(); ++i)
        out_ << (i ? "," : "") << format(values[i]);
    out_ << "\n";
}

void CsvWriter::write_row_mixed(const std::vector<std::string>& values) {
    if (values.size() != n_columns_)
        throw EvaluationError("CsvWriter: row width mismatch");
    for (std::size_t i = 0; i < values.size(); ++i)
        out_ << (i ? "," : "") << values[i];
    out_ << "\n";
}

} // namespace chemo
