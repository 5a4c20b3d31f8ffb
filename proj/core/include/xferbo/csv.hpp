#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "xferbo/doe.hpp"

namespace xferbo {

/// Shortest round-trip decimal form; "inf", "-inf" and "nan" for non-finite values.
std::string format_double(double value);
/// Inverse of format_double. Throws ConfigError on malformed text.
double parse_double(std::string_view text);

/// Splits one CSV line on commas (no quoting; the library never writes quoted fields).
std::vector<std::string> split_csv_line(std::string_view line);

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    /// Index of a header column; throws ConfigError if absent.
    std::size_t column(std::string_view name) const;
};

CsvTable read_csv(std::istream& in);
CsvTable read_csv_file(const std::string& path);

/// Writes `x_<name>...,objective,c_<name>...` followed by one line per row.
void write_doe_csv(std::ostream& out, const Doe& doe);
void write_doe_csv_file(const std::string& path, const Doe& doe);

/// Reads a DOE written by write_doe_csv. Header names must match the given metas in order.
Doe read_doe_csv(std::istream& in, std::vector<VariableMeta> variables, std::vector<ConstraintMeta> constraints);
Doe read_doe_csv_file(const std::string& path, std::vector<VariableMeta> variables,
                      std::vector<ConstraintMeta> constraints);

} // namespace xferbo
