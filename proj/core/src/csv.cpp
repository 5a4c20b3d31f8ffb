#include "xferbo/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <system_error>

#include "xferbo/errors.hpp"

namespace xferbo {

std::string format_double(double value) {
    if (std::isnan(value)) return "nan";
    if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, res.ptr);
}

double parse_double(std::string_view text) {
    if (text == "inf") return HUGE_VAL;
    if (text == "-inf") return -HUGE_VAL;
    if (text == "nan") return std::nan("");
    double v = 0.0;
    const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
    if (res.ec != std::errc{} || res.ptr != text.data() + text.size())
        throw ConfigError("malformed number '" + std::string(text) + "'");
    return v;
}

std::vector<std::string> split_csv_line(std::string_view line) {
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = line.find(',', start);
        out.emplace_back(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

std::size_t CsvTable::column(std::string_view name) const {
    for (std::size_t i = 0; i < header.size(); ++i)
        if (header[i] == name) return i;
    throw ConfigError("missing CSV column '" + std::string(name) + "'");
}

CsvTable read_csv(std::istream& in) {
    CsvTable table;
    std::string line;
    if (!std::getline(in, line)) throw ConfigError("empty CSV input");
    table.header = split_csv_line(line);
    while (std::getline(in, line)) {
        if (line.empty() || line == "\r") continue;
        auto row = split_csv_line(line);
        if (row.size() != table.header.size())
            throw ConfigError("CSV row has " + std::to_string(row.size()) + " fields, header has " +
                              std::to_string(table.header.size()));
        table.rows.push_back(std::move(row));
    }
    return table;
}

CsvTable read_csv_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open '" + path + "'");
    return read_csv(in);
}

void write_doe_csv(std::ostream& out, const Doe& doe) {
    bool first = true;
    auto sep = [&] {
        if (!first) out << ',';
        first = false;
    };
    for (const auto& v : doe.variables()) {
        sep();
        out << "x_" << v.name;
    }
    sep();
    out << "objective";
    for (const auto& c : doe.constraints()) {
        sep();
        out << "c_" << c.meta.name;
    }
    out << '\n';
    for (std::size_t i = 0; i < doe.size(); ++i) {
        const auto r = static_cast<Eigen::Index>(i);
        for (Eigen::Index d = 0; d < doe.inputs().cols(); ++d) out << format_double(doe.inputs()(r, d)) << ',';
        out << format_double(doe.objective()(r));
        for (const auto& c : doe.constraints()) out << ',' << format_double(c.values(r));
        out << '\n';
    }
}

void write_doe_csv_file(const std::string& path, const Doe& doe) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write '" + path + "'");
    write_doe_csv(out, doe);
}

Doe read_doe_csv(std::istream& in, std::vector<VariableMeta> variables, std::vector<ConstraintMeta> constraints) {
    const auto table = read_csv(in);
    const std::size_t d = variables.size();
    const std::size_t expected = d + 1 + constraints.size();
    if (table.header.size() != expected)
        throw ConfigError("DOE CSV has " + std::to_string(table.header.size()) + " columns, expected " +
                          std::to_string(expected));
    for (std::size_t j = 0; j < d; ++j)
        if (table.header[j] != "x_" + variables[j].name)
            throw ConfigError("DOE CSV column " + std::to_string(j) + " is '" + table.header[j] + "', expected 'x_" +
                              variables[j].name + "'");
    if (table.header[d] != "objective") throw ConfigError("DOE CSV lacks the objective column");
    for (std::size_t j = 0; j < constraints.size(); ++j)
        if (table.header[d + 1 + j] != "c_" + constraints[j].name)
            throw ConfigError("DOE CSV constraint column '" + table.header[d + 1 + j] + "' does not match 'c_" +
                              constraints[j].name + "'");
    if (table.rows.empty()) throw ConfigError("DOE CSV has no rows");

    const auto n = static_cast<Eigen::Index>(table.rows.size());
    Eigen::MatrixXd inputs(n, static_cast<Eigen::Index>(d));
    Eigen::VectorXd objective(n);
    std::vector<ConstraintColumn> cons;
    for (auto& meta : constraints) cons.push_back({std::move(meta), Eigen::VectorXd(n)});
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto& row = table.rows[static_cast<std::size_t>(i)];
        for (std::size_t j = 0; j < d; ++j) inputs(i, static_cast<Eigen::Index>(j)) = parse_double(row[j]);
        objective(i) = parse_double(row[d]);
        for (std::size_t j = 0; j < cons.size(); ++j) cons[j].values(i) = parse_double(row[d + 1 + j]);
    }
    return Doe(std::move(variables), std::move(inputs), std::move(objective), std::move(cons));
}

Doe read_doe_csv_file(const std::string& path, std::vector<VariableMeta> variables,
                      std::vector<ConstraintMeta> constraints) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open '" + path + "'");
    return read_doe_csv(in, std::move(variables), std::move(constraints));
}

} // namespace xferbo
