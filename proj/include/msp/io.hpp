#ifndef MSP_IO_HPP
#define MSP_IO_HPP

#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "msp/errors.hpp"

namespace msp::io {

/// Column-major numeric table. Integer columns print without exponent.
struct Table
{
    std::string name;                   // file stem
    std::vector<std::string> columns;
    std::vector<bool> integer;          // per column; empty means all real
    std::vector<std::vector<double>> rows;

    void add_row(std::vector<double> row)
    {
        if (row.size() != columns.size())
            throw InvalidArgument("Table " + name + ": row width does not match the header");
        rows.push_back(std::move(row));
    }

    [[nodiscard]] bool is_integer(std::size_t c) const { return c < integer.size() && integer[c]; }
};

/// Fixed %.12e so repeated runs are byte-identical.
inline std::string format_real(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12e", v);
    return buf;
}

inline std::string format_cell(const Table& t, std::size_t c, double v)
{
    if (t.is_integer(c))
        return std::to_string(static_cast<long long>(v));
    return format_real(v);
}

/// Comment lines ("# ...") followed by the header row and the data.
inline std::string to_csv(const Table& t, const std::vector<std::string>& comments)
{
    std::string out;
    for (const auto& line : comments)
        out += "# " + line + "\n";
    for (std::size_t c = 0; c < t.columns.size(); ++c)
        out += (c ? "," : "") + t.columns[c];
    out += "\n";
    for (const auto& row : t.rows) {
        for (std::size_t c = 0; c < row.size(); ++c) {
            if (c)
                out += ",";
            out += format_cell(t, c, row[c]);
        }
        out += "\n";
    }
    return out;
}

inline void write_file(const std::string& path, const std::string& content)
{
    std::ofstream f(path, std::ios::binary);
    if (!f)
        throw InvalidArgument("cannot open " + path + " for writing");
    f << content;
    if (!f)
        throw InvalidArgument("write to " + path + " failed");
}

} // namespace msp::io

#endif
