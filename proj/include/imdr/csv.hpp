#pragma once

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "imdr/errors.hpp"

namespace imdr {

/// In-memory CSV: header row plus data rows, all fields as text.
struct CsvTable {
    std::string source;
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    /// Index of a named column; SchemaError naming file and column if absent.
    std::size_t column(const std::string& name) const {
        for (std::size_t i = 0; i < header.size(); ++i)
            if (header[i] == name) return i;
        throw SchemaError("missing column '" + name + "' in " + source);
    }

    bool has_column(const std::string& name) const {
        for (const auto& h : header)
            if (h == name) return true;
        return false;
    }
};

namespace detail {

// RFC 4180 field splitter: quoted fields may contain commas, newlines and
// doubled quotes. `line_no` tracks the physical line of the record start.
inline std::vector<std::string> parse_csv_record(const std::string& text, std::size_t& pos,
                                                 std::size_t& line_no, const std::string& source) {
    std::vector<std::string> fields;
    std::string field;
    bool in_quotes = false;
    const std::size_t record_line = line_no;
    while (pos < text.size()) {
        char c = text[pos];
        if (in_quotes) {
            if (c == '"') {
                if (pos + 1 < text.size() && text[pos + 1] == '"') {
                    field.push_back('"');
                    ++pos;
                } else {
                    in_quotes = false;
                }
            } else {
                if (c == '\n') ++line_no;
                field.push_back(c);
            }
            ++pos;
            continue;
        }
        if (c == '"') {
            if (!field.empty())
                throw ParseError(source + ": line " + std::to_string(record_line) +
                                 ": quote inside unquoted field");
            in_quotes = true;
            ++pos;
        } else if (c == ',') {
            fields.push_back(std::move(field));
            field.clear();
            ++pos;
        } else if (c == '\r' && pos + 1 < text.size() && text[pos + 1] == '\n') {
            pos += 2;
            ++line_no;
            fields.push_back(std::move(field));
            return fields;
        } else if (c == '\n') {
            ++pos;
            ++line_no;
            fields.push_back(std::move(field));
            return fields;
        } else {
            field.push_back(c);
            ++pos;
        }
    }
    if (in_quotes)
        throw ParseError(source + ": line " + std::to_string(record_line) +
                         ": unterminated quoted field");
    fields.push_back(std::move(field));
    return fields;
}

} // namespace detail

/// Read a whole CSV file. First row is the header. Every data row must have
/// the header's field count; violations raise ParseError with the row number
/// (1-based over data rows, as in the error contracts).
inline CsvTable read_csv(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw ConfigError("file not found: " + path.string());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    const std::string text = buffer.str();

    CsvTable table;
    table.source = path.string();
    std::size_t pos = 0;
    std::size_t line_no = 1;
    if (text.rfind("\xEF\xBB\xBF", 0) == 0) pos = 3; // strip UTF-8 BOM
    if (text.size() <= pos)
        throw ParseError(table.source + ": empty file, header row required");
    table.header = detail::parse_csv_record(text, pos, line_no, table.source);
    std::size_t data_row = 0;
    while (pos < text.size()) {
        if (pos + 1 == text.size() && (text[pos] == '\n' || text[pos] == '\r')) break;
        auto fields = detail::parse_csv_record(text, pos, line_no, table.source);
        ++data_row;
        if (fields.size() == 1 && fields[0].empty() && pos >= text.size()) break; // trailing newline
        if (fields.size() != table.header.size())
            throw ParseError(table.source + ": row " + std::to_string(data_row) + " has " +
                             std::to_string(fields.size()) + " fields, expected " +
                             std::to_string(table.header.size()));
        table.rows.push_back(std::move(fields));
    }
    return table;
}

inline std::string csv_escape(const std::string& field) {
    if (field.find_first_of(",\"\n\r") == std::string::npos) return field;
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += "\"\"";
        else out.push_back(c);
    }
    out += "\"";
    return out;
}

inline std::string csv_line(const std::vector<std::string>& fields) {
    std::string line;
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) line.push_back(',');
        line += csv_escape(fields[i]);
    }
    line.push_back('\n');
    return line;
}

} // namespace imdr
