#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include <fmt/format.h>
#include <openssl/evp.h>

#include "sae/error.hpp"
#include "sae/io.hpp"

namespace sae::io {

std::optional<std::size_t> CsvTable::find_column(std::string_view name) const {
    for (std::size_t i = 0; i < header.size(); ++i)
        if (header[i] == name) return i;
    return std::nullopt;
}

std::size_t CsvTable::column(std::string_view name, const std::string& source) const {
    if (auto i = find_column(name)) return *i;
    throw InputError(source + ": missing column '" + std::string(name) + "'");
}

CsvTable parse_csv(std::string_view text, const std::string& source) {
    std::vector<std::vector<std::string>> records;
    std::vector<std::string> record;
    std::string cell;
    bool quoted = false, cell_started = false;
    std::vector<std::size_t> lines;  // first line of each record
    std::size_t line = 1, record_start = 1;
    auto end_cell = [&] {
        record.push_back(std::move(cell));
        cell.clear();
        cell_started = false;
    };
    auto end_record = [&] {
        end_cell();
        if (!(record.size() == 1 && record[0].empty())) {
            records.push_back(std::move(record));
            lines.push_back(record_start);
        }
        record.clear();
    };
    for (std::size_t i = 0; i < text.size(); ++i) {
        const char ch = text[i];
        if (quoted) {
            if (ch == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    cell += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                if (ch == '\n') ++line;
                cell += ch;
            }
        } else if (ch == '"' && !cell_started) {
            quoted = cell_started = true;
        } else if (ch == ',') {
            end_cell();
        } else if (ch == '\n') {
            end_record();
            record_start = ++line;
        } else if (ch != '\r') {
            cell += ch;
            cell_started = true;
        }
    }
    if (quoted) throw InputError(source + ":" + std::to_string(line) + ": unterminated quoted field");
    if (cell_started || !record.empty()) end_record();
    if (records.empty()) throw InputError(source + ": empty CSV (no header row)");

    CsvTable table;
    table.header = std::move(records.front());
    for (std::size_t r = 1; r < records.size(); ++r) {
        if (records[r].size() != table.header.size())
            throw InputError(source + ":" + std::to_string(lines[r]) + ": " + std::to_string(records[r].size()) +
                             " fields, header has " + std::to_string(table.header.size()));
        table.rows.push_back(std::move(records[r]));
    }
    return table;
}

CsvTable read_csv(const fs::path& path) { return parse_csv(read_file(path), path.string()); }

namespace {

void append_cell(std::string& out, const std::string& cell) {
    if (cell.find_first_of(",\"\n\r") == std::string::npos) {
        out += cell;
        return;
    }
    out += '"';
    for (char ch : cell) {
        if (ch == '"') out += '"';
        out += ch;
    }
    out += '"';
}

void append_record(std::string& out, const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) out += ',';
        append_cell(out, cells[i]);
    }
    out += '\n';
}

}  // namespace

std::string format_csv(const CsvTable& table) {
    std::string out;
    append_record(out, table.header);
    for (const auto& row : table.rows) append_record(out, row);
    return out;
}

void write_csv(const fs::path& path, const CsvTable& table) { write_file(path, format_csv(table)); }

std::string format_number(double value) {
    if (std::isnan(value)) return "NaN";
    return fmt::format("{}", value);
}

double parse_number(std::string_view text, const std::string& where) {
    if (text == "NaN" || text == "nan") return std::numeric_limits<double>::quiet_NaN();
    double value = 0.0;
    const char* first = text.data();
    const char* last = first + text.size();
    if (!text.empty() && *first == '+') ++first;
    const auto [ptr, ec] = std::from_chars(first, last, value);
    if (text.empty() || ec != std::errc{} || ptr != last)
        throw InputError(where + ": '" + std::string(text) + "' is not a number");
    return value;
}

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const fs::path& path, std::string_view content) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot write '" + path.string() + "'");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw InputError("error writing '" + path.string() + "'");
}

std::string sha256_hex(std::string_view bytes) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1)
        throw NumericalError("SHA-256 digest failed");
    std::string hex;
    for (unsigned int i = 0; i < len; ++i) hex += fmt::format("{:02x}", digest[i]);
    return hex;
}

}  // namespace sae::io
