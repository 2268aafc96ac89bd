#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

namespace ucvf {

// A report cell: NA (monostate), text, integer, or real. Reals are
// quantized to %.6g at the moment they enter a table so the CSV and JSON
// writers emit the same value and both re-parse losslessly.
using Cell = std::variant<std::monostate, std::string, long long, double>;

struct Table {
    std::string name;
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;

    void add_row(std::vector<Cell> row);  // LengthMismatchError on width
};

Cell na_cell();
Cell text_cell(std::string v);
Cell int_cell(long long v);
Cell real_cell(double v);  // quantizes through %.6g

// "NA" for missing, %.6g for reals, raw text otherwise (CSV quoting is the
// writer's job, not the formatter's).
std::string format_cell(const Cell& cell);

void write_table_csv(const Table& table, const std::string& path);
void write_table_json(const Table& table, const std::string& path);

// Readers recover the typed cells: "NA"/null -> NA, integer-looking text ->
// integer, numeric text -> real, anything else -> text.
Table read_table_csv(const std::string& path, const std::string& name = "");
Table read_table_json(const std::string& path);

// Value equality where integers and reals compare numerically, so a count
// that travelled through JSON as 2.0 still matches the CSV's 2.
bool cells_equal(const Cell& a, const Cell& b);
bool tables_equal(const Table& a, const Table& b);

// FNV-1a over the file bytes, rendered as 16 hex digits. Used by manifests
// to pin artifact identity without timestamps.
std::uint64_t fnv1a_file(const std::string& path);  // IoError if unreadable
std::string file_hash_hex(const std::string& path);
std::uint64_t fnv1a_bytes(const std::string& bytes);

}  // namespace ucvf
