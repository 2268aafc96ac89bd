#include "ucvf/report.hpp"

#include <cctype>
#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "ucvf/errors.hpp"

namespace ucvf {
namespace {

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

bool needs_quoting(const std::string& s) {
    if (s.empty()) return true;
    return s.find_first_of(",\"\n\r") != std::string::npos;
}

std::string quote_csv(const std::string& s) {
    if (!needs_quoting(s)) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += "\"\"";
        else out += c;
    }
    out += '"';
    return out;
}

// One CSV record, handling quoted fields; returns false at end of stream.
bool read_csv_record(std::istream& in, std::vector<std::string>& fields) {
    fields.clear();
    std::string field;
    bool in_quotes = false;
    bool any = false;
    int ch;
    while ((ch = in.get()) != EOF) {
        any = true;
        char c = static_cast<char>(ch);
        if (in_quotes) {
            if (c == '"') {
                if (in.peek() == '"') {
                    in.get();
                    field += '"';
                } else {
                    in_quotes = false;
                }
            } else {
                field += c;
            }
        } else if (c == '"') {
            in_quotes = true;
        } else if (c == ',') {
            fields.push_back(field);
            field.clear();
        } else if (c == '\n') {
            break;
        } else if (c == '\r') {
            // swallow; the \n that follows terminates the record
        } else {
            field += c;
        }
    }
    if (!any) return false;
    fields.push_back(field);
    return true;
}

Cell parse_cell(const std::string& text) {
    if (text == "NA") return Cell{std::monostate{}};
    if (!text.empty()) {
        long long iv = 0;
        auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), iv);
        if (ec == std::errc() && p == text.data() + text.size()) return Cell{iv};
        char* end = nullptr;
        double dv = std::strtod(text.c_str(), &end);
        if (end == text.c_str() + text.size()) return Cell{dv};
    }
    return Cell{text};
}

}  // namespace

void Table::add_row(std::vector<Cell> row) {
    if (row.size() != columns.size())
        throw LengthMismatchError("table '" + name + "' expects " +
                                  std::to_string(columns.size()) + " cells, got " +
                                  std::to_string(row.size()));
    rows.push_back(std::move(row));
}

Cell na_cell() { return Cell{std::monostate{}}; }
Cell text_cell(std::string v) { return Cell{std::move(v)}; }
Cell int_cell(long long v) { return Cell{v}; }

Cell real_cell(double v) {
    return Cell{std::strtod(format_double(v).c_str(), nullptr)};
}

std::string format_cell(const Cell& cell) {
    switch (cell.index()) {
        case 0: return "NA";
        case 1: return std::get<std::string>(cell);
        case 2: return std::to_string(std::get<long long>(cell));
        default: return format_double(std::get<double>(cell));
    }
}

void write_table_csv(const Table& table, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open " + path + " for writing");
    for (std::size_t i = 0; i < table.columns.size(); ++i) {
        if (i) out << ',';
        out << quote_csv(table.columns[i]);
    }
    out << '\n';
    for (const auto& row : table.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out << ',';
            const Cell& c = row[i];
            if (c.index() == 1) out << quote_csv(std::get<std::string>(c));
            else out << format_cell(c);
        }
        out << '\n';
    }
    if (!out) throw IoError("failed while writing " + path);
}

void write_table_json(const Table& table, const std::string& path) {
    nlohmann::json j;
    j["name"] = table.name;
    j["columns"] = table.columns;
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& row : table.rows) {
        nlohmann::json r = nlohmann::json::array();
        for (const auto& c : row) {
            switch (c.index()) {
                case 0: r.push_back(nullptr); break;
                case 1: r.push_back(std::get<std::string>(c)); break;
                case 2: r.push_back(std::get<long long>(c)); break;
                default: r.push_back(std::get<double>(c)); break;
            }
        }
        rows.push_back(std::move(r));
    }
    j["rows"] = std::move(rows);
    std::ofstream out(path);
    if (!out) throw IoError("cannot open " + path + " for writing");
    out << j.dump(2) << '\n';
    if (!out) throw IoError("failed while writing " + path);
}

Table read_table_csv(const std::string& path, const std::string& name) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);
    Table t;
    t.name = name;
    std::vector<std::string> fields;
    if (!read_csv_record(in, fields)) throw ParseError("empty table file " + path, 0, -1);
    t.columns = fields;
    while (read_csv_record(in, fields)) {
        if (fields.size() == 1 && fields[0].empty()) continue;  // trailing newline
        if (fields.size() != t.columns.size())
            throw ParseError("row width mismatch in " + path, 0, -1);
        std::vector<Cell> row;
        row.reserve(fields.size());
        for (const auto& f : fields) row.push_back(parse_cell(f));
        t.rows.push_back(std::move(row));
    }
    return t;
}

Table read_table_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("bad json in ") + path + ": " + e.what(), 0, -1);
    }
    Table t;
    t.name = j.value("name", "");
    if (!j.contains("columns") || !j.contains("rows"))
        throw ParseError("table json missing columns/rows in " + path, 0, -1);
    for (const auto& c : j["columns"]) t.columns.push_back(c.get<std::string>());
    for (const auto& jr : j["rows"]) {
        std::vector<Cell> row;
        for (const auto& c : jr) {
            if (c.is_null()) row.push_back(na_cell());
            else if (c.is_string()) row.push_back(text_cell(c.get<std::string>()));
            else if (c.is_number_integer() || c.is_number_unsigned())
                row.push_back(int_cell(c.get<long long>()));
            else if (c.is_number_float()) row.push_back(Cell{c.get<double>()});
            else throw ParseError("unsupported cell type in " + path, 0, -1);
        }
        if (row.size() != t.columns.size()) throw ParseError("row width mismatch in " + path, 0, -1);
        t.rows.push_back(std::move(row));
    }
    return t;
}

bool cells_equal(const Cell& a, const Cell& b) {
    const bool a_num = a.index() == 2 || a.index() == 3;
    const bool b_num = b.index() == 2 || b.index() == 3;
    if (a_num && b_num) {
        const double av = a.index() == 2
            ? static_cast<double>(std::get<long long>(a)) : std::get<double>(a);
        const double bv = b.index() == 2
            ? static_cast<double>(std::get<long long>(b)) : std::get<double>(b);
        return av == bv;
    }
    if (a.index() != b.index()) return false;
    if (a.index() == 0) return true;
    if (a.index() == 1) return std::get<std::string>(a) == std::get<std::string>(b);
    return false;
}

bool tables_equal(const Table& a, const Table& b) {
    if (a.columns != b.columns) return false;
    if (a.rows.size() != b.rows.size()) return false;
    for (std::size_t r = 0; r < a.rows.size(); ++r)
        for (std::size_t c = 0; c < a.columns.size(); ++c)
            if (!cells_equal(a.rows[r][c], b.rows[r][c])) return false;
    return true;
}

std::uint64_t fnv1a_bytes(const std::string& bytes) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

std::uint64_t fnv1a_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path + " for hashing");
    std::ostringstream ss;
    ss << in.rdbuf();
    return fnv1a_bytes(ss.str());
}

std::string file_hash_hex(const std::string& path) {
    char buf[24];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(fnv1a_file(path)));
    return buf;
}

}  // namespace ucvf
