#include "ucvf/dataset.hpp"

#include <fstream>
#include <set>

#include "ucvf/errors.hpp"
#include "ucvf/hierarchy.hpp"

namespace ucvf {

namespace {

bool looks_like_header(const std::string& line, const CheckinSchema& schema) {
    // A data line carries a numeric year; a header carries a column name.
    std::size_t start = 0;
    int idx = 0;
    while (idx < schema.year) {
        std::size_t tab = line.find('\t', start);
        if (tab == std::string::npos) return false;
        start = tab + 1;
        ++idx;
    }
    std::size_t end = line.find('\t', start);
    std::string field = line.substr(start, end == std::string::npos ? end : end - start);
    if (field.empty()) return false;
    for (char ch : field)
        if (!(ch >= '0' && ch <= '9') && ch != ' ' && ch != '\r') return true;
    return false;
}

}  // namespace

Dataset load_dataset(const std::string& path, const CategoryHierarchy& h,
                     const CheckinSchema& schema) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open dataset: " + path);

    Dataset ds;
    std::set<std::string> pois;
    std::string line;
    std::size_t line_number = 0;
    bool first_content = true;
    while (std::getline(in, line)) {
        ++line_number;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        if (first_content) {
            first_content = false;
            if (looks_like_header(line, schema)) continue;
        }
        ++ds.summary.lines_total;
        CheckIn c;
        try {
            c = parse_checkin_line(line, schema, line_number);
        } catch (const InvalidCoordinateError&) {
            ++ds.summary.skipped_bad_coordinate;
            continue;
        } catch (const InvalidDateError&) {
            ++ds.summary.skipped_bad_date;
            continue;
        } catch (const ParseError&) {
            ++ds.summary.skipped_malformed;
            continue;
        }
        ++ds.summary.parsed;
        if (!h.has_leaf_id(c.category_id)) {
            ++ds.summary.skipped_unknown_category;
            continue;
        }
        Record r;
        r.leaf_label = h.leaf_index_by_id(c.category_id);
        r.root_label = h.root_of_leaf(r.leaf_label);
        pois.insert(c.poi_id);
        std::string user = c.user_id;
        r.checkin = std::move(c);
        ds.by_user[std::move(user)].push_back(std::move(r));
    }

    ds.summary.user_count = ds.by_user.size();
    ds.summary.poi_count = pois.size();
    std::size_t kept = 0;
    for (const auto& [user, recs] : ds.by_user) kept += recs.size();
    ds.summary.checkin_count = kept;
    if (kept == 0)
        throw EmptyDatasetError("no usable check-in in " + path + " (" +
                                std::to_string(ds.summary.skipped_total()) + " lines skipped)");
    return ds;
}

HomeMap compute_homes(const Dataset& ds) {
    std::map<std::string, std::vector<CheckIn>> by_user;
    for (const auto& [user, recs] : ds.by_user) {
        auto& v = by_user[user];
        v.reserve(recs.size());
        for (const auto& r : recs) v.push_back(r.checkin);
    }
    return estimate_homes(by_user);
}

}  // namespace ucvf
