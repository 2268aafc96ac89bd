#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "ucvf/checkin.hpp"
#include "ucvf/geo.hpp"

namespace ucvf {

class CategoryHierarchy;

// A parsed check-in with its category resolved against the hierarchy.
struct Record {
    CheckIn checkin;
    int leaf_label = -1;
    int root_label = -1;
};

struct IngestSummary {
    std::size_t lines_total = 0;  // data lines seen, header excluded
    std::size_t parsed = 0;
    std::size_t skipped_malformed = 0;
    std::size_t skipped_bad_coordinate = 0;
    std::size_t skipped_bad_date = 0;
    std::size_t skipped_unknown_category = 0;
    std::size_t user_count = 0;
    std::size_t poi_count = 0;
    std::size_t checkin_count = 0;  // records kept

    std::size_t skipped_total() const {
        return skipped_malformed + skipped_bad_coordinate + skipped_bad_date +
               skipped_unknown_category;
    }
};

struct Dataset {
    // Keyed by user id; per-user records keep file order.
    std::map<std::string, std::vector<Record>> by_user;
    IngestSummary summary;

    std::size_t user_count() const { return by_user.size(); }
};

// Loads a tab-separated check-in file. A leading header line is detected by
// a non-numeric year field and skipped, as are blank and '#' comment lines.
// Lines that fail to parse or carry a category name missing from the
// hierarchy are counted in the summary and dropped rather than aborting the
// load. Throws IoError if the file cannot be opened and EmptyDatasetError
// if no line survives.
Dataset load_dataset(const std::string& path, const CategoryHierarchy& h,
                     const CheckinSchema& schema = {});

// Home estimation over every user in the dataset.
HomeMap compute_homes(const Dataset& ds);

}  // namespace ucvf
