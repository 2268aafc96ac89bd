#pragma once

#include <string>
#include <vector>

#include "ucvf/specs.hpp"

namespace ucvf {

struct HomeLocation;
struct Record;

// Per-user context-by-view count matrix. Rows are context buckets, columns
// are category labels, stored row-major. Values are exact integers for raw
// counts and fractions after normalisation; doubles represent both exactly
// enough for every dataset size this handles.
struct FeatureMatrix {
    std::string user_id;
    std::string context;  // "time" or "distance"
    std::string view;     // "root" or "leaf"
    int rows = 0;
    int cols = 0;
    std::vector<double> values;  // row-major, rows*cols entries

    double& at(int r, int c) { return values[static_cast<std::size_t>(r) * cols + c]; }
    double at(int r, int c) const { return values[static_cast<std::size_t>(r) * cols + c]; }
    double total() const;
};

// Counts the user's records into a matrix shaped by the pair. The home
// location feeds the distance context and is unused for time pairs.
FeatureMatrix build_ucvf(const std::string& user_id, const std::vector<const Record*>& records,
                         const PairSpec& pair, const HomeLocation& home);
FeatureMatrix build_ucvf(const std::string& user_id, const std::vector<Record>& records,
                         const PairSpec& pair, const HomeLocation& home);

// All four canonical pair matrices for one user, in canonical pair order.
std::vector<FeatureMatrix> build_ufs_for_user(const std::string& user_id,
                                              const std::vector<Record>& records,
                                              const std::vector<PairSpec>& pairs,
                                              const HomeLocation& home);

// Divides every cell by the matrix total so cells sum to 1. An all-zero
// matrix stays all zero.
FeatureMatrix normalize_matrix(const FeatureMatrix& m);

// Matrix container file: optional '#' comment lines, a
// "user_id,context,view,rows,cols" column header, then one block per matrix
// (its header row followed by `rows` comma-separated value lines).
// Matrices are written in the order given; readers get the same order back.
void write_matrix_file(const std::string& path, const std::vector<FeatureMatrix>& mats,
                       const std::string& run_comment = {});
std::vector<FeatureMatrix> read_matrix_file(const std::string& path);

}  // namespace ucvf
