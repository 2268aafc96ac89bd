#include "ucvf/features.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "ucvf/dataset.hpp"
#include "ucvf/errors.hpp"

namespace ucvf {

double FeatureMatrix::total() const {
    double s = 0.0;
    for (double v : values) s += v;
    return s;
}

FeatureMatrix build_ucvf(const std::string& user_id, const std::vector<const Record*>& records,
                         const PairSpec& pair, const HomeLocation& home) {
    FeatureMatrix m;
    m.user_id = user_id;
    m.context = pair.context.name;
    m.view = pair.view.name;
    m.rows = pair.context.bucket_count;
    m.cols = pair.view.label_count;
    m.values.assign(static_cast<std::size_t>(m.rows) * m.cols, 0.0);
    for (const Record* r : records) {
        int bucket = context_value(r->checkin, pair.context.kind, home);
        int label = pair.view.kind == ViewKind::Leaf ? r->leaf_label : r->root_label;
        if (label < 0 || label >= m.cols)
            throw ShapeMismatchError("label " + std::to_string(label) + " outside " +
                                     std::to_string(m.cols) + "-column view for user " + user_id);
        m.at(bucket, label) += 1.0;
    }
    return m;
}

FeatureMatrix build_ucvf(const std::string& user_id, const std::vector<Record>& records,
                         const PairSpec& pair, const HomeLocation& home) {
    std::vector<const Record*> ptrs;
    ptrs.reserve(records.size());
    for (const auto& r : records) ptrs.push_back(&r);
    return build_ucvf(user_id, ptrs, pair, home);
}

std::vector<FeatureMatrix> build_ufs_for_user(const std::string& user_id,
                                              const std::vector<Record>& records,
                                              const std::vector<PairSpec>& pairs,
                                              const HomeLocation& home) {
    std::vector<FeatureMatrix> out;
    out.reserve(pairs.size());
    for (const auto& pair : pairs) out.push_back(build_ucvf(user_id, records, pair, home));
    return out;
}

FeatureMatrix normalize_matrix(const FeatureMatrix& m) {
    FeatureMatrix out = m;
    double total = m.total();
    if (total > 0.0)
        for (double& v : out.values) v /= total;
    return out;
}

namespace {

// Integers print exactly as integers so count matrices stay readable and
// byte-stable; everything else gets round-trip precision.
void append_value(std::string& out, double v) {
    if (v == std::floor(v) && std::fabs(v) < 9.007199254740992e15) {
        out += std::to_string(static_cast<long long>(v));
        return;
    }
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    out += buf;
}

}  // namespace

void write_matrix_file(const std::string& path, const std::vector<FeatureMatrix>& mats,
                       const std::string& run_comment) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open matrix file for writing: " + path);
    if (!run_comment.empty()) out << "# " << run_comment << "\n";
    out << "user_id,context,view,rows,cols\n";
    std::string line;
    for (const auto& m : mats) {
        if (static_cast<std::size_t>(m.rows) * m.cols != m.values.size())
            throw ShapeMismatchError("matrix for user " + m.user_id +
                                     " has inconsistent dimensions");
        out << m.user_id << ',' << m.context << ',' << m.view << ',' << m.rows << ',' << m.cols
            << "\n";
        for (int r = 0; r < m.rows; ++r) {
            line.clear();
            for (int c = 0; c < m.cols; ++c) {
                if (c) line += ',';
                append_value(line, m.at(r, c));
            }
            out << line << "\n";
        }
    }
    if (!out) throw IoError("failed writing matrix file: " + path);
}

std::vector<FeatureMatrix> read_matrix_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open matrix file: " + path);
    std::vector<FeatureMatrix> mats;
    std::string line;
    bool saw_header = false;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        if (!saw_header) {
            if (line != "user_id,context,view,rows,cols")
                throw IoError("unexpected matrix file header in " + path + ": " + line);
            saw_header = true;
            continue;
        }
        // Block header row.
        std::stringstream ss(line);
        FeatureMatrix m;
        std::string rows_s, cols_s;
        if (!std::getline(ss, m.user_id, ',') || !std::getline(ss, m.context, ',') ||
            !std::getline(ss, m.view, ',') || !std::getline(ss, rows_s, ',') ||
            !std::getline(ss, cols_s))
            throw IoError("malformed matrix block header in " + path + ": " + line);
        m.rows = std::stoi(rows_s);
        m.cols = std::stoi(cols_s);
        if (m.rows <= 0 || m.cols <= 0)
            throw ShapeMismatchError("nonpositive matrix dimensions in " + path);
        m.values.reserve(static_cast<std::size_t>(m.rows) * m.cols);
        for (int r = 0; r < m.rows; ++r) {
            if (!std::getline(in, line))
                throw IoError("truncated matrix block for user " + m.user_id + " in " + path);
            if (!line.empty() && line.back() == '\r') line.pop_back();
            std::stringstream vs(line);
            std::string cell;
            int c = 0;
            while (std::getline(vs, cell, ',')) {
                m.values.push_back(std::stod(cell));
                ++c;
            }
            if (c != m.cols)
                throw ShapeMismatchError("matrix row for user " + m.user_id + " has " +
                                         std::to_string(c) + " cells, expected " +
                                         std::to_string(m.cols));
        }
        mats.push_back(std::move(m));
    }
    if (!saw_header) throw IoError("matrix file has no header: " + path);
    return mats;
}

}  // namespace ucvf
