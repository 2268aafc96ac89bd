#include "ucvf/hierarchy.hpp"

#include <algorithm>
#include <fstream>
#include <map>

#include "ucvf/errors.hpp"

namespace ucvf {

namespace {

std::string trim_copy(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    std::size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

// Two-column CSV reader shared by both hierarchy files. The expected header
// is skipped if present.
std::vector<std::pair<std::string, std::string>> read_two_columns(const std::string& path,
                                                                  const std::string& header) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open hierarchy file: " + path);
    std::vector<std::pair<std::string, std::string>> rows;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        std::string v = trim_copy(line);
        if (v.empty() || v[0] == '#') continue;
        if (first) {
            first = false;
            if (v == header) continue;
        }
        std::size_t comma = v.find(',');
        if (comma == std::string::npos)
            throw HierarchyError("line in " + path + " lacks a comma: " + v);
        rows.emplace_back(trim_copy(v.substr(0, comma)), trim_copy(v.substr(comma + 1)));
    }
    return rows;
}

}  // namespace

CategoryHierarchy CategoryHierarchy::from_lists(
    const std::vector<std::pair<std::string, std::string>>& hierarchy,
    const std::vector<std::pair<std::string, std::string>>& labels) {
    if (hierarchy.empty()) throw HierarchyError("hierarchy has no leaf-to-root rows");
    if (labels.empty()) throw HierarchyError("hierarchy has no leaf label rows");

    std::map<std::string, std::string> root_by_id;
    for (const auto& [id, root] : hierarchy) {
        if (id.empty() || root.empty())
            throw HierarchyError("empty field in leaf-to-root row for id '" + id + "'");
        if (!root_by_id.emplace(id, root).second)
            throw HierarchyError("duplicate leaf id in hierarchy: " + id);
    }

    // Leaf index space: lexicographic over leaf labels.
    std::map<std::string, std::string> id_by_label;
    std::map<std::string, std::string> label_by_id;
    for (const auto& [id, label] : labels) {
        if (id.empty() || label.empty())
            throw HierarchyError("empty field in leaf label row for id '" + id + "'");
        if (!label_by_id.emplace(id, label).second)
            throw HierarchyError("duplicate leaf id in labels: " + id);
        if (!id_by_label.emplace(label, id).second)
            throw HierarchyError("duplicate leaf label: " + label);
        if (!root_by_id.count(id))
            throw HierarchyError("leaf id '" + id + "' has a label but no root mapping");
    }
    for (const auto& [id, root] : root_by_id)
        if (!label_by_id.count(id))
            throw HierarchyError("leaf id '" + id + "' has a root mapping but no label");

    CategoryHierarchy h;
    std::map<std::string, int> root_order;
    for (const auto& [id, root] : root_by_id) root_order[root] = 0;
    for (auto& [root, idx] : root_order) {
        idx = static_cast<int>(h.roots_.size());
        h.root_by_name_.emplace(root, idx);
        h.roots_.push_back(root);
    }
    for (const auto& [label, id] : id_by_label) {
        int idx = static_cast<int>(h.leaves_.size());
        h.leaves_.push_back(label);
        h.leaf_ids_.push_back(id);
        h.leaf_root_.push_back(root_order[root_by_id[id]]);
        h.leaf_by_name_.emplace(label, idx);
        h.leaf_by_id_.emplace(id, idx);
    }
    return h;
}

CategoryHierarchy CategoryHierarchy::load(const std::string& hierarchy_path,
                                          const std::string& labels_path) {
    return from_lists(read_two_columns(hierarchy_path, "leaf_id,root_label"),
                      read_two_columns(labels_path, "leaf_id,leaf_label"));
}

void CategoryHierarchy::save(const std::string& hierarchy_path,
                             const std::string& labels_path) const {
    std::ofstream hf(hierarchy_path);
    if (!hf) throw IoError("cannot write hierarchy file: " + hierarchy_path);
    hf << "leaf_id,root_label\n";
    for (int i = 0; i < leaf_count(); ++i)
        hf << leaf_ids_[static_cast<std::size_t>(i)] << ','
           << roots_[static_cast<std::size_t>(leaf_root_[static_cast<std::size_t>(i)])] << "\n";

    std::ofstream lf(labels_path);
    if (!lf) throw IoError("cannot write labels file: " + labels_path);
    lf << "leaf_id,leaf_label\n";
    for (int i = 0; i < leaf_count(); ++i)
        lf << leaf_ids_[static_cast<std::size_t>(i)] << ',' << leaves_[static_cast<std::size_t>(i)]
           << "\n";
}

int CategoryHierarchy::leaf_index_by_id(const std::string& id) const {
    auto it = leaf_by_id_.find(id);
    if (it == leaf_by_id_.end()) throw HierarchyError("unknown leaf category id: " + id);
    return it->second;
}

int CategoryHierarchy::root_index(const std::string& label) const {
    auto it = root_by_name_.find(label);
    if (it == root_by_name_.end()) throw HierarchyError("unknown root category: " + label);
    return it->second;
}

int CategoryHierarchy::leaf_index(const std::string& label) const {
    auto it = leaf_by_name_.find(label);
    if (it == leaf_by_name_.end()) throw HierarchyError("unknown leaf category: " + label);
    return it->second;
}

}  // namespace ucvf
