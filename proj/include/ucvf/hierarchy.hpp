#pragma once

#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace ucvf {

// Two-level category taxonomy. Check-ins carry a leaf category id; every id
// maps to a display label and to exactly one root category. Label indices in
// both views follow the lexicographic order of the label names, so the index
// spaces are reproducible from the label sets alone.
class CategoryHierarchy {
  public:
    // hierarchy: (leaf id, root label) rows. labels: (leaf id, leaf label)
    // rows. The two id sets must coincide; labels must be unique. Throws
    // HierarchyError on duplicates, unknown ids, or empty inputs.
    static CategoryHierarchy from_lists(
        const std::vector<std::pair<std::string, std::string>>& hierarchy,
        const std::vector<std::pair<std::string, std::string>>& labels);

    // Reads the two-column CSV files ("leaf_id,root_label" and
    // "leaf_id,leaf_label", optional headers and '#' comments).
    static CategoryHierarchy load(const std::string& hierarchy_path,
                                  const std::string& labels_path);

    void save(const std::string& hierarchy_path, const std::string& labels_path) const;

    int root_count() const { return static_cast<int>(roots_.size()); }
    int leaf_count() const { return static_cast<int>(leaves_.size()); }

    bool has_leaf_id(const std::string& id) const { return leaf_by_id_.count(id) != 0; }
    // Throw HierarchyError for unknown ids or labels.
    int leaf_index_by_id(const std::string& id) const;
    int root_index(const std::string& label) const;
    int leaf_index(const std::string& label) const;

    int root_of_leaf(int leaf_idx) const { return leaf_root_[static_cast<std::size_t>(leaf_idx)]; }

    const std::string& root_name(int idx) const { return roots_[static_cast<std::size_t>(idx)]; }
    const std::string& leaf_name(int idx) const { return leaves_[static_cast<std::size_t>(idx)]; }
    // Leaf id aligned with the leaf label index space.
    const std::string& leaf_id(int idx) const { return leaf_ids_[static_cast<std::size_t>(idx)]; }

    const std::vector<std::string>& roots() const { return roots_; }
    const std::vector<std::string>& leaves() const { return leaves_; }

  private:
    std::vector<std::string> roots_;    // sorted labels
    std::vector<std::string> leaves_;   // sorted labels
    std::vector<std::string> leaf_ids_;  // by leaf index
    std::vector<int> leaf_root_;         // leaf index -> root index
    std::unordered_map<std::string, int> root_by_name_;
    std::unordered_map<std::string, int> leaf_by_name_;
    std::unordered_map<std::string, int> leaf_by_id_;
};

}  // namespace ucvf
