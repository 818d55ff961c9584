#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace celltrack {

/// Maximum number of daughters a division may produce. Cell tracking fixes this to 2.
inline constexpr int kMaxChildren = 2;

/// Object identity that also carries lineage.
///
/// A label is either a spontaneous birth `(time, index)` or a daughter
/// `(parent, time, siblings, sibling_index)`. The parent is stored by value, so
/// ancestry can be recovered from any label without a registry. Labels are
/// immutable and cheap to copy (a shared pointer to an immutable node).
class Label {
 public:
  static Label birth(int time, int index);
  static Label spawned(const Label& parent, int time, int siblings, int sibling_index);

  bool is_birth() const noexcept;
  int time() const noexcept;
  /// Birth-region / measurement index. Only meaningful for birth labels.
  int birth_index() const noexcept;
  int siblings() const noexcept;
  int sibling_index() const noexcept;
  /// Number of division events between the root birth and this label.
  int depth() const noexcept;
  std::size_t hash() const noexcept;

  std::optional<Label> parent() const;

  /// Canonical compact form: `k.i` for births, `<parent>|k:c:q` for daughters.
  std::string to_string() const;
  static Label parse(std::string_view text);

  friend bool operator==(const Label& a, const Label& b) noexcept;
  friend std::strong_ordering operator<=>(const Label& a, const Label& b) noexcept;

 private:
  struct Node;
  explicit Label(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

struct LabelHash {
  std::size_t operator()(const Label& l) const noexcept { return l.hash(); }
};

/// Parent of a daughter label; empty for spontaneous births.
std::optional<Label> parent(const Label& label);

/// Labels generated at `next_time` by an object labeled `label` that produces
/// `count` objects: none (death), itself (survival) or `count` daughters.
std::vector<Label> generated_label_set(const Label& label, int count, int next_time,
                                       int max_children = kMaxChildren);

/// Root-to-leaf chain ending at `label` (inclusive).
std::vector<Label> ancestry(const Label& label);

struct LineageForest {
  std::set<Label> roots;
  std::map<Label, std::vector<Label>> children;

  bool contains(const Label& l) const;
  std::size_t size() const;
};

/// Links each label to its parent when the parent is in `labels`; labels whose
/// parent is absent become roots.
LineageForest build_lineage_forest(const std::set<Label>& labels);

}  // namespace celltrack

template <>
struct std::hash<celltrack::Label> {
  std::size_t operator()(const celltrack::Label& l) const noexcept { return l.hash(); }
};
