#include "celltrack/labels.hpp"

#include <charconv>

#include "celltrack/errors.hpp"
#include "celltrack/hashing.hpp"

namespace celltrack {

struct Label::Node {
  std::shared_ptr<const Node> parent;  // null for births
  int time = 0;
  int index = 0;  // birth index, or sibling index for daughters
  int siblings = 0;
  int depth = 0;
  std::size_t hash = 0;
};

Label Label::birth(int time, int index) {
  if (time < 0 || index < 0) throw InvalidArgument("birth label needs time >= 0 and index >= 0");
  auto n = std::make_shared<Node>();
  n->time = time;
  n->index = index;
  n->hash = hash_combine(hash_combine(0x5eed, static_cast<std::uint64_t>(time)),
                         static_cast<std::uint64_t>(index));
  return Label(std::move(n));
}

Label Label::spawned(const Label& parent, int time, int siblings, int sibling_index) {
  if (time <= parent.time())
    throw InvalidArgument("daughter label time must exceed the parent's label time");
  if (siblings < 2 || sibling_index < 1 || sibling_index > siblings)
    throw InvalidArgument("invalid sibling count or sibling index");
  auto n = std::make_shared<Node>();
  n->parent = parent.node_;
  n->time = time;
  n->index = sibling_index;
  n->siblings = siblings;
  n->depth = parent.node_->depth + 1;
  std::uint64_t h = hash_combine(parent.node_->hash, static_cast<std::uint64_t>(time));
  h = hash_combine(h, static_cast<std::uint64_t>(siblings));
  n->hash = hash_combine(h, static_cast<std::uint64_t>(sibling_index));
  return Label(std::move(n));
}

bool Label::is_birth() const noexcept { return node_->parent == nullptr; }
int Label::time() const noexcept { return node_->time; }
int Label::birth_index() const noexcept { return is_birth() ? node_->index : -1; }
int Label::siblings() const noexcept { return node_->siblings; }
int Label::sibling_index() const noexcept { return is_birth() ? 0 : node_->index; }
int Label::depth() const noexcept { return node_->depth; }
std::size_t Label::hash() const noexcept { return node_->hash; }

std::optional<Label> Label::parent() const {
  if (is_birth()) return std::nullopt;
  return Label(node_->parent);
}

std::string Label::to_string() const {
  if (is_birth()) return std::to_string(node_->time) + "." + std::to_string(node_->index);
  return Label(node_->parent).to_string() + "|" + std::to_string(node_->time) + ":" +
         std::to_string(node_->siblings) + ":" + std::to_string(node_->index);
}

namespace {

int parse_int(std::string_view s, std::string_view whole) {
  int v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size())
    throw ParseError("malformed label '" + std::string(whole) + "'");
  return v;
}

}  // namespace

Label Label::parse(std::string_view text) {
  const auto bar = text.rfind('|');
  if (bar == std::string_view::npos) {
    const auto dot = text.find('.');
    if (dot == std::string_view::npos) throw ParseError("malformed label '" + std::string(text) + "'");
    return birth(parse_int(text.substr(0, dot), text), parse_int(text.substr(dot + 1), text));
  }
  const Label p = parse(text.substr(0, bar));
  const auto tail = text.substr(bar + 1);
  const auto c1 = tail.find(':');
  const auto c2 = tail.find(':', c1 == std::string_view::npos ? c1 : c1 + 1);
  if (c1 == std::string_view::npos || c2 == std::string_view::npos)
    throw ParseError("malformed label '" + std::string(text) + "'");
  try {
    return spawned(p, parse_int(tail.substr(0, c1), text), parse_int(tail.substr(c1 + 1, c2 - c1 - 1), text),
                   parse_int(tail.substr(c2 + 1), text));
  } catch (const InvalidArgument& e) {
    throw ParseError("invalid label '" + std::string(text) + "': " + e.what());
  }
}

bool operator==(const Label& a, const Label& b) noexcept {
  if (a.node_ == b.node_) return true;
  if (a.node_->hash != b.node_->hash) return false;
  return (a <=> b) == std::strong_ordering::equal;
}

std::strong_ordering operator<=>(const Label& a, const Label& b) noexcept {
  if (a.node_ == b.node_) return std::strong_ordering::equal;
  if (auto c = a.time() <=> b.time(); c != 0) return c;
  const bool ab = a.is_birth(), bb = b.is_birth();
  if (ab != bb) return ab ? std::strong_ordering::less : std::strong_ordering::greater;
  if (ab) return a.node_->index <=> b.node_->index;
  if (auto c = Label(a.node_->parent) <=> Label(b.node_->parent); c != 0) return c;
  if (auto c = a.node_->siblings <=> b.node_->siblings; c != 0) return c;
  return a.node_->index <=> b.node_->index;
}

std::optional<Label> parent(const Label& label) { return label.parent(); }

std::vector<Label> generated_label_set(const Label& label, int count, int next_time, int max_children) {
  if (count < 0 || count > max_children)
    throw InvalidArgument("generated object count " + std::to_string(count) + " exceeds the limit " +
                          std::to_string(max_children));
  if (next_time <= label.time()) throw InvalidArgument("next_time must exceed the label time");
  if (count == 0) return {};
  if (count == 1) return {label};
  std::vector<Label> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int q = 1; q <= count; ++q) out.push_back(Label::spawned(label, next_time, count, q));
  return out;
}

std::vector<Label> ancestry(const Label& label) {
  std::vector<Label> chain{label};
  for (auto p = label.parent(); p; p = p->parent()) chain.push_back(*p);
  return {chain.rbegin(), chain.rend()};
}

bool LineageForest::contains(const Label& l) const {
  if (roots.count(l)) return true;
  for (const auto& [p, kids] : children)
    for (const auto& k : kids)
      if (k == l) return true;
  return false;
}

std::size_t LineageForest::size() const {
  std::size_t n = roots.size();
  for (const auto& [p, kids] : children) n += kids.size();
  return n;
}

LineageForest build_lineage_forest(const std::set<Label>& labels) {
  LineageForest forest;
  for (const auto& l : labels) {
    const auto p = l.parent();
    if (p && labels.count(*p))
      forest.children[*p].push_back(l);
    else
      forest.roots.insert(l);
  }
  // std::set iteration is already ordered, so each child list is sorted.
  return forest;
}

}  // namespace celltrack
