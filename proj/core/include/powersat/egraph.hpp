#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "powersat/design.hpp"
#include "powersat/op.hpp"

namespace powersat {

/// Identifier of an e-class. Only the canonical id (the union-find root) is
/// meaningful after merges; call EGraph::find to canonicalize.
enum class ClassId : std::uint32_t {};

constexpr std::size_t index(ClassId id) { return static_cast<std::size_t>(id); }

using ENode = BasicNode<ClassId>;

struct ENodeHash {
  std::size_t operator()(const ENode& n) const;
};

/// Deterministic hash of a node (operator, attributes, child ids). Used for
/// every tie-break.
std::uint64_t node_hash(const ENode& n);

/// Where a node came from: the input design, or the rule that created it.
using OriginId = std::uint16_t;
inline constexpr OriginId kOriginInput = 0;

struct ENodeEntry {
  ENode node;
  OriginId origin = kOriginInput;
  bool original = false;  // present in the input design
};

struct EClass {
  ClassId id{};
  std::uint32_t width = 0;
  std::vector<ENodeEntry> nodes;
  std::vector<std::pair<ENode, ClassId>> parents;
};

/// Classes each design node landed in, and the class of every output.
struct DesignEmbedding {
  std::vector<ClassId> node_class;  // indexed by design NodeId
  std::vector<ClassId> roots;       // one per design output
};

/// A hash-consed e-graph over netlist operators with union-find and
/// deferred congruence-closure rebuilding (upward merging through parent
/// lists). All nodes of a class share one width.
class EGraph {
 public:
  EGraph();

  /// Adds a node (children canonicalized first) and returns its class. An
  /// existing structurally identical node is reused.
  ClassId add(ENode node, OriginId origin = kOriginInput);

  /// Adds every node of `d`, marking them original. Shared subexpressions
  /// share classes. Also records the output classes as roots.
  DesignEmbedding add_design(const Design& d);

  ClassId find(ClassId id) const;

  /// Unions two classes; returns the surviving canonical id. Throws
  /// InternalError when the widths differ (an unsound rewrite).
  ClassId merge(ClassId a, ClassId b);

  /// Restores congruence: canonical children everywhere and no two classes
  /// holding identical nodes.
  void rebuild();

  bool clean() const { return !dirty_; }

  /// Canonical class ids in increasing order.
  std::vector<ClassId> class_ids() const;

  const EClass& eclass(ClassId id) const;
  std::uint32_t width(ClassId id) const { return eclass(id).width; }

  std::size_t num_classes() const { return num_classes_; }
  /// One past the largest class id ever issued; sizes id-indexed tables.
  std::size_t id_bound() const { return classes_.size(); }
  std::size_t num_nodes() const { return num_nodes_; }

  /// Canonical copy of `n` (children replaced by their roots).
  ENode canonicalize(ENode n) const;

  /// Class already holding `n`, if any.
  std::optional<ClassId> lookup(const ENode& n) const;

  const std::vector<ClassId>& roots() const { return roots_; }
  void set_roots(std::vector<ClassId> roots) { roots_ = std::move(roots); }

  OriginId intern_origin(std::string_view name);
  const std::string& origin_name(OriginId id) const { return origins_[id]; }

  /// True when some node of the class is a constant.
  bool is_constant(ClassId id) const;

  /// One line per class: "c<ID> w<WIDTH>: node*", ordered by class id and
  /// then by node hash.
  std::string dump() const;

 private:
  void process_pending();
  bool rebuild_classes();

  mutable std::vector<std::uint32_t> parent_;
  std::vector<EClass> classes_;  // by id; non-roots are emptied on merge
  std::unordered_map<ENode, ClassId, ENodeHash> memo_;
  std::vector<std::pair<ENode, ClassId>> pending_;  // parents needing re-hashing
  bool dirty_ = false;
  std::vector<ClassId> roots_;
  std::vector<std::string> origins_;
  std::size_t num_classes_ = 0;
  std::size_t num_nodes_ = 0;
};

/// Text form of a node, e.g. "(add c1 c2)" or "(const 4 1)".
std::string node_text(const ENode& n);

/// Saturating count of distinct acyclic term DAGs representable from the
/// roots: per-class counts start at 0, a node counts the product of its
/// child class counts, a class the sum over its nodes, iterated to a
/// fixpoint and capped at 2^63 - 1. Nodes that list their own class as a
/// child can never be part of an acyclic term and are skipped.
std::uint64_t count_designs(const EGraph& g);
std::uint64_t count_designs(const EGraph& g, std::span<const ClassId> roots);

inline constexpr std::uint64_t kDesignCountCap = std::numeric_limits<std::int64_t>::max();

}  // namespace powersat
