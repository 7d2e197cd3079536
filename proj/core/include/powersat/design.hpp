#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "powersat/op.hpp"

namespace powersat {

/// Index of a node inside a Design.
enum class NodeId : std::uint32_t {};

constexpr std::size_t index(NodeId id) { return static_cast<std::size_t>(id); }

struct DesignNode : BasicNode<NodeId> {
  std::uint32_t width = 0;
};

struct Port {
  std::string name;
  std::uint32_t width = 0;

  friend bool operator==(const Port&, const Port&) = default;
};

struct OutputPort {
  std::string name;
  NodeId node{};

  friend bool operator==(const OutputPort&, const OutputPort&) = default;
};

/// A word-level netlist: a hash-consed DAG of operators with named input and
/// output ports. Nodes are stored in topological order (children first), and
/// every declared input owns a Var node, in declaration order, at the front.
struct Design {
  std::string name;
  std::vector<Port> inputs;
  std::vector<OutputPort> outputs;
  std::vector<DesignNode> nodes;

  const DesignNode& node(NodeId id) const { return nodes[index(id)]; }
  std::size_t size() const { return nodes.size(); }

  /// Node ids of the Var nodes, one per input, in declaration order.
  std::vector<NodeId> input_nodes() const;

  /// Re-checks every structural invariant: topological order, widths,
  /// declared Vars, unique port names. Throws WidthError / Error.
  void validate() const;
};

/// Incrementally builds a Design with structural hashing and width checks.
class DesignBuilder {
 public:
  explicit DesignBuilder(std::string name);

  /// Declares an input port and returns its Var node.
  NodeId input(std::string name, std::uint32_t width);

  /// Returns the Var node of an already declared input.
  NodeId input_node(std::string_view name) const;
  bool has_input(std::string_view name) const;

  /// Adds (or finds) `op(children)`. Throws WidthError on bad operands.
  NodeId add(const Op& op, std::span<const NodeId> children);
  NodeId add(OpKind kind, std::initializer_list<NodeId> children);
  NodeId constant(std::uint32_t width, std::uint64_t value);

  std::uint32_t width(NodeId id) const { return nodes_[index(id)].width; }

  void output(std::string name, NodeId node);

  /// Produces the design renumbered into canonical order (see canonicalize).
  Design finish() &&;

 private:
  struct KeyHash {
    std::size_t operator()(const BasicNode<NodeId>& n) const;
  };

  std::string name_;
  std::vector<Port> inputs_;
  std::vector<OutputPort> outputs_;
  std::vector<DesignNode> nodes_;
  std::unordered_map<BasicNode<NodeId>, NodeId, KeyHash> memo_;
  std::unordered_map<std::string, NodeId> input_ids_;
};

/// Renumbers a design: input Vars first in declaration order, then the
/// remaining nodes in post-order of a left-to-right walk from the outputs.
/// Nodes unreachable from any output (other than inputs) are dropped.
Design canonicalize(const Design& d);

/// Equality after canonicalization: same name, ports, and output DAGs.
bool structurally_equal(const Design& a, const Design& b);

/// Parses the S-expression DSL. Throws ParseError (syntax, undeclared port,
/// width mismatch; all with line/column).
Design parse_design(std::string_view text);

/// Prints a design in the DSL such that parse_design(print_design(d)) is
/// structurally equal to d. Shared subexpressions are printed in full.
std::string print_design(const Design& d);

/// Prints the expression rooted at `id` in DSL syntax.
std::string print_expr(const Design& d, NodeId id);

}  // namespace powersat
