#include "powersat/design.hpp"

#include <cctype>
#include <functional>
#include <memory>
#include <optional>
#include <sstream>
#include <unordered_set>

namespace powersat {

std::vector<NodeId> Design::input_nodes() const {
  std::vector<NodeId> out;
  out.reserve(inputs.size());
  for (std::size_t i = 0; i < inputs.size(); ++i) out.push_back(NodeId(i));
  return out;
}

void Design::validate() const {
  std::unordered_set<std::string> names;
  if (nodes.size() < inputs.size()) throw Error("design has fewer nodes than inputs");
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    const auto& p = inputs[i];
    if (!names.insert(p.name).second) throw Error("duplicate port name '" + p.name + "'");
    const auto& n = nodes[i];
    if (n.op.kind != OpKind::Var || n.op.name != p.name || n.op.width != p.width) {
      throw Error("input '" + p.name + "' is not backed by a matching Var node");
    }
  }
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const auto& n = nodes[i];
    std::vector<std::uint32_t> widths;
    for (NodeId c : n.children()) {
      if (index(c) >= i) throw Error("node graph is not topologically ordered (cycle?)");
      widths.push_back(nodes[index(c)].width);
    }
    if (n.op.kind == OpKind::Var) {
      bool declared = false;
      for (const auto& p : inputs) declared |= (p.name == n.op.name && p.width == n.op.width);
      if (!declared) throw Error("Var '" + n.op.name + "' references an undeclared input");
    }
    if (infer_width(n.op, widths) != n.width) throw WidthError("stored node width is stale");
  }
  for (const auto& o : outputs) {
    if (!names.insert(o.name).second) throw Error("duplicate port name '" + o.name + "'");
    if (index(o.node) >= nodes.size()) throw Error("output '" + o.name + "' references no node");
  }
}

namespace {

struct NodeKeyHash {
  std::size_t operator()(const BasicNode<NodeId>& n) const {
    std::uint64_t h = op_hash(n.op);
    for (NodeId c : n.children()) h = fnv1a64_u64(index(c), h);
    return static_cast<std::size_t>(h);
  }
};

}  // namespace

std::size_t DesignBuilder::KeyHash::operator()(const BasicNode<NodeId>& n) const {
  return NodeKeyHash{}(n);
}

DesignBuilder::DesignBuilder(std::string name) : name_(std::move(name)) {}

NodeId DesignBuilder::input(std::string name, std::uint32_t width) {
  if (input_ids_.contains(name)) throw Error("duplicate input '" + name + "'");
  inputs_.push_back({name, width});
  NodeId id = add(Op::var(name, width), {});
  input_ids_.emplace(std::move(name), id);
  return id;
}

NodeId DesignBuilder::input_node(std::string_view name) const {
  auto it = input_ids_.find(std::string(name));
  if (it == input_ids_.end()) throw Error("undeclared input '" + std::string(name) + "'");
  return it->second;
}

bool DesignBuilder::has_input(std::string_view name) const {
  return input_ids_.contains(std::string(name));
}

NodeId DesignBuilder::add(const Op& op, std::span<const NodeId> children) {
  BasicNode<NodeId> key(op, children);
  if (auto it = memo_.find(key); it != memo_.end()) return it->second;
  std::vector<std::uint32_t> widths;
  widths.reserve(children.size());
  for (NodeId c : children) widths.push_back(width(c));
  DesignNode node;
  static_cast<BasicNode<NodeId>&>(node) = key;
  node.width = infer_width(op, widths);
  auto id = static_cast<NodeId>(nodes_.size());
  nodes_.push_back(std::move(node));
  memo_.emplace(std::move(key), id);
  return id;
}

NodeId DesignBuilder::add(OpKind kind, std::initializer_list<NodeId> children) {
  return add(Op::of(kind), std::span<const NodeId>(children.begin(), children.size()));
}

NodeId DesignBuilder::constant(std::uint32_t width, std::uint64_t value) {
  return add(Op::constant(BitVec(width, value)), {});
}

void DesignBuilder::output(std::string name, NodeId node) {
  for (const auto& o : outputs_) {
    if (o.name == name) throw Error("duplicate output '" + name + "'");
  }
  if (input_ids_.contains(name)) throw Error("output '" + name + "' shadows an input");
  outputs_.push_back({std::move(name), node});
}

Design DesignBuilder::finish() && {
  Design d;
  d.name = std::move(name_);
  d.inputs = std::move(inputs_);
  d.outputs = std::move(outputs_);
  d.nodes = std::move(nodes_);
  return canonicalize(d);
}

Design canonicalize(const Design& d) {
  Design out;
  out.name = d.name;
  out.inputs = d.inputs;
  std::vector<std::optional<NodeId>> remap(d.nodes.size());
  std::unordered_map<BasicNode<NodeId>, NodeId, NodeKeyHash> seen;
  // Inputs first, located by name.
  for (const auto& p : d.inputs) {
    std::optional<NodeId> found;
    for (std::size_t i = 0; i < d.nodes.size(); ++i) {
      const auto& op = d.nodes[i].op;
      if (op.kind == OpKind::Var && op.name == p.name) {
        found = NodeId(i);
        break;
      }
    }
    auto fresh = static_cast<NodeId>(out.nodes.size());
    DesignNode n;
    n.op = Op::var(p.name, p.width);
    n.width = p.width;
    seen.emplace(n, fresh);
    out.nodes.push_back(std::move(n));
    if (found) remap[index(*found)] = fresh;
  }
  std::function<NodeId(NodeId)> visit = [&](NodeId id) -> NodeId {
    if (remap[index(id)]) return *remap[index(id)];
    const auto& src = d.nodes[index(id)];
    DesignNode n = src;
    for (std::size_t k = 0; k < src.arity; ++k) n.child[k] = visit(src.child[k]);
    // Structural sharing may map two source nodes to one canonical node.
    auto [it, inserted] = seen.try_emplace(n, NodeId(out.nodes.size()));
    if (inserted) out.nodes.push_back(std::move(n));
    remap[index(id)] = it->second;
    return it->second;
  };
  for (const auto& o : d.outputs) out.outputs.push_back({o.name, visit(o.node)});
  return out;
}

bool structurally_equal(const Design& a, const Design& b) {
  Design ca = canonicalize(a);
  Design cb = canonicalize(b);
  if (ca.name != cb.name || ca.inputs != cb.inputs || ca.outputs != cb.outputs) return false;
  if (ca.nodes.size() != cb.nodes.size()) return false;
  for (std::size_t i = 0; i < ca.nodes.size(); ++i) {
    const auto& x = ca.nodes[i];
    const auto& y = cb.nodes[i];
    if (!(static_cast<const BasicNode<NodeId>&>(x) == static_cast<const BasicNode<NodeId>&>(y)) ||
        x.width != y.width) {
      return false;
    }
  }
  return true;
}

// ---------------------------------------------------------------------------
// Parsing

namespace {

struct SExpr {
  bool is_atom = false;
  std::string atom;
  std::vector<SExpr> items;
  std::size_t line = 1;
  std::size_t column = 1;
};

class Reader {
 public:
  explicit Reader(std::string_view text) : text_(text) {}

  SExpr read_top() {
    skip_space();
    if (at_end()) throw ParseError("empty input", line_, col_);
    SExpr e = read();
    skip_space();
    if (!at_end()) throw ParseError("trailing text after module", line_, col_);
    return e;
  }

 private:
  bool at_end() const { return pos_ >= text_.size(); }

  char advance() {
    char c = text_[pos_++];
    if (c == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    return c;
  }

  void skip_space() {
    while (!at_end()) {
      char c = text_[pos_];
      if (c == ';') {
        while (!at_end() && text_[pos_] != '\n') advance();
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else {
        break;
      }
    }
  }

  SExpr read() {
    skip_space();
    if (at_end()) throw ParseError("unexpected end of input", line_, col_);
    SExpr e;
    e.line = line_;
    e.column = col_;
    char c = text_[pos_];
    if (c == ')') throw ParseError("unexpected ')'", line_, col_);
    if (c == '(') {
      advance();
      for (;;) {
        skip_space();
        if (at_end()) throw ParseError("unclosed '(' opened at " + std::to_string(e.line) + ":" +
                                           std::to_string(e.column),
                                       line_, col_);
        if (text_[pos_] == ')') {
          advance();
          return e;
        }
        e.items.push_back(read());
      }
    }
    e.is_atom = true;
    while (!at_end()) {
      char d = text_[pos_];
      if (d == '(' || d == ')' || d == ';' || std::isspace(static_cast<unsigned char>(d))) break;
      e.atom.push_back(advance());
    }
    return e;
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  std::size_t col_ = 1;
};

bool is_ident(const std::string& s) {
  if (s.empty() || !(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) return false;
  for (char c : s) {
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.' || c == '$')) return false;
  }
  return true;
}

[[noreturn]] void fail(const SExpr& at, const std::string& what) {
  throw ParseError(what, at.line, at.column);
}

std::uint64_t number(const SExpr& e, const char* what) {
  if (!e.is_atom) fail(e, std::string("expected ") + what);
  auto v = parse_unsigned(e.atom);
  if (!v) fail(e, std::string("malformed ") + what + " '" + e.atom + "'");
  return *v;
}

std::uint32_t width_of(const SExpr& e) {
  std::uint64_t w = number(e, "width");
  if (w == 0 || w > kMaxWidth) fail(e, "width must be in [1, 64]");
  return static_cast<std::uint32_t>(w);
}

const std::string& head_atom(const SExpr& e) {
  if (e.items.empty() || !e.items[0].is_atom) fail(e, "expected an operator name");
  return e.items[0].atom;
}

class Elaborator {
 public:
  explicit Elaborator(DesignBuilder& b) : b_(b) {}

  NodeId expr(const SExpr& e) {
    if (e.is_atom) {
      if (!is_ident(e.atom)) fail(e, "expected identifier, got '" + e.atom + "'");
      if (!b_.has_input(e.atom)) fail(e, "undeclared port '" + e.atom + "'");
      return b_.input_node(e.atom);
    }
    const std::string& head = head_atom(e);
    if (head == "const") {
      if (e.items.size() != 3) fail(e, "const takes a width and a value");
      std::uint32_t w = width_of(e.items[1]);
      std::uint64_t v = number(e.items[2], "value");
      if ((v & ~width_mask(w)) != 0) fail(e.items[2], "constant does not fit in " + std::to_string(w) + " bits");
      return b_.constant(w, v);
    }
    Op op;
    if (head.starts_with("rep") && head.size() > 3) {
      auto n = parse_unsigned(std::string_view(head).substr(3));
      if (!n || *n == 0 || *n > kMaxWidth) fail(e.items[0], "malformed replication '" + head + "'");
      op = Op::rep(static_cast<std::uint32_t>(*n));
    } else {
      auto kind = op_from_name(head);
      if (!kind || *kind == OpKind::Rep) fail(e.items[0], "unknown operator '" + head + "'");
      op = Op::of(*kind);
    }
    std::vector<NodeId> kids;
    for (std::size_t i = 1; i < e.items.size(); ++i) kids.push_back(expr(e.items[i]));
    if (!arity_ok(op.kind, kids.size())) {
      fail(e, "operator '" + head + "' does not take " + std::to_string(kids.size()) + " operands");
    }
    try {
      return b_.add(op, kids);
    } catch (const WidthError& err) {
      fail(e, err.what());
    }
  }

 private:
  DesignBuilder& b_;
};

}  // namespace

Design parse_design(std::string_view text) {
  Reader reader(text);
  SExpr top = reader.read_top();
  if (top.is_atom || head_atom(top) != "module") fail(top, "expected (module NAME ...)");
  if (top.items.size() < 2 || !top.items[1].is_atom || !is_ident(top.items[1].atom)) {
    fail(top, "module needs a name");
  }
  DesignBuilder b(top.items[1].atom);
  // Inputs are declared before any output is parsed.
  for (std::size_t i = 2; i < top.items.size(); ++i) {
    const SExpr& decl = top.items[i];
    if (decl.is_atom) fail(decl, "expected a declaration");
    const std::string& kind = head_atom(decl);
    if (kind == "input") {
      if (decl.items.size() != 3 || !decl.items[1].is_atom || !is_ident(decl.items[1].atom)) {
        fail(decl, "expected (input NAME WIDTH)");
      }
      if (b.has_input(decl.items[1].atom)) fail(decl.items[1], "duplicate input '" + decl.items[1].atom + "'");
      b.input(decl.items[1].atom, width_of(decl.items[2]));
    } else if (kind != "output") {
      fail(decl.items[0], "unknown declaration '" + kind + "'");
    }
  }
  Elaborator elab(b);
  for (std::size_t i = 2; i < top.items.size(); ++i) {
    const SExpr& decl = top.items[i];
    if (head_atom(decl) != "output") continue;
    if (decl.items.size() != 3 || !decl.items[1].is_atom || !is_ident(decl.items[1].atom)) {
      fail(decl, "expected (output NAME EXPR)");
    }
    NodeId root = elab.expr(decl.items[2]);
    try {
      b.output(decl.items[1].atom, root);
    } catch (const Error& err) {
      fail(decl.items[1], err.what());
    }
  }
  return std::move(b).finish();
}

std::string print_expr(const Design& d, NodeId id) {
  const auto& n = d.node(id);
  switch (n.op.kind) {
    case OpKind::Var:
      return n.op.name;
    case OpKind::Const:
      return "(const " + std::to_string(n.op.width) + " " + std::to_string(n.op.value) + ")";
    default:
      break;
  }
  std::string s = "(";
  if (n.op.kind == OpKind::Rep) {
    s += "rep" + std::to_string(n.op.count);
  } else {
    s += op_name(n.op.kind);
  }
  for (NodeId c : n.children()) s += " " + print_expr(d, c);
  return s + ")";
}

std::string print_design(const Design& d) {
  std::ostringstream out;
  out << "(module " << d.name;
  for (const auto& p : d.inputs) out << " (input " << p.name << " " << p.width << ")";
  for (const auto& o : d.outputs) out << " (output " << o.name << " " << print_expr(d, o.node) << ")";
  out << ")";
  return out.str();
}

}  // namespace powersat
