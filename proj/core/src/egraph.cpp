#include "powersat/egraph.hpp"

#include <algorithm>
#include <sstream>
#include <tuple>

namespace powersat {

std::uint64_t node_hash(const ENode& n) {
  std::uint64_t h = op_hash(n.op);
  for (ClassId c : n.children()) h = fnv1a64_u64(index(c), h);
  return h;
}

std::size_t ENodeHash::operator()(const ENode& n) const { return static_cast<std::size_t>(node_hash(n)); }

std::string node_text(const ENode& n) {
  switch (n.op.kind) {
    case OpKind::Var:
      return "(var " + n.op.name + ")";
    case OpKind::Const:
      return "(const " + std::to_string(n.op.width) + " " + std::to_string(n.op.value) + ")";
    default:
      break;
  }
  std::string s = "(";
  s += n.op.kind == OpKind::Rep ? "rep" + std::to_string(n.op.count) : std::string(op_name(n.op.kind));
  for (ClassId c : n.children()) s += " c" + std::to_string(index(c));
  return s + ")";
}

EGraph::EGraph() { origins_.emplace_back("input"); }

ClassId EGraph::find(ClassId id) const {
  std::uint32_t x = static_cast<std::uint32_t>(id);
  while (parent_[x] != x) {
    parent_[x] = parent_[parent_[x]];
    x = parent_[x];
  }
  return ClassId(x);
}

ENode EGraph::canonicalize(ENode n) const {
  for (ClassId& c : n.children()) c = find(c);
  return n;
}

std::optional<ClassId> EGraph::lookup(const ENode& n) const {
  auto it = memo_.find(canonicalize(n));
  if (it == memo_.end()) return std::nullopt;
  return find(it->second);
}

ClassId EGraph::add(ENode node, OriginId origin) {
  node = canonicalize(node);
  if (auto it = memo_.find(node); it != memo_.end()) return find(it->second);

  std::vector<std::uint32_t> widths;
  for (ClassId c : node.children()) widths.push_back(classes_[index(c)].width);
  const std::uint32_t w = infer_width(node.op, widths);

  auto id = static_cast<ClassId>(classes_.size());
  parent_.push_back(static_cast<std::uint32_t>(index(id)));
  EClass cls;
  cls.id = id;
  cls.width = w;
  cls.nodes.push_back({node, origin, false});
  classes_.push_back(std::move(cls));
  for (ClassId c : node.children()) classes_[index(c)].parents.emplace_back(node, id);
  memo_.emplace(std::move(node), id);
  ++num_classes_;
  ++num_nodes_;
  return id;
}

DesignEmbedding EGraph::add_design(const Design& d) {
  DesignEmbedding emb;
  emb.node_class.reserve(d.nodes.size());
  for (const auto& dn : d.nodes) {
    ENode n;
    n.op = dn.op;
    n.arity = dn.arity;
    for (std::size_t i = 0; i < dn.arity; ++i) n.child[i] = emb.node_class[index(dn.child[i])];
    ClassId c = add(n, kOriginInput);
    // Mark the (possibly pre-existing) node as original.
    ENode canon = canonicalize(n);
    for (auto& e : classes_[index(find(c))].nodes) {
      if (canonicalize(e.node) == canon) e.original = true;
    }
    emb.node_class.push_back(c);
  }
  for (const auto& o : d.outputs) emb.roots.push_back(find(emb.node_class[index(o.node)]));
  roots_ = emb.roots;
  return emb;
}

ClassId EGraph::merge(ClassId a, ClassId b) {
  a = find(a);
  b = find(b);
  if (a == b) return a;
  EClass& ca = classes_[index(a)];
  EClass& cb = classes_[index(b)];
  if (ca.width != cb.width) {
    throw InternalError("merging classes of different widths: c" + std::to_string(index(a)) + " w" +
                        std::to_string(ca.width) + " vs c" + std::to_string(index(b)) + " w" +
                        std::to_string(cb.width));
  }
  // Union by size; ties go to the smaller id.
  auto weight = [](const EClass& c) { return c.nodes.size() + c.parents.size(); };
  ClassId root = a;
  ClassId other = b;
  if (weight(cb) > weight(ca) || (weight(cb) == weight(ca) && index(b) < index(a))) std::swap(root, other);
  EClass& keep = classes_[index(root)];
  EClass& gone = classes_[index(other)];
  parent_[index(other)] = static_cast<std::uint32_t>(index(root));
  // Parents of the absorbed class mention a stale id and must be re-hashed.
  pending_.insert(pending_.end(), gone.parents.begin(), gone.parents.end());
  keep.nodes.insert(keep.nodes.end(), std::make_move_iterator(gone.nodes.begin()),
                    std::make_move_iterator(gone.nodes.end()));
  keep.parents.insert(keep.parents.end(), std::make_move_iterator(gone.parents.begin()),
                      std::make_move_iterator(gone.parents.end()));
  gone.nodes.clear();
  gone.parents.clear();
  gone.nodes.shrink_to_fit();
  gone.parents.shrink_to_fit();
  --num_classes_;
  dirty_ = true;
  return root;
}

void EGraph::process_pending() {
  while (!pending_.empty()) {
    auto [node, cls] = std::move(pending_.back());
    pending_.pop_back();
    node = canonicalize(node);
    auto [it, inserted] = memo_.try_emplace(node, cls);
    if (!inserted) merge(it->second, cls);
  }
}

bool EGraph::rebuild_classes() {
  memo_.clear();
  num_nodes_ = 0;
  std::vector<std::pair<ClassId, ClassId>> congruent;
  for (std::size_t i = 0; i < classes_.size(); ++i) {
    if (parent_[i] != i) continue;
    EClass& cls = classes_[i];
    for (auto& e : cls.nodes) e.node = canonicalize(e.node);
    std::vector<std::pair<std::uint64_t, std::size_t>> order;
    order.reserve(cls.nodes.size());
    for (std::size_t k = 0; k < cls.nodes.size(); ++k) order.emplace_back(node_hash(cls.nodes[k].node), k);
    std::sort(order.begin(), order.end());
    std::vector<ENodeEntry> unique;
    unique.reserve(order.size());
    std::size_t run_start = 0;  // first entry of `unique` sharing the current hash
    for (std::size_t o = 0; o < order.size(); ++o) {
      if (o == 0 || order[o].first != order[o - 1].first) run_start = unique.size();
      ENodeEntry& e = cls.nodes[order[o].second];
      const auto from = unique.begin() + static_cast<std::ptrdiff_t>(run_start);
      auto dup = std::find_if(from, unique.end(), [&](const ENodeEntry& u) { return u.node == e.node; });
      if (dup != unique.end()) {
        dup->original = dup->original || e.original;
        dup->origin = std::min(dup->origin, e.origin);
        continue;
      }
      unique.push_back(std::move(e));
    }
    cls.nodes = std::move(unique);
    num_nodes_ += cls.nodes.size();
    for (const auto& e : cls.nodes) {
      auto [it, inserted] = memo_.try_emplace(e.node, ClassId(i));
      if (!inserted && it->second != ClassId(i)) congruent.emplace_back(it->second, ClassId(i));
    }
    std::vector<std::tuple<std::uint32_t, std::uint64_t, std::size_t>> porder;
    porder.reserve(cls.parents.size());
    for (std::size_t k = 0; k < cls.parents.size(); ++k) {
      auto& [pn, pc] = cls.parents[k];
      pn = canonicalize(pn);
      pc = find(pc);
      porder.emplace_back(static_cast<std::uint32_t>(index(pc)), node_hash(pn), k);
    }
    std::sort(porder.begin(), porder.end());
    std::vector<std::pair<ENode, ClassId>> parents;
    parents.reserve(porder.size());
    std::size_t prun = 0;
    for (std::size_t o = 0; o < porder.size(); ++o) {
      if (o == 0 || std::get<0>(porder[o]) != std::get<0>(porder[o - 1]) ||
          std::get<1>(porder[o]) != std::get<1>(porder[o - 1])) {
        prun = parents.size();
      }
      auto& entry = cls.parents[std::get<2>(porder[o])];
      const auto from = parents.begin() + static_cast<std::ptrdiff_t>(prun);
      if (std::find(from, parents.end(), entry) != parents.end()) continue;
      parents.push_back(std::move(entry));
    }
    cls.parents = std::move(parents);
  }
  for (auto [x, y] : congruent) merge(x, y);
  return !congruent.empty();
}

void EGraph::rebuild() {
  if (!dirty_ && pending_.empty()) return;
  do {
    process_pending();
  } while (rebuild_classes() || !pending_.empty());
  dirty_ = false;
}

std::vector<ClassId> EGraph::class_ids() const {
  std::vector<ClassId> ids;
  ids.reserve(num_classes_);
  for (std::size_t i = 0; i < parent_.size(); ++i) {
    if (parent_[i] == i) ids.push_back(ClassId(i));
  }
  return ids;
}

const EClass& EGraph::eclass(ClassId id) const { return classes_[index(find(id))]; }

OriginId EGraph::intern_origin(std::string_view name) {
  for (std::size_t i = 0; i < origins_.size(); ++i) {
    if (origins_[i] == name) return static_cast<OriginId>(i);
  }
  origins_.emplace_back(name);
  return static_cast<OriginId>(origins_.size() - 1);
}

bool EGraph::is_constant(ClassId id) const {
  const auto& nodes = eclass(id).nodes;
  return std::any_of(nodes.begin(), nodes.end(), [](const ENodeEntry& e) { return e.node.op.kind == OpKind::Const; });
}

std::string EGraph::dump() const {
  std::ostringstream out;
  for (ClassId id : class_ids()) {
    const EClass& cls = classes_[index(id)];
    std::vector<std::pair<std::uint64_t, std::string>> texts;
    for (const auto& e : cls.nodes) {
      ENode n = canonicalize(e.node);
      texts.emplace_back(node_hash(n), node_text(n));
    }
    std::sort(texts.begin(), texts.end());
    out << "c" << index(id) << " w" << cls.width << ":";
    for (const auto& [h, t] : texts) out << " " << t;
    out << "\n";
  }
  return out.str();
}

// ---------------------------------------------------------------------------
// Design counting

namespace {

std::uint64_t sat_add(std::uint64_t a, std::uint64_t b) {
  return (a >= kDesignCountCap - b) ? kDesignCountCap : a + b;
}

std::uint64_t sat_mul(std::uint64_t a, std::uint64_t b) {
  if (a == 0 || b == 0) return 0;
  return (a > kDesignCountCap / b) ? kDesignCountCap : a * b;
}

}  // namespace

std::uint64_t count_designs(const EGraph& g) { return count_designs(g, g.roots()); }

std::uint64_t count_designs(const EGraph& g, std::span<const ClassId> roots) {
  // Closed form of the fixpoint: classes with no finite term are 0, classes
  // reaching a productive cycle saturate, the rest are a DAG sum. Nodes that
  // list their own class are ignored.
  const std::vector<ClassId> ids = g.class_ids();
  std::unordered_map<std::size_t, std::size_t> slot;
  for (std::size_t i = 0; i < ids.size(); ++i) slot.emplace(index(ids[i]), i);
  auto slot_of = [&](ClassId c) { return slot.at(index(g.find(c))); };

  struct Item {
    std::size_t cls;
    std::vector<std::size_t> kids;
  };
  std::vector<Item> items;
  std::vector<std::vector<std::size_t>> users(ids.size());  // class -> items using it
  std::vector<std::vector<std::size_t>> by_class(ids.size());
  for (std::size_t i = 0; i < ids.size(); ++i) {
    for (const auto& e : g.eclass(ids[i]).nodes) {
      Item it{i, {}};
      bool self = false;
      for (ClassId c : e.node.children()) {
        std::size_t k = slot_of(c);
        self |= (k == i);
        it.kids.push_back(k);
      }
      if (self) continue;
      by_class[i].push_back(items.size());
      for (std::size_t k : it.kids) users[k].push_back(items.size());
      items.push_back(std::move(it));
    }
  }

  // Productive classes: those with at least one finite term.
  std::vector<bool> productive(ids.size(), false);
  std::vector<std::size_t> missing(items.size());
  std::vector<std::size_t> work;
  for (std::size_t n = 0; n < items.size(); ++n) {
    std::vector<std::size_t> uniq = items[n].kids;
    std::sort(uniq.begin(), uniq.end());
    uniq.erase(std::unique(uniq.begin(), uniq.end()), uniq.end());
    missing[n] = uniq.size();
    if (missing[n] == 0 && !productive[items[n].cls]) {
      productive[items[n].cls] = true;
      work.push_back(items[n].cls);
    }
  }
  // users lists may hold duplicates for repeated children; dedupe per class.
  for (auto& u : users) {
    std::sort(u.begin(), u.end());
    u.erase(std::unique(u.begin(), u.end()), u.end());
  }
  while (!work.empty()) {
    std::size_t c = work.back();
    work.pop_back();
    for (std::size_t n : users[c]) {
      if (--missing[n] == 0 && !productive[items[n].cls]) {
        productive[items[n].cls] = true;
        work.push_back(items[n].cls);
      }
    }
  }
  auto live = [&](std::size_t n) {
    return std::all_of(items[n].kids.begin(), items[n].kids.end(), [&](std::size_t k) { return productive[k]; });
  };

  // Tarjan SCC over productive classes through live items.
  const std::size_t none = static_cast<std::size_t>(-1);
  std::vector<std::size_t> idx(ids.size(), none), low(ids.size(), 0), comp(ids.size(), none);
  std::vector<bool> on_stack(ids.size(), false);
  std::vector<std::size_t> stack;
  std::vector<std::size_t> comp_size;
  std::size_t counter = 0;
  // Successor lists (live items only), then an iterative Tarjan.
  std::vector<std::vector<std::size_t>> succ(ids.size());
  for (std::size_t v = 0; v < ids.size(); ++v) {
    for (std::size_t n : by_class[v]) {
      if (live(n)) succ[v].insert(succ[v].end(), items[n].kids.begin(), items[n].kids.end());
    }
  }
  auto strong = [&](std::size_t root) {
    std::vector<std::pair<std::size_t, std::size_t>> frames{{root, 0}};
    idx[root] = low[root] = counter++;
    stack.push_back(root);
    on_stack[root] = true;
    while (!frames.empty()) {
      auto& [v, next] = frames.back();
      if (next < succ[v].size()) {
        std::size_t w = succ[v][next++];
        if (idx[w] == none) {
          idx[w] = low[w] = counter++;
          stack.push_back(w);
          on_stack[w] = true;
          frames.emplace_back(w, 0);
        } else if (on_stack[w]) {
          low[v] = std::min(low[v], idx[w]);
        }
        continue;
      }
      if (low[v] == idx[v]) {
        std::size_t id = comp_size.size();
        comp_size.push_back(0);
        std::size_t w;
        do {
          w = stack.back();
          stack.pop_back();
          on_stack[w] = false;
          comp[w] = id;
          ++comp_size[id];
        } while (w != v);
      }
      std::size_t done = v;
      frames.pop_back();
      if (!frames.empty()) {
        std::size_t parent = frames.back().first;
        low[parent] = std::min(low[parent], low[done]);
      }
    }
  };
  for (std::size_t v = 0; v < ids.size(); ++v) {
    if (productive[v] && idx[v] == none) strong(v);
  }

  // Tarjan emits components children-first, so one pass in emission order
  // sees every child before its parents.
  std::vector<std::vector<std::size_t>> members(comp_size.size());
  for (std::size_t v = 0; v < ids.size(); ++v) {
    if (comp[v] != none) members[comp[v]].push_back(v);
  }
  std::vector<std::uint64_t> count(ids.size(), 0);
  for (std::size_t k = 0; k < members.size(); ++k) {
    const bool cyclic = comp_size[k] > 1;
    for (std::size_t v : members[k]) {
      if (cyclic) {
        count[v] = kDesignCountCap;
        continue;
      }
      std::uint64_t total = 0;
      for (std::size_t n : by_class[v]) {
        if (!live(n)) continue;
        std::uint64_t prod = 1;
        for (std::size_t w : items[n].kids) prod = sat_mul(prod, count[w]);
        total = sat_add(total, prod);
      }
      count[v] = total;
    }
  }

  std::vector<std::size_t> distinct;
  for (ClassId r : roots) distinct.push_back(slot_of(r));
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  if (distinct.empty()) return 0;
  std::uint64_t total = 1;
  for (std::size_t r : distinct) total = sat_mul(total, count[r]);
  return total;
}

}  // namespace powersat
