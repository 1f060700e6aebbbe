#include "tcid/graph.hpp"

#include "tcid/error.hpp"

#include <algorithm>
#include <deque>
#include <queue>

namespace tcid {

namespace {

void require_nodes(const MixedGraph& g, const NodeSet& s, const char* what) {
    for (const auto& v : s)
        if (!g.has_node(v)) throw PreconditionError(std::string(what) + ": unknown node '" + v + "'");
}

}  // namespace

const char* to_string(NodeKind kind) {
    switch (kind) {
        case NodeKind::Input: return "input";
        case NodeKind::Observed: return "observed";
        case NodeKind::Latent: return "latent";
    }
    return "?";
}

NodeKind node_kind_from_string(const std::string& text) {
    if (text == "input") return NodeKind::Input;
    if (text == "observed") return NodeKind::Observed;
    if (text == "latent") return NodeKind::Latent;
    throw FormatError("unknown node kind '" + text + "'");
}

const char* to_string(Reachability r) {
    switch (r) {
        case Reachability::NotReachable: return "not_reachable";
        case Reachability::ReachableOnly: return "reachable_only";
        case Reachability::Intrinsic: return "intrinsic";
    }
    return "?";
}

std::string soft_input_name(const NodeId& v) {
    return "I_" + v;
}

// ---------------------------------------------------------------------------

MixedGraph::MixedGraph(std::map<NodeId, NodeKind> nodes, std::set<Edge> directed, std::set<Edge> bidirected)
    : nodes_(std::move(nodes)), directed_(std::move(directed)) {
    for (const auto& [id, kind] : nodes_)
        if (id.empty()) throw InvariantError("empty node id");
    for (const auto& [tail, head] : directed_) {
        if (!has_node(tail) || !has_node(head))
            throw InvariantError("directed edge " + tail + "->" + head + " has an unknown endpoint");
        if (tail == head) throw InvariantError("self loop at '" + tail + "'");
        if (kind(head) == NodeKind::Input)
            throw InvariantError("input node '" + head + "' has an incoming directed edge");
    }
    const bool has_latent = !latents().empty();
    for (auto [a, b] : bidirected) {
        if (!has_node(a) || !has_node(b))
            throw InvariantError("bidirected edge " + a + "<->" + b + " has an unknown endpoint");
        if (a == b) throw InvariantError("bidirected self loop at '" + a + "'");
        if (kind(a) == NodeKind::Input || kind(b) == NodeKind::Input)
            throw InvariantError("bidirected edge " + a + "<->" + b + " touches an input node");
        if (has_latent) throw InvariantError("graphs with latent nodes must not carry bidirected edges");
        if (b < a) std::swap(a, b);
        bidirected_.insert({a, b});
    }
    // Kahn's algorithm detects cycles.
    std::map<NodeId, std::size_t> indeg;
    for (const auto& [id, kind] : nodes_) indeg[id] = 0;
    for (const auto& e : directed_) ++indeg[e.second];
    std::deque<NodeId> ready;
    for (const auto& [id, d] : indeg)
        if (d == 0) ready.push_back(id);
    std::size_t seen = 0;
    while (!ready.empty()) {
        const NodeId v = ready.front();
        ready.pop_front();
        ++seen;
        for (auto it = directed_.lower_bound({v, ""}); it != directed_.end() && it->first == v; ++it)
            if (--indeg[it->second] == 0) ready.push_back(it->second);
    }
    if (seen != nodes_.size()) throw InvariantError("directed part contains a cycle");
}

NodeKind MixedGraph::kind(const NodeId& v) const {
    auto it = nodes_.find(v);
    if (it == nodes_.end()) throw PreconditionError("unknown node '" + v + "'");
    return it->second;
}

NodeSet MixedGraph::nodes_of(NodeKind kind) const {
    NodeSet out;
    for (const auto& [id, k] : nodes_)
        if (k == kind) out.insert(id);
    return out;
}

NodeSet MixedGraph::parents(const NodeId& v) const {
    NodeSet out;
    for (const auto& [tail, head] : directed_)
        if (head == v) out.insert(tail);
    return out;
}

NodeSet MixedGraph::children(const NodeId& v) const {
    NodeSet out;
    for (auto it = directed_.lower_bound({v, ""}); it != directed_.end() && it->first == v; ++it)
        out.insert(it->second);
    return out;
}

NodeSet MixedGraph::siblings(const NodeId& v) const {
    NodeSet out;
    for (const auto& [a, b] : bidirected_) {
        if (a == v) out.insert(b);
        if (b == v) out.insert(a);
    }
    return out;
}

// ---------------------------------------------------------------------------

MixedGraph latent_project(const MixedGraph& g) {
    if (!g.bidirected().empty()) throw PreconditionError("latent projection expects a graph without bidirected edges");
    std::map<NodeId, NodeKind> nodes;
    for (const auto& [id, kind] : g.nodes())
        if (kind != NodeKind::Latent) nodes.emplace(id, kind);

    // Non-latent nodes reachable from `start` along directed paths with latent interiors.
    auto reach = [&](const NodeId& start) {
        NodeSet out;
        NodeSet visited{start};
        std::vector<NodeId> stack{start};
        while (!stack.empty()) {
            const NodeId v = stack.back();
            stack.pop_back();
            for (const auto& w : g.children(v)) {
                if (g.kind(w) != NodeKind::Latent) {
                    out.insert(w);
                } else if (visited.insert(w).second) {
                    stack.push_back(w);
                }
            }
        }
        return out;
    };

    std::set<MixedGraph::Edge> directed;
    std::set<MixedGraph::Edge> bidirected;
    for (const auto& [id, kind] : g.nodes()) {
        if (kind == NodeKind::Latent) {
            const NodeSet hit = reach(id);
            for (const auto& a : hit)
                for (const auto& b : hit)
                    if (a < b && g.kind(a) == NodeKind::Observed && g.kind(b) == NodeKind::Observed)
                        bidirected.insert({a, b});
        } else {
            for (const auto& w : reach(id)) directed.insert({id, w});
        }
    }
    return MixedGraph(std::move(nodes), std::move(directed), std::move(bidirected));
}

MixedGraph manipulate_hard(const MixedGraph& g, const NodeSet& targets) {
    require_nodes(g, targets, "hard manipulation");
    NodeSet hit;
    for (const auto& v : targets) {
        const NodeKind k = g.kind(v);
        if (k == NodeKind::Latent) throw PreconditionError("cannot manipulate latent node '" + v + "'");
        if (k == NodeKind::Observed) hit.insert(v);
    }
    auto nodes = g.nodes();
    for (const auto& v : hit) nodes[v] = NodeKind::Input;
    std::set<MixedGraph::Edge> directed;
    for (const auto& e : g.directed())
        if (!hit.count(e.second)) directed.insert(e);
    std::set<MixedGraph::Edge> bidirected;
    for (const auto& e : g.bidirected())
        if (!hit.count(e.first) && !hit.count(e.second)) bidirected.insert(e);
    return MixedGraph(std::move(nodes), std::move(directed), std::move(bidirected));
}

MixedGraph manipulate_soft(const MixedGraph& g, const NodeSet& targets) {
    require_nodes(g, targets, "soft manipulation");
    auto nodes = g.nodes();
    auto directed = g.directed();
    for (const auto& v : targets) {
        if (g.kind(v) != NodeKind::Observed)
            throw PreconditionError("soft manipulation targets observed nodes only ('" + v + "')");
        const NodeId input = soft_input_name(v);
        if (!nodes.emplace(input, NodeKind::Input).second)
            throw PreconditionError("node id '" + input + "' already exists");
        directed.insert({input, v});
    }
    return MixedGraph(std::move(nodes), std::move(directed), g.bidirected());
}

MixedGraph induced_subgraph(const MixedGraph& g, const NodeSet& keep) {
    require_nodes(g, keep, "induced subgraph");
    std::map<NodeId, NodeKind> nodes;
    for (const auto& v : keep) nodes.emplace(v, g.kind(v));
    std::set<MixedGraph::Edge> directed;
    for (const auto& e : g.directed())
        if (keep.count(e.first) && keep.count(e.second)) directed.insert(e);
    std::set<MixedGraph::Edge> bidirected;
    for (const auto& e : g.bidirected())
        if (keep.count(e.first) && keep.count(e.second)) bidirected.insert(e);
    return MixedGraph(std::move(nodes), std::move(directed), std::move(bidirected));
}

// ---------------------------------------------------------------------------

NodeSet ancestors(const MixedGraph& g, const NodeSet& of) {
    require_nodes(g, of, "ancestors");
    NodeSet out = of;
    std::vector<NodeId> stack(of.begin(), of.end());
    while (!stack.empty()) {
        const NodeId v = stack.back();
        stack.pop_back();
        for (const auto& p : g.parents(v))
            if (out.insert(p).second) stack.push_back(p);
    }
    return out;
}

NodeSet descendants(const MixedGraph& g, const NodeSet& of) {
    require_nodes(g, of, "descendants");
    NodeSet out = of;
    std::vector<NodeId> stack(of.begin(), of.end());
    while (!stack.empty()) {
        const NodeId v = stack.back();
        stack.pop_back();
        for (const auto& c : g.children(v))
            if (out.insert(c).second) stack.push_back(c);
    }
    return out;
}

NodeSet district_of(const MixedGraph& g, const NodeId& v) {
    if (g.kind(v) != NodeKind::Observed) throw PreconditionError("districts are defined for observed nodes ('" + v + "')");
    NodeSet out{v};
    std::vector<NodeId> stack{v};
    while (!stack.empty()) {
        const NodeId x = stack.back();
        stack.pop_back();
        for (const auto& s : g.siblings(x))
            if (out.insert(s).second) stack.push_back(s);
    }
    return out;
}

std::vector<NodeSet> districts(const MixedGraph& g) {
    std::vector<NodeSet> out;
    NodeSet covered;
    for (const auto& v : g.observed()) {
        if (covered.count(v)) continue;
        NodeSet d = district_of(g, v);
        covered.insert(d.begin(), d.end());
        out.push_back(std::move(d));
    }
    return out;
}

std::vector<NodeId> topological_order(const MixedGraph& g) {
    std::map<NodeId, std::size_t> indeg;
    for (const auto& [id, kind] : g.nodes()) indeg[id] = 0;
    for (const auto& e : g.directed()) ++indeg[e.second];
    std::priority_queue<NodeId, std::vector<NodeId>, std::greater<>> ready;
    for (const auto& [id, d] : indeg)
        if (d == 0) ready.push(id);
    std::vector<NodeId> order;
    while (!ready.empty()) {
        NodeId v = ready.top();
        ready.pop();
        for (const auto& c : g.children(v))
            if (--indeg[c] == 0) ready.push(c);
        order.push_back(std::move(v));
    }
    return order;
}

StructuralReport structural(const MixedGraph& g) {
    StructuralReport r;
    for (const auto& [id, kind] : g.nodes()) {
        r.ancestors[id] = ancestors(g, {id});
        r.descendants[id] = descendants(g, {id});
    }
    r.districts = districts(g);
    r.topological_order = topological_order(g);
    return r;
}

// ---------------------------------------------------------------------------

bool id_separated(const MixedGraph& g, const NodeSet& a, const NodeSet& b, const NodeSet& c) {
    require_nodes(g, a, "id-separation");
    require_nodes(g, b, "id-separation");
    require_nodes(g, c, "id-separation");
    if (!g.latents().empty()) throw PreconditionError("id-separation expects a latent-free graph");

    NodeSet targets = b;
    for (const auto& i : g.inputs()) targets.insert(i);

    struct Step {
        NodeId to;
        bool head_here;   // arrowhead at the node we leave
        bool head_there;  // arrowhead at the node we reach
    };
    auto steps = [&](const NodeId& v) {
        std::vector<Step> out;
        for (const auto& w : g.children(v)) out.push_back({w, false, true});
        for (const auto& w : g.parents(v)) out.push_back({w, true, false});
        for (const auto& w : g.siblings(v)) out.push_back({w, true, true});
        return out;
    };

    // Walk-based search: a d-connecting walk has every collider in C and every
    // non-collider (including both endpoints) outside C.
    std::set<std::pair<NodeId, bool>> visited;
    std::vector<std::pair<NodeId, bool>> stack;
    for (const auto& start : a) {
        if (c.count(start)) continue;
        if (targets.count(start)) return false;
        for (const auto& s : steps(start)) {
            if (visited.insert({s.to, s.head_there}).second) stack.push_back({s.to, s.head_there});
        }
    }
    while (!stack.empty()) {
        const auto [v, arrived_head] = stack.back();
        stack.pop_back();
        const bool in_c = c.count(v) > 0;
        if (!in_c && targets.count(v)) return false;
        for (const auto& s : steps(v)) {
            const bool collider = arrived_head && s.head_here;
            if (collider != in_c) continue;
            if (visited.insert({s.to, s.head_there}).second) stack.push_back({s.to, s.head_there});
        }
    }
    return true;
}

bool fixable(const MixedGraph& g, const NodeId& r) {
    if (!g.has_node(r) || g.kind(r) != NodeKind::Observed)
        throw PreconditionError("fixability is defined for observed nodes ('" + r + "')");
    const NodeSet dist = district_of(g, r);
    const NodeSet desc = descendants(g, {r});
    for (const auto& v : dist)
        if (v != r && desc.count(v)) return false;
    return true;
}

MixedGraph fix_graph(const MixedGraph& g, const NodeId& r) {
    if (!fixable(g, r)) throw PreconditionError("node '" + r + "' is not fixable");
    return manipulate_hard(g, {r});
}

ReachResult reachable_intrinsic(const MixedGraph& g, const NodeSet& d) {
    require_nodes(g, d, "reachability");
    if (!g.latents().empty()) throw PreconditionError("reachability expects a latent-free graph");
    for (const auto& v : d)
        if (g.kind(v) != NodeKind::Observed) throw PreconditionError("'" + v + "' is not an observed node");

    ReachResult r;
    r.fixed_graph = g;
    while (true) {
        NodeSet remaining;
        for (const auto& v : r.fixed_graph.observed())
            if (!d.count(v)) remaining.insert(v);
        if (remaining.empty()) break;
        auto next = std::find_if(remaining.begin(), remaining.end(),
                                 [&](const NodeId& v) { return fixable(r.fixed_graph, v); });
        if (next == remaining.end()) {
            r.status = Reachability::NotReachable;
            return r;
        }
        r.fixed_graph = manipulate_hard(r.fixed_graph, {*next});
        r.order.push_back(*next);
    }
    const auto parts = districts(r.fixed_graph);
    r.status = (!d.empty() && parts.size() == 1) ? Reachability::Intrinsic : Reachability::ReachableOnly;
    return r;
}

}  // namespace tcid
