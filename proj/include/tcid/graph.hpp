#pragma once

#include "tcid/kernel.hpp"

#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace tcid {

using NodeId = std::string;
using NodeSet = NameSet;

enum class NodeKind { Input, Observed, Latent };

const char* to_string(NodeKind kind);
NodeKind node_kind_from_string(const std::string& text);

/// Directed mixed graph with input, observed and latent nodes.
///
/// Immutable once built. The constructor rejects directed cycles, edges into input
/// nodes, bidirected edges touching inputs, and bidirected edges in graphs that still
/// carry latent nodes. Bidirected pairs are stored with sorted endpoints.
class MixedGraph {
public:
    using Edge = std::pair<NodeId, NodeId>;

    MixedGraph() = default;
    MixedGraph(std::map<NodeId, NodeKind> nodes, std::set<Edge> directed, std::set<Edge> bidirected = {});

    const std::map<NodeId, NodeKind>& nodes() const { return nodes_; }
    const std::set<Edge>& directed() const { return directed_; }
    const std::set<Edge>& bidirected() const { return bidirected_; }

    bool has_node(const NodeId& v) const { return nodes_.count(v) > 0; }
    NodeKind kind(const NodeId& v) const;
    NodeSet nodes_of(NodeKind kind) const;
    NodeSet inputs() const { return nodes_of(NodeKind::Input); }
    NodeSet observed() const { return nodes_of(NodeKind::Observed); }
    NodeSet latents() const { return nodes_of(NodeKind::Latent); }

    NodeSet parents(const NodeId& v) const;
    NodeSet children(const NodeId& v) const;
    NodeSet siblings(const NodeId& v) const;

    bool operator==(const MixedGraph&) const = default;

private:
    std::map<NodeId, NodeKind> nodes_;
    std::set<Edge> directed_;
    std::set<Edge> bidirected_;
};

struct StructuralReport {
    std::map<NodeId, NodeSet> ancestors;    // reflexive
    std::map<NodeId, NodeSet> descendants;  // reflexive
    std::vector<NodeSet> districts;         // observed nodes only, ordered by smallest member
    std::vector<NodeId> topological_order;  // lexicographic tie-break
};

/// Name of the input node added by a soft manipulation of `v`.
std::string soft_input_name(const NodeId& v);

MixedGraph latent_project(const MixedGraph& g);
MixedGraph manipulate_hard(const MixedGraph& g, const NodeSet& targets);
MixedGraph manipulate_soft(const MixedGraph& g, const NodeSet& targets);
MixedGraph induced_subgraph(const MixedGraph& g, const NodeSet& keep);

StructuralReport structural(const MixedGraph& g);
NodeSet ancestors(const MixedGraph& g, const NodeSet& of);
NodeSet descendants(const MixedGraph& g, const NodeSet& of);
std::vector<NodeSet> districts(const MixedGraph& g);
NodeSet district_of(const MixedGraph& g, const NodeId& v);
std::vector<NodeId> topological_order(const MixedGraph& g);

/// Every path from A to B or to any input node is d-blocked by C.
///
/// Endpoints count as non-colliders, so a path is blocked when it starts or ends in C.
/// A node of A that is itself in B or an input is separated only if it lies in C.
bool id_separated(const MixedGraph& g, const NodeSet& a, const NodeSet& b, const NodeSet& c);

/// Distr(r) and De(r) intersect exactly in {r}.
bool fixable(const MixedGraph& g, const NodeId& r);
/// Hard manipulation of a fixable node; throws PreconditionError if r is not fixable.
MixedGraph fix_graph(const MixedGraph& g, const NodeId& r);

enum class Reachability { NotReachable, ReachableOnly, Intrinsic };
const char* to_string(Reachability r);

struct ReachResult {
    Reachability status = Reachability::NotReachable;
    std::vector<NodeId> order;  // nodes fixed, in order (partial when not reachable)
    MixedGraph fixed_graph;     // graph after the fixes in `order`
};

/// Greedily fixes the observed nodes outside D, always taking the smallest fixable name.
ReachResult reachable_intrinsic(const MixedGraph& g, const NodeSet& d);

}  // namespace tcid
