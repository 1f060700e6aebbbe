#include "tcid/cbn.hpp"

#include "tcid/error.hpp"

#include <algorithm>
#include <numeric>

namespace tcid {

namespace {

std::vector<std::string> numeric_domain(std::size_t n) {
    std::vector<std::string> out;
    for (std::size_t i = 0; i < n; ++i) out.push_back(std::to_string(i));
    return out;
}

}  // namespace

LiCbn::LiCbn(MixedGraph graph, std::map<NodeId, std::vector<std::string>> spaces,
             std::map<NodeId, FiniteKernel> mechanisms)
    : graph_(std::move(graph)), spaces_(std::move(spaces)), mechanisms_(std::move(mechanisms)) {
    if (!graph_.bidirected().empty()) throw InvariantError("an L-iCBN graph carries no bidirected edges");
    for (const auto& [v, kind] : graph_.nodes()) {
        auto sp = spaces_.find(v);
        if (sp == spaces_.end()) throw InvariantError("node '" + v + "' has no space");
        if (sp->second.empty()) throw InvariantError("node '" + v + "' has an empty domain");
        if (kind != NodeKind::Input && std::find(sp->second.begin(), sp->second.end(), kStar) != sp->second.end())
            throw InvariantError("domain of '" + v + "' uses the reserved symbol '" + kStar + "'");
    }
    for (const auto& [v, dom] : spaces_)
        if (!graph_.has_node(v)) throw InvariantError("space given for unknown node '" + v + "'");
    for (const auto& [v, k] : mechanisms_)
        if (!graph_.has_node(v) || graph_.kind(v) == NodeKind::Input)
            throw InvariantError("mechanism given for '" + v + "', which is not an observed or latent node");
    for (const auto& [v, kind] : graph_.nodes()) {
        if (kind == NodeKind::Input) continue;
        auto it = mechanisms_.find(v);
        if (it == mechanisms_.end()) throw InvariantError("node '" + v + "' has no mechanism");
        const FiniteKernel& k = it->second;
        if (k.target() != FiniteSpace({variable(v)}))
            throw InvariantError("mechanism of '" + v + "' must target exactly X_" + v);
        const NodeSet pa = graph_.parents(v);
        if (k.source().name_set() != pa) throw InvariantError("mechanism of '" + v + "' must take exactly its parents");
        for (const auto& var : k.source().vars())
            if (var != variable(var.name))
                throw InvariantError("mechanism of '" + v + "' uses a wrong domain for '" + var.name + "'");
    }
}

Variable LiCbn::variable(const NodeId& v) const {
    auto it = spaces_.find(v);
    if (it == spaces_.end()) throw PreconditionError("unknown node '" + v + "'");
    return Variable{v, it->second};
}

FiniteSpace LiCbn::space_of(const NodeSet& nodes) const {
    std::vector<Variable> vars;
    for (const auto& v : nodes) vars.push_back(variable(v));
    return FiniteSpace(std::move(vars));
}

const FiniteKernel& LiCbn::mechanism(const NodeId& v) const {
    auto it = mechanisms_.find(v);
    if (it == mechanisms_.end()) throw PreconditionError("node '" + v + "' has no mechanism");
    return it->second;
}

FiniteKernel observable_kernel(const LiCbn& m) {
    const MixedGraph& g = m.graph();
    std::vector<NodeId> order;
    for (const auto& v : topological_order(g))
        if (g.kind(v) != NodeKind::Input) order.push_back(v);

    // Latents are summed out as soon as every child has been multiplied in.
    std::map<NodeId, std::size_t> pending_children;
    for (const auto& l : g.latents()) pending_children[l] = g.children(l).size();

    FiniteKernel acc = FiniteKernel::distribution(FiniteSpace{}, {Rational(1)});
    for (const auto& v : order) {
        acc = product(m.mechanism(v), acc);
        NodeSet drop;
        for (const auto& p : g.parents(v)) {
            auto it = pending_children.find(p);
            if (it != pending_children.end() && --it->second == 0) drop.insert(p);
        }
        if (g.kind(v) == NodeKind::Latent && pending_children[v] == 0) drop.insert(v);
        if (!drop.empty()) {
            NodeSet keep = acc.target().name_set();
            for (const auto& d : drop) keep.erase(d);
            acc = marginalize(acc, keep);
        }
    }
    const NodeSet observed = g.observed();
    if (acc.target().name_set() != observed) acc = marginalize(acc, observed);
    const NodeSet input_nodes = g.inputs();
    acc = broadcast(acc, m.space_of(input_nodes));
    const std::vector<std::string> src(input_nodes.begin(), input_nodes.end());
    const std::vector<std::string> tgt(observed.begin(), observed.end());
    return acc.reordered(src, tgt);
}

LiCbn intervene_hard(const LiCbn& m, const NodeSet& targets) {
    for (const auto& v : targets)
        if (!m.graph().has_node(v) || m.graph().kind(v) != NodeKind::Observed)
            throw PreconditionError("hard intervention targets observed nodes only ('" + v + "')");
    auto mechanisms = m.mechanisms();
    for (const auto& v : targets) mechanisms.erase(v);
    return LiCbn(manipulate_hard(m.graph(), targets), m.spaces(), std::move(mechanisms));
}

LiCbn intervene_soft(const LiCbn& m, const NodeSet& targets) {
    for (const auto& v : targets)
        if (!m.graph().has_node(v) || m.graph().kind(v) != NodeKind::Observed)
            throw PreconditionError("soft intervention targets observed nodes only ('" + v + "')");
    MixedGraph graph = manipulate_soft(m.graph(), targets);
    auto spaces = m.spaces();
    auto mechanisms = m.mechanisms();
    for (const auto& v : targets) {
        const NodeId input = soft_input_name(v);
        std::vector<std::string> dom = spaces.at(v);
        if (std::find(dom.begin(), dom.end(), kStar) != dom.end())
            throw PreconditionError("domain of '" + v + "' already contains '" + kStar + "'");
        dom.push_back(kStar);
        spaces[input] = dom;

        const FiniteKernel& old = m.mechanism(v);
        std::vector<Variable> src = old.source().vars();
        src.push_back(Variable{input, dom});
        FiniteSpace source(std::move(src));
        const std::size_t star = dom.size() - 1;
        const std::size_t input_pos = source.rank() - 1;
        mechanisms.insert_or_assign(
            v, FiniteKernel::from_function(source, old.target(), [&](const Point& s, const Point& t) -> Rational {
                if (s[input_pos] == star) {
                    const Point parents(s.begin(), s.end() - 1);
                    return old.mass(old.source().index(parents), t[0]);
                }
                return s[input_pos] == t[0] ? Rational(1) : Rational(0);
            }));
    }
    return LiCbn(std::move(graph), std::move(spaces), std::move(mechanisms));
}

FiniteKernel oracle_do(const LiCbn& m, const NodeSet& targets) {
    return observable_kernel(intervene_hard(m, targets));
}

FiniteKernel q_factor_oracle(const LiCbn& m, const NodeSet& d) {
    NodeSet rest;
    for (const auto& v : m.graph().observed()) {
        if (!d.count(v)) rest.insert(v);
    }
    for (const auto& v : d)
        if (!m.graph().has_node(v) || m.graph().kind(v) != NodeKind::Observed)
            throw PreconditionError("Q-factor over non-observed node '" + v + "'");
    return oracle_do(m, rest);
}

MixedGraph canonical_dag(const MixedGraph& admg) {
    auto nodes = admg.nodes();
    auto directed = admg.directed();
    for (const auto& [a, b] : admg.bidirected()) {
        const NodeId u = "u_" + a + "_" + b;
        if (!nodes.emplace(u, NodeKind::Latent).second) throw PreconditionError("latent name '" + u + "' is taken");
        directed.insert({u, a});
        directed.insert({u, b});
    }
    return MixedGraph(std::move(nodes), std::move(directed));
}

FiniteKernel random_mechanism(std::mt19937_64& rng, const FiniteSpace& source, const Variable& target,
                              const RandomCptOptions& options) {
    FiniteSpace tgt({target});
    const std::size_t width = target.domain.size();
    std::vector<Rational> mass;
    mass.reserve(source.size() * width);
    std::uniform_int_distribution<long> pick_n(2, std::max<long>(2, options.max_denominator));
    for (std::size_t s = 0; s < source.size(); ++s) {
        const long n = pick_n(rng);
        std::uniform_int_distribution<long> pick_i(options.strictly_positive ? 1 : 0, n);
        std::vector<long> weights(width);
        for (auto& w : weights) w = pick_i(rng);
        long total = std::accumulate(weights.begin(), weights.end(), 0L);
        if (total == 0) {
            weights[std::uniform_int_distribution<std::size_t>(0, width - 1)(rng)] = 1;
            total = 1;
        }
        for (auto w : weights) mass.push_back(make_rational(w, total));
    }
    return FiniteKernel(source, std::move(tgt), std::move(mass));
}

LiCbn random_model(std::mt19937_64& rng, const MixedGraph& dag, const std::map<NodeId, std::size_t>& domains,
                   const RandomCptOptions& options) {
    std::map<NodeId, std::vector<std::string>> spaces;
    for (const auto& [v, kind] : dag.nodes()) {
        auto it = domains.find(v);
        spaces[v] = numeric_domain(it == domains.end() ? 2 : it->second);
    }
    std::map<NodeId, FiniteKernel> mechanisms;
    for (const auto& v : topological_order(dag)) {
        if (dag.kind(v) == NodeKind::Input) continue;
        std::vector<Variable> src;
        for (const auto& p : dag.parents(v)) src.push_back(Variable{p, spaces[p]});
        mechanisms.emplace(v, random_mechanism(rng, FiniteSpace(std::move(src)), Variable{v, spaces[v]}, options));
    }
    return LiCbn(dag, std::move(spaces), std::move(mechanisms));
}

LiCbn random_cbn(std::mt19937_64& rng, const RandomCbnOptions& options) {
    auto count = [&](std::size_t lo, std::size_t hi) {
        return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
    };
    const std::size_t n_obs = count(1, std::max<std::size_t>(1, options.max_observed));
    const std::size_t n_lat = count(0, options.max_latent);
    const std::size_t n_in = count(0, options.max_input);

    std::vector<NodeId> inputs;
    std::vector<NodeId> inner;
    std::map<NodeId, NodeKind> nodes;
    for (std::size_t i = 0; i < n_obs; ++i) {
        NodeId id(1, static_cast<char>('a' + i));
        inner.push_back(id);
        nodes[id] = NodeKind::Observed;
    }
    for (std::size_t i = 0; i < n_lat; ++i) {
        NodeId id = "u" + std::to_string(i + 1);
        inner.push_back(id);
        nodes[id] = NodeKind::Latent;
    }
    for (std::size_t i = 0; i < n_in; ++i) {
        NodeId id = "r" + std::to_string(i + 1);
        inputs.push_back(id);
        nodes[id] = NodeKind::Input;
    }
    std::shuffle(inner.begin(), inner.end(), rng);

    std::bernoulli_distribution edge(options.edge_probability);
    std::set<MixedGraph::Edge> directed;
    for (const auto& i : inputs)
        for (const auto& v : inner)
            if (edge(rng)) directed.insert({i, v});
    for (std::size_t x = 0; x < inner.size(); ++x)
        for (std::size_t y = x + 1; y < inner.size(); ++y)
            if (edge(rng)) directed.insert({inner[x], inner[y]});

    MixedGraph dag(std::move(nodes), std::move(directed));
    std::map<NodeId, std::size_t> domains;
    for (const auto& [v, kind] : dag.nodes()) domains[v] = count(options.min_domain, options.max_domain);
    return random_model(rng, dag, domains, options.cpt);
}

}  // namespace tcid
