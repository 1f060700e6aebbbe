#include "tcid/instances.hpp"

#include "tcid/error.hpp"

#include <algorithm>

namespace tcid {

namespace {

const std::vector<std::string> kBinary{"0", "1"};

std::vector<Rational> bernoulli(long num, long den) {
    return {make_rational(den - num, den), make_rational(num, den)};
}

std::string xor_of(const std::string& x, const std::string& y) {
    return x == y ? "0" : "1";
}

}  // namespace

FiniteKernel make_mechanism(const std::map<NodeId, std::vector<std::string>>& spaces, const NodeId& v,
                            const std::vector<NodeId>& parents,
                            const std::function<std::vector<Rational>(const Assignment&)>& row) {
    std::vector<NodeId> sorted = parents;
    std::sort(sorted.begin(), sorted.end());
    std::vector<Variable> src;
    for (const auto& p : sorted) src.push_back({p, spaces.at(p)});
    const FiniteSpace source(std::move(src));
    const FiniteSpace target({Variable{v, spaces.at(v)}});
    std::vector<Rational> mass;
    for (std::size_t s = 0; s < source.size(); ++s) {
        std::vector<Rational> r = row(source.assignment(s));
        if (r.size() != target.size()) throw PreconditionError("row of '" + v + "' has the wrong length");
        mass.insert(mass.end(), r.begin(), r.end());
    }
    return FiniteKernel(source, target, std::move(mass));
}

FiniteKernel make_deterministic(const std::map<NodeId, std::vector<std::string>>& spaces, const NodeId& v,
                                const std::vector<NodeId>& parents,
                                const std::function<std::string(const Assignment&)>& f) {
    const auto& dom = spaces.at(v);
    return make_mechanism(spaces, v, parents, [&](const Assignment& pa) {
        const std::string x = f(pa);
        auto it = std::find(dom.begin(), dom.end(), x);
        if (it == dom.end()) throw PreconditionError("value '" + x + "' is not in the domain of '" + v + "'");
        std::vector<Rational> r(dom.size(), Rational(0));
        r[static_cast<std::size_t>(it - dom.begin())] = 1;
        return r;
    });
}

MixedGraph chain_graph() {
    return MixedGraph({{"a", NodeKind::Observed}, {"b", NodeKind::Observed}, {"c", NodeKind::Observed}},
                      {{"a", "b"}, {"b", "c"}});
}

MixedGraph triangle_graph() {
    return MixedGraph({{"a", NodeKind::Observed}, {"b", NodeKind::Observed}, {"c", NodeKind::Observed}},
                      {{"c", "a"}, {"c", "b"}, {"a", "b"}});
}

MixedGraph bow_graph() {
    return MixedGraph({{"a", NodeKind::Observed}, {"b", NodeKind::Observed}}, {{"a", "b"}}, {{"a", "b"}});
}

MixedGraph front_door_graph() {
    return MixedGraph({{"a", NodeKind::Observed}, {"b", NodeKind::Observed}, {"c", NodeKind::Observed}},
                      {{"a", "c"}, {"c", "b"}}, {{"a", "b"}});
}

MixedGraph front_door_dag() {
    return MixedGraph({{"a", NodeKind::Observed},
                       {"b", NodeKind::Observed},
                       {"c", NodeKind::Observed},
                       {"u", NodeKind::Latent}},
                      {{"u", "a"}, {"u", "b"}, {"a", "c"}, {"c", "b"}});
}

MixedGraph asymmetry_graph() {
    return MixedGraph({{"I_a", NodeKind::Input},
                       {"I_b", NodeKind::Input},
                       {"I_c", NodeKind::Input},
                       {"a", NodeKind::Observed},
                       {"b", NodeKind::Observed},
                       {"c", NodeKind::Observed}},
                      {{"I_a", "a"}, {"I_b", "b"}, {"I_c", "c"}, {"b", "c"}, {"c", "a"}});
}

LiCbn asymmetry_instance() {
    std::map<NodeId, std::vector<std::string>> spaces;
    for (const char* v : {"I_a", "I_b", "I_c", "a", "b", "c"}) spaces[v] = kBinary;
    std::map<NodeId, FiniteKernel> mech;
    mech.emplace("b", make_deterministic(spaces, "b", {"I_b"}, [](const Assignment& p) { return p.at("I_b"); }));
    mech.emplace("c", make_deterministic(spaces, "c", {"b", "I_c"},
                                         [](const Assignment& p) { return xor_of(p.at("b"), p.at("I_c")); }));
    mech.emplace("a", make_deterministic(spaces, "a", {"c", "I_a"},
                                         [](const Assignment& p) { return xor_of(p.at("c"), p.at("I_a")); }));
    return LiCbn(asymmetry_graph(), spaces, std::move(mech));
}

LiCbn front_door_instance() {
    std::map<NodeId, std::vector<std::string>> spaces;
    for (const char* v : {"a", "b", "c", "u"}) spaces[v] = kBinary;
    std::map<NodeId, FiniteKernel> mech;
    mech.emplace("u", make_mechanism(spaces, "u", {}, [](const Assignment&) { return bernoulli(2, 5); }));
    mech.emplace("a", make_mechanism(spaces, "a", {"u"}, [](const Assignment& p) {
                     return p.at("u") == "0" ? bernoulli(1, 4) : bernoulli(5, 6);
                 }));
    mech.emplace("c", make_mechanism(spaces, "c", {"a"}, [](const Assignment& p) {
                     return p.at("a") == "0" ? bernoulli(1, 3) : bernoulli(3, 4);
                 }));
    mech.emplace("b", make_mechanism(spaces, "b", {"c", "u"}, [](const Assignment& p) {
                     const int cu = (p.at("c") == "1" ? 2 : 0) + (p.at("u") == "1" ? 1 : 0);
                     static const long nums[] = {1, 3, 1, 7};
                     static const long dens[] = {5, 5, 2, 8};
                     return bernoulli(nums[cu], dens[cu]);
                 }));
    return LiCbn(front_door_dag(), spaces, std::move(mech));
}

LiCbn backdoor_failure_instance() {
    std::map<NodeId, std::vector<std::string>> spaces;
    for (const char* v : {"a", "b", "c"}) spaces[v] = kBinary;
    std::map<NodeId, FiniteKernel> mech;
    mech.emplace("c", make_mechanism(spaces, "c", {}, [](const Assignment&) { return bernoulli(1, 2); }));
    mech.emplace("a", make_mechanism(spaces, "a", {"c"}, [](const Assignment& p) {
                     return p.at("c") == "0" ? bernoulli(0, 1) : bernoulli(1, 2);
                 }));
    mech.emplace("b", make_mechanism(spaces, "b", {"a", "c"}, [](const Assignment& p) {
                     const int ac = (p.at("a") == "1" ? 2 : 0) + (p.at("c") == "1" ? 1 : 0);
                     static const long nums[] = {1, 1, 1, 3};
                     static const long dens[] = {3, 2, 5, 4};
                     return bernoulli(nums[ac], dens[ac]);
                 }));
    return LiCbn(triangle_graph(), spaces, std::move(mech));
}

LiCbn positivity_not_necessary_instance() {
    std::map<NodeId, std::vector<std::string>> spaces;
    for (const char* v : {"a", "b", "c", "u"}) spaces[v] = kBinary;
    const MixedGraph g({{"a", NodeKind::Observed},
                        {"b", NodeKind::Observed},
                        {"c", NodeKind::Observed},
                        {"u", NodeKind::Latent}},
                       {{"u", "b"}, {"u", "c"}, {"b", "c"}, {"c", "a"}});
    std::map<NodeId, FiniteKernel> mech;
    mech.emplace("u", make_mechanism(spaces, "u", {}, [](const Assignment&) { return bernoulli(1, 2); }));
    mech.emplace("b", make_mechanism(spaces, "b", {"u"}, [](const Assignment& p) {
                     return p.at("u") == "0" ? bernoulli(1, 3) : bernoulli(2, 3);
                 }));
    mech.emplace("c", make_deterministic(spaces, "c", {"u", "b"}, [](const Assignment& p) {
                     return (p.at("u") == "1" && p.at("b") == "1") ? "1" : "0";
                 }));
    mech.emplace("a", make_mechanism(spaces, "a", {"c"}, [](const Assignment& p) {
                     return p.at("c") == "0" ? bernoulli(1, 4) : bernoulli(3, 4);
                 }));
    return LiCbn(g, spaces, std::move(mech));
}

}  // namespace tcid
