#include "tcid/identify.hpp"

#include "tcid/error.hpp"

#include <algorithm>
#include <functional>
#include <map>

namespace tcid {

namespace {

std::vector<std::string> sorted(const NodeSet& s) {
    return {s.begin(), s.end()};
}

NodeSet minus(NodeSet a, const NodeSet& b) {
    for (const auto& v : b) a.erase(v);
    return a;
}

void require_kernel_matches(const FiniteKernel& k, const MixedGraph& g) {
    if (k.target().name_set() != g.observed())
        throw PreconditionError("kernel targets must be exactly the observed nodes of the graph");
    if (k.source().name_set() != g.inputs())
        throw PreconditionError("kernel sources must be exactly the input nodes of the graph");
}

std::vector<Variable> concat(const FiniteSpace& a, const FiniteSpace& b) {
    std::vector<Variable> out = a.vars();
    out.insert(out.end(), b.vars().begin(), b.vars().end());
    return out;
}

Point joined(const Point& s, const Point& t) {
    Point p = s;
    p.insert(p.end(), t.begin(), t.end());
    return p;
}

NodeSet parents_of(const MixedGraph& g, const NodeSet& d) {
    NodeSet out;
    for (const auto& v : d) {
        const NodeSet pa = g.parents(v);
        out.insert(pa.begin(), pa.end());
    }
    return minus(out, d);
}

}  // namespace

// ---------------------------------------------------------------------------

ExprPtr IdentExpr::obs_ref(bool with_inputs) {
    auto e = std::make_shared<IdentExpr>();
    e->kind = Kind::ObsRef;
    e->with_inputs = with_inputs;
    return e;
}

ExprPtr IdentExpr::fix(NodeId node, MixedGraph context, ExprPtr child, NodeSet district) {
    if (!fixable(context, node)) throw PreconditionError("node '" + node + "' is not fixable in its context");
    auto e = std::make_shared<IdentExpr>();
    e->kind = Kind::Fix;
    e->node = std::move(node);
    e->context = std::move(context);
    e->district = std::move(district);
    e->children.push_back(std::move(child));
    return e;
}

ExprPtr IdentExpr::product(std::vector<ExprPtr> children, const MixedGraph& g) {
    NodeSet seen;
    for (const auto& c : children)
        for (const auto& v : c->targets(g))
            if (!seen.insert(v).second) throw InvariantError("product factors share the target '" + v + "'");
    auto e = std::make_shared<IdentExpr>();
    e->kind = Kind::Product;
    e->children = std::move(children);
    return e;
}

ExprPtr IdentExpr::marginalize(NodeSet vars, ExprPtr child) {
    auto e = std::make_shared<IdentExpr>();
    e->kind = Kind::Marginalize;
    e->vars = std::move(vars);
    e->children.push_back(std::move(child));
    return e;
}

NodeSet IdentExpr::targets(const MixedGraph& g) const {
    switch (kind) {
        case Kind::ObsRef: return g.observed();
        case Kind::Fix: {
            NodeSet t = children.front()->targets(g);
            t.erase(node);
            return t;
        }
        case Kind::Product: {
            NodeSet t;
            for (const auto& c : children) {
                const NodeSet ct = c->targets(g);
                t.insert(ct.begin(), ct.end());
            }
            return t;
        }
        case Kind::Marginalize: return minus(children.front()->targets(g), vars);
    }
    return {};
}

// ---------------------------------------------------------------------------

FiniteKernel fix_kernel(const FiniteKernel& k, const NodeId& r, const MixedGraph& g) {
    if (!g.latents().empty()) throw PreconditionError("fixing expects a latent-free graph");
    if (!g.has_node(r) || g.kind(r) != NodeKind::Observed || !k.target().contains(r))
        throw PreconditionError("'" + r + "' is not a target variable of the kernel");
    if (!fixable(g, r)) throw PreconditionError("node '" + r + "' is not fixable");
    require_kernel_matches(k, g);

    const NodeSet nonde = minus(g.observed(), descendants(g, {r}));
    NodeSet given = nonde;
    given.insert(r);
    const FiniteKernel out = product(disintegrate(k, given), marginalize(k, nonde));
    NodeSet src = g.inputs();
    src.insert(r);
    NodeSet tgt = g.observed();
    tgt.erase(r);
    return out.reordered(sorted(src), sorted(tgt));
}

FiniteKernel fix_kernel_division(const FiniteKernel& k, const NodeId& r, const MixedGraph& g) {
    if (!g.has_node(r) || g.kind(r) != NodeKind::Observed || !k.target().contains(r))
        throw PreconditionError("'" + r + "' is not a target variable of the kernel");
    if (!fixable(g, r)) throw PreconditionError("node '" + r + "' is not fixable");
    require_kernel_matches(k, g);
    if (!strictly_positive(k)) throw PreconditionError("division form needs a strictly positive kernel");

    const NodeSet dist = district_of(g, r);
    NodeSet mb = dist;
    const NodeSet pa = parents_of(g, dist);
    mb.insert(pa.begin(), pa.end());
    mb.erase(r);
    NodeSet mb_obs;
    for (const auto& v : mb)
        if (g.kind(v) == NodeKind::Observed) mb_obs.insert(v);
    NodeSet keep = mb_obs;
    keep.insert(r);
    const FiniteKernel cond = disintegrate(marginalize(k, keep), mb_obs);

    NodeSet src = g.inputs();
    src.insert(r);
    NodeSet tgt = g.observed();
    tgt.erase(r);
    std::vector<Variable> svars;
    for (const auto& v : src)
        svars.push_back(v == r ? k.target().vars()[k.target().position(v)] : k.source().vars()[k.source().position(v)]);
    FiniteSpace source(std::move(svars));
    FiniteSpace target = k.target().subspace(sorted(tgt));
    const FiniteSpace joint(concat(source, target));
    const MassLookup num(k, joint);
    const MassLookup den(cond, joint);
    return FiniteKernel::from_function(source, target, [&](const Point& s, const Point& t) {
        const Point p = joined(s, t);
        return Rational(num.at(p) / den.at(p));
    });
}

std::pair<FiniteKernel, MixedGraph> fix_sequence(const FiniteKernel& k, const MixedGraph& g,
                                                 const std::vector<NodeId>& order) {
    FiniteKernel cur = k;
    MixedGraph ctx = g;
    for (const auto& r : order) {
        cur = fix_kernel(cur, r, ctx);
        ctx = fix_graph(ctx, r);
    }
    return {cur, ctx};
}

std::vector<std::vector<NodeId>> fixing_orders(const MixedGraph& g, const NodeSet& d) {
    std::vector<std::vector<NodeId>> out;
    std::vector<NodeId> prefix;
    std::function<void(const MixedGraph&)> walk = [&](const MixedGraph& cur) {
        const NodeSet remaining = minus(cur.observed(), d);
        if (remaining.empty()) {
            out.push_back(prefix);
            return;
        }
        for (const auto& v : remaining) {
            if (!fixable(cur, v)) continue;
            prefix.push_back(v);
            walk(manipulate_hard(cur, {v}));
            prefix.pop_back();
        }
    };
    walk(g);
    return out;
}

// ---------------------------------------------------------------------------

const char* to_string(IdStatus s) {
    return s == IdStatus::Identifiable ? "identifiable" : "not_identifiable";
}

IdResult one_line_identify(const MixedGraph& g, const NodeSet& a, const NodeSet& b) {
    if (!g.latents().empty()) throw PreconditionError("identification expects a latent-free graph");
    if (a.empty() || b.empty()) throw PreconditionError("treatment and outcome sets must be non-empty");
    for (const auto& v : a)
        if (!g.has_node(v) || g.kind(v) != NodeKind::Observed)
            throw PreconditionError("outcome '" + v + "' is not an observed node");
    for (const auto& v : b) {
        if (!g.has_node(v) || g.kind(v) != NodeKind::Observed)
            throw PreconditionError("treatment '" + v + "' is not an observed node");
        if (a.count(v)) throw PreconditionError("treatment and outcome overlap at '" + v + "'");
    }

    IdResult result;
    result.ancestral = ancestors(induced_subgraph(g, minus(g.observed(), b)), a);
    result.districts = districts(induced_subgraph(g, result.ancestral));

    std::map<NodeId, std::size_t> position;
    const auto topo = topological_order(g);
    for (std::size_t i = 0; i < topo.size(); ++i) position[topo[i]] = i;
    auto first = [&](const NodeSet& d) {
        std::size_t best = topo.size();
        for (const auto& v : d) best = std::min(best, position[v]);
        return best;
    };
    std::stable_sort(result.districts.begin(), result.districts.end(),
                     [&](const NodeSet& x, const NodeSet& y) { return first(x) < first(y); });

    std::vector<ExprPtr> factors;
    for (const auto& d : result.districts) {
        const ReachResult reach = reachable_intrinsic(g, d);
        if (reach.status != Reachability::Intrinsic) {
            result.status = IdStatus::NotIdentifiable;
            result.failing_district = d;
            return result;
        }
        ExprPtr chain = IdentExpr::obs_ref(!g.inputs().empty());
        MixedGraph ctx = g;
        for (const auto& r : reach.order) {
            chain = IdentExpr::fix(r, ctx, chain, d);
            ctx = fix_graph(ctx, r);
        }
        factors.push_back(chain);
    }
    result.status = IdStatus::Identifiable;
    result.formula = IdentExpr::marginalize(minus(result.ancestral, a), IdentExpr::product(std::move(factors), g));
    return result;
}

// ---------------------------------------------------------------------------

namespace {

FiniteKernel eval(const IdentExpr& e, const FiniteKernel& obs, const MixedGraph& g) {
    switch (e.kind) {
        case IdentExpr::Kind::ObsRef: return obs;
        case IdentExpr::Kind::Fix: return fix_kernel(eval(*e.children.front(), obs, g), e.node, e.context);
        case IdentExpr::Kind::Marginalize: {
            FiniteKernel child = eval(*e.children.front(), obs, g);
            return marginalize(child, minus(child.target().name_set(), e.vars));
        }
        case IdentExpr::Kind::Product: {
            std::vector<FiniteKernel> parts;
            NodeSet tgt;
            NodeSet src;
            for (const auto& c : e.children) {
                parts.push_back(eval(*c, obs, g));
                const FiniteKernel& q = parts.back();
                const NodeSet d = q.target().name_set();
                if (!depends_only_on(q, parents_of(g, d)))
                    throw InvariantError("district factor depends on coordinates outside its parents");
                tgt.insert(d.begin(), d.end());
                const NodeSet s = q.source().name_set();
                src.insert(s.begin(), s.end());
            }
            src = minus(src, tgt);
            std::vector<Variable> svars;
            std::vector<Variable> tvars;
            auto var_of = [&](const NodeId& v) {
                return obs.source().contains(v) ? obs.source().vars()[obs.source().position(v)]
                                                : obs.target().vars()[obs.target().position(v)];
            };
            for (const auto& v : src) svars.push_back(var_of(v));
            for (const auto& v : tgt) tvars.push_back(var_of(v));
            FiniteSpace source(std::move(svars));
            FiniteSpace target(std::move(tvars));
            const FiniteSpace joint(concat(source, target));
            std::vector<MassLookup> probes;
            for (const auto& q : parts) probes.emplace_back(q, joint);
            try {
                return FiniteKernel::from_function(source, target, [&](const Point& s, const Point& t) {
                    const Point p = joined(s, t);
                    Rational m(1);
                    for (const auto& probe : probes) m *= probe.at(p);
                    return m;
                });
            } catch (const InvariantError& err) {
                throw InvariantError(std::string("product of district factors is not a kernel: ") + err.what());
            }
        }
    }
    throw InvariantError("unknown expression node");
}

}  // namespace

FiniteKernel evaluate(const ExprPtr& expr, const FiniteKernel& obs, const MixedGraph& g, const NodeSet& b) {
    if (!expr) throw PreconditionError("no formula to evaluate");
    require_kernel_matches(obs, g);
    if (!strictly_positive(obs)) throw PreconditionError("evaluation needs a strictly positive observable kernel");
    const FiniteKernel k = eval(*expr, obs, g);

    NodeSet keep = g.inputs();
    keep.insert(b.begin(), b.end());
    if (!depends_only_on(k, keep))
        throw InvariantError("identified kernel depends on sources outside the treatment and inputs");
    Assignment fixed;
    for (const auto& v : k.source().vars())
        if (!keep.count(v.name)) fixed[v.name] = v.domain.front();
    const FiniteKernel out = section(k, fixed);
    return out.reordered(sorted(out.source().name_set()), sorted(out.target().name_set()));
}

// ---------------------------------------------------------------------------

namespace {

std::string subscript(const std::vector<std::string>& names) {
    if (names.size() == 1 && names.front().size() == 1) return names.front();
    std::string out = "{";
    for (std::size_t i = 0; i < names.size(); ++i) out += (i ? "," : "") + names[i];
    return out + "}";
}

std::string render(const IdentExpr& e, FormulaStyle style) {
    switch (e.kind) {
        case IdentExpr::Kind::ObsRef:
            if (style == FormulaStyle::Nested) return "P";
            return e.with_inputs ? "P(x_V ‖ x_I)" : "P(x_V)";
        case IdentExpr::Kind::Fix: {
            if (style == FormulaStyle::Nested)
                return "φ_" + subscript({e.node}) + "(" + render(*e.children.front(), style) + ")";
            NodeSet fixed;
            const IdentExpr* cur = &e;
            while (cur->kind == IdentExpr::Kind::Fix) {
                fixed.insert(cur->node);
                cur = cur->children.front().get();
            }
            return "φ_" + subscript(sorted(fixed)) + "(" + render(*cur, style) + ")";
        }
        case IdentExpr::Kind::Product: {
            std::string out;
            for (std::size_t i = 0; i < e.children.size(); ++i)
                out += (i ? " · " : "") + render(*e.children[i], style);
            return out;
        }
        case IdentExpr::Kind::Marginalize: {
            const std::string body = render(*e.children.front(), style);
            if (e.vars.empty()) return body;
            std::string sum = "Σ_{";
            bool first = true;
            for (const auto& v : e.vars) {
                sum += (first ? "x_" : ",x_") + v;
                first = false;
            }
            return sum + "} " + body;
        }
    }
    return "?";
}

}  // namespace

std::string emit_formula(const ExprPtr& expr, FormulaStyle style) {
    if (!expr) return "";
    return render(*expr, style);
}

// ---------------------------------------------------------------------------

LiCbn bow_model(const std::vector<Rational>& params) {
    if (params.size() != 7) throw PreconditionError("bow model takes 7 parameters");
    for (const auto& p : params)
        if (p < 0 || p > 1) throw PreconditionError("bow model parameters are probabilities");
    const std::vector<std::string> bin{"0", "1"};
    MixedGraph g({{"u", NodeKind::Latent}, {"a", NodeKind::Observed}, {"b", NodeKind::Observed}},
                 {{"u", "a"}, {"u", "b"}, {"a", "b"}});
    auto bern = [](const Rational& p1) { return std::vector<Rational>{1 - p1, p1}; };
    auto rows = [&](std::initializer_list<Rational> ps) {
        std::vector<Rational> out;
        for (const auto& p : ps) {
            auto r = bern(p);
            out.insert(out.end(), r.begin(), r.end());
        }
        return out;
    };
    const Variable u{"u", bin};
    const Variable a{"a", bin};
    const Variable b{"b", bin};
    std::map<NodeId, FiniteKernel> mech;
    mech.emplace("u", FiniteKernel::distribution(FiniteSpace({u}), bern(params[0])));
    mech.emplace("a", FiniteKernel(FiniteSpace({u}), FiniteSpace({a}), rows({params[1], params[2]})));
    mech.emplace("b", FiniteKernel(FiniteSpace({a, u}), FiniteSpace({b}),
                                   rows({params[3], params[4], params[5], params[6]})));
    return LiCbn(std::move(g), {{"u", bin}, {"a", bin}, {"b", bin}}, std::move(mech));
}

namespace {

Rational do_b1_a1(const LiCbn& m) {
    return oracle_do(m, {"a"}).at({{"a", "1"}}, {{"b", "1"}});
}

}  // namespace

std::optional<BowWitness> search_bow_witness(const std::vector<Rational>& grid) {
    if (grid.empty()) return std::nullopt;
    struct Entry {
        std::vector<Rational> params;
        Rational effect;
    };
    std::map<std::vector<Rational>, std::pair<Entry, Entry>> groups;  // observable table -> (min, max)
    std::vector<std::size_t> idx(7, 0);
    while (true) {
        std::vector<Rational> p;
        for (auto i : idx) p.push_back(grid[i]);
        const Rational pu1 = p[0];
        const Rational pa1[2] = {p[1], p[2]};
        // P(a, b) and P(b=1 || do(a=1)) summed over u by hand.
        std::vector<Rational> table(4, Rational(0));
        Rational effect(0);
        for (int uu = 0; uu < 2; ++uu) {
            const Rational pu = uu ? pu1 : Rational(1 - pu1);
            for (int aa = 0; aa < 2; ++aa) {
                const Rational pa = aa ? pa1[uu] : Rational(1 - pa1[uu]);
                const Rational pb1 = p[3 + 2 * aa + uu];
                table[2 * aa + 1] += pu * pa * pb1;
                table[2 * aa] += pu * pa * (1 - pb1);
            }
            effect += pu * p[5 + uu];
        }
        auto it = groups.find(table);
        if (it == groups.end()) {
            groups.emplace(table, std::make_pair(Entry{p, effect}, Entry{p, effect}));
        } else {
            if (effect < it->second.first.effect) it->second.first = Entry{p, effect};
            if (effect > it->second.second.effect) it->second.second = Entry{p, effect};
        }
        std::size_t d = 0;
        while (d < 7 && ++idx[d] == grid.size()) idx[d++] = 0;
        if (d == 7) break;
    }
    const std::pair<Entry, Entry>* best = nullptr;
    Rational best_gap(0);
    for (const auto& [table, range] : groups) {
        const Rational gap = range.second.effect - range.first.effect;
        if (gap > best_gap) {
            best_gap = gap;
            best = &range;
        }
    }
    if (!best) return std::nullopt;
    return BowWitness{bow_model(best->first.params), bow_model(best->second.params), best_gap};
}

BowWitness bow_witness() {
    auto q = [](long n) { return make_rational(n, 4); };
    BowWitness w{bow_model({q(1), q(1), q(3), q(2), q(2), q(3), q(1)}),
                 bow_model({q(1), q(1), q(3), q(2), q(2), q(2), q(2)}), Rational(0)};
    if (observable_kernel(w.first) != observable_kernel(w.second))
        throw InvariantError("bow witness: observable kernels differ");
    w.gap = abs(do_b1_a1(w.first) - do_b1_a1(w.second));
    if (w.gap < make_rational(1, 20)) throw InvariantError("bow witness: interventional gap below 1/20");
    return w;
}

}  // namespace tcid
