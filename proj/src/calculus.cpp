#include "tcid/calculus.hpp"

#include "tcid/error.hpp"

#include <memory>

namespace tcid {

const char* to_string(Rule r) {
    switch (r) {
        case Rule::R1: return "1";
        case Rule::R2: return "2";
        case Rule::R3: return "3";
        case Rule::BackDoor: return "backdoor";
    }
    return "?";
}

namespace {

NodeSet unite(std::initializer_list<const NodeSet*> parts) {
    NodeSet out;
    for (const auto* p : parts) out.insert(p->begin(), p->end());
    return out;
}

void require_disjoint_observed(const LiCbn& m, std::initializer_list<const NodeSet*> parts) {
    NodeSet seen;
    for (const auto* p : parts) {
        for (const auto& v : *p) {
            if (!m.graph().has_node(v) || m.graph().kind(v) != NodeKind::Observed)
                throw PreconditionError("'" + v + "' is not an observed node");
            if (!seen.insert(v).second) throw PreconditionError("node sets overlap at '" + v + "'");
        }
    }
}

NodeSet soft_inputs(const NodeSet& b) {
    NodeSet out;
    for (const auto& v : b) out.insert(soft_input_name(v));
    return out;
}

// Compares the rows of two kernels over the same variables at every source point where all
// `support` kernels have positive mass.
void compare_on_support(RuleReport& report, const FiniteKernel& lhs, const FiniteKernel& rhs,
                        const std::vector<const FiniteKernel*>& support) {
    const std::vector<std::string> src = lhs.source().names();
    const std::vector<std::string> tgt = lhs.target().names();
    const FiniteKernel r = rhs.reordered(src, tgt);
    std::vector<MassLookup> probes;
    for (const auto* k : support) probes.emplace_back(*k, lhs.source());

    report.support_equality = true;
    for (std::size_t s = 0; s < lhs.source().size(); ++s) {
        const Point p = lhs.source().point(s);
        bool inside = true;
        for (const auto& probe : probes) inside = inside && sgn(probe.at(p)) > 0;
        if (!inside) {
            ++report.excluded_points;
            continue;
        }
        ++report.compared_points;
        auto a = lhs.row(s);
        auto b = r.row(s);
        if (!std::equal(a.begin(), a.end(), b.begin())) {
            if (*report.support_equality) report.counterexample = lhs.source().assignment(s);
            report.support_equality = false;
        }
    }
    if (report.positivity_ok) report.equality_ok = report.support_equality;
}

// P(X_A | X_given || do(X_D), X_I) from the interventional kernel `kd`.
FiniteKernel conditional(const FiniteKernel& kd, const NodeSet& a, const NodeSet& given) {
    NodeSet keep = a;
    keep.insert(given.begin(), given.end());
    return disintegrate(marginalize(kd, keep), given);
}

}  // namespace

RuleReport rule1(const LiCbn& m, const NodeSet& a, const NodeSet& b, const NodeSet& c, const NodeSet& d) {
    require_disjoint_observed(m, {&a, &b, &c, &d});
    RuleReport report;
    report.rule = Rule::R1;
    const MixedGraph g = manipulate_hard(latent_project(m.graph()), d);
    report.graphical_ok = id_separated(g, a, b, unite({&c, &d}));

    const FiniteKernel kd = oracle_do(m, d);
    const FiniteKernel pbc = marginalize(kd, unite({&b, &c}));
    report.positivity_ok = strictly_positive(pbc);
    if (report.graphical_ok) {
        const FiniteKernel lhs = conditional(kd, a, unite({&b, &c}));
        const FiniteKernel rhs = broadcast(conditional(kd, a, c), lhs.source());
        compare_on_support(report, lhs, rhs, {&pbc});
    }
    return report;
}

RuleReport rule2(const LiCbn& m, const NodeSet& a, const NodeSet& b, const NodeSet& c, const NodeSet& d) {
    require_disjoint_observed(m, {&a, &b, &c, &d});
    RuleReport report;
    report.rule = Rule::R2;
    const MixedGraph g = manipulate_hard(manipulate_soft(latent_project(m.graph()), b), d);
    report.graphical_ok = id_separated(g, a, soft_inputs(b), unite({&b, &c, &d}));

    const FiniteKernel kd = oracle_do(m, d);
    const FiniteKernel kbd = oracle_do(m, unite({&b, &d}));
    const FiniteKernel pbc = marginalize(kd, unite({&b, &c}));
    const FiniteKernel pc = marginalize(kbd, c);
    report.positivity_ok = strictly_positive(pbc) && strictly_positive(pc);
    if (report.graphical_ok) {
        const FiniteKernel lhs = conditional(kbd, a, c);
        const FiniteKernel rhs = conditional(kd, a, unite({&b, &c}));
        compare_on_support(report, lhs, rhs, {&pbc, &pc});
    }
    return report;
}

RuleReport rule3(const LiCbn& m, const NodeSet& a, const NodeSet& b, const NodeSet& c, const NodeSet& d) {
    require_disjoint_observed(m, {&a, &b, &c, &d});
    RuleReport report;
    report.rule = Rule::R3;
    const MixedGraph g = manipulate_hard(manipulate_soft(latent_project(m.graph()), b), d);
    report.graphical_ok = id_separated(g, a, soft_inputs(b), unite({&c, &d}));

    const FiniteKernel kd = oracle_do(m, d);
    const FiniteKernel kbd = oracle_do(m, unite({&b, &d}));
    const FiniteKernel pc_bd = marginalize(kbd, c);
    const FiniteKernel pc_d = marginalize(kd, c);
    report.positivity_ok = strictly_positive(pc_bd) && strictly_positive(pc_d);
    if (report.graphical_ok) {
        const FiniteKernel lhs = conditional(kbd, a, c);
        const FiniteKernel rhs = broadcast(conditional(kd, a, c), lhs.source());
        compare_on_support(report, lhs, rhs, {&pc_bd, &pc_d});
    }
    return report;
}

RuleReport backdoor(const LiCbn& m, const NodeSet& a, const NodeSet& b, const NodeSet& f) {
    require_disjoint_observed(m, {&a, &b, &f});
    RuleReport report;
    report.rule = Rule::BackDoor;
    const MixedGraph g = manipulate_soft(latent_project(m.graph()), b);
    const NodeSet ib = soft_inputs(b);
    report.graphical_ok = id_separated(g, f, ib, {}) && id_separated(g, a, ib, unite({&b, &f}));

    const FiniteKernel obs = observable_kernel(m);
    const FiniteKernel pf = marginalize(obs, f);
    const FiniteKernel pb = marginalize(obs, b);
    const FiniteKernel pfb = marginalize(obs, unite({&f, &b}));
    const FiniteKernel independent = product(pf, pb);
    report.positivity_ok = absolutely_continuous(
        independent.reordered(pfb.source().names(), pfb.target().names()), pfb);
    if (report.graphical_ok) {
        const FiniteKernel kdo = oracle_do(m, b);
        const FiniteKernel cond = conditional(obs, a, unite({&f, &b}));
        const FiniteKernel adjusted = product(cond, pf);

        RuleReport joint = report;
        compare_on_support(joint, marginalize(kdo, unite({&a, &f})), adjusted, {&pb});
        RuleReport effect = report;
        compare_on_support(effect, marginalize(kdo, a), marginalize(adjusted, a), {&pb});

        report.compared_points = joint.compared_points;
        report.excluded_points = joint.excluded_points;
        report.support_equality = *joint.support_equality && *effect.support_equality;
        report.counterexample = joint.counterexample ? joint.counterexample : effect.counterexample;
        if (report.positivity_ok) report.equality_ok = report.support_equality;
    }
    return report;
}

MarkovReport verify_markov(const LiCbn& m, std::size_t budget, bool log_nonfaithful) {
    const MixedGraph g = latent_project(m.graph());
    std::vector<NodeId> nodes;
    for (const auto& [v, kind] : g.nodes()) nodes.push_back(v);
    if (nodes.size() > 12) throw PreconditionError("too many nodes for exhaustive triple enumeration");

    auto obs = std::make_shared<const FiniteKernel>(observable_kernel(m));
    MarkovReport report;
    std::size_t codes = 1;
    for (std::size_t i = 0; i < nodes.size(); ++i) codes *= 4;
    for (std::size_t code = 0; code < codes; ++code) {
        Triple t;
        std::size_t rest = code;
        for (const auto& v : nodes) {
            switch (rest % 4) {
                case 1: t.a.insert(v); break;
                case 2: t.b.insert(v); break;
                case 3: t.c.insert(v); break;
                default: break;
            }
            rest /= 4;
        }
        if (t.a.empty() || t.b.empty()) continue;
        if (report.triples_checked == budget) {
            report.budget_exhausted = true;
            break;
        }
        ++report.triples_checked;
        const bool sep = id_separated(g, t.a, t.b, t.c);
        if (!sep && !log_nonfaithful) continue;
        if (sep) ++report.separated;

        std::vector<TVar> vars{
            TransitionalSpace::projection(*obs, "A", {t.a.begin(), t.a.end()}),
            TransitionalSpace::projection(*obs, "B", {t.b.begin(), t.b.end()}),
            TransitionalSpace::projection(*obs, "C", {t.c.begin(), t.c.end()}),
        };
        const bool independent = tci_check(TransitionalSpace(obs, std::move(vars)), "A", "B", "C").holds;
        if (sep && !independent) report.violations.push_back(t);
        if (!sep && independent) report.nonfaithful.push_back(t);
    }
    return report;
}

}  // namespace tcid
