#include "random_graphs.hpp"

#include "tcid/calculus.hpp"
#include "tcid/error.hpp"
#include "tcid/instances.hpp"

#include <doctest.h>

using namespace tcid;

namespace {

LiCbn model_on(const MixedGraph& g, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    return random_model(rng, canonical_dag(g), {});
}

MixedGraph edge_ab() {
    return MixedGraph({{"a", NodeKind::Observed}, {"b", NodeKind::Observed}}, {{"a", "b"}});
}

void expect_sound(const RuleReport& r) {
    CHECK(r.equality_ok.has_value() == (r.graphical_ok && r.positivity_ok));
    CHECK(r.support_equality.has_value() == r.graphical_ok);
    if (r.equality_ok) CHECK(*r.equality_ok);
}

}  // namespace

TEST_CASE("Markov property on small models") {
    MixedGraph one({{"a", NodeKind::Observed}}, {});
    auto single = model_on(one, 1);
    auto r0 = verify_markov(single);
    CHECK(r0.violations.empty());
    CHECK(r0.triples_checked == 0);

    auto chain = model_on(chain_graph(), 2);
    auto r = verify_markov(chain);
    CHECK(r.violations.empty());
    CHECK(id_separated(chain_graph(), {"a"}, {"c"}, {"b"}));
    auto s = TransitionalSpace::of_projections(observable_kernel(chain), {{"A", {"a"}}, {"B", {"c"}}, {"C", {"b"}}});
    CHECK(tci_check(s, "A", "B", "C").holds);

    auto asym = verify_markov(asymmetry_instance(), 1u << 20, true);
    CHECK(asym.violations.empty());
    CHECK(!asym.budget_exhausted);
    CHECK(asym.separated > 0);
    // the caption separation is among the checked triples
    CHECK(id_separated(asymmetry_graph(), {"a"}, {"b"}, {"c", "I_a"}));

    auto limited = verify_markov(asymmetry_instance(), 10);
    CHECK(limited.budget_exhausted);
    CHECK(limited.triples_checked == 10);
}

TEST_CASE("rule 1") {
    auto chain = model_on(chain_graph(), 3);
    auto r = rule1(chain, {"c"}, {"a"}, {}, {"b"});
    CHECK(r.graphical_ok);
    CHECK(r.positivity_ok);
    CHECK(r.equality_ok == std::optional<bool>(true));

    auto trivial = rule1(chain, {"c"}, {}, {"a"}, {});
    CHECK(trivial.graphical_ok);
    CHECK(trivial.equality_ok == std::optional<bool>(true));

    auto tri = model_on(triangle_graph(), 4);
    auto t = rule1(tri, {"a"}, {"b"}, {"c"}, {});
    CHECK(!t.graphical_ok);
    CHECK(!t.equality_ok);

    CHECK_THROWS_AS(rule1(tri, {"a"}, {"a"}, {}, {}), PreconditionError);
}

TEST_CASE("rule 2") {
    auto tri = model_on(triangle_graph(), 5);
    auto r = rule2(tri, {"b"}, {"a"}, {"c"}, {});
    CHECK(r.graphical_ok);
    CHECK(r.positivity_ok);
    CHECK(r.equality_ok == std::optional<bool>(true));

    auto trivial = rule2(tri, {"b"}, {}, {"c"}, {});
    CHECK(trivial.graphical_ok);
    CHECK(trivial.equality_ok == std::optional<bool>(true));

    auto bow = model_on(bow_graph(), 6);
    auto b = rule2(bow, {"b"}, {"a"}, {}, {});
    CHECK(!b.graphical_ok);
    CHECK(!b.equality_ok);
}

TEST_CASE("rule 3") {
    auto ab = model_on(edge_ab(), 7);
    auto r = rule3(ab, {"a"}, {"b"}, {}, {});
    CHECK(r.graphical_ok);
    CHECK(r.equality_ok == std::optional<bool>(true));

    auto chain = model_on(chain_graph(), 8);
    auto c = rule3(chain, {"c"}, {"a"}, {"b"}, {});
    CHECK(c.graphical_ok);
    CHECK(c.equality_ok == std::optional<bool>(true));
    auto open = rule3(chain, {"c"}, {"a"}, {}, {});
    CHECK(!open.graphical_ok);
}

TEST_CASE("back-door adjustment") {
    auto tri = model_on(triangle_graph(), 9);
    auto r = backdoor(tri, {"b"}, {"a"}, {"c"});
    CHECK(r.graphical_ok);
    CHECK(r.positivity_ok);
    CHECK(r.equality_ok == std::optional<bool>(true));

    auto ab = model_on(edge_ab(), 10);
    auto e = backdoor(ab, {"b"}, {"a"}, {});
    CHECK(e.equality_ok == std::optional<bool>(true));
    auto obs = observable_kernel(ab);
    CHECK(equivalent(marginalize(oracle_do(ab, {"a"}), {"b"}), disintegrate(obs, {"a"})));

    auto fail = backdoor(backdoor_failure_instance(), {"b"}, {"a"}, {"c"});
    CHECK(fail.graphical_ok);
    CHECK(!fail.positivity_ok);
    CHECK(!fail.equality_ok);
    REQUIRE(fail.support_equality);
    CHECK(!*fail.support_equality);
    REQUIRE(fail.counterexample);
    CHECK(fail.counterexample->at("a") == "1");
}

TEST_CASE("positivity is not necessary") {
    auto m = positivity_not_necessary_instance();
    auto r = rule2(m, {"a"}, {"b"}, {"c"}, {});
    CHECK(r.graphical_ok);
    CHECK(!r.positivity_ok);
    CHECK(!r.equality_ok);
    REQUIRE(r.support_equality);
    CHECK(*r.support_equality);
    CHECK(r.excluded_points > 0);
    CHECK(r.compared_points > 0);
}

TEST_CASE("property: rules are sound on random models") {
    std::mt19937_64 rng(2718);
    for (int trial = 0; trial < 25; ++trial) {
        auto m = random_cbn(rng);
        CHECK(verify_markov(m).violations.empty());
        std::vector<NodeId> obs;
        for (const auto& v : m.graph().observed()) obs.push_back(v);
        for (int q = 0; q < 20; ++q) {
            NodeSet s[4];
            for (const auto& v : obs) {
                const auto k = rng() % 5;
                if (k < 4) s[k].insert(v);
            }
            expect_sound(rule1(m, s[0], s[1], s[2], s[3]));
            expect_sound(rule2(m, s[0], s[1], s[2], s[3]));
            expect_sound(rule3(m, s[0], s[1], s[2], s[3]));
            expect_sound(backdoor(m, s[0], s[1], s[2]));
        }
    }
}
