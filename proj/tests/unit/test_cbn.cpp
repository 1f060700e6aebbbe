#include "cbn_oracle.hpp"

#include "tcid/cbn.hpp"
#include "tcid/error.hpp"
#include "tcid/instances.hpp"

#include <doctest.h>

using namespace tcid;
using oracle::bin;

namespace {

Rational q(long n, long d) {
    return make_rational(n, d);
}

LiCbn triangle_model(std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    return random_model(rng, triangle_graph(), {});
}

}  // namespace

TEST_CASE("model validation") {
    std::map<NodeId, std::vector<std::string>> spaces{{"a", {"0", "1"}}};
    MixedGraph g({{"a", NodeKind::Observed}}, {});
    auto pa = FiniteKernel::distribution(FiniteSpace({bin("a")}), {q(1, 2), q(1, 2)});
    CHECK_NOTHROW(LiCbn(g, spaces, {{"a", pa}}));
    CHECK_THROWS_AS(LiCbn(g, spaces, {}), InvariantError);
    CHECK_THROWS_AS(LiCbn(g, {{"a", {"0", "*"}}}, {{"a", pa}}), InvariantError);
    CHECK_THROWS_AS(LiCbn(g, spaces, {{"a", FiniteKernel::distribution(FiniteSpace({bin("b")}), {1, 0})}}),
                    InvariantError);
    CHECK_THROWS_AS(LiCbn(front_door_graph(), {}, {}), InvariantError);
}

TEST_CASE("observable kernel") {
    MixedGraph g({{"a", NodeKind::Observed}}, {});
    auto pa = FiniteKernel::distribution(FiniteSpace({bin("a")}), {q(1, 2), q(1, 2)});
    CHECK(observable_kernel(LiCbn(g, {{"a", {"0", "1"}}}, {{"a", pa}})) == pa);

    MixedGraph chain({{"I", NodeKind::Input}, {"a", NodeKind::Observed}}, {{"I", "a"}});
    std::map<NodeId, std::vector<std::string>> sp{{"I", {"0", "1"}}, {"a", {"0", "1"}}};
    auto copy = make_deterministic(sp, "a", {"I"}, [](const Assignment& p) { return p.at("I"); });
    auto k = observable_kernel(LiCbn(chain, sp, {{"a", copy}}));
    CHECK(k == copy);

    auto fd = front_door_instance();
    CHECK(oracle::matches_truncated_factorization(fd, {}, observable_kernel(fd)));
}

TEST_CASE("property: observable and interventional kernels match brute force") {
    std::mt19937_64 rng(77);
    for (int trial = 0; trial < 60; ++trial) {
        RandomCbnOptions opt;
        opt.cpt.strictly_positive = trial % 2 == 0;
        auto m = random_cbn(rng, opt);
        CHECK(oracle::matches_truncated_factorization(m, {}, observable_kernel(m)));
        NodeSet a;
        for (const auto& v : m.graph().observed())
            if (rng() % 2) a.insert(v);
        CHECK(oracle::matches_truncated_factorization(m, a, oracle_do(m, a)));
    }
}

TEST_CASE("hard intervention") {
    auto m = triangle_model(1);
    CHECK(observable_kernel(intervene_hard(m, {})) == observable_kernel(m));
    auto h = intervene_hard(m, {"a"});
    CHECK(h.graph().kind("a") == NodeKind::Input);
    CHECK(h.mechanisms().count("a") == 0);
    CHECK(h.mechanisms().count("b") == 1);
    CHECK(h.mechanisms().count("c") == 1);
    CHECK(oracle::matches_truncated_factorization(m, {"a"}, oracle_do(m, {"a"})));
    CHECK_THROWS_AS(intervene_hard(front_door_instance(), {"u"}), PreconditionError);
}

TEST_CASE("oracle_do and q-factors") {
    auto m = triangle_model(2);
    CHECK(oracle_do(m, {}) == observable_kernel(m));
    auto all = oracle_do(m, {"a", "b", "c"});
    CHECK(all.target().rank() == 0);
    CHECK(all.source().names() == std::vector<std::string>{"a", "b", "c"});

    CHECK(q_factor_oracle(m, {"a", "b", "c"}) == observable_kernel(m));
    CHECK(q_factor_oracle(m, {}).target().rank() == 0);

    // front-door: P(b || do a) = sum_c P(c|a) sum_a' P(b|c,a') P(a')
    auto fd = front_door_instance();
    auto obs = observable_kernel(fd);
    auto pa = marginalize(obs, {"a"});
    auto pc_a = disintegrate(marginalize(obs, {"a", "c"}), {"a"});
    auto pb_ac = disintegrate(obs, {"a", "c"});
    auto effect = marginalize(oracle_do(fd, {"a"}), {"b"});
    for (const char* xa : {"0", "1"})
        for (const char* xb : {"0", "1"}) {
            Rational want = 0;
            for (const char* xc : {"0", "1"}) {
                Rational inner = 0;
                for (const char* xa2 : {"0", "1"})
                    inner += pb_ac.at({{"a", xa2}, {"c", xc}}, {{"b", xb}}) * pa.at({}, {{"a", xa2}});
                want += pc_a.at({{"a", xa}}, {{"c", xc}}) * inner;
            }
            CHECK(effect.at({{"a", xa}}, {{"b", xb}}) == want);
        }

    // Q[{c}](c || a, b) = P(c | a), constant in b
    auto qc = q_factor_oracle(fd, {"c"});
    CHECK(depends_only_on(qc, {"a"}));
    CHECK(qc.at({{"a", "1"}, {"b", "0"}}, {{"c", "1"}}) == q(3, 4));
}

TEST_CASE("property: sequential hard interventions compose") {
    std::mt19937_64 rng(31);
    for (int trial = 0; trial < 100; ++trial) {
        auto m = random_cbn(rng);
        NodeSet a1, a2;
        for (const auto& v : m.graph().observed()) {
            const auto r = rng() % 3;
            if (r == 1) a1.insert(v);
            if (r == 2) a2.insert(v);
        }
        NodeSet both = a1;
        both.insert(a2.begin(), a2.end());
        CHECK(oracle_do(m, both) == oracle_do(intervene_hard(m, a1), a2));
        // latent projection of the intervened graph equals intervening on the projection
        CHECK(latent_project(intervene_hard(m, both).graph()) == manipulate_hard(latent_project(m.graph()), both));
    }
}

TEST_CASE("soft intervention") {
    auto m = triangle_model(3);
    auto s = intervene_soft(m, {"a"});
    CHECK(s.spaces().at("I_a") == std::vector<std::string>{"0", "1", "*"});
    auto ks = observable_kernel(s);
    auto star = section(ks, {{"I_a", "*"}});
    CHECK(star == observable_kernel(m));

    auto set1 = section(ks, {{"I_a", "1"}});
    auto ma = marginalize(set1, {"a"});
    CHECK(ma.table() == std::vector<Rational>{0, 1});

    auto hard = section(oracle_do(m, {"a"}), {{"a", "1"}});
    CHECK(marginalize(set1, {"b", "c"}) == hard);

    CHECK_THROWS_AS(intervene_soft(s, {"a"}), PreconditionError);
}

TEST_CASE("property: soft-intervention star slice reproduces the model") {
    std::mt19937_64 rng(8);
    for (int trial = 0; trial < 50; ++trial) {
        auto m = random_cbn(rng);
        NodeSet a;
        for (const auto& v : m.graph().observed())
            if (rng() % 2) a.insert(v);
        auto ks = observable_kernel(intervene_soft(m, a));
        Assignment stars;
        for (const auto& v : a) stars[soft_input_name(v)] = kStar;
        CHECK(section(ks, stars) == observable_kernel(m));
    }
}

TEST_CASE("random generators") {
    std::mt19937_64 rng(5);
    for (int i = 0; i < 50; ++i) {
        auto m = random_cbn(rng);
        CHECK(m.graph().observed().size() <= 4);
        CHECK(m.graph().latents().size() <= 2);
        CHECK(m.graph().inputs().size() <= 1);
        for (const auto& [v, k] : m.mechanisms()) {
            CHECK(strictly_positive(k));
            for (const auto& x : k.table()) CHECK(x.get_den() <= 12 * 3);
        }
    }
    std::mt19937_64 r1(42), r2(42);
    CHECK(observable_kernel(random_cbn(r1)) == observable_kernel(random_cbn(r2)));
}
