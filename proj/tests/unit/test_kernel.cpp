#include "oracles.hpp"

#include "tcid/error.hpp"
#include "tcid/kernel.hpp"

#include <doctest.h>

using namespace tcid;
using oracle::bin;

namespace {

Rational q(long n, long d) {
    return make_rational(n, d);
}

FiniteKernel xy_table() {
    // (0,0):1/2, (0,1):1/4, (1,1):1/4 over X x Y
    return FiniteKernel::distribution(FiniteSpace({bin("X"), bin("Y")}), {q(1, 2), q(1, 4), 0, q(1, 4)});
}

FiniteKernel copy_kernel(const std::string& from, const std::string& to) {
    return FiniteKernel::from_function(FiniteSpace({bin(from)}), FiniteSpace({bin(to)}),
                                       [](const Point& s, const Point& t) { return Rational(s[0] == t[0] ? 1 : 0); });
}

bool rows_normalized(const FiniteKernel& k) {
    for (std::size_t s = 0; s < k.source().size(); ++s) {
        Rational total = 0;
        for (const auto& m : k.row(s)) total += m;
        if (total != 1) return false;
    }
    return true;
}

}  // namespace

TEST_CASE("spaces and construction") {
    FiniteSpace one;
    CHECK(one.size() == 1);
    CHECK(one.label(0).empty());
    FiniteSpace s({bin("X"), Variable{"Y", {"a", "b", "c"}}});
    CHECK(s.size() == 6);
    CHECK(s.label(4) == "X=1,Y=b");
    CHECK(s.index(s.point(5)) == 5);
    CHECK_THROWS_AS(FiniteSpace({bin("X"), bin("X")}), InvariantError);
    CHECK_THROWS_AS(FiniteSpace({Variable{"X", {}}}), InvariantError);
    CHECK_THROWS_AS(FiniteKernel::distribution(FiniteSpace({bin("X")}), {q(1, 2), q(1, 3)}), InvariantError);
    CHECK_THROWS_AS(FiniteKernel(FiniteSpace({bin("X")}), FiniteSpace({bin("X")}), {1, 0, 0, 1}), InvariantError);
}

TEST_CASE("marginalize") {
    auto u = FiniteKernel::uniform(FiniteSpace(), FiniteSpace({bin("X"), bin("Y")}));
    CHECK(marginalize(u, {"X"}) == FiniteKernel::uniform(FiniteSpace(), FiniteSpace({bin("X")})));

    auto d = FiniteKernel::dirac(FiniteSpace(), FiniteSpace({bin("X"), bin("Y")}), 2);  // (1,0)
    CHECK(marginalize(d, {"Y"}) == FiniteKernel::dirac(FiniteSpace(), FiniteSpace({bin("Y")}), 0));

    CHECK(marginalize(xy_table(), {"Y"}).table() == std::vector<Rational>{q(1, 2), q(1, 2)});
    CHECK_THROWS_AS(marginalize(xy_table(), {"Z"}), PreconditionError);
}

TEST_CASE("product") {
    auto p = FiniteKernel::distribution(FiniteSpace({bin("X")}), {q(1, 3), q(2, 3)});
    auto joint = product(copy_kernel("X", "Z"), p);
    CHECK(joint.at({}, {{"Z", "0"}, {"X", "0"}}) == q(1, 3));
    CHECK(joint.at({}, {{"Z", "1"}, {"X", "1"}}) == q(2, 3));
    CHECK(joint.at({}, {{"Z", "0"}, {"X", "1"}}) == 0);

    auto z0 = FiniteKernel::dirac(FiniteSpace(), FiniteSpace({bin("Z")}), 0);
    CHECK(marginalize(product(z0, p), {"Z"}) == z0);

    CHECK_THROWS_AS(product(p, p), PreconditionError);
}

TEST_CASE("product agrees with brute-force multiplication and is associative") {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 40; ++trial) {
        auto k1 = oracle::random_kernel(rng, {bin("U"), bin("X")}, {bin("Z")});
        auto k2 = oracle::random_kernel(rng, {bin("T")}, {bin("X"), bin("Y")});
        auto k = product(k1, k2);
        CHECK(k.source().name_set() == NameSet{"T", "U"});
        CHECK(k.target().name_set() == NameSet{"X", "Y", "Z"});
        CHECK(rows_normalized(k));
        for (const auto& pt : oracle::enumerate({bin("T"), bin("U"), bin("X"), bin("Y"), bin("Z")}))
            CHECK(oracle::at(k, pt) == oracle::at(k1, pt) * oracle::at(k2, pt));

        auto a = oracle::random_kernel(rng, {bin("B")}, {bin("A")});
        auto b = oracle::random_kernel(rng, {bin("C")}, {bin("B")});
        auto c = oracle::random_kernel(rng, {}, {bin("C")});
        CHECK(equivalent(product(product(a, b), c), product(a, product(b, c))));
    }
}

TEST_CASE("compose") {
    auto p = FiniteKernel::distribution(FiniteSpace({bin("X")}), {q(1, 5), q(4, 5)});
    CHECK(equivalent(compose(copy_kernel("X", "Z"), p),
                     FiniteKernel::distribution(FiniteSpace({bin("Z")}), {q(1, 5), q(4, 5)})));

    auto k = FiniteKernel(FiniteSpace({bin("X")}), FiniteSpace({bin("Z")}), {1, 0, q(1, 2), q(1, 2)});
    auto half = FiniteKernel::uniform(FiniteSpace(), FiniteSpace({bin("X")}));
    CHECK(compose(k, half).table() == std::vector<Rational>{q(3, 4), q(1, 4)});

    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 20; ++trial) {
        auto k1 = oracle::random_kernel(rng, {bin("X")}, {bin("Z")});
        auto k2 = oracle::random_kernel(rng, {}, {bin("X"), bin("Y")});
        CHECK(compose(k1, k2) == marginalize(product(k1, k2), {"Z"}));
    }
}

TEST_CASE("disintegrate") {
    auto cond = disintegrate(xy_table(), {"Y"});
    CHECK(cond.at({{"Y", "0"}}, {{"X", "0"}}) == 1);
    CHECK(cond.at({{"Y", "1"}}, {{"X", "0"}}) == q(1, 2));
    CHECK(cond.at({{"Y", "1"}}, {{"X", "1"}}) == q(1, 2));

    auto qx = FiniteKernel::distribution(FiniteSpace({bin("X")}), {q(2, 7), q(5, 7)});
    auto py = FiniteKernel::distribution(FiniteSpace({bin("Y")}), {q(1, 3), q(2, 3)});
    auto c2 = disintegrate(product(qx, py), {"Y"});
    for (std::size_t s = 0; s < 2; ++s) CHECK(std::equal(c2.row(s).begin(), c2.row(s).end(), qx.table().begin()));

    // X = Y copy with Y always 0: the Y = 1 row has no mass
    auto dep = FiniteKernel::dirac(FiniteSpace(), FiniteSpace({bin("X"), bin("Y")}), 0);
    auto c3 = disintegrate(dep, {"Y"});
    CHECK(c3.at({{"Y", "1"}}, {{"X", "0"}}) == q(1, 2));
    CHECK(equivalent(product(c3, marginalize(dep, {"Y"})), dep));
    auto fb = FiniteKernel::dirac(FiniteSpace(), FiniteSpace({bin("X")}), 1);
    auto c4 = disintegrate(dep, {"Y"}, fb);
    CHECK(c4.at({{"Y", "1"}}, {{"X", "1"}}) == 1);
    CHECK(equivalent(product(c4, marginalize(dep, {"Y"})), dep));
}

TEST_CASE("property: disintegration reconstructs and is unique off null rows") {
    std::mt19937_64 rng(2024);
    std::uniform_int_distribution<int> pick(1, 3);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<Variable> tgt;
        const int n = pick(rng);
        for (int i = 0; i < n; ++i) tgt.push_back(bin(std::string(1, static_cast<char>('X' + i))));
        auto k = oracle::random_kernel(rng, {bin("T")}, tgt, false);
        NameSet given;
        for (const auto& v : tgt)
            if (rng() % 2) given.insert(v.name);
        auto c = disintegrate(k, given);
        auto m = marginalize(k, given);
        CHECK(rows_normalized(c));
        CHECK(equivalent(product(c, m), k));

        NameSet rest;
        for (const auto& v : tgt)
            if (!given.count(v.name)) rest.insert(v.name);
        auto fb = FiniteKernel::dirac(FiniteSpace(), k.target().restricted_to(rest), 0);
        auto c2 = disintegrate(k, given, fb);
        MassLookup ml(m, c.source());
        for (std::size_t s = 0; s < c.source().size(); ++s) {
            if (ml.at(c.source().point(s)) == 0) continue;
            CHECK(std::equal(c.row(s).begin(), c.row(s).end(), c2.row(s).begin()));
        }
    }
}

TEST_CASE("property: marginalization commutes") {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 50; ++trial) {
        auto k = oracle::random_kernel(rng, {bin("T")}, {bin("X"), bin("Y"), bin("Z")}, false);
        CHECK(marginalize(marginalize(k, {"X", "Y"}), {"X"}) == marginalize(k, {"X"}));
        for (const auto& pt : oracle::enumerate({bin("T"), bin("X")}))
            CHECK(oracle::at(marginalize(k, {"X"}), pt) ==
                  oracle::marginal_mass(k, {{"T", pt.at("T")}}, {{"X", pt.at("X")}}));
    }
}

TEST_CASE("pushforward") {
    auto k = xy_table();
    auto same = pushforward(k, k.target(), [&](const Point& p) { return k.target().index(p); });
    CHECK(same == k);
    auto one = FiniteSpace({Variable{"S", {"s"}}});
    auto c = pushforward(k, one, [](const Point&) { return std::size_t{0}; });
    CHECK(c.table() == std::vector<Rational>{1});
    auto px = pushforward(k, FiniteSpace({bin("X")}), [](const Point& p) { return p[0]; });
    CHECK(px == marginalize(k, {"X"}));
    CHECK_THROWS_AS(pushforward(k, one, [](const Point&) { return std::size_t{3}; }), PreconditionError);
}

TEST_CASE("section and broadcast") {
    std::mt19937_64 rng(3);
    auto k = oracle::random_kernel(rng, {bin("S"), bin("T")}, {bin("X")});
    auto s = section(k, {{"S", "1"}});
    CHECK(s.source().names() == std::vector<std::string>{"T"});
    CHECK(s.at({{"T", "0"}}, {{"X", "1"}}) == k.at({{"S", "1"}, {"T", "0"}}, {{"X", "1"}}));
    auto b = broadcast(s, FiniteSpace({bin("R"), bin("T")}));
    CHECK(depends_only_on(b, {"T"}));
    CHECK(!depends_only_on(b, {"R"}) == !depends_only_on(s, {}));
}

TEST_CASE("positivity predicates") {
    auto u = FiniteKernel::uniform(FiniteSpace(), FiniteSpace({bin("X")}));
    auto d0 = FiniteKernel::dirac(FiniteSpace(), FiniteSpace({bin("X")}), 0);
    CHECK(strictly_positive(u));
    CHECK(!strictly_positive(d0));
    CHECK(absolutely_continuous(u, u));
    CHECK(absolutely_continuous(d0, u));
    CHECK(!absolutely_continuous(u, d0));

    auto copy = FiniteKernel::distribution(FiniteSpace({bin("X"), bin("Y")}), {q(1, 2), 0, 0, q(1, 2)});
    auto indep = product(marginalize(copy, {"X"}), marginalize(copy, {"Y"})).reordered(
        std::vector<std::string>{}, std::vector<std::string>{"X", "Y"});
    CHECK(indep.at({}, {{"X", "0"}, {"Y", "1"}}) == q(1, 4));
    CHECK(!absolutely_continuous(indep, copy));
    CHECK_THROWS_AS(absolutely_continuous(u, copy), PreconditionError);
}

TEST_CASE("equivalence up to variable order") {
    auto k = xy_table();
    auto r = k.reordered(std::vector<std::string>{}, std::vector<std::string>{"Y", "X"});
    CHECK(!(r == k));
    CHECK(equivalent(r, k));
}
