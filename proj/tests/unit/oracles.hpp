// Independent brute-force reference computations for the unit tests. These work on named
// assignments only and never call the table algebra they are checking.
#pragma once

#include "tcid/kernel.hpp"

#include <map>
#include <random>
#include <string>
#include <vector>

namespace oracle {

using tcid::Assignment;
using tcid::FiniteKernel;
using tcid::FiniteSpace;
using tcid::Rational;
using tcid::Variable;

inline Variable bin(const std::string& name) {
    return {name, {"0", "1"}};
}

inline std::vector<Assignment> enumerate(const std::vector<Variable>& vars) {
    std::vector<Assignment> out{{}};
    for (const auto& v : vars) {
        std::vector<Assignment> next;
        for (const auto& a : out)
            for (const auto& s : v.domain) {
                Assignment b = a;
                b[v.name] = s;
                next.push_back(b);
            }
        out = std::move(next);
    }
    return out;
}

inline Assignment restrict(const Assignment& a, const FiniteSpace& s) {
    Assignment out;
    for (const auto& v : s.vars()) out[v.name] = a.at(v.name);
    return out;
}

inline Assignment merge(Assignment a, const Assignment& b) {
    a.insert(b.begin(), b.end());
    return a;
}

/// Random row-stochastic kernel with masses i/n, n <= 6.
inline FiniteKernel random_kernel(std::mt19937_64& rng, const std::vector<Variable>& src,
                                  const std::vector<Variable>& tgt, bool positive = true) {
    FiniteSpace s(src), t(tgt);
    std::vector<Rational> mass;
    for (std::size_t i = 0; i < s.size(); ++i) {
        std::vector<long> w(t.size());
        long total = 0;
        for (auto& x : w) {
            x = std::uniform_int_distribution<long>(positive ? 1 : 0, 6)(rng);
            total += x;
        }
        if (total == 0) {
            w[0] = 1;
            total = 1;
        }
        for (auto x : w) mass.push_back(tcid::make_rational(x, total));
    }
    return FiniteKernel(s, t, mass);
}

/// Mass of the named target point at the named source point.
inline Rational at(const FiniteKernel& k, const Assignment& point) {
    return k.at(restrict(point, k.source()), restrict(point, k.target()));
}

/// Sum over every assignment of the dropped target variables.
inline Rational marginal_mass(const FiniteKernel& k, const Assignment& src, const Assignment& kept) {
    std::vector<Variable> dropped;
    for (const auto& v : k.target().vars())
        if (!kept.count(v.name)) dropped.push_back(v);
    Rational total = 0;
    for (const auto& d : enumerate(dropped)) total += at(k, merge(merge(src, kept), d));
    return total;
}

}  // namespace oracle
