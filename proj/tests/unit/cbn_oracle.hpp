#pragma once

#include "oracles.hpp"

#include "tcid/cbn.hpp"

namespace oracle {

using tcid::LiCbn;
using tcid::NodeSet;

/// P(x_{V \ A} || x_I, do(x_A)) at one point by summing the truncated factorization over
/// every latent assignment. `point` names a value for every input, observed node and A.
inline Rational truncated_factorization(const LiCbn& m, const NodeSet& A, const Assignment& point) {
    std::vector<Variable> latents;
    for (const auto& u : m.graph().latents()) latents.push_back(m.variable(u));
    Rational total = 0;
    for (const auto& lat : enumerate(latents)) {
        const Assignment full = merge(point, lat);
        Rational w = 1;
        for (const auto& [v, k] : m.mechanisms()) {
            if (A.count(v)) continue;
            w *= at(k, full);
            if (w == 0) break;
        }
        total += w;
    }
    return total;
}

/// Checks a kernel with source I + A and target V \ A against the brute-force sum.
inline bool matches_truncated_factorization(const LiCbn& m, const NodeSet& A, const tcid::FiniteKernel& k) {
    std::vector<Variable> vars = k.source().vars();
    for (const auto& v : k.target().vars()) vars.push_back(v);
    for (const auto& pt : enumerate(vars))
        if (at(k, pt) != truncated_factorization(m, A, pt)) return false;
    return true;
}

}  // namespace oracle
