#pragma once

#include "tcid/cbn.hpp"
#include "tcid/graph.hpp"

#include <functional>
#include <map>
#include <string>
#include <vector>

namespace tcid {

/// Mechanism P(X_v || X_parents) from a row function. `row` receives the parent values
/// keyed by name and returns the masses over the domain of v.
FiniteKernel make_mechanism(const std::map<NodeId, std::vector<std::string>>& spaces, const NodeId& v,
                            const std::vector<NodeId>& parents,
                            const std::function<std::vector<Rational>(const Assignment&)>& row);

/// Deterministic mechanism X_v = f(parents) over symbols of v's domain.
FiniteKernel make_deterministic(const std::map<NodeId, std::vector<std::string>>& spaces, const NodeId& v,
                                const std::vector<NodeId>& parents,
                                const std::function<std::string(const Assignment&)>& f);

MixedGraph chain_graph();      // a -> b -> c
MixedGraph triangle_graph();   // c -> a, c -> b, a -> b
MixedGraph bow_graph();        // a -> b, a <-> b
MixedGraph front_door_graph(); // a -> c -> b, a <-> b
MixedGraph front_door_dag();   // u -> a, u -> b, a -> c -> b with u latent

/// I_a -> a, I_b -> b, I_c -> c, b -> c, c -> a with inputs I_a, I_b, I_c.
MixedGraph asymmetry_graph();
/// Binary instantiation of asymmetry_graph: b = I_b, c = b xor I_c, a = c xor I_a.
LiCbn asymmetry_instance();

/// Binary front-door model on front_door_dag with fixed strictly positive CPTs.
LiCbn front_door_instance();

/// Binary triangle where a is pinned to 0 whenever c = 0, so P(c) (x) P(a) is not
/// dominated by P(c, a) and back-door adjustment for the effect of a on b fails.
LiCbn backdoor_failure_instance();

/// u latent, u -> b, u -> c, b -> c, c -> a with c = u and b. Positivity fails for rule 2
/// (A = {a}, B = {b}, C = {c}) while both sides agree wherever they are determined.
LiCbn positivity_not_necessary_instance();

}  // namespace tcid
