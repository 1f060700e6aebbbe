#pragma once

#include "tcid/graph.hpp"
#include "tcid/kernel.hpp"

#include <map>
#include <random>
#include <string>
#include <vector>

namespace tcid {

/// Reserved symbol for the "no intervention" value of a soft-intervention input.
inline const std::string kStar = "*";

/// Causal Bayesian network with latent and input nodes over finite spaces.
///
/// Every non-input node carries a mechanism P_v(X_v || X_Pa(v)) whose source variables
/// are exactly the parents of v; input nodes carry a space but no mechanism.
class LiCbn {
public:
    LiCbn(MixedGraph graph, std::map<NodeId, std::vector<std::string>> spaces,
          std::map<NodeId, FiniteKernel> mechanisms);

    const MixedGraph& graph() const { return graph_; }
    const std::map<NodeId, std::vector<std::string>>& spaces() const { return spaces_; }
    const std::map<NodeId, FiniteKernel>& mechanisms() const { return mechanisms_; }

    Variable variable(const NodeId& v) const;
    FiniteSpace space_of(const NodeSet& nodes) const;
    const FiniteKernel& mechanism(const NodeId& v) const;

private:
    MixedGraph graph_;
    std::map<NodeId, std::vector<std::string>> spaces_;
    std::map<NodeId, FiniteKernel> mechanisms_;
};

/// P(X_V || X_I): product of the mechanisms in reverse topological order with the latent
/// coordinates summed out. Source and target variables are sorted by name.
FiniteKernel observable_kernel(const LiCbn& m);

LiCbn intervene_hard(const LiCbn& m, const NodeSet& targets);
LiCbn intervene_soft(const LiCbn& m, const NodeSet& targets);

/// Interventional observable kernel P(X_{V\A} || X_I, do(X_A)). Ground truth for identification.
FiniteKernel oracle_do(const LiCbn& m, const NodeSet& targets);

/// Q[D] = P(X_D || do(X_{V\D}), X_I).
FiniteKernel q_factor_oracle(const LiCbn& m, const NodeSet& d);

/// L-iDAG with one latent parent per bidirected edge of an ADMG.
MixedGraph canonical_dag(const MixedGraph& admg);

struct RandomCptOptions {
    bool strictly_positive = true;
    long max_denominator = 12;
};

/// Random mechanism P(target || source): each row draws integer weights i/n with n <= 12
/// and renormalizes exactly. Strict positivity forces every weight >= 1.
FiniteKernel random_mechanism(std::mt19937_64& rng, const FiniteSpace& source, const Variable& target,
                              const RandomCptOptions& options = {});

/// Random CPTs for a fixed L-iDAG. `domains` gives each node's domain size.
LiCbn random_model(std::mt19937_64& rng, const MixedGraph& dag, const std::map<NodeId, std::size_t>& domains,
                   const RandomCptOptions& options = {});

struct RandomCbnOptions {
    std::size_t max_observed = 4;
    std::size_t max_latent = 2;
    std::size_t max_input = 1;
    std::size_t min_domain = 2;
    std::size_t max_domain = 3;
    double edge_probability = 0.5;
    RandomCptOptions cpt;
};

/// Random L-iCBN: observed nodes a, b, c, ...; latents u1, u2, ...; inputs r1, r2, ...
LiCbn random_cbn(std::mt19937_64& rng, const RandomCbnOptions& options = {});

}  // namespace tcid
