#pragma once

#include "tcid/cbn.hpp"
#include "tcid/graph.hpp"
#include "tcid/kernel.hpp"

#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace tcid {

struct IdentExpr;
using ExprPtr = std::shared_ptr<const IdentExpr>;

/// Symbolic identification formula.
struct IdentExpr {
    enum class Kind { ObsRef, Fix, Product, Marginalize };

    Kind kind = Kind::ObsRef;
    bool with_inputs = false;  // ObsRef: the observable kernel has input coordinates
    NodeId node;               // Fix: node being fixed
    MixedGraph context;        // Fix: graph in which `node` is fixed
    NodeSet district;          // Fix: district the chain is heading for (rendering only)
    NodeSet vars;              // Marginalize: summed-out variables
    std::vector<ExprPtr> children;

    static ExprPtr obs_ref(bool with_inputs);
    /// Throws PreconditionError when `node` is not fixable in `context`.
    static ExprPtr fix(NodeId node, MixedGraph context, ExprPtr child, NodeSet district = {});
    /// Throws InvariantError when the children's target sets overlap.
    static ExprPtr product(std::vector<ExprPtr> children, const MixedGraph& g);
    static ExprPtr marginalize(NodeSet vars, ExprPtr child);

    /// Observed variables this expression is a distribution over, given the original graph.
    NodeSet targets(const MixedGraph& g) const;
};

/// phi_r(P(X_V || X_W); g) = P(X_{De(r)\r} | X_{NonDe}, X_r || X_W) (x) P(X_{NonDe} || X_W).
/// Source of the result is W + {r}, target V \ {r}, both sorted by name.
FiniteKernel fix_kernel(const FiniteKernel& k, const NodeId& r, const MixedGraph& g);

/// Division form k / k(x_r | x_Mb || x_W) with Mb = (Distr(r) + Pa(Distr(r))) \ {r}.
/// Needs a strictly positive k; used as a cross-check of fix_kernel.
FiniteKernel fix_kernel_division(const FiniteKernel& k, const NodeId& r, const MixedGraph& g);

/// Applies fix_kernel along `order`, updating the graph after each step.
std::pair<FiniteKernel, MixedGraph> fix_sequence(const FiniteKernel& k, const MixedGraph& g,
                                                 const std::vector<NodeId>& order);

/// Every order in which all observed nodes outside D can be fixed one after another.
std::vector<std::vector<NodeId>> fixing_orders(const MixedGraph& g, const NodeSet& d);

enum class IdStatus { Identifiable, NotIdentifiable };
const char* to_string(IdStatus s);

struct IdResult {
    IdStatus status = IdStatus::NotIdentifiable;
    ExprPtr formula;
    std::optional<NodeSet> failing_district;
    NodeSet ancestral;                // An(A) in the graph restricted to V \ B
    std::vector<NodeSet> districts;   // districts of the ancestral set, formula order
};

/// One-line ID: Sum_{D* \ A} Prod_D phi_{V\D}(P; g) over the districts D of D* = An_{g[V\B]}(A).
IdResult one_line_identify(const MixedGraph& g, const NodeSet& a, const NodeSet& b);

/// Evaluates an identification formula on a strictly positive observable kernel P(X_V || X_I).
/// Returns P(X_A || X_B, X_I) with sources sorted by name.
FiniteKernel evaluate(const ExprPtr& expr, const FiniteKernel& obs, const MixedGraph& g, const NodeSet& b);

enum class FormulaStyle { Compact, Nested };
/// Compact: "Σ_{x_c} φ_{a,b}(P(x_V)) · φ_{a,c}(P(x_V))". Nested: "φ_b(φ_c(P))".
std::string emit_formula(const ExprPtr& expr, FormulaStyle style = FormulaStyle::Compact);

struct BowWitness {
    LiCbn first;
    LiCbn second;
    Rational gap;  // |P1(b=1 || do(a=1)) - P2(b=1 || do(a=1))|
};

/// Two binary models on the bow graph (u -> a, u -> b, a -> b, u latent) with equal
/// observable kernels and different interventional kernels. Verified before returning.
BowWitness bow_witness();

/// Exhaustive search over CPTs with entries in `grid`; returns the pair with the largest gap.
std::optional<BowWitness> search_bow_witness(const std::vector<Rational>& grid);

/// Bow model from P(u=1), P(a=1|u=0), P(a=1|u=1), P(b=1|a,u) in order (a,u) = 00, 01, 10, 11.
LiCbn bow_model(const std::vector<Rational>& params);

}  // namespace tcid
