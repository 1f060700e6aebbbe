#pragma once

#include "tcid/cbn.hpp"
#include "tcid/tci.hpp"

#include <optional>
#include <string>
#include <vector>

namespace tcid {

enum class Rule { R1, R2, R3, BackDoor };
const char* to_string(Rule r);

/// Outcome of one causal-calculus rule on a discrete model.
///
/// `equality_ok` is set only when both the graphical and the positivity condition hold.
/// `support_equality` is set whenever the graphical condition holds and records whether
/// the two sides agree on every point where both conditionals are determined, which is
/// how positivity-free agreement gets logged.
struct RuleReport {
    Rule rule = Rule::R1;
    bool graphical_ok = false;
    bool positivity_ok = false;
    std::optional<bool> equality_ok;
    std::optional<bool> support_equality;
    std::optional<Assignment> counterexample;  // first disagreeing source point
    std::size_t compared_points = 0;           // source points inside the support
    std::size_t excluded_points = 0;           // zero-mass points left out of the comparison
};

RuleReport rule1(const LiCbn& m, const NodeSet& a, const NodeSet& b, const NodeSet& c, const NodeSet& d);
RuleReport rule2(const LiCbn& m, const NodeSet& a, const NodeSet& b, const NodeSet& c, const NodeSet& d);
RuleReport rule3(const LiCbn& m, const NodeSet& a, const NodeSet& b, const NodeSet& c, const NodeSet& d);
/// Back-door adjustment of the effect of B on A through the adjustment set F.
RuleReport backdoor(const LiCbn& m, const NodeSet& a, const NodeSet& b, const NodeSet& f);

struct Triple {
    NodeSet a, b, c;
    bool operator==(const Triple&) const = default;
};

struct MarkovReport {
    std::vector<Triple> violations;   // separated but not conditionally independent
    std::vector<Triple> nonfaithful;  // independent without separation (only with log_nonfaithful)
    std::size_t triples_checked = 0;
    std::size_t separated = 0;
    bool budget_exhausted = false;
};

/// Checks id-separation => TCI for disjoint triples (A, B non-empty) over inputs and observed
/// nodes, in a fixed enumeration order, stopping after `budget` triples.
MarkovReport verify_markov(const LiCbn& m, std::size_t budget = 1u << 20, bool log_nonfaithful = false);

}  // namespace tcid
