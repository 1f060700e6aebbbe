#pragma once

#include "tcid/kernel.hpp"

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace tcid {

/// Transitional random variable: a total map from a joint point (w, t) into `codomain`.
struct TVar {
    std::string name;
    FiniteSpace codomain;
    std::function<std::size_t(const Point& w, const Point& t)> map;
};

/// A kernel K(W || T) together with named variables over W x T.
class TransitionalSpace {
public:
    TransitionalSpace(FiniteKernel kernel, std::vector<TVar> vars);
    TransitionalSpace(std::shared_ptr<const FiniteKernel> kernel, std::vector<TVar> vars);

    const FiniteKernel& kernel() const { return *kernel_; }
    const std::vector<TVar>& vars() const { return vars_; }
    const TVar& var(const std::string& name) const;
    bool declares(const std::string& name) const;

    /// Variable that reads the named source/target coordinates, in the order given.
    static TVar projection(const FiniteKernel& k, const std::string& name, const std::vector<std::string>& coords);
    /// Declares one projection variable per entry of `decl`.
    static TransitionalSpace of_projections(FiniteKernel k,
                                            const std::map<std::string, std::vector<std::string>>& decl);

private:
    std::shared_ptr<const FiniteKernel> kernel_;
    std::vector<TVar> vars_;
};

/// Symbol of a point of a TVar codomain: its label, or "()" for the one-point space.
std::string tvar_symbol(const FiniteSpace& codomain, std::size_t index);

/// K(names... || T) where each TVar becomes a single variable whose domain is its codomain symbols.
FiniteKernel joint_kernel(const TransitionalSpace& s, const std::vector<std::string>& names);

struct TciViolation {
    std::string z;
    std::string t1, y1;
    std::string t2, y2;
    std::vector<Rational> conditional1;  // P(X | y1, z || t1)
    std::vector<Rational> conditional2;
};

struct TciCertificate {
    bool holds = false;
    std::optional<FiniteKernel> witness_q;  // Q(X || Z), source named after Z, target after X
    std::optional<TciViolation> violation;
    std::vector<std::string> unconstrained_z;  // z values where Q is the uniform default
};

/// X is transitionally independent of Y given Z: K(X,Y,Z||T) = Q(X||Z) (x) K(Y,Z||T) for one Q.
TciCertificate tci_check(const TransitionalSpace& s, const std::string& x, const std::string& y,
                         const std::string& z);

bool tci_symmetric(const TransitionalSpace& s, const std::string& x, const std::string& y, const std::string& z);

enum class StatisticMode { Ancillary, Sufficient, Adequate };

/// Tests a statistic S of a parametric model K(X || theta).
///
/// Ancillary: S independent of theta. Sufficient: X independent of theta given S.
/// Adequate: X independent of (theta, Y) given S, where Y are the target variables in
/// `aux` and X the remaining ones. `s` maps a target point to an index of `s_codomain`.
TciCertificate statistic_check(const FiniteKernel& model, const FiniteSpace& s_codomain,
                               const std::function<std::size_t(const Point&)>& s, StatisticMode mode,
                               const NameSet& aux = {});

}  // namespace tcid
