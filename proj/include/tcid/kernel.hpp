#pragma once

#include "tcid/rational.hpp"

#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace tcid {

using NameSet = std::set<std::string>;
/// A point of a FiniteSpace: one domain index per variable, in variable order.
using Point = std::vector<std::size_t>;
/// Named point, used at API boundaries and in tests.
using Assignment = std::map<std::string, std::string>;

struct Variable {
    std::string name;
    std::vector<std::string> domain;

    bool operator==(const Variable&) const = default;
};

/// Ordered product of finite variable domains. The empty product is the one-point space.
class FiniteSpace {
public:
    FiniteSpace() = default;
    explicit FiniteSpace(std::vector<Variable> vars);

    const std::vector<Variable>& vars() const { return vars_; }
    std::size_t rank() const { return vars_.size(); }
    std::size_t size() const { return size_; }
    std::size_t stride(std::size_t pos) const { return strides_[pos]; }

    std::optional<std::size_t> find(std::string_view name) const;
    std::size_t position(std::string_view name) const;
    bool contains(std::string_view name) const { return find(name).has_value(); }
    std::vector<std::string> names() const;
    NameSet name_set() const;

    std::size_t index(std::span<const std::size_t> point) const;
    Point point(std::size_t index) const;
    std::size_t index(const Assignment& values) const;
    Assignment assignment(std::size_t index) const;
    /// "X=0,Y=1"; the empty string for the one-point space.
    std::string label(std::size_t index) const;

    /// The sub-product over `names`, in the order given.
    FiniteSpace subspace(std::span<const std::string> names) const;
    /// Variables of this space whose names are in `names`, keeping this space's order.
    FiniteSpace restricted_to(const NameSet& names) const;

    bool operator==(const FiniteSpace& other) const { return vars_ == other.vars_; }

private:
    std::vector<Variable> vars_;
    std::vector<std::size_t> strides_;
    std::size_t size_ = 1;
};

/// Exact Markov kernel K(target || source) between finite spaces.
///
/// Mass is stored densely, row-major over (source point, target point). Every row
/// sums to exactly one and source/target variables are disjoint; both are checked
/// on construction.
class FiniteKernel {
public:
    FiniteKernel(FiniteSpace source, FiniteSpace target, std::vector<Rational> mass);

    static FiniteKernel distribution(FiniteSpace target, std::vector<Rational> mass);
    static FiniteKernel uniform(FiniteSpace source, FiniteSpace target);
    static FiniteKernel dirac(FiniteSpace source, FiniteSpace target, std::size_t target_index);
    static FiniteKernel from_function(
        FiniteSpace source, FiniteSpace target,
        const std::function<Rational(const Point& source, const Point& target)>& mass);

    const FiniteSpace& source() const { return source_; }
    const FiniteSpace& target() const { return target_; }
    const std::vector<Rational>& table() const { return mass_; }

    const Rational& mass(std::size_t source_index, std::size_t target_index) const {
        return mass_[source_index * target_.size() + target_index];
    }
    const Rational& at(const Assignment& source, const Assignment& target) const;
    std::span<const Rational> row(std::size_t source_index) const {
        return {mass_.data() + source_index * target_.size(), target_.size()};
    }

    /// Same kernel with variables permuted into the given orders.
    FiniteKernel reordered(std::span<const std::string> source_order,
                           std::span<const std::string> target_order) const;

    bool operator==(const FiniteKernel& other) const = default;

private:
    struct Trusted {};
    FiniteKernel(Trusted, FiniteSpace source, FiniteSpace target, std::vector<Rational> mass);

    friend FiniteKernel marginalize(const FiniteKernel&, const NameSet&);
    friend FiniteKernel product(const FiniteKernel&, const FiniteKernel&);
    friend FiniteKernel disintegrate(const FiniteKernel&, const NameSet&,
                                     const std::optional<FiniteKernel>&);
    friend FiniteKernel section(const FiniteKernel&, const Assignment&);
    friend FiniteKernel broadcast(const FiniteKernel&, const FiniteSpace&);
    friend FiniteKernel pushforward(const FiniteKernel&, const FiniteSpace&,
                                    const std::function<std::size_t(const Point&)>&);

    FiniteSpace source_;
    FiniteSpace target_;
    std::vector<Rational> mass_;
};

/// Equality up to the order of variables within source and target.
bool equivalent(const FiniteKernel& a, const FiniteKernel& b);

/// K(keep || T): sums out target variables not in `keep`.
FiniteKernel marginalize(const FiniteKernel& k, const NameSet& keep);

/// K1(Z || U,X,T) (x) K2(X,Y || T,W) -> K(Z,X,Y || U,T,W). Shared variables resolve by name.
FiniteKernel product(const FiniteKernel& k1, const FiniteKernel& k2);

/// marginalize(product(k1, k2), targets of k1).
FiniteKernel compose(const FiniteKernel& k1, const FiniteKernel& k2);

/// K(X | Y || T) with Y = `given` moved to the source. Rows whose conditioning mass is
/// zero take `fallback` (a distribution over X), uniform when absent.
FiniteKernel disintegrate(const FiniteKernel& k, const NameSet& given,
                          const std::optional<FiniteKernel>& fallback = std::nullopt);

/// Deterministic post-processing of the target. `f` maps a target point to an index
/// of `codomain`; an out-of-range index means f is not total.
FiniteKernel pushforward(const FiniteKernel& k, const FiniteSpace& codomain,
                         const std::function<std::size_t(const Point&)>& f);

/// Fixes some source variables to the given values and drops them from the source.
FiniteKernel section(const FiniteKernel& k, const Assignment& fixed);

/// Re-expresses k over `source` (a superset of its source variables); rows are
/// constant in the added variables.
FiniteKernel broadcast(const FiniteKernel& k, const FiniteSpace& source);

/// Every table entry is > 0 (counting-measure positivity).
bool strictly_positive(const FiniteKernel& k);

/// k << q: wherever q has zero mass, k has zero mass. Spaces must match.
bool absolutely_continuous(const FiniteKernel& k, const FiniteKernel& q);

/// Reads masses of a kernel at points of a larger space holding all of its variables.
class MassLookup {
public:
    MassLookup(const FiniteKernel& k, const FiniteSpace& over);
    const Rational& at(const Point& p) const;

private:
    const FiniteKernel* k_;
    std::vector<std::pair<std::size_t, std::size_t>> src_;  // (position in `over`, stride)
    std::vector<std::pair<std::size_t, std::size_t>> tgt_;
};

/// True iff the rows of k do not change when any source variable outside `allowed` varies.
bool depends_only_on(const FiniteKernel& k, const NameSet& allowed);

}  // namespace tcid
