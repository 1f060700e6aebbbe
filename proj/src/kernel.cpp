#include "tcid/kernel.hpp"

#include "tcid/error.hpp"

#include <algorithm>
#include <array>
#include <numeric>

namespace tcid {

namespace {

// Walks every point of a product of `sizes` (last coordinate fastest) and keeps one flat
// index per operand up to date, given each operand's stride for every coordinate.
template <std::size_t N, class F>
void odometer(const std::vector<std::size_t>& sizes,
              const std::array<std::vector<std::size_t>, N>& strides, F&& visit) {
    const std::size_t rank = sizes.size();
    std::size_t total = 1;
    for (auto s : sizes) total *= s;
    std::vector<std::size_t> counter(rank, 0);
    std::array<std::size_t, N> idx{};
    for (std::size_t n = 0; n < total; ++n) {
        visit(n, idx);
        for (std::size_t p = rank; p-- > 0;) {
            if (++counter[p] < sizes[p]) {
                for (std::size_t o = 0; o < N; ++o) idx[o] += strides[o][p];
                break;
            }
            counter[p] = 0;
            for (std::size_t o = 0; o < N; ++o) idx[o] -= strides[o][p] * (sizes[p] - 1);
        }
    }
}

// Flat-table stride of every variable of a kernel (sources first, then targets).
struct Layout {
    std::vector<const Variable*> vars;
    std::vector<std::size_t> strides;

    explicit Layout(const FiniteKernel& k) {
        const std::size_t tsize = k.target().size();
        for (std::size_t i = 0; i < k.source().rank(); ++i) {
            vars.push_back(&k.source().vars()[i]);
            strides.push_back(k.source().stride(i) * tsize);
        }
        for (std::size_t i = 0; i < k.target().rank(); ++i) {
            vars.push_back(&k.target().vars()[i]);
            strides.push_back(k.target().stride(i));
        }
    }

    std::size_t stride_of(const Variable& v) const {
        for (std::size_t i = 0; i < vars.size(); ++i) {
            if (vars[i]->name == v.name) {
                if (vars[i]->domain != v.domain)
                    throw PreconditionError("variable '" + v.name + "' has conflicting domains");
                return strides[i];
            }
        }
        return 0;
    }
};

std::vector<Variable> concat(const FiniteSpace& a, const FiniteSpace& b) {
    std::vector<Variable> out = a.vars();
    out.insert(out.end(), b.vars().begin(), b.vars().end());
    return out;
}

std::vector<std::size_t> sizes_of(const std::vector<Variable>& vars) {
    std::vector<std::size_t> out;
    out.reserve(vars.size());
    for (const auto& v : vars) out.push_back(v.domain.size());
    return out;
}

std::vector<std::size_t> strides_into(const Layout& layout, const std::vector<Variable>& vars) {
    std::vector<std::size_t> out;
    out.reserve(vars.size());
    for (const auto& v : vars) out.push_back(layout.stride_of(v));
    return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// FiniteSpace

FiniteSpace::FiniteSpace(std::vector<Variable> vars) : vars_(std::move(vars)) {
    NameSet seen;
    for (const auto& v : vars_) {
        if (v.name.empty()) throw InvariantError("variable with empty name");
        if (v.domain.empty()) throw InvariantError("variable '" + v.name + "' has an empty domain");
        if (!seen.insert(v.name).second) throw InvariantError("duplicate variable '" + v.name + "'");
        NameSet symbols(v.domain.begin(), v.domain.end());
        if (symbols.size() != v.domain.size())
            throw InvariantError("variable '" + v.name + "' repeats a domain symbol");
    }
    strides_.assign(vars_.size(), 1);
    size_ = 1;
    for (std::size_t p = vars_.size(); p-- > 0;) {
        strides_[p] = size_;
        size_ *= vars_[p].domain.size();
    }
}

std::optional<std::size_t> FiniteSpace::find(std::string_view name) const {
    for (std::size_t i = 0; i < vars_.size(); ++i)
        if (vars_[i].name == name) return i;
    return std::nullopt;
}

std::size_t FiniteSpace::position(std::string_view name) const {
    if (auto p = find(name)) return *p;
    throw PreconditionError("unknown variable '" + std::string(name) + "'");
}

std::vector<std::string> FiniteSpace::names() const {
    std::vector<std::string> out;
    for (const auto& v : vars_) out.push_back(v.name);
    return out;
}

NameSet FiniteSpace::name_set() const {
    NameSet out;
    for (const auto& v : vars_) out.insert(v.name);
    return out;
}

std::size_t FiniteSpace::index(std::span<const std::size_t> point) const {
    if (point.size() != vars_.size()) throw PreconditionError("point rank mismatch");
    std::size_t idx = 0;
    for (std::size_t i = 0; i < point.size(); ++i) {
        if (point[i] >= vars_[i].domain.size()) throw PreconditionError("point out of range");
        idx += point[i] * strides_[i];
    }
    return idx;
}

Point FiniteSpace::point(std::size_t index) const {
    Point p(vars_.size());
    for (std::size_t i = 0; i < vars_.size(); ++i) {
        p[i] = index / strides_[i];
        index %= strides_[i];
    }
    return p;
}

std::size_t FiniteSpace::index(const Assignment& values) const {
    if (values.size() != vars_.size()) throw PreconditionError("assignment does not cover the space");
    Point p(vars_.size());
    for (std::size_t i = 0; i < vars_.size(); ++i) {
        auto it = values.find(vars_[i].name);
        if (it == values.end()) throw PreconditionError("assignment misses '" + vars_[i].name + "'");
        const auto& dom = vars_[i].domain;
        auto pos = std::find(dom.begin(), dom.end(), it->second);
        if (pos == dom.end())
            throw PreconditionError("value '" + it->second + "' not in domain of '" + vars_[i].name + "'");
        p[i] = static_cast<std::size_t>(pos - dom.begin());
    }
    return index(p);
}

Assignment FiniteSpace::assignment(std::size_t index) const {
    Assignment out;
    const Point p = point(index);
    for (std::size_t i = 0; i < vars_.size(); ++i) out[vars_[i].name] = vars_[i].domain[p[i]];
    return out;
}

std::string FiniteSpace::label(std::size_t index) const {
    const Point p = point(index);
    std::string out;
    for (std::size_t i = 0; i < vars_.size(); ++i) {
        if (i) out += ',';
        out += vars_[i].name + '=' + vars_[i].domain[p[i]];
    }
    return out;
}

FiniteSpace FiniteSpace::subspace(std::span<const std::string> names) const {
    std::vector<Variable> out;
    for (const auto& n : names) out.push_back(vars_[position(n)]);
    return FiniteSpace(std::move(out));
}

FiniteSpace FiniteSpace::restricted_to(const NameSet& names) const {
    std::vector<Variable> out;
    for (const auto& v : vars_)
        if (names.count(v.name)) out.push_back(v);
    return FiniteSpace(std::move(out));
}

// ---------------------------------------------------------------------------
// FiniteKernel

FiniteKernel::FiniteKernel(Trusted, FiniteSpace source, FiniteSpace target, std::vector<Rational> mass)
    : source_(std::move(source)), target_(std::move(target)), mass_(std::move(mass)) {}

FiniteKernel::FiniteKernel(FiniteSpace source, FiniteSpace target, std::vector<Rational> mass)
    : source_(std::move(source)), target_(std::move(target)), mass_(std::move(mass)) {
    for (const auto& v : source_.vars())
        if (target_.contains(v.name))
            throw InvariantError("variable '" + v.name + "' is both source and target");
    if (mass_.size() != source_.size() * target_.size())
        throw InvariantError("mass table has the wrong number of cells");
    const std::size_t width = target_.size();
    for (std::size_t s = 0; s < source_.size(); ++s) {
        Rational total = 0;
        for (std::size_t t = 0; t < width; ++t) {
            const Rational& m = mass_[s * width + t];
            if (m < 0 || m > 1) throw InvariantError("mass outside [0,1] in row " + source_.label(s));
            total += m;
        }
        if (total != 1)
            throw InvariantError("row '" + source_.label(s) + "' sums to " + format_rational(total));
    }
}

FiniteKernel FiniteKernel::distribution(FiniteSpace target, std::vector<Rational> mass) {
    return FiniteKernel(FiniteSpace{}, std::move(target), std::move(mass));
}

FiniteKernel FiniteKernel::uniform(FiniteSpace source, FiniteSpace target) {
    const Rational cell(1, static_cast<unsigned long>(target.size()));
    std::vector<Rational> mass(source.size() * target.size(), cell);
    return FiniteKernel(std::move(source), std::move(target), std::move(mass));
}

FiniteKernel FiniteKernel::dirac(FiniteSpace source, FiniteSpace target, std::size_t target_index) {
    if (target_index >= target.size()) throw PreconditionError("dirac point out of range");
    std::vector<Rational> mass(source.size() * target.size(), Rational(0));
    for (std::size_t s = 0; s < source.size(); ++s) mass[s * target.size() + target_index] = 1;
    return FiniteKernel(std::move(source), std::move(target), std::move(mass));
}

FiniteKernel FiniteKernel::from_function(
    FiniteSpace source, FiniteSpace target,
    const std::function<Rational(const Point&, const Point&)>& fn) {
    std::vector<Rational> mass;
    mass.reserve(source.size() * target.size());
    for (std::size_t s = 0; s < source.size(); ++s) {
        const Point sp = source.point(s);
        for (std::size_t t = 0; t < target.size(); ++t) mass.push_back(fn(sp, target.point(t)));
    }
    return FiniteKernel(std::move(source), std::move(target), std::move(mass));
}

const Rational& FiniteKernel::at(const Assignment& source, const Assignment& target) const {
    return mass(source_.index(source), target_.index(target));
}

FiniteKernel FiniteKernel::reordered(std::span<const std::string> source_order,
                                     std::span<const std::string> target_order) const {
    FiniteSpace src = source_.subspace(source_order);
    FiniteSpace tgt = target_.subspace(target_order);
    if (src.rank() != source_.rank() || tgt.rank() != target_.rank())
        throw PreconditionError("reorder must name every variable exactly once");
    const Layout from(*this);
    std::vector<Variable> vars = concat(src, tgt);
    std::array<std::vector<std::size_t>, 1> strides{strides_into(from, vars)};
    std::vector<Rational> mass(mass_.size());
    odometer(sizes_of(vars), strides, [&](std::size_t n, const auto& idx) { mass[n] = mass_[idx[0]]; });
    return FiniteKernel(Trusted{}, std::move(src), std::move(tgt), std::move(mass));
}

bool equivalent(const FiniteKernel& a, const FiniteKernel& b) {
    if (a.source().name_set() != b.source().name_set() || a.target().name_set() != b.target().name_set())
        return false;
    for (const auto& v : a.source().vars())
        if (b.source().vars()[b.source().position(v.name)] != v) return false;
    for (const auto& v : a.target().vars())
        if (b.target().vars()[b.target().position(v.name)] != v) return false;
    const auto src = a.source().names();
    const auto tgt = a.target().names();
    return a == b.reordered(src, tgt);
}

FiniteKernel marginalize(const FiniteKernel& k, const NameSet& keep) {
    for (const auto& name : keep)
        if (!k.target().contains(name))
            throw PreconditionError("cannot keep '" + name + "': not a target variable");
    FiniteSpace tgt = k.target().restricted_to(keep);
    const std::vector<Variable> in_vars = concat(k.source(), k.target());
    // strides of the input variables into the output table
    std::vector<std::size_t> out_strides;
    for (std::size_t i = 0; i < k.source().rank(); ++i)
        out_strides.push_back(k.source().stride(i) * tgt.size());
    for (const auto& v : k.target().vars()) {
        auto p = tgt.find(v.name);
        out_strides.push_back(p ? tgt.stride(*p) : 0);
    }
    std::vector<Rational> mass(k.source().size() * tgt.size(), Rational(0));
    std::array<std::vector<std::size_t>, 1> strides{out_strides};
    const auto& table = k.table();
    odometer(sizes_of(in_vars), strides, [&](std::size_t n, const auto& idx) { mass[idx[0]] += table[n]; });
    return FiniteKernel(FiniteKernel::Trusted{}, k.source(), std::move(tgt), std::move(mass));
}

FiniteKernel product(const FiniteKernel& k1, const FiniteKernel& k2) {
    for (const auto& v : k1.target().vars())
        if (k2.target().contains(v.name))
            throw PreconditionError("overlapping target variable '" + v.name + "'");
    for (const auto& v : k2.source().vars())
        if (k1.target().contains(v.name))
            throw PreconditionError("unresolvable source variable '" + v.name +
                                    "': the second kernel depends on a target of the first");

    std::vector<Variable> src;
    for (const auto& v : k1.source().vars())
        if (!k2.target().contains(v.name)) src.push_back(v);
    for (const auto& v : k2.source().vars()) {
        auto same = std::find_if(src.begin(), src.end(), [&](const Variable& w) { return w.name == v.name; });
        if (same == src.end()) {
            src.push_back(v);
        } else if (same->domain != v.domain) {
            throw PreconditionError("variable '" + v.name + "' has conflicting domains");
        }
    }
    std::vector<Variable> tgt = k1.target().vars();
    tgt.insert(tgt.end(), k2.target().vars().begin(), k2.target().vars().end());

    FiniteSpace source(std::move(src));
    FiniteSpace target(std::move(tgt));
    const std::vector<Variable> out_vars = concat(source, target);
    std::array<std::vector<std::size_t>, 2> strides{strides_into(Layout(k1), out_vars),
                                                    strides_into(Layout(k2), out_vars)};
    std::vector<Rational> mass(source.size() * target.size());
    const auto& t1 = k1.table();
    const auto& t2 = k2.table();
    odometer(sizes_of(out_vars), strides, [&](std::size_t n, const auto& idx) {
        const Rational& a = t1[idx[0]];
        if (a == 0) return;  // cells default to zero
        mpq_mul(mass[n].get_mpq_t(), a.get_mpq_t(), t2[idx[1]].get_mpq_t());
    });
    return FiniteKernel(FiniteKernel::Trusted{}, std::move(source), std::move(target), std::move(mass));
}

FiniteKernel compose(const FiniteKernel& k1, const FiniteKernel& k2) {
    return marginalize(product(k1, k2), k1.target().name_set());
}

FiniteKernel disintegrate(const FiniteKernel& k, const NameSet& given,
                          const std::optional<FiniteKernel>& fallback) {
    for (const auto& name : given)
        if (!k.target().contains(name))
            throw PreconditionError("cannot condition on '" + name + "': not a target variable");
    NameSet rest;
    for (const auto& v : k.target().vars())
        if (!given.count(v.name)) rest.insert(v.name);
    FiniteSpace x_space = k.target().restricted_to(rest);
    FiniteSpace y_space = k.target().restricted_to(given);

    FiniteKernel fb = [&] {
        if (!fallback) return FiniteKernel::uniform(FiniteSpace{}, x_space);
        if (fallback->source().rank() != 0 || fallback->target().name_set() != rest)
            throw PreconditionError("fallback must be a distribution over the non-conditioned variables");
        const auto order = x_space.names();
        return fallback->reordered({}, order);
    }();

    const FiniteKernel marginal = marginalize(k, given);
    FiniteSpace source(concat(k.source(), y_space));
    const std::vector<Variable> out_vars = concat(source, x_space);
    std::array<std::vector<std::size_t>, 3> strides{strides_into(Layout(k), out_vars),
                                                    strides_into(Layout(marginal), out_vars),
                                                    strides_into(Layout(fb), out_vars)};
    std::vector<Rational> mass(source.size() * x_space.size());
    const auto& joint = k.table();
    const auto& marg = marginal.table();
    const auto& fbt = fb.table();
    odometer(sizes_of(out_vars), strides, [&](std::size_t n, const auto& idx) {
        const Rational& denom = marg[idx[1]];
        if (denom == 0) {
            mass[n] = fbt[idx[2]];
        } else {
            mpq_div(mass[n].get_mpq_t(), joint[idx[0]].get_mpq_t(), denom.get_mpq_t());
        }
    });
    return FiniteKernel(FiniteKernel::Trusted{}, std::move(source), std::move(x_space), std::move(mass));
}

FiniteKernel pushforward(const FiniteKernel& k, const FiniteSpace& codomain,
                         const std::function<std::size_t(const Point&)>& f) {
    for (const auto& v : codomain.vars())
        if (k.source().contains(v.name))
            throw PreconditionError("codomain variable '" + v.name + "' clashes with a source variable");
    std::vector<std::size_t> image(k.target().size());
    for (std::size_t t = 0; t < k.target().size(); ++t) {
        image[t] = f(k.target().point(t));
        if (image[t] >= codomain.size())
            throw PreconditionError("pushforward map is not total at " + k.target().label(t));
    }
    std::vector<Rational> mass(k.source().size() * codomain.size(), Rational(0));
    for (std::size_t s = 0; s < k.source().size(); ++s)
        for (std::size_t t = 0; t < k.target().size(); ++t)
            mass[s * codomain.size() + image[t]] += k.mass(s, t);
    return FiniteKernel(FiniteKernel::Trusted{}, k.source(), codomain, std::move(mass));
}

FiniteKernel section(const FiniteKernel& k, const Assignment& fixed) {
    std::vector<Variable> kept;
    for (const auto& v : k.source().vars())
        if (!fixed.count(v.name)) kept.push_back(v);
    for (const auto& [name, value] : fixed)
        if (!k.source().contains(name)) throw PreconditionError("'" + name + "' is not a source variable");
    FiniteSpace source(std::move(kept));
    std::vector<Rational> mass;
    mass.reserve(source.size() * k.target().size());
    for (std::size_t s = 0; s < source.size(); ++s) {
        Assignment full = source.assignment(s);
        full.insert(fixed.begin(), fixed.end());
        const std::size_t row = k.source().index(full);
        for (std::size_t t = 0; t < k.target().size(); ++t) mass.push_back(k.mass(row, t));
    }
    return FiniteKernel(FiniteKernel::Trusted{}, std::move(source), k.target(), std::move(mass));
}

FiniteKernel broadcast(const FiniteKernel& k, const FiniteSpace& source) {
    for (const auto& v : k.source().vars()) {
        auto p = source.find(v.name);
        if (!p || source.vars()[*p] != v)
            throw PreconditionError("broadcast source must contain '" + v.name + "'");
    }
    for (const auto& v : source.vars())
        if (k.target().contains(v.name))
            throw PreconditionError("broadcast source variable '" + v.name + "' is a target variable");
    const std::vector<Variable> out_vars = concat(source, k.target());
    std::array<std::vector<std::size_t>, 1> strides{strides_into(Layout(k), out_vars)};
    std::vector<Rational> mass(source.size() * k.target().size());
    const auto& table = k.table();
    odometer(sizes_of(out_vars), strides, [&](std::size_t n, const auto& idx) { mass[n] = table[idx[0]]; });
    return FiniteKernel(FiniteKernel::Trusted{}, source, k.target(), std::move(mass));
}

bool strictly_positive(const FiniteKernel& k) {
    return std::all_of(k.table().begin(), k.table().end(), [](const Rational& m) { return m > 0; });
}

bool absolutely_continuous(const FiniteKernel& k, const FiniteKernel& q) {
    if (k.source() != q.source() || k.target() != q.target())
        throw PreconditionError("absolute continuity needs identical spaces");
    for (std::size_t i = 0; i < k.table().size(); ++i)
        if (q.table()[i] == 0 && k.table()[i] != 0) return false;
    return true;
}

bool depends_only_on(const FiniteKernel& k, const NameSet& allowed) {
    const FiniteSpace& src = k.source();
    for (std::size_t s = 0; s < src.size(); ++s) {
        Point p = src.point(s);
        for (std::size_t i = 0; i < p.size(); ++i)
            if (!allowed.count(src.vars()[i].name)) p[i] = 0;
        const std::size_t base = src.index(p);
        if (base == s) continue;
        const auto a = k.row(s);
        const auto b = k.row(base);
        if (!std::equal(a.begin(), a.end(), b.begin())) return false;
    }
    return true;
}

MassLookup::MassLookup(const FiniteKernel& k, const FiniteSpace& over) : k_(&k) {
    for (std::size_t i = 0; i < k.source().rank(); ++i)
        src_.emplace_back(over.position(k.source().vars()[i].name), k.source().stride(i));
    for (std::size_t i = 0; i < k.target().rank(); ++i)
        tgt_.emplace_back(over.position(k.target().vars()[i].name), k.target().stride(i));
}

const Rational& MassLookup::at(const Point& p) const {
    std::size_t s = 0;
    std::size_t t = 0;
    for (const auto& [pos, stride] : src_) s += p[pos] * stride;
    for (const auto& [pos, stride] : tgt_) t += p[pos] * stride;
    return k_->mass(s, t);
}

}  // namespace tcid
