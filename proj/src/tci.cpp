#include "tcid/tci.hpp"

#include "tcid/error.hpp"

#include <tuple>

namespace tcid {

TransitionalSpace::TransitionalSpace(FiniteKernel kernel, std::vector<TVar> vars)
    : TransitionalSpace(std::make_shared<const FiniteKernel>(std::move(kernel)), std::move(vars)) {}

TransitionalSpace::TransitionalSpace(std::shared_ptr<const FiniteKernel> kernel, std::vector<TVar> vars)
    : kernel_(std::move(kernel)), vars_(std::move(vars)) {
    if (!kernel_) throw PreconditionError("transitional space without a kernel");
    NameSet seen;
    for (const auto& v : vars_) {
        if (v.name.empty()) throw InvariantError("transitional variable with empty name");
        if (!seen.insert(v.name).second) throw InvariantError("duplicate transitional variable '" + v.name + "'");
        if (!v.map) throw InvariantError("transitional variable '" + v.name + "' has no map");
    }
}

const TVar& TransitionalSpace::var(const std::string& name) const {
    for (const auto& v : vars_)
        if (v.name == name) return v;
    throw PreconditionError("undeclared variable '" + name + "'");
}

bool TransitionalSpace::declares(const std::string& name) const {
    for (const auto& v : vars_)
        if (v.name == name) return true;
    return false;
}

TVar TransitionalSpace::projection(const FiniteKernel& k, const std::string& name,
                                   const std::vector<std::string>& coords) {
    // (from target?, position) per coordinate
    std::vector<std::pair<bool, std::size_t>> where;
    std::vector<Variable> vars;
    for (const auto& c : coords) {
        if (auto p = k.target().find(c)) {
            where.emplace_back(true, *p);
            vars.push_back(k.target().vars()[*p]);
        } else if (auto q = k.source().find(c)) {
            where.emplace_back(false, *q);
            vars.push_back(k.source().vars()[*q]);
        } else {
            throw PreconditionError("variable '" + name + "' reads unknown coordinate '" + c + "'");
        }
    }
    FiniteSpace codomain(std::move(vars));
    auto map = [where, codomain](const Point& w, const Point& t) {
        std::size_t idx = 0;
        for (std::size_t i = 0; i < where.size(); ++i)
            idx += (where[i].first ? w[where[i].second] : t[where[i].second]) * codomain.stride(i);
        return idx;
    };
    return TVar{name, codomain, map};
}

TransitionalSpace TransitionalSpace::of_projections(FiniteKernel k,
                                                    const std::map<std::string, std::vector<std::string>>& decl) {
    std::vector<TVar> vars;
    for (const auto& [name, coords] : decl) vars.push_back(projection(k, name, coords));
    return TransitionalSpace(std::move(k), std::move(vars));
}

std::string tvar_symbol(const FiniteSpace& codomain, std::size_t index) {
    return codomain.rank() == 0 ? "()" : codomain.label(index);
}

namespace {

Variable compound(const TVar& v) {
    Variable out{v.name, {}};
    for (std::size_t i = 0; i < v.codomain.size(); ++i) out.domain.push_back(tvar_symbol(v.codomain, i));
    return out;
}

std::size_t checked(const TVar& v, const Point& w, const Point& t) {
    const std::size_t i = v.map(w, t);
    if (i >= v.codomain.size()) throw PreconditionError("variable '" + v.name + "' is not total");
    return i;
}

}  // namespace

FiniteKernel joint_kernel(const TransitionalSpace& s, const std::vector<std::string>& names) {
    std::vector<const TVar*> tv;
    std::vector<Variable> vars;
    for (const auto& n : names) {
        tv.push_back(&s.var(n));
        vars.push_back(compound(*tv.back()));
    }
    FiniteSpace target(std::move(vars));
    const FiniteKernel& k = s.kernel();
    std::vector<Rational> mass(k.source().size() * target.size(), Rational(0));
    for (std::size_t t = 0; t < k.source().size(); ++t) {
        const Point tp = k.source().point(t);
        for (std::size_t w = 0; w < k.target().size(); ++w) {
            const Rational& m = k.mass(t, w);
            if (sgn(m) == 0) continue;
            const Point wp = k.target().point(w);
            std::size_t idx = 0;
            for (std::size_t i = 0; i < tv.size(); ++i) idx += checked(*tv[i], wp, tp) * target.stride(i);
            mass[t * target.size() + idx] += m;
        }
    }
    return FiniteKernel(k.source(), std::move(target), std::move(mass));
}

TciCertificate tci_check(const TransitionalSpace& s, const std::string& x, const std::string& y,
                         const std::string& z) {
    const TVar& X = s.var(x);
    const TVar& Y = s.var(y);
    const TVar& Z = s.var(z);
    const FiniteKernel& k = s.kernel();
    const std::size_t nx = X.codomain.size();

    // (z, t, y) -> unnormalized mass over x
    std::map<std::tuple<std::size_t, std::size_t, std::size_t>, std::vector<Rational>> cells;
    for (std::size_t t = 0; t < k.source().size(); ++t) {
        const Point tp = k.source().point(t);
        for (std::size_t w = 0; w < k.target().size(); ++w) {
            const Rational& m = k.mass(t, w);
            if (sgn(m) == 0) continue;
            const Point wp = k.target().point(w);
            auto& row = cells[{checked(Z, wp, tp), t, checked(Y, wp, tp)}];
            if (row.empty()) row.assign(nx, Rational(0));
            row[checked(X, wp, tp)] += m;
        }
    }

    TciCertificate cert;
    std::vector<std::optional<std::vector<Rational>>> q(Z.codomain.size());
    std::map<std::size_t, std::pair<std::size_t, std::size_t>> first_ty;
    for (auto& [key, row] : cells) {
        const auto [zi, t, yi] = key;
        Rational total(0);
        for (const auto& r : row) total += r;
        for (auto& r : row) r /= total;
        if (!q[zi]) {
            q[zi] = row;
            first_ty[zi] = {t, yi};
            continue;
        }
        if (*q[zi] != row) {
            const auto [t1, y1] = first_ty[zi];
            cert.violation = TciViolation{tvar_symbol(Z.codomain, zi),
                                          k.source().label(t1),
                                          tvar_symbol(Y.codomain, y1),
                                          k.source().label(t),
                                          tvar_symbol(Y.codomain, yi),
                                          *q[zi],
                                          row};
            return cert;
        }
    }

    Variable src = compound(Z);
    if (src.name == x) src.name += "'";
    std::vector<Rational> mass;
    mass.reserve(Z.codomain.size() * nx);
    for (std::size_t zi = 0; zi < Z.codomain.size(); ++zi) {
        if (q[zi]) {
            mass.insert(mass.end(), q[zi]->begin(), q[zi]->end());
        } else {
            cert.unconstrained_z.push_back(tvar_symbol(Z.codomain, zi));
            mass.insert(mass.end(), nx, make_rational(1, static_cast<long>(nx)));
        }
    }
    cert.holds = true;
    cert.witness_q = FiniteKernel(FiniteSpace({src}), FiniteSpace({compound(X)}), std::move(mass));
    return cert;
}

bool tci_symmetric(const TransitionalSpace& s, const std::string& x, const std::string& y, const std::string& z) {
    return tci_check(s, x, y, z).holds || tci_check(s, y, x, z).holds;
}

TciCertificate statistic_check(const FiniteKernel& model, const FiniteSpace& s_codomain,
                               const std::function<std::size_t(const Point&)>& s, StatisticMode mode,
                               const NameSet& aux) {
    for (const auto& a : aux)
        if (!model.target().contains(a)) throw PreconditionError("auxiliary variable '" + a + "' is not a target");
    if (mode != StatisticMode::Adequate && !aux.empty())
        throw PreconditionError("auxiliary variables only apply to adequacy");

    std::vector<TVar> vars;
    vars.push_back(TVar{"S", s_codomain, [s](const Point& w, const Point&) { return s(w); }});
    vars.push_back(TVar{"1", FiniteSpace{}, [](const Point&, const Point&) { return std::size_t{0}; }});
    std::vector<std::string> x_coords;
    std::vector<std::string> param_coords = model.source().names();
    for (const auto& n : model.target().names()) {
        if (aux.count(n)) {
            param_coords.push_back(n);
        } else {
            x_coords.push_back(n);
        }
    }
    vars.push_back(TransitionalSpace::projection(model, "X", x_coords));
    vars.push_back(TransitionalSpace::projection(model, "theta", param_coords));
    TransitionalSpace space(model, std::move(vars));

    switch (mode) {
        case StatisticMode::Ancillary: return tci_check(space, "S", "theta", "1");
        case StatisticMode::Sufficient:
        case StatisticMode::Adequate: return tci_check(space, "X", "theta", "S");
    }
    throw PreconditionError("unknown statistic mode");
}

}  // namespace tcid
