#include "tcid/contkernel.hpp"

#include "tcid/error.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <optional>
#include <random>

namespace tcid {

namespace {

constexpr double kPi = 3.14159265358979323846;

double normal_pdf(double x, double mean, double var) {
    const double z = x - mean;
    return std::exp(-z * z / (2 * var)) / std::sqrt(2 * kPi * var);
}

double std_normal_pdf(double x) {
    return normal_pdf(x, 0.0, 1.0);
}

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

struct Piece {
    double value;
    double error;
    double l1;
};

Piece integrate_piece(const std::function<double(double)>& f, double a, double b, const QuadratureCfg& cfg) {
    double err = 0.0;
    double l1 = 0.0;
    double v = 0.0;
    if (cfg.rule == QuadRule::TanhSinh) {
        thread_local std::map<unsigned, std::unique_ptr<boost::math::quadrature::tanh_sinh<double>>> cache;
        auto& integrator = cache[cfg.max_subdivisions];
        if (!integrator)
            integrator = std::make_unique<boost::math::quadrature::tanh_sinh<double>>(cfg.max_subdivisions);
        v = integrator->integrate(f, a, b, cfg.rel_tol, &err, &l1);
    } else {
        v = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, b, cfg.max_subdivisions,
                                                                          cfg.rel_tol, &err, &l1);
    }
    if (!std::isfinite(v)) throw NumericError("quadrature produced a non-finite value");
    return {v, err, l1};
}

std::optional<double> exact_continuous_mass(const Density1D& d) {
    if (auto u = std::get_if<Uniform>(&d)) return u->hi > u->lo ? std::optional<double>(1.0) : std::optional<double>(0.0);
    if (std::holds_alternative<Gaussian>(d)) return 1.0;
    if (std::holds_alternative<DiracMixture>(d)) return 0.0;
    return std::nullopt;
}

}  // namespace

const char* to_string(QuadRule r) {
    return r == QuadRule::TanhSinh ? "tanh-sinh" : "gauss-kronrod-61";
}

void QuadratureCfg::validate() const {
    if (!(abs_tol > 0) || !(rel_tol > 0)) throw PreconditionError("quadrature tolerances must be positive");
    if (max_subdivisions == 0) throw PreconditionError("quadrature needs at least one subdivision level");
}

Integral integrate(const std::function<double(double)>& f, double lo, double hi, std::vector<double> breaks,
                   const QuadratureCfg& cfg) {
    cfg.validate();
    if (!(lo <= hi)) throw PreconditionError("integration bounds out of order");
    if (lo == hi) return {};
    std::vector<double> pts{lo, hi};
    for (double b : breaks)
        if (b > lo && b < hi) pts.push_back(b);
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());

    double whole = 0.0;
    double halved = 0.0;
    double err = 0.0;
    double l1 = 0.0;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        const double a = pts[i];
        const double b = pts[i + 1];
        const double m = a + (b - a) / 2;
        const Piece p = integrate_piece(f, a, b, cfg);
        const Piece left = integrate_piece(f, a, m, cfg);
        const Piece right = integrate_piece(f, m, b, cfg);
        whole += p.value;
        halved += left.value + right.value;
        err += std::max(p.error, left.error + right.error);
        l1 += p.l1;
    }
    const double gap = std::abs(whole - halved);
    const double tol = 10 * std::max(cfg.abs_tol, cfg.rel_tol * l1);
    if (gap > tol)
        throw NumericError("quadrature did not converge on [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
    return {halved, std::max(err, gap)};
}

// ---------------------------------------------------------------------------

double pdf(const Density1D& d, double x) {
    return std::visit(overloaded{
                          [&](const Uniform& u) {
                              return (u.hi > u.lo && x >= u.lo && x <= u.hi) ? 1.0 / (u.hi - u.lo) : 0.0;
                          },
                          [&](const Gaussian& g) {
                              if (!(g.var > 0)) throw PreconditionError("Gaussian variance must be positive");
                              return normal_pdf(x, g.mean, g.var);
                          },
                          [&](const DiracMixture&) { return 0.0; },
                          [&](const PiecewiseClosedForm& p) { return (x >= p.lo && x <= p.hi) ? p.pdf(x) : 0.0; },
                      },
                      d);
}

std::vector<std::pair<double, double>> atoms(const Density1D& d) {
    if (auto u = std::get_if<Uniform>(&d)) {
        if (u->hi == u->lo) return {{u->lo, 1.0}};
        return {};
    }
    if (auto m = std::get_if<DiracMixture>(&d)) {
        if (m->points.size() != m->weights.size()) throw InvariantError("Dirac mixture needs one weight per point");
        std::vector<std::pair<double, double>> out;
        for (std::size_t i = 0; i < m->points.size(); ++i) out.emplace_back(m->points[i], m->weights[i]);
        return out;
    }
    return {};
}

bool has_continuous_part(const Density1D& d) {
    if (auto u = std::get_if<Uniform>(&d)) return u->hi > u->lo;
    return !std::holds_alternative<DiracMixture>(d);
}

std::pair<double, double> support(const Density1D& d) {
    return std::visit(overloaded{
                          [](const Uniform& u) { return std::make_pair(u.lo, u.hi); },
                          [](const Gaussian& g) {
                              const double s = std::sqrt(g.var);
                              return std::make_pair(g.mean - 40 * s, g.mean + 40 * s);
                          },
                          [](const DiracMixture&) { return std::make_pair(0.0, 0.0); },
                          [](const PiecewiseClosedForm& p) { return std::make_pair(p.lo, p.hi); },
                      },
                      d);
}

std::vector<double> breakpoints(const Density1D& d) {
    if (auto g = std::get_if<Gaussian>(&d)) return {g->mean};
    if (auto p = std::get_if<PiecewiseClosedForm>(&d)) return p->breaks;
    return {};
}

Integral total_mass(const Density1D& d, const QuadratureCfg& cfg) {
    double atom_mass = 0.0;
    for (const auto& [x, w] : atoms(d)) atom_mass += w;
    if (!has_continuous_part(d)) return {atom_mass, 0.0};
    const auto [lo, hi] = support(d);
    Integral r = integrate([&](double x) { return pdf(d, x); }, lo, hi, breakpoints(d), cfg);
    r.value += atom_mass;
    return r;
}

double mass_on(const Density1D& d, double lo, double hi, const QuadratureCfg& cfg) {
    if (!(lo <= hi)) throw PreconditionError("interval bounds out of order");
    double m = 0.0;
    for (const auto& [x, w] : atoms(d))
        if (x >= lo && x <= hi) m += w;
    if (has_continuous_part(d)) {
        const auto [s_lo, s_hi] = support(d);
        const double a = std::max(lo, s_lo);
        const double b = std::min(hi, s_hi);
        if (a < b) m += integrate([&](double x) { return pdf(d, x); }, a, b, breakpoints(d), cfg).value;
    }
    return m;
}

double tv_distance(const Density1D& p, const Density1D& q, const QuadratureCfg& cfg) {
    std::map<double, std::pair<double, double>> atom_table;
    for (const auto& [x, w] : atoms(p)) atom_table[x].first += w;
    for (const auto& [x, w] : atoms(q)) atom_table[x].second += w;
    double atomic = 0.0;
    for (const auto& [x, ws] : atom_table) atomic += std::abs(ws.first - ws.second);

    double continuous = 0.0;
    const bool cp = has_continuous_part(p);
    const bool cq = has_continuous_part(q);
    if (cp != cq) {
        const Density1D& only = cp ? p : q;
        const auto exact = exact_continuous_mass(only);
        continuous = exact ? *exact : total_mass(only, cfg).value;
    } else if (cp) {
        const auto [plo, phi] = support(p);
        const auto [qlo, qhi] = support(q);
        std::vector<double> breaks = breakpoints(p);
        for (double b : breakpoints(q)) breaks.push_back(b);
        breaks.insert(breaks.end(), {plo, phi, qlo, qhi});
        continuous = integrate([&](double x) { return std::abs(pdf(p, x) - pdf(q, x)); }, std::min(plo, qlo),
                               std::max(phi, qhi), breaks, cfg)
                         .value;
    }
    return 0.5 * (atomic + continuous);
}

// ---------------------------------------------------------------------------

std::vector<TestPoint> default_no_pointwise_points() {
    return {{"1/2", 0.5, true},
            {"1/3", 1.0 / 3.0, true},
            {"3/4", 0.75, true},
            {"sqrt(2)/2", std::sqrt(2.0) / 2.0, false},
            {"0", 0.0, true}};
}

std::vector<NoPointwiseEntry> demo_no_pointwise(const std::vector<TestPoint>& points, const QuadratureCfg& cfg) {
    std::vector<NoPointwiseEntry> out;
    for (const auto& p : points) {
        if (p.value < 0 || p.value > 1) throw PreconditionError("x_a must lie in [0, 1]");
        const Density1D conditional = Uniform{0.0, p.value};
        const Density1D intervened =
            p.rational ? Density1D(DiracMixture{{p.value}, {1.0}}) : Density1D(Uniform{0.0, p.value});
        out.push_back({p, tv_distance(intervened, conditional, cfg), p.value == 0.0});
    }
    return out;
}

double backdoor_do_density(double x_a, double x_b) {
    const double s = 2 * std::abs(x_b - x_a);
    if (s > 1) return 0.0;
    return -std::log(std::max(s, 1e-300));
}

double backdoor_adjusted_density(double x_a, double x_b) {
    const double s = 2 * std::abs(x_b - x_a);
    const double r = 2 * std::abs(x_b);
    double v = 0.0;
    if (s >= 0.5 && s <= 1) v -= std::log(s);
    if (s < 0.5) v += std::log(2.0);
    if (r < 0.5) v -= std::log(std::max(2 * r, 1e-300));
    return v;
}

BackdoorReport demo_backdoor_failure(double x_a, const QuadratureCfg& cfg) {
    if (!(x_a > 0 && x_a <= 1)) throw PreconditionError("x_a must lie in (0, 1]");
    BackdoorReport r;
    r.x_a = x_a;
    const double lo = std::min(x_a - 0.5, -0.25);
    const double hi = std::max(x_a + 0.5, 0.25);
    const std::vector<double> breaks{x_a - 0.5, x_a - 0.25, x_a, x_a + 0.25, x_a + 0.5, -0.25, 0.0, 0.25};
    r.mass_do = integrate([&](double b) { return backdoor_do_density(x_a, b); }, lo, hi, breaks, cfg);
    r.mass_adjusted = integrate([&](double b) { return backdoor_adjusted_density(x_a, b); }, lo, hi, breaks, cfg);
    r.l1 = integrate([&](double b) { return std::abs(backdoor_do_density(x_a, b) - backdoor_adjusted_density(x_a, b)); },
                     lo, hi, breaks, cfg);

    const int n = 2000;
    for (int i = 0; i <= n; ++i) {
        const double x_b = x_a - 0.5 + static_cast<double>(i) / n;
        const double s = 2 * std::abs(x_b - x_a);
        if (s < 0.5 || s > 1) continue;
        const double diff = std::abs(backdoor_do_density(x_a, x_b) - backdoor_adjusted_density(x_a, x_b));
        if (2 * std::abs(x_b) < 0.5) {
            if (diff > 0) ++r.pointwise_conflicts;
            continue;
        }
        ++r.pointwise_checked;
        r.pointwise_max_diff = std::max(r.pointwise_max_diff, diff);
    }
    return r;
}

// ---------------------------------------------------------------------------

namespace {

// Joint density of (X_b, X_c) with c = u b, u ~ Uni[0,1], b ~ N(u, 1).
double positivity_bc_density(double b, double c) {
    if (b == 0) return 0.0;
    const double u = c / b;
    if (u < 0 || u > 1) return 0.0;
    return std_normal_pdf(b - u) / std::abs(b);
}

double positivity_obs_conditional(double a, double b, double c) {
    const double joint = std_normal_pdf(a - c) * positivity_bc_density(b, c);
    return joint / positivity_bc_density(b, c);
}

// Uni[0, b] (or Uni[b, 0]) for X_c under do(X_b = b).
Density1D positivity_do_c(double b) {
    if (b == 0) return DiracMixture{{0.0}, {1.0}};
    return Uniform{std::min(0.0, b), std::max(0.0, b)};
}

double positivity_do_conditional(double a, double b, double c) {
    const Density1D dc = positivity_do_c(b);
    const double joint = std_normal_pdf(a - c) * pdf(dc, c);
    return joint / pdf(dc, c);
}

}  // namespace

PositivityReport demo_positivity_not_necessary(const QuadratureCfg& cfg, std::uint64_t seed, std::size_t draws,
                                               double bandwidth) {
    if (draws == 0 || !(bandwidth > 0)) throw PreconditionError("Monte Carlo needs draws and a positive bandwidth");
    PositivityReport r;
    for (double b : {-1.5, -0.5, 0.5, 1.0, 2.0}) {
        for (double frac : {0.1, 0.3, 0.5, 0.7, 0.9}) {
            const double c = frac * b;
            for (double a : {-2.0, -1.0, -0.5, 0.0, 0.3, 1.0, 2.5}) {
                const double lhs = positivity_obs_conditional(a, b, c);
                const double rhs = positivity_do_conditional(a, b, c);
                r.grid_max_abs_diff = std::max(r.grid_max_abs_diff, std::abs(lhs - rhs));
                ++r.grid_points;
            }
        }
    }
    r.density_at_example = positivity_obs_conditional(0.3, 1.0, 0.3);
    r.mass_on_2_3 = mass_on(positivity_do_c(1.0), 2.0, 3.0, cfg);
    r.mass_below_0 = mass_on(positivity_do_c(1.0), -1.0, 0.0, cfg);

    r.seed = seed;
    r.draws = draws;
    r.bandwidth = bandwidth;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::normal_distribution<double> noise(0.0, 1.0);
    std::vector<double> xa(draws);
    std::vector<double> xc(draws);
    for (std::size_t i = 0; i < draws; ++i) {
        const double u = unif(rng);
        const double b = u + noise(rng);
        xc[i] = u * b;
        xa[i] = xc[i] + noise(rng);
    }
    for (double c0 : {-0.5, 0.0, 0.25, 0.5, 1.0}) {
        for (double t : {0.5, 1.0, 2.0}) {
            double sw = 0.0, sw2 = 0.0, re = 0.0, im = 0.0;
            for (std::size_t i = 0; i < draws; ++i) {
                const double z = (xc[i] - c0) / bandwidth;
                if (std::abs(z) > 6) continue;
                const double w = std::exp(-0.5 * z * z);
                sw += w;
                sw2 += w * w;
                re += w * std::cos(t * xa[i]);
                im += w * std::sin(t * xa[i]);
            }
            if (sw == 0) throw NumericError("no Monte Carlo draws near x_c = " + std::to_string(c0));
            CharFnCell cell;
            cell.c0 = c0;
            cell.t = t;
            cell.estimate_re = re / sw;
            cell.estimate_im = im / sw;
            const double damp = std::exp(-0.5 * t * t);
            cell.expected_re = damp * std::cos(t * c0);
            cell.expected_im = damp * std::sin(t * c0);
            cell.deviation = std::hypot(cell.estimate_re - cell.expected_re, cell.estimate_im - cell.expected_im);
            cell.effective_n = sw * sw / sw2;
            r.mc_sup_deviation = std::max(r.mc_sup_deviation, cell.deviation);
            r.cells.push_back(cell);
        }
    }
    return r;
}

// ---------------------------------------------------------------------------

double BivariateGaussian::pdf(double x, double y) const {
    const double q = 1 - rho * rho;
    return std::exp(-(x * x - 2 * rho * x * y + y * y) / (2 * q)) / (2 * kPi * std::sqrt(q));
}

const std::vector<TestFunction>& test_functions() {
    static const std::vector<TestFunction> fns = [] {
        auto clip = [](double v, double lo, double hi) { return std::min(hi, std::max(lo, v)); };
        auto sigmoid = [](double v) { return 1.0 / (1.0 + std::exp(-v)); };
        const double c2 = std::cbrt(2.0);
        return std::vector<TestFunction>{
            {"clip(x,-1,1)", [=](double x) { return clip(x, -1, 1); }, {-1, 1}},
            {"clip(x^2,0,1)", [=](double x) { return clip(x * x, 0, 1); }, {-1, 1}},
            {"clip(x^3/2,-1,1)", [=](double x) { return clip(x * x * x / 2, -1, 1); }, {-c2, c2}},
            {"clip(1-|x|,0,1)", [=](double x) { return clip(1 - std::abs(x), 0, 1); }, {-1, 0, 1}},
            {"clip((x+1)/2,0,1)", [=](double x) { return clip((x + 1) / 2, 0, 1); }, {-1, 1}},
            {"sigmoid(x)", [=](double x) { return sigmoid(x); }, {}},
            {"sigmoid(3x-1)", [=](double x) { return sigmoid(3 * x - 1); }, {}},
            {"sigmoid(1-x/2)", [=](double x) { return sigmoid(1 - x / 2); }, {}},
            {"tanh(x)", [](double x) { return std::tanh(x); }, {}},
            {"tanh(2x+1)", [](double x) { return std::tanh(2 * x + 1); }, {}},
        };
    }();
    return fns;
}

ShrinkingBallReport shrinking_ball_conditional(const BivariateGaussian& joint, double y,
                                               const std::vector<double>& deltas, const QuadratureCfg& cfg) {
    if (!(std::abs(joint.rho) < 1)) throw PreconditionError("the joint density must be strictly positive (|rho| < 1)");
    ShrinkingBallReport r;
    r.rho = joint.rho;
    r.y = y;
    r.deltas = deltas;
    const double sd = std::sqrt(1 - joint.rho * joint.rho);

    // Integral over x of h(x) f(x, y') for fixed y'.
    auto inner = [&](const std::function<double(double)>& h, const std::vector<double>& kinks, double yp) {
        const double centre = joint.rho * yp;
        std::vector<double> breaks = kinks;
        breaks.push_back(centre);
        return integrate([&](double x) { return h(x) * joint.pdf(x, yp); }, centre - 12 * sd, centre + 12 * sd,
                         breaks, cfg)
            .value;
    };
    // Closed-form conditional X | Y = y ~ N(rho y, 1 - rho^2).
    auto conditional = [&](const TestFunction& g) {
        const double m = joint.rho * y;
        std::vector<double> breaks = g.kinks;
        breaks.push_back(m);
        return integrate([&](double x) { return g.f(x) * normal_pdf(x, m, sd * sd); }, m - 12 * sd, m + 12 * sd,
                         breaks, cfg)
            .value;
    };
    const auto& fns = test_functions();
    std::vector<double> exact;
    for (const auto& g : fns) exact.push_back(conditional(g));

    const std::function<double(double)> one = [](double) { return 1.0; };
    for (double delta : deltas) {
        if (!(delta > 0)) throw PreconditionError("ball radii must be positive");
        const double den =
            integrate([&](double yp) { return inner(one, {}, yp); }, y - delta, y + delta, {}, cfg).value;
        if (!(den > 0)) throw NumericError("ball has no mass");
        double worst = 0.0;
        for (std::size_t i = 0; i < fns.size(); ++i) {
            const double num =
                integrate([&](double yp) { return inner(fns[i].f, fns[i].kinks, yp); }, y - delta, y + delta, {}, cfg)
                    .value;
            worst = std::max(worst, std::abs(num / den - exact[i]));
        }
        r.errors.push_back(worst);
    }
    r.decreasing = true;
    for (std::size_t i = 0; i + 1 < r.errors.size(); ++i)
        if (r.errors[i + 1] > (1 + r.slack) * r.errors[i] + r.floor) r.decreasing = false;
    return r;
}

}  // namespace tcid
