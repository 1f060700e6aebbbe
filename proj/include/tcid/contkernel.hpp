#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace tcid {

enum class QuadRule { TanhSinh, GaussKronrod61 };
const char* to_string(QuadRule r);

struct QuadratureCfg {
    QuadRule rule = QuadRule::TanhSinh;
    double abs_tol = 1e-12;
    double rel_tol = 1e-11;
    unsigned max_subdivisions = 20;  // refinement levels of the underlying rule

    void validate() const;
};

struct Integral {
    double value = 0.0;
    double error = 0.0;  // max of the rule's estimate and the halving discrepancy
};

/// Integral of f over [lo, hi], split at `breaks` (singular points and kinks). The result
/// is recomputed on halved pieces; a discrepancy above tolerance raises NumericError.
Integral integrate(const std::function<double(double)>& f, double lo, double hi, std::vector<double> breaks,
                   const QuadratureCfg& cfg = {});

struct Uniform {
    double lo, hi;  // lo == hi degenerates to a point mass
};
struct Gaussian {
    double mean, var;
};
struct DiracMixture {
    std::vector<double> points;
    std::vector<double> weights;
};
struct PiecewiseClosedForm {
    std::string name;
    std::function<double(double)> pdf;
    double lo, hi;              // support
    std::vector<double> breaks; // interior singularities and kinks
};

using Density1D = std::variant<Uniform, Gaussian, DiracMixture, PiecewiseClosedForm>;

/// Density of the absolutely continuous part (zero for point masses).
double pdf(const Density1D& d, double x);
/// Point masses as (location, weight).
std::vector<std::pair<double, double>> atoms(const Density1D& d);
bool has_continuous_part(const Density1D& d);
/// Support interval of the continuous part and the points where it is not smooth.
std::pair<double, double> support(const Density1D& d);
std::vector<double> breakpoints(const Density1D& d);

/// Quadrature of the continuous part plus the atom weights.
Integral total_mass(const Density1D& d, const QuadratureCfg& cfg = {});
/// Mass of the closed interval [lo, hi].
double mass_on(const Density1D& d, double lo, double hi, const QuadratureCfg& cfg = {});
/// Total variation distance sup_A |P(A) - Q(A)|.
double tv_distance(const Density1D& p, const Density1D& q, const QuadratureCfg& cfg = {});

// -- demos -------------------------------------------------------------------

struct TestPoint {
    std::string label;
    double value;
    bool rational;
};

struct NoPointwiseEntry {
    TestPoint point;
    double tv = 0.0;
    bool boundary = false;  // x_a = 0: both laws collapse to the point mass at 0
};

/// do-kernel (point mass at rational x_a, Uni[0, x_a] otherwise) against the conditional
/// version Uni[0, x_a].
std::vector<NoPointwiseEntry> demo_no_pointwise(const std::vector<TestPoint>& points, const QuadratureCfg& cfg = {});
std::vector<TestPoint> default_no_pointwise_points();

double backdoor_do_density(double x_a, double x_b);
double backdoor_adjusted_density(double x_a, double x_b);

struct BackdoorReport {
    double x_a = 0.0;
    Integral mass_do;
    Integral mass_adjusted;
    Integral l1;
    double l1_bound = 0.05;
    std::size_t pointwise_checked = 0;    // grid points in the shared region away from |x_b| < 1/4
    double pointwise_max_diff = 0.0;
    std::size_t pointwise_conflicts = 0;  // shared-region grid points with |x_b| < 1/4 that differ
};

BackdoorReport demo_backdoor_failure(double x_a, const QuadratureCfg& cfg = {});

struct CharFnCell {
    double c0 = 0.0;
    double t = 0.0;
    double estimate_re = 0.0, estimate_im = 0.0;
    double expected_re = 0.0, expected_im = 0.0;
    double deviation = 0.0;
    double effective_n = 0.0;
};

struct PositivityReport {
    std::size_t grid_points = 0;
    double grid_max_abs_diff = 0.0;
    double density_at_example = 0.0;  // f(x_a = 0.3 | x_b = 1, x_c = 0.3)
    double mass_on_2_3 = 0.0;         // P(X_c in [2,3] || do(x_b = 1))
    double mass_below_0 = 0.0;        // P(X_c in [-1,0) || do(x_b = 1))
    std::uint64_t seed = 42;
    std::size_t draws = 0;
    double bandwidth = 0.0;
    double mc_tolerance = 0.05;
    double mc_sup_deviation = 0.0;
    std::vector<CharFnCell> cells;
};

/// Gaussian conditionals agree on a grid; the do-kernel of c has no positive density;
/// Monte Carlo kernel regression of E[exp(itX_a) | X_c] matches the Gaussian characteristic function.
PositivityReport demo_positivity_not_necessary(const QuadratureCfg& cfg = {}, std::uint64_t seed = 42,
                                               std::size_t draws = 1000000, double bandwidth = 0.05);

/// Standard bivariate Gaussian with correlation rho, |rho| < 1.
struct BivariateGaussian {
    double rho;
    double pdf(double x, double y) const;
};

struct TestFunction {
    std::string name;
    std::function<double(double)> f;
    std::vector<double> kinks;
};
/// Ten bounded Lipschitz functions: clipped polynomials, sigmoids and tanh.
const std::vector<TestFunction>& test_functions();

struct ShrinkingBallReport {
    double rho = 0.0;
    double y = 0.0;
    std::vector<double> deltas;
    std::vector<double> errors;  // sup over test functions of |E[g(X) | Y in B(y, delta)] - E[g(X) | Y = y]|
    double slack = 0.10;
    double floor = 1e-9;
    bool decreasing = false;     // errors[i+1] <= (1 + slack) errors[i] + floor
};

ShrinkingBallReport shrinking_ball_conditional(const BivariateGaussian& joint, double y,
                                               const std::vector<double>& deltas, const QuadratureCfg& cfg = {});

}  // namespace tcid
