#include "tcid/cli.hpp"

#include "tcid/calculus.hpp"
#include "tcid/contkernel.hpp"
#include "tcid/error.hpp"
#include "tcid/identify.hpp"
#include "tcid/io.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <optional>
#include <ostream>
#include <thread>

namespace tcid::cli {

namespace {

struct UsageError : Error {
    using Error::Error;
};

// Input files: anything wrong with their content is a format error tagged with the path.
template <class F>
auto load(const std::string& path, F parse) {
    const Json j = read_json_file(path);
    try {
        return parse(j);
    } catch (const FormatError& e) {
        throw FormatError(path + ": " + e.what());
    } catch (const InvariantError& e) {
        throw FormatError(path + ": " + e.what());
    }
}

MixedGraph load_graph(const std::string& path) {
    return load(path, graph_from_json);
}

LiCbn load_model(const std::string& path) {
    return load(path, model_from_json);
}

// Graphs with latent nodes are projected before any fixing.
MixedGraph observed_graph(const MixedGraph& g) {
    return g.latents().empty() ? g : latent_project(g);
}

void require_match(const MixedGraph& g, const LiCbn& m, const std::string& model_path) {
    if (latent_project(m.graph()) != g) throw FormatError(model_path + ": model graph does not match --graph");
}

Json node_set(const NodeSet& s) {
    return Json(std::vector<std::string>(s.begin(), s.end()));
}

Json integral(const Integral& i) {
    return {{"value", i.value}, {"error", i.error}};
}

Json quadrature(const QuadratureCfg& q) {
    return {{"rule", to_string(q.rule)},
            {"abs_tol", q.abs_tol},
            {"rel_tol", q.rel_tol},
            {"max_subdivisions", q.max_subdivisions}};
}

// Ordered results from a capped pool of workers.
template <class T>
std::vector<T> parallel_map(std::size_t n, const std::function<T(std::size_t)>& fn) {
    std::vector<std::optional<T>> slots(n);
    std::vector<std::exception_ptr> errors(n);
    const std::size_t workers = std::min<std::size_t>(std::max(1u, thread_cap()), n);
    auto work = [&](std::size_t w) {
        for (std::size_t i = w; i < n; i += workers) {
            try {
                slots[i] = fn(i);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    if (workers <= 1) {
        work(0);
    } else {
        std::vector<std::thread> pool;
        for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work, w);
        for (auto& t : pool) t.join();
    }
    std::vector<T> out;
    for (std::size_t i = 0; i < n; ++i) {
        if (errors[i]) std::rethrow_exception(errors[i]);
        out.push_back(std::move(*slots[i]));
    }
    return out;
}

struct Options {
    std::string graph, model, a, b, c, node, treatment, outcome, name, out_path;
    std::size_t budget = 1u << 20;
    bool log_nonfaithful = false;
    std::string rule;
    std::vector<std::string> sets;
    std::optional<std::uint64_t> seed;
    std::size_t draws = 1000000;
    double bandwidth = 0.05;
    std::vector<double> x_a{0.1, 0.25, 0.5, 0.75, 1.0};
    std::vector<double> rho{-0.5, 0.0, 0.5};
    double y = 1.0;
    std::vector<double> deltas{0.1, 0.01, 0.001};
    double ball_tolerance = 1e-3;
    std::string quad_rule = "tanh-sinh";
    QuadratureCfg quad;
};

QuadratureCfg quad_cfg(const Options& o) {
    QuadratureCfg q = o.quad;
    q.rule = o.quad_rule == "gauss-kronrod" ? QuadRule::GaussKronrod61 : QuadRule::TanhSinh;
    try {
        q.validate();
    } catch (const PreconditionError& e) {
        throw UsageError(e.what());
    }
    return q;
}

int do_sep(const Options& o, Json& result) {
    const MixedGraph g = load_graph(o.graph);
    const bool s = id_separated(g, parse_node_list(o.a), parse_node_list(o.b), parse_node_list(o.c));
    result = {{"separated", s}};
    return s ? kOk : kNegative;
}

int do_identify(const Options& o, Json& result) {
    const MixedGraph g = observed_graph(load_graph(o.graph));
    const NodeSet a = parse_node_list(o.outcome);
    const NodeSet b = parse_node_list(o.treatment);
    std::optional<LiCbn> m;
    if (!o.model.empty()) {
        m = load_model(o.model);
        require_match(g, *m, o.model);
    }
    const IdResult r = one_line_identify(g, a, b);
    result = {{"status", to_string(r.status)}};
    if (r.status == IdStatus::NotIdentifiable) {
        result["failing_district"] = node_set(*r.failing_district);
        return kNegative;
    }
    result["formula_string"] = emit_formula(r.formula);
    result["formula_nested"] = emit_formula(r.formula, FormulaStyle::Nested);
    result["ancestral"] = node_set(r.ancestral);
    Json ds = Json::array();
    for (const auto& d : r.districts) ds.push_back(node_set(d));
    result["districts"] = ds;
    if (m) result["evaluated_table"] = kernel_to_json(evaluate(r.formula, observable_kernel(*m), g, b));
    return kOk;
}

Json triples(const std::vector<Triple>& ts) {
    Json arr = Json::array();
    for (const auto& t : ts) arr.push_back({{"a", node_set(t.a)}, {"b", node_set(t.b)}, {"c", node_set(t.c)}});
    return arr;
}

int do_verify_markov(const Options& o, Json& result) {
    const LiCbn m = load_model(o.model);
    const MarkovReport r = verify_markov(m, o.budget, o.log_nonfaithful);
    result = {{"triples_checked", r.triples_checked},
              {"separated", r.separated},
              {"budget_exhausted", r.budget_exhausted},
              {"violations", triples(r.violations)}};
    if (o.log_nonfaithful) result["nonfaithful"] = triples(r.nonfaithful);
    return r.violations.empty() ? kOk : kNegative;
}

int do_calculus(const Options& o, Json& result) {
    const bool bd = o.rule == "backdoor";
    std::map<std::string, NodeSet> sets;
    const std::vector<std::string> keys = bd ? std::vector<std::string>{"A", "B", "F"}
                                             : std::vector<std::string>{"A", "B", "C", "D"};
    for (const auto& k : keys) sets[k];
    for (const auto& s : o.sets) {
        const auto eq = s.find('=');
        const std::string key = s.substr(0, eq);
        if (eq == std::string::npos || !sets.count(key))
            throw UsageError("--sets entries must look like " + keys.front() + "=x,y with a key among {" +
                             [&] {
                                 std::string ks;
                                 for (const auto& k : keys) ks += (ks.empty() ? "" : ",") + k;
                                 return ks;
                             }() +
                             "}, got '" + s + "'");
        sets[key] = parse_node_list(s.substr(eq + 1));
    }
    const LiCbn m = load_model(o.model);
    RuleReport r;
    if (bd) r = backdoor(m, sets["A"], sets["B"], sets["F"]);
    else if (o.rule == "1") r = rule1(m, sets["A"], sets["B"], sets["C"], sets["D"]);
    else if (o.rule == "2") r = rule2(m, sets["A"], sets["B"], sets["C"], sets["D"]);
    else r = rule3(m, sets["A"], sets["B"], sets["C"], sets["D"]);
    result = {{"rule", to_string(r.rule)},
              {"graphical_ok", r.graphical_ok},
              {"positivity_ok", r.positivity_ok},
              {"equality_ok", r.equality_ok ? Json(*r.equality_ok) : Json(nullptr)},
              {"support_equality", r.support_equality ? Json(*r.support_equality) : Json(nullptr)},
              {"compared_points", r.compared_points},
              {"excluded_points", r.excluded_points}};
    Json s = Json::object();
    for (const auto& [k, v] : sets) s[k] = node_set(v);
    result["sets"] = s;
    if (r.counterexample) result["counterexample"] = *r.counterexample;
    return r.equality_ok.value_or(false) ? kOk : kNegative;
}

int do_fix(const Options& o, Json& result) {
    const MixedGraph g = observed_graph(load_graph(o.graph));
    if (!g.has_node(o.node)) throw UsageError("--node " + o.node + " is not a node of the graph");
    const bool ok = fixable(g, o.node);
    result = {{"node", o.node}, {"fixable", ok}};
    if (!ok) return kNegative;
    result["graph"] = graph_to_json(fix_graph(g, o.node));
    if (!o.model.empty()) {
        const LiCbn m = load_model(o.model);
        require_match(g, m, o.model);
        result["kernel"] = kernel_to_json(fix_kernel(observable_kernel(m), o.node, g));
    }
    return kOk;
}

int demo_no_pointwise_verb(const Options& o, Json& result) {
    const QuadratureCfg q = quad_cfg(o);
    const auto rows = demo_no_pointwise(default_no_pointwise_points(), q);
    Json entries = Json::array();
    bool pass = true;
    for (const auto& r : rows) {
        const double expected = r.point.rational && !r.boundary ? 1.0 : 0.0;
        const bool ok = std::abs(r.tv - expected) <= 1e-9;
        pass = pass && ok;
        entries.push_back({{"label", r.point.label},
                           {"x_a", r.point.value},
                           {"rational", r.point.rational},
                           {"boundary", r.boundary},
                           {"tv", r.tv},
                           {"expected_tv", expected},
                           {"ok", ok}});
    }
    result = {{"entries", entries}, {"tolerance", 1e-9}, {"quadrature", quadrature(q)}, {"pass", pass}};
    return pass ? kOk : kNegative;
}

int demo_backdoor_verb(const Options& o, Json& result) {
    const QuadratureCfg q = quad_cfg(o);
    const auto reports =
        parallel_map<BackdoorReport>(o.x_a.size(), [&](std::size_t i) { return demo_backdoor_failure(o.x_a[i], q); });
    const double mass_tol = 1e-6;
    Json arr = Json::array();
    bool pass = true;
    for (const auto& r : reports) {
        const bool ok = std::abs(r.mass_do.value - 1) <= mass_tol && std::abs(r.mass_adjusted.value - 1) <= mass_tol &&
                        r.l1.value >= r.l1_bound;
        pass = pass && ok;
        arr.push_back({{"x_a", r.x_a},
                       {"mass_do", integral(r.mass_do)},
                       {"mass_adjusted", integral(r.mass_adjusted)},
                       {"l1", integral(r.l1)},
                       {"l1_bound", r.l1_bound},
                       {"pointwise_checked", r.pointwise_checked},
                       {"pointwise_max_diff", r.pointwise_max_diff},
                       {"pointwise_conflicts", r.pointwise_conflicts},
                       {"ok", ok}});
    }
    result = {{"reports", arr}, {"mass_tolerance", mass_tol}, {"quadrature", quadrature(q)}, {"pass", pass}};
    return pass ? kOk : kNegative;
}

int demo_positivity_verb(const Options& o, Json& result) {
    if (!o.seed) throw UsageError("demos --name positivity requires --seed");
    const QuadratureCfg q = quad_cfg(o);
    const PositivityReport r = demo_positivity_not_necessary(q, *o.seed, o.draws, o.bandwidth);
    const double grid_tol = 1e-15;
    Json cells = Json::array();
    for (const auto& c : r.cells)
        cells.push_back({{"c0", c.c0},
                         {"t", c.t},
                         {"estimate", {c.estimate_re, c.estimate_im}},
                         {"expected", {c.expected_re, c.expected_im}},
                         {"deviation", c.deviation},
                         {"effective_n", c.effective_n}});
    const bool pass = r.grid_max_abs_diff <= grid_tol && r.mc_sup_deviation < r.mc_tolerance && r.mass_on_2_3 == 0;
    result = {{"grid_points", r.grid_points},
              {"grid_max_abs_diff", r.grid_max_abs_diff},
              {"grid_tolerance", grid_tol},
              {"density_at_example", r.density_at_example},
              {"mass_on_2_3", r.mass_on_2_3},
              {"mass_below_0", r.mass_below_0},
              {"seed", r.seed},
              {"draws", r.draws},
              {"bandwidth", r.bandwidth},
              {"mc_sup_deviation", r.mc_sup_deviation},
              {"mc_tolerance", r.mc_tolerance},
              {"cells", cells},
              {"quadrature", quadrature(q)},
              {"pass", pass}};
    return pass ? kOk : kNegative;
}

int demo_shrinking_verb(const Options& o, Json& result) {
    const QuadratureCfg q = quad_cfg(o);
    const auto reports = parallel_map<ShrinkingBallReport>(o.rho.size(), [&](std::size_t i) {
        return shrinking_ball_conditional(BivariateGaussian{o.rho[i]}, o.y, o.deltas, q);
    });
    Json arr = Json::array();
    bool pass = true;
    for (const auto& r : reports) {
        const bool ok = r.decreasing && !r.errors.empty() && r.errors.back() < o.ball_tolerance;
        pass = pass && ok;
        arr.push_back({{"rho", r.rho},
                       {"y", r.y},
                       {"deltas", r.deltas},
                       {"errors", r.errors},
                       {"slack", r.slack},
                       {"floor", r.floor},
                       {"decreasing", r.decreasing},
                       {"ok", ok}});
    }
    Json fns = Json::array();
    for (const auto& f : test_functions()) fns.push_back(f.name);
    result = {{"reports", arr},
              {"tolerance", o.ball_tolerance},
              {"test_functions", fns},
              {"quadrature", quadrature(q)},
              {"pass", pass}};
    return pass ? kOk : kNegative;
}

int do_demos(const Options& o, Json& result) {
    int code;
    if (o.name == "no-pointwise") code = demo_no_pointwise_verb(o, result);
    else if (o.name == "backdoor-failure") code = demo_backdoor_verb(o, result);
    else if (o.name == "positivity") code = demo_positivity_verb(o, result);
    else code = demo_shrinking_verb(o, result);
    result["name"] = o.name;
    if (!o.out_path.empty()) {
        std::ofstream f(o.out_path, std::ios::binary);
        if (!f) throw UsageError("cannot write " + o.out_path);
        f << dump_json(result) << '\n';
    }
    return code;
}

}  // namespace

unsigned thread_cap() {
    const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    const char* env = std::getenv("TCID_THREADS");
    if (!env || !*env) return hw;
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (*end != '\0' || v < 1) throw UsageError(std::string("TCID_THREADS must be a positive integer, got '") + env + "'");
    return static_cast<unsigned>(v);
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Transitional conditional independence and identification toolkit", "tcid"};
    app.require_subcommand(1, 1);
    Options o;

    auto* sep = app.add_subcommand("sep", "id-separation of A and B given C");
    sep->add_option("--graph", o.graph, "graph JSON")->required();
    sep->add_option("--a", o.a, "comma-separated nodes")->required();
    sep->add_option("--b", o.b, "comma-separated nodes")->required();
    sep->add_option("--c", o.c, "comma-separated nodes");

    auto* identify = app.add_subcommand("identify", "one-line ID of P(outcome || do(treatment))");
    identify->add_option("--graph", o.graph, "graph JSON")->required();
    identify->add_option("--treatment", o.treatment, "comma-separated nodes")->required();
    identify->add_option("--outcome", o.outcome, "comma-separated nodes")->required();
    identify->add_option("--model", o.model, "model JSON; evaluates the formula on its observable kernel");

    auto* markov = app.add_subcommand("verify-markov", "id-separation implies TCI on a model");
    markov->add_option("--model", o.model, "model JSON")->required();
    markov->add_option("--budget", o.budget, "maximum number of triples")->check(CLI::PositiveNumber);
    markov->add_flag("--log-nonfaithful", o.log_nonfaithful, "also list independences without separation");

    auto* calculus = app.add_subcommand("calculus", "check a causal-calculus rule on a model");
    calculus->add_option("--rule", o.rule, "1, 2, 3 or backdoor")
        ->required()
        ->check(CLI::IsMember({"1", "2", "3", "backdoor"}));
    calculus->add_option("--model", o.model, "model JSON")->required();
    calculus->add_option("--sets", o.sets, "KEY=nodes entries: A,B,C,D for rules, A,B,F for backdoor");

    auto* demos = app.add_subcommand("demos", "continuous examples");
    demos->add_option("--name", o.name, "demo name")
        ->required()
        ->check(CLI::IsMember({"no-pointwise", "backdoor-failure", "positivity", "shrinking-ball"}));
    demos->add_option("--out", o.out_path, "also write the report here");
    demos->add_option("--seed", o.seed, "Monte Carlo seed (positivity)");
    demos->add_option("--draws", o.draws, "Monte Carlo draws (positivity)")->check(CLI::PositiveNumber);
    demos->add_option("--bandwidth", o.bandwidth, "kernel bandwidth (positivity)")->check(CLI::PositiveNumber);
    demos->add_option("--x-a", o.x_a, "treatment values (backdoor-failure)");
    demos->add_option("--rho", o.rho, "correlations (shrinking-ball)");
    demos->add_option("--y", o.y, "conditioning point (shrinking-ball)");
    demos->add_option("--deltas", o.deltas, "ball radii (shrinking-ball)");
    demos->add_option("--quadrature", o.quad_rule, "tanh-sinh or gauss-kronrod")
        ->check(CLI::IsMember({"tanh-sinh", "gauss-kronrod"}));
    demos->add_option("--abs-tol", o.quad.abs_tol, "absolute quadrature tolerance");
    demos->add_option("--rel-tol", o.quad.rel_tol, "relative quadrature tolerance");

    auto* fix = app.add_subcommand("fix", "fix one node of a graph (and of a model's kernel)");
    fix->add_option("--graph", o.graph, "graph JSON")->required();
    fix->add_option("--node", o.node, "node to fix")->required();
    fix->add_option("--model", o.model, "model JSON");

    try {
        std::vector<std::string> rev(args.rbegin(), args.rend());
        app.parse(rev);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kUsage;
    }

    Json result;
    int code = kOk;
    try {
        if (sep->parsed()) code = do_sep(o, result);
        else if (identify->parsed()) code = do_identify(o, result);
        else if (markov->parsed()) code = do_verify_markov(o, result);
        else if (calculus->parsed()) code = do_calculus(o, result);
        else if (demos->parsed()) code = do_demos(o, result);
        else code = do_fix(o, result);
    } catch (const FormatError& e) {
        err << "tcid: " << e.what() << '\n';
        return kFormat;
    } catch (const UsageError& e) {
        err << "tcid: " << e.what() << '\n';
        return kUsage;
    } catch (const PreconditionError& e) {
        err << "tcid: " << e.what() << '\n';
        return kUsage;
    } catch (const NumericError& e) {
        err << "tcid: " << e.what() << '\n';
        return kNumeric;
    } catch (const Error& e) {
        err << "tcid: " << e.what() << '\n';
        return kFormat;
    }
    out << dump_json(result) << '\n';
    return code;
}

int run(int argc, char** argv, std::ostream& out, std::ostream& err) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return run(args, out, err);
}

}  // namespace tcid::cli
