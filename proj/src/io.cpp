#include "tcid/io.hpp"

#include "tcid/error.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace tcid {

namespace {

std::pair<std::size_t, std::size_t> line_column(const std::string& text, std::size_t byte) {
    std::size_t line = 1;
    std::size_t col = 1;
    const std::size_t end = std::min(byte > 0 ? byte - 1 : 0, text.size());
    for (std::size_t i = 0; i < end; ++i) {
        if (text[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return {line, col};
}

Json rounded(const Json& j) {
    if (j.is_number_float()) return round_sig12(j.get<double>());
    if (j.is_array()) {
        Json out = Json::array();
        for (const auto& e : j) out.push_back(rounded(e));
        return out;
    }
    if (j.is_object()) {
        Json out = Json::object();
        for (const auto& [key, value] : j.items()) out[key] = rounded(value);
        return out;
    }
    return j;
}

const Json& field(const Json& j, const char* key, const char* what) {
    if (!j.is_object()) throw FormatError(std::string(what) + " must be a JSON object");
    auto it = j.find(key);
    if (it == j.end()) throw FormatError(std::string(what) + " lacks the field '" + key + "'");
    return *it;
}

std::string as_string(const Json& j, const char* what) {
    if (!j.is_string()) throw FormatError(std::string(what) + " must be a string");
    return j.get<std::string>();
}

std::vector<std::string> as_string_list(const Json& j, const char* what) {
    if (!j.is_array()) throw FormatError(std::string(what) + " must be an array of strings");
    std::vector<std::string> out;
    for (const auto& e : j) out.push_back(as_string(e, what));
    return out;
}

MixedGraph::Edge as_edge(const Json& j, const char* what) {
    if (!j.is_array() || j.size() != 2) throw FormatError(std::string(what) + " must be a pair of node ids");
    return {as_string(j[0], what), as_string(j[1], what)};
}

FiniteSpace space_from_json(const Json& j, const char* what) {
    if (!j.is_array()) throw FormatError(std::string(what) + " must be an array of [name, domain] pairs");
    std::vector<Variable> vars;
    for (const auto& v : j) {
        if (!v.is_array() || v.size() != 2) throw FormatError(std::string(what) + " entries are [name, domain] pairs");
        vars.push_back(Variable{as_string(v[0], what), as_string_list(v[1], what)});
    }
    try {
        return FiniteSpace(std::move(vars));
    } catch (const InvariantError& e) {
        throw FormatError(std::string(what) + ": " + e.what());
    }
}

Json space_to_json(const FiniteSpace& s) {
    Json out = Json::array();
    for (const auto& v : s.vars()) out.push_back(Json::array({v.name, v.domain}));
    return out;
}

// "X=0,Y=1" -> index of `space`.
std::size_t label_index(const FiniteSpace& space, const std::string& label) {
    Assignment a;
    if (!label.empty()) {
        std::stringstream ss(label);
        std::string part;
        while (std::getline(ss, part, ',')) {
            const auto eq = part.find('=');
            if (eq == std::string::npos) throw FormatError("malformed point label '" + label + "'");
            if (!a.emplace(part.substr(0, eq), part.substr(eq + 1)).second)
                throw FormatError("repeated variable in point label '" + label + "'");
        }
    }
    if (a.size() != space.rank()) throw FormatError("point label '" + label + "' does not name every variable");
    try {
        return space.index(a);
    } catch (const Error&) {
        throw FormatError("point label '" + label + "' does not match the declared space");
    }
}

}  // namespace

double round_sig12(double x) {
    if (!std::isfinite(x) || x == 0.0) return x;
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return std::strtod(buf, nullptr);
}

Json parse_json(const std::string& text, const std::string& origin) {
    try {
        return Json::parse(text);
    } catch (const Json::parse_error& e) {
        const auto [line, col] = line_column(text, e.byte);
        throw FormatError(origin + ": line " + std::to_string(line) + ", column " + std::to_string(col) +
                          ": malformed JSON");
    }
}

Json read_json_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError(path + ": cannot open file");
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_json(buf.str(), path);
}

std::string dump_json(const Json& j) {
    return rounded(j).dump(2);
}

MixedGraph graph_from_json(const Json& j) {
    std::map<NodeId, NodeKind> nodes;
    for (const auto& n : field(j, "nodes", "graph")) {
        const std::string id = as_string(field(n, "id", "graph node"), "node id");
        const NodeKind kind = node_kind_from_string(as_string(field(n, "kind", "graph node"), "node kind"));
        if (!nodes.emplace(id, kind).second) throw FormatError("duplicate node id '" + id + "'");
    }
    std::set<MixedGraph::Edge> directed;
    std::set<MixedGraph::Edge> bidirected;
    if (j.contains("directed")) {
        if (!j["directed"].is_array()) throw FormatError("'directed' must be an array");
        for (const auto& e : j["directed"]) directed.insert(as_edge(e, "directed edge"));
    }
    if (j.contains("bidirected")) {
        if (!j["bidirected"].is_array()) throw FormatError("'bidirected' must be an array");
        for (const auto& e : j["bidirected"]) bidirected.insert(as_edge(e, "bidirected edge"));
    }
    return MixedGraph(std::move(nodes), std::move(directed), std::move(bidirected));
}

Json graph_to_json(const MixedGraph& g) {
    Json nodes = Json::array();
    for (const auto& [id, kind] : g.nodes()) nodes.push_back({{"id", id}, {"kind", to_string(kind)}});
    Json directed = Json::array();
    for (const auto& [t, h] : g.directed()) directed.push_back({t, h});
    Json bidirected = Json::array();
    for (const auto& [a, b] : g.bidirected()) bidirected.push_back({a, b});
    return {{"nodes", nodes}, {"directed", directed}, {"bidirected", bidirected}};
}

FiniteKernel kernel_from_json(const Json& j) {
    FiniteSpace source = space_from_json(field(j, "source", "kernel"), "kernel source");
    FiniteSpace target = space_from_json(field(j, "target", "kernel"), "kernel target");
    const Json& mass = field(j, "mass", "kernel");
    if (!mass.is_object()) throw FormatError("kernel mass must be an object of rows");
    std::vector<Rational> table(source.size() * target.size(), Rational(0));
    for (const auto& [slabel, row] : mass.items()) {
        const std::size_t s = label_index(source, slabel);
        if (!row.is_object()) throw FormatError("kernel row '" + slabel + "' must be an object");
        for (const auto& [tlabel, value] : row.items()) {
            const std::size_t t = label_index(target, tlabel);
            table[s * target.size() + t] = parse_rational(as_string(value, "kernel mass"));
        }
    }
    return FiniteKernel(std::move(source), std::move(target), std::move(table));
}

Json kernel_to_json(const FiniteKernel& k) {
    Json mass = Json::object();
    for (std::size_t s = 0; s < k.source().size(); ++s) {
        Json row = Json::object();
        for (std::size_t t = 0; t < k.target().size(); ++t)
            if (sgn(k.mass(s, t)) != 0) row[k.target().label(t)] = format_rational(k.mass(s, t));
        mass[k.source().label(s)] = row;
    }
    return {{"source", space_to_json(k.source())}, {"target", space_to_json(k.target())}, {"mass", mass}};
}

LiCbn model_from_json(const Json& j) {
    MixedGraph g = graph_from_json(j);
    std::map<NodeId, std::vector<std::string>> spaces;
    const Json& sp = field(j, "spaces", "model");
    if (!sp.is_object()) throw FormatError("model spaces must be an object");
    for (const auto& [v, dom] : sp.items()) spaces[v] = as_string_list(dom, "node domain");
    std::map<NodeId, FiniteKernel> mechanisms;
    const Json& mech = field(j, "mechanisms", "model");
    if (!mech.is_object()) throw FormatError("model mechanisms must be an object");
    for (const auto& [v, k] : mech.items()) mechanisms.emplace(v, kernel_from_json(k));
    return LiCbn(std::move(g), std::move(spaces), std::move(mechanisms));
}

Json model_to_json(const LiCbn& m) {
    Json out = graph_to_json(m.graph());
    Json spaces = Json::object();
    for (const auto& [v, dom] : m.spaces()) spaces[v] = dom;
    Json mechanisms = Json::object();
    for (const auto& [v, k] : m.mechanisms()) mechanisms[v] = kernel_to_json(k);
    out["spaces"] = spaces;
    out["mechanisms"] = mechanisms;
    return out;
}

NodeSet parse_node_list(const std::string& text) {
    NodeSet out;
    std::stringstream ss(text);
    std::string part;
    while (std::getline(ss, part, ',')) {
        const auto b = part.find_first_not_of(" \t");
        if (b == std::string::npos) continue;
        const auto e = part.find_last_not_of(" \t");
        out.insert(part.substr(b, e - b + 1));
    }
    return out;
}

}  // namespace tcid
