#pragma once

#include "tcid/cbn.hpp"
#include "tcid/graph.hpp"
#include "tcid/kernel.hpp"

#include <json.hpp>

#include <string>

namespace tcid {

using Json = nlohmann::json;

/// Parses JSON text; syntax errors become FormatError carrying "line L, column C".
Json parse_json(const std::string& text, const std::string& origin = "<input>");
Json read_json_file(const std::string& path);

/// Sorted keys, doubles rounded to 12 significant digits, two-space indent.
std::string dump_json(const Json& j);
double round_sig12(double x);

MixedGraph graph_from_json(const Json& j);
Json graph_to_json(const MixedGraph& g);

/// {"source":[["T",["0","1"]]],"target":[...],"mass":{"T=0":{"X=0":"1/3",...}}}.
/// The one-point space has the label ""; absent cells read as zero and zero cells are not written.
FiniteKernel kernel_from_json(const Json& j);
Json kernel_to_json(const FiniteKernel& k);

/// Graph fields plus {"spaces":{"a":["0","1"]},"mechanisms":{"a":<kernel>}}.
LiCbn model_from_json(const Json& j);
Json model_to_json(const LiCbn& m);

/// "a,b" or a JSON-free comma list to a node set; empty text gives the empty set.
NodeSet parse_node_list(const std::string& text);

}  // namespace tcid
