#pragma once

#include <stdexcept>
#include <string>
#include <variant>

#include "json.hpp"
#include "ulearn/core.hpp"
#include "ulearn/learn.hpp"
#include "ulearn/sessions.hpp"
#include "ulearn/trees.hpp"

namespace ulearn {

using Json = nlohmann::ordered_json;

// Malformed input (CLI exit code 1).
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Snapshot {vocab: [{name, arity}], size, relations: {name: [[ints]]}}
Json to_json(const Vocabulary& v);
Vocabulary vocabulary_from_json(const Json& j);
Json to_json(const Snapshot& s);
Snapshot snapshot_from_json(const Json& j);

// Descriptor, tagged by "kind":
//   {kind: "unary", predicates: [names], tail: [names true], exceptional: [{type: [names true], count}]}
//   {kind: "order", expr: "<expression>"}
Json to_json(const StructureDescriptor& d);
StructureDescriptor descriptor_from_json(const Json& j);

// Family {base: [descriptor], pattern: {initial: [ints], tail: index | "parity"}}
Json to_json(const Family& f);
Family family_from_json(const Json& j);

// Tree {nodes: [[ints]]}, nodes in sorted order.
Json to_json(const FinTree& t);
FinTree tree_from_json(const Json& j);

// {x_arity, y_arity, matrix: [[{rel, args: ["x0", "y1"], neg}]]} or
// {x_arity, y_arity, types: [codes]}
Json to_json(const Sigma2Sentence& s);
Sigma2Sentence sentence_from_json(const Json& j);

Json to_json(const SessionResult& r);
SessionResult session_from_json(const Json& j);
Json to_json(const Verdict& v);
Json to_json(const CardProfile& p);
Json to_json(const TupleAbstraction& a, const Vocabulary& v);

// A structure file: "*.ord" holds an order expression; JSON holds a
// snapshot (has "size") or a descriptor (has "kind").
using StructureInput = std::variant<Snapshot, StructureDescriptor>;
StructureInput load_structure(const std::string& path);
Json load_json(const std::string& path);

}  // namespace ulearn
