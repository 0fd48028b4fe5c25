#include "ulearn/json_io.hpp"

#include <fstream>
#include <sstream>

namespace ulearn {

namespace {

const Json& field(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw FormatError(std::string("missing field '") + key + "'");
  return j.at(key);
}

template <class T>
T get_as(const Json& j, const char* what) {
  try {
    return j.get<T>();
  } catch (const nlohmann::json::exception&) {
    throw FormatError(std::string("bad value for '") + what + "'");
  }
}

std::vector<std::string> predicate_names(const Vocabulary& v) {
  std::vector<std::string> out;
  for (const auto& r : v.relations()) out.push_back(r.name);
  return out;
}

Json type_to_names(UnaryType t, const Vocabulary& v) {
  Json out = Json::array();
  for (std::size_t r = 0; r < v.size(); ++r)
    if (t >> r & 1u) out.push_back(v[r].name);
  return out;
}

UnaryType type_from_names(const Json& j, const Vocabulary& v) {
  if (!j.is_array()) throw FormatError("a 1-type is a list of predicate names");
  UnaryType t = 0;
  for (const auto& n : j) {
    auto name = get_as<std::string>(n, "type");
    try {
      t |= UnaryType{1} << v.index_of(name);
    } catch (const std::exception&) {
      throw FormatError("unknown predicate '" + name + "'");
    }
  }
  return t;
}

std::string var_name(std::uint32_t v, std::uint32_t x_arity) {
  return v < x_arity ? "x" + std::to_string(v) : "y" + std::to_string(v - x_arity);
}

std::uint32_t parse_var(const std::string& s, std::uint32_t x_arity, std::uint32_t y_arity) {
  if (s.size() < 2 || (s[0] != 'x' && s[0] != 'y')) throw FormatError("bad variable '" + s + "'");
  std::uint32_t k = 0;
  for (std::size_t i = 1; i < s.size(); ++i) {
    if (s[i] < '0' || s[i] > '9') throw FormatError("bad variable '" + s + "'");
    k = k * 10 + static_cast<std::uint32_t>(s[i] - '0');
  }
  if (s[0] == 'x') {
    if (k >= x_arity) throw FormatError("variable out of range '" + s + "'");
    return k;
  }
  if (k >= y_arity) throw FormatError("variable out of range '" + s + "'");
  return x_arity + k;
}

}  // namespace

Json to_json(const Vocabulary& v) {
  Json out = Json::array();
  for (const auto& r : v.relations()) out.push_back(Json{{"name", r.name}, {"arity", r.arity}});
  return out;
}

Vocabulary vocabulary_from_json(const Json& j) {
  if (!j.is_array()) throw FormatError("vocab must be a list");
  std::vector<RelationSymbol> rels;
  for (const auto& r : j) {
    if (r.is_string()) {
      rels.push_back({r.get<std::string>(), 1});
      continue;
    }
    rels.push_back({get_as<std::string>(field(r, "name"), "name"), get_as<std::uint32_t>(field(r, "arity"), "arity")});
  }
  try {
    return Vocabulary(std::move(rels));
  } catch (const std::invalid_argument& e) {
    throw FormatError(e.what());
  }
}

Json to_json(const Snapshot& s) {
  Json rels = Json::object();
  for (std::size_t r = 0; r < s.vocab().size(); ++r) {
    Json ts = Json::array();
    for (auto t : s.relation(r)) ts.push_back(Tuple(t.begin(), t.end()));
    rels[s.vocab()[r].name] = ts;
  }
  return Json{{"vocab", to_json(s.vocab())}, {"size", s.size()}, {"relations", rels}};
}

Snapshot snapshot_from_json(const Json& j) {
  Vocabulary v = vocabulary_from_json(field(j, "vocab"));
  auto size = get_as<std::uint32_t>(field(j, "size"), "size");
  std::vector<std::vector<Tuple>> rels(v.size());
  const Json& rj = field(j, "relations");
  if (!rj.is_object()) throw FormatError("relations must be an object");
  for (auto it = rj.begin(); it != rj.end(); ++it) {
    std::size_t r;
    try {
      r = v.index_of(it.key());
    } catch (const std::exception&) {
      throw FormatError("relation '" + it.key() + "' not in the vocabulary");
    }
    rels[r] = get_as<std::vector<Tuple>>(it.value(), "relations");
  }
  try {
    return Snapshot(std::move(v), size, std::move(rels));
  } catch (const std::invalid_argument& e) {
    throw FormatError(e.what());
  }
}

Json to_json(const StructureDescriptor& d) {
  if (d.is_order()) return Json{{"kind", "order"}, {"expr", to_string(d.as_order().expr)}};
  const auto& u = d.as_unary();
  Json ex = Json::array();
  for (auto [t, c] : u.exceptional) ex.push_back(Json{{"type", type_to_names(t, u.vocab)}, {"count", c}});
  return Json{{"kind", "unary"},
              {"predicates", predicate_names(u.vocab)},
              {"tail", type_to_names(u.tail, u.vocab)},
              {"exceptional", ex}};
}

StructureDescriptor descriptor_from_json(const Json& j) {
  auto kind = get_as<std::string>(field(j, "kind"), "kind");
  try {
    if (kind == "order") return StructureDescriptor::order(get_as<std::string>(field(j, "expr"), "expr"));
    if (kind == "unary") {
      UnaryTail u;
      u.vocab = unary_vocabulary(get_as<std::vector<std::string>>(field(j, "predicates"), "predicates"));
      u.tail = type_from_names(field(j, "tail"), u.vocab);
      if (j.contains("exceptional")) {
        for (const auto& e : j.at("exceptional"))
          u.exceptional[type_from_names(field(e, "type"), u.vocab)] += get_as<std::uint64_t>(field(e, "count"), "count");
      }
      return StructureDescriptor::unary(std::move(u));
    }
  } catch (const ParseError& e) {
    throw FormatError(std::string("expression: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw FormatError(e.what());
  }
  throw FormatError("unknown descriptor kind '" + kind + "'");
}

Json to_json(const Family& f) {
  Json base = Json::array();
  for (const auto& d : f.base()) base.push_back(to_json(d));
  Json pattern{{"initial", f.pattern().initial}};
  if (f.pattern().tail_kind == FamilyPattern::Tail::Parity)
    pattern["tail"] = "parity";
  else
    pattern["tail"] = f.pattern().tail_index;
  return Json{{"base", base}, {"pattern", pattern}};
}

Family family_from_json(const Json& j) {
  std::vector<StructureDescriptor> base;
  const Json& bj = field(j, "base");
  if (!bj.is_array()) throw FormatError("base must be a list");
  for (const auto& d : bj) base.push_back(descriptor_from_json(d));
  if (!j.contains("pattern")) {
    try {
      return Family::identity(std::move(base));
    } catch (const std::invalid_argument& e) {
      throw FormatError(e.what());
    }
  }
  const Json& pj = j.at("pattern");
  FamilyPattern p;
  if (pj.contains("initial")) p.initial = get_as<std::vector<std::size_t>>(pj.at("initial"), "initial");
  const Json& tail = field(pj, "tail");
  if (tail.is_string()) {
    if (tail.get<std::string>() != "parity") throw FormatError("tail must be an index or \"parity\"");
    p.tail_kind = FamilyPattern::Tail::Parity;
  } else {
    p.tail_index = get_as<std::size_t>(tail, "tail");
  }
  try {
    return Family(std::move(base), std::move(p));
  } catch (const std::invalid_argument& e) {
    throw FormatError(e.what());
  }
}

Json to_json(const FinTree& t) {
  Json nodes = Json::array();
  for (const auto& s : t.nodes()) nodes.push_back(s);
  return Json{{"nodes", nodes}};
}

FinTree tree_from_json(const Json& j) {
  auto nodes = get_as<std::vector<Seq>>(field(j, "nodes"), "nodes");
  try {
    return FinTree(std::set<Seq>(nodes.begin(), nodes.end()));
  } catch (const std::invalid_argument& e) {
    throw FormatError(e.what());
  }
}

Json to_json(const Sigma2Sentence& s) {
  Json out{{"x_arity", s.x_arity}, {"y_arity", s.y_arity}};
  if (s.types) {
    out["types"] = *s.types;
    return out;
  }
  Json matrix = Json::array();
  for (const auto& c : s.clauses) {
    Json cj = Json::array();
    for (const auto& lit : c) {
      Json args = Json::array();
      for (auto a : lit.args) args.push_back(var_name(a, s.x_arity));
      cj.push_back(Json{{"rel", lit.rel}, {"args", args}, {"neg", lit.negated}});
    }
    matrix.push_back(cj);
  }
  out["matrix"] = matrix;
  return out;
}

Sigma2Sentence sentence_from_json(const Json& j) {
  Sigma2Sentence s;
  s.x_arity = get_as<std::uint32_t>(field(j, "x_arity"), "x_arity");
  s.y_arity = get_as<std::uint32_t>(field(j, "y_arity"), "y_arity");
  if (j.contains("types")) {
    auto types = get_as<std::vector<std::uint64_t>>(j.at("types"), "types");
    std::sort(types.begin(), types.end());
    types.erase(std::unique(types.begin(), types.end()), types.end());
    s.types = std::move(types);
    return s;
  }
  const Json& m = field(j, "matrix");
  if (!m.is_array()) throw FormatError("matrix must be a list of clauses");
  for (const auto& cj : m) {
    if (!cj.is_array()) throw FormatError("a clause is a list of literals");
    Clause c;
    for (const auto& lj : cj) {
      Literal lit;
      lit.rel = get_as<std::string>(field(lj, "rel"), "rel");
      for (const auto& a : field(lj, "args")) lit.args.push_back(parse_var(get_as<std::string>(a, "args"), s.x_arity, s.y_arity));
      if (lj.contains("neg")) lit.negated = get_as<bool>(lj.at("neg"), "neg");
      c.push_back(std::move(lit));
    }
    s.clauses.push_back(std::move(c));
  }
  return s;
}

Json to_json(const SessionResult& r) {
  Json out{{"trace", r.trace}};
  out["stabilized_at"] = r.stabilized_at ? Json(*r.stabilized_at) : Json(nullptr);
  out["final"] = r.final;
  out["horizon"] = r.horizon;
  out["family_ref"] = r.family_ref;
  out["presentation_ref"] = r.presentation_ref;
  return out;
}

SessionResult session_from_json(const Json& j) {
  SessionResult r;
  r.trace = get_as<std::vector<std::uint64_t>>(field(j, "trace"), "trace");
  const Json& st = field(j, "stabilized_at");
  if (!st.is_null()) r.stabilized_at = get_as<std::uint64_t>(st, "stabilized_at");
  r.final = get_as<std::uint64_t>(field(j, "final"), "final");
  r.horizon = get_as<std::uint64_t>(field(j, "horizon"), "horizon");
  r.family_ref = get_as<std::string>(field(j, "family_ref"), "family_ref");
  r.presentation_ref = get_as<std::string>(field(j, "presentation_ref"), "presentation_ref");
  return r;
}

Json to_json(const Verdict& v) {
  Json out{{"outcome", v.outcome == Verdict::Outcome::RefutedAtHorizon ? "RefutedAtHorizon" : "NoRefutationFound"}};
  if (v.evidence) {
    const auto& e = *v.evidence;
    out["evidence"] = Json{{"swapped_family", to_json(e.swapped)},
                           {"n", e.n},
                           {"seed", e.seed},
                           {"rerun_stabilized_at", e.rerun_stabilized_at},
                           {"failing_segment", e.failing_segment}};
  } else {
    out["evidence"] = nullptr;
  }
  out["diagnostics"] = v.diagnostics;
  return out;
}

Json to_json(const CardProfile& p) {
  Json out = Json::array();
  for (const auto& c : p.cards) out.push_back(c.is_infinite() ? Json("inf") : Json(c.value()));
  return out;
}

Json to_json(const TupleAbstraction& a, const Vocabulary& v) {
  if (std::holds_alternative<CardProfile>(a)) return Json{{"profile", to_json(std::get<CardProfile>(a))}};
  Json types = Json::array();
  for (auto t : std::get<std::vector<UnaryType>>(a)) types.push_back(type_to_names(t, v));
  return Json{{"types", types}};
}

Json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open '" + path + "'");
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw FormatError("'" + path + "': " + e.what());
  }
}

StructureInput load_structure(const std::string& path) {
  if (path.size() >= 4 && path.compare(path.size() - 4, 4, ".ord") == 0) {
    std::ifstream in(path);
    if (!in) throw FormatError("cannot open '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    std::string text = ss.str();
    while (!text.empty() && (text.back() == '\n' || text.back() == '\r' || text.back() == ' ')) text.pop_back();
    try {
      return StructureDescriptor::order(text);
    } catch (const ParseError& e) {
      throw FormatError("'" + path + "': " + e.what());
    } catch (const std::invalid_argument& e) {
      throw FormatError("'" + path + "': " + e.what());
    }
  }
  Json j = load_json(path);
  if (j.contains("kind")) return descriptor_from_json(j);
  return snapshot_from_json(j);
}

}  // namespace ulearn
