#include "designgap/config.hpp"

#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "designgap/ensembles.hpp"
#include "designgap/gates.hpp"

namespace designgap {

namespace {

using json = nlohmann::json;

// ---- gate expressions -----------------------------------------------------

class GateParser {
 public:
  GateParser(const std::string& text, Index dim) : s_(text), dim_(dim) {}

  CMatrix parse() {
    CMatrix m = product(dim_);
    skip_ws();
    if (pos_ != s_.size()) fail("unexpected '" + std::string(1, s_[pos_]) + "'");
    return m;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw ConfigError("gate expression \"" + s_ + "\" at column " + std::to_string(pos_ + 1) + ": " + what);
  }

  void skip_ws() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_ws();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!accept(c)) fail(std::string("expected '") + c + "'");
  }

  std::string ident() {
    skip_ws();
    const std::size_t start = pos_;
    while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) ++pos_;
    if (start == pos_) fail("expected a gate name");
    return s_.substr(start, pos_ - start);
  }

  double number() {
    skip_ws();
    const char* begin = s_.c_str() + pos_;
    char* end = nullptr;
    const double v = std::strtod(begin, &end);
    if (end == begin) fail("expected a number");
    pos_ += static_cast<std::size_t>(end - begin);
    return v;
  }

  long long integer() {
    const double v = number();
    if (v != std::floor(v) || v < 0) fail("expected a nonnegative integer");
    return static_cast<long long>(v);
  }

  // `expected` is the dimension the product must have, or 0 when unknown.
  CMatrix product(Index expected) {
    CMatrix m = atom(expected);
    while (accept('*')) {
      const CMatrix rhs = atom(m.rows());
      if (rhs.rows() != m.cols()) fail("dimension mismatch in product");
      m = (m * rhs).eval();
    }
    return m;
  }

  CMatrix atom(Index expected) {
    if (accept('(')) {
      CMatrix m = product(expected);
      expect(')');
      return m;
    }
    const std::string name = ident();
    if (name == "phase") {
      expect('(');
      const double theta = number();
      expect(')');
      return gates::phase(theta);
    }
    if (name == "id") {
      expect('(');
      const long long q = integer();
      expect(')');
      if (q < 1) fail("id(q) needs q >= 1");
      return gates::I(static_cast<Index>(q));
    }
    if (name == "haar") {
      expect('(');
      const auto seed = static_cast<std::uint64_t>(integer());
      Index q = expected;
      if (accept(',')) q = static_cast<Index>(integer());
      expect(')');
      if (q < 1) fail("haar(seed) needs an explicit dimension here: haar(seed, q)");
      return haar_sample(q, seed);
    }
    if (name == "kron") {
      expect('(');
      CMatrix m = product(0);
      while (accept(',')) m = kron(m, product(0));
      expect(')');
      return m;
    }
    if (auto g = gates::by_name(name)) return *g;
    fail("unknown gate '" + name + "'");
  }

  std::string s_;
  Index dim_;
  std::size_t pos_ = 0;
};

// ---- JSON helpers ---------------------------------------------------------

[[noreturn]] void field_error(const std::string& path, const std::string& what) {
  throw ConfigError("field " + path + ": " + what);
}

const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys = {
      "n_sites", "local_dim", "family",   "edges",   "layers",      "xi",     "repetitions", "patch",
      "locals",  "gate_set",  "t",        "eps",     "seeds",       "seed",   "budgets",     "c0",
      "checks",  "sweep",     "frame",    "max_depth", "convolution_powers", "comment"};
  return keys;
}

int get_int(const json& j, const std::string& path) {
  if (!j.is_number_integer()) field_error(path, "expected an integer");
  return j.get<int>();
}

double get_number(const json& j, const std::string& path) {
  if (!j.is_number()) field_error(path, "expected a number");
  return j.get<double>();
}

std::vector<int> get_int_list(const json& j, const std::string& path) {
  if (j.is_number_integer()) return {j.get<int>()};
  if (!j.is_array()) field_error(path, "expected an integer or a list of integers");
  std::vector<int> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(get_int(j[i], path + "/" + std::to_string(i)));
  return out;
}

Pair get_pair(const json& j, const std::string& path) {
  if (!j.is_array() || j.size() != 2) field_error(path, "expected a pair [a, b]");
  return Pair{get_int(j[0], path + "/0"), get_int(j[1], path + "/1")};
}

std::vector<Pair> get_pairs(const json& j, const std::string& path) {
  if (!j.is_array()) field_error(path, "expected a list of pairs");
  std::vector<Pair> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(get_pair(j[i], path + "/" + std::to_string(i)));
  return out;
}

CMatrix literal_matrix(const json& j, const std::string& path) {
  const auto rows = static_cast<Index>(j.size());
  if (rows == 0 || !j[0].is_array()) field_error(path, "expected a gate expression or a matrix (list of rows)");
  const auto cols = static_cast<Index>(j[0].size());
  CMatrix m(rows, cols);
  for (Index r = 0; r < rows; ++r) {
    const json& row = j[static_cast<std::size_t>(r)];
    const std::string rp = path + "/" + std::to_string(r);
    if (!row.is_array() || static_cast<Index>(row.size()) != cols) field_error(rp, "ragged matrix row");
    for (Index c = 0; c < cols; ++c) {
      const json& e = row[static_cast<std::size_t>(c)];
      const std::string ep = rp + "/" + std::to_string(c);
      if (e.is_number()) {
        m(r, c) = cplx(e.get<double>(), 0.0);
      } else if (e.is_array() && e.size() == 2 && e[0].is_number() && e[1].is_number()) {
        m(r, c) = cplx(e[0].get<double>(), e[1].get<double>());
      } else {
        field_error(ep, "matrix entries are numbers or [re, im]");
      }
    }
  }
  return m;
}

GateSetSpec parse_gate_set(const json& j, const std::string& path) {
  GateSetSpec g;
  const json* list = &j;
  if (j.is_object()) {
    for (const auto& [k, v] : j.items()) {
      if (k != "gates" && k != "probabilities" && k != "validate_members" && k != "dim") {
        field_error(path + "/" + k, "unknown key");
      }
    }
    if (!j.contains("gates")) field_error(path, "missing \"gates\"");
    list = &j["gates"];
    if (j.contains("probabilities")) {
      const json& p = j["probabilities"];
      if (!p.is_array()) field_error(path + "/probabilities", "expected a list of numbers");
      for (std::size_t i = 0; i < p.size(); ++i) {
        g.probabilities.push_back(get_number(p[i], path + "/probabilities/" + std::to_string(i)));
      }
    }
    if (j.contains("dim")) {
      g.dim = get_int(j["dim"], path + "/dim");
      if (g.dim < 2) field_error(path + "/dim", "must be >= 2");
    }
    if (j.contains("validate_members")) {
      if (!j["validate_members"].is_boolean()) field_error(path + "/validate_members", "expected true or false");
      g.validate_members = j["validate_members"].get<bool>();
    }
  }
  const std::string gp = j.is_object() ? path + "/gates" : path;
  if (!list->is_array() || list->empty()) field_error(gp, "expected a nonempty list of gates");
  for (std::size_t i = 0; i < list->size(); ++i) {
    const json& e = (*list)[i];
    const std::string ep = gp + "/" + std::to_string(i);
    if (e.is_string()) {
      g.gates.push_back({e.get<std::string>(), std::nullopt});
    } else if (e.is_array()) {
      g.gates.push_back({"", literal_matrix(e, ep)});
    } else {
      field_error(ep, "expected a gate expression or a matrix");
    }
  }
  if (!g.probabilities.empty() && g.probabilities.size() != g.gates.size()) {
    field_error(path + "/probabilities", "needs one probability per gate");
  }
  return g;
}

LocalsSpec parse_locals(const json& j, const std::string& path) {
  LocalsSpec l;
  if (j.is_string()) {
    if (j.get<std::string>() != "haar") field_error(path, "expected \"haar\", a gate set or {\"random\": ...}");
    return l;
  }
  if (j.is_object() && j.contains("random")) {
    l.kind = LocalsSpec::Kind::random;
    const json& r = j["random"];
    if (r.is_object() && r.contains("members")) l.random_members = get_int(r["members"], path + "/random/members");
    if (l.random_members < 1) field_error(path + "/random/members", "must be >= 1");
    return l;
  }
  l.kind = LocalsSpec::Kind::gates;
  l.gate_set = parse_gate_set(j, path);
  return l;
}

ArchitectureSpec parse_architecture(const json& j, const std::string& path, bool top_level) {
  ArchitectureSpec a;
  if (!j.is_object()) field_error(path.empty() ? "/" : path, "expected an object");
  if (!top_level) {
    for (const auto& [k, v] : j.items()) {
      if (k != "n_sites" && k != "local_dim" && k != "family" && k != "layers" && k != "locals") {
        field_error(path + "/" + k, "unknown key in patch template");
      }
    }
  }
  if (j.contains("n_sites")) a.n_sites = get_int(j["n_sites"], path + "/n_sites");
  if (j.contains("local_dim")) a.local_dim = get_int(j["local_dim"], path + "/local_dim");
  if (a.local_dim < 2) field_error(path + "/local_dim", "local dimension must be >= 2");
  if (a.n_sites < 2) field_error(path + "/n_sites", "need at least 2 sites");
  if (j.contains("family")) {
    if (!j["family"].is_string()) field_error(path + "/family", "expected a string");
    a.family = j["family"].get<std::string>();
  }
  static const std::set<std::string> families = {"local1d", "parallel1d", "alltoall", "graph",
                                                  "brickwork", "fixed", "patchwork"};
  if (!families.count(a.family)) field_error(path + "/family", "unknown family '" + a.family + "'");
  if (a.family == "graph") {
    if (!j.contains("edges")) field_error(path + "/edges", "graph family needs an edge list");
    a.edges = get_pairs(j["edges"], path + "/edges");
  }
  if (a.family == "fixed") {
    if (!j.contains("layers") || !j["layers"].is_array()) field_error(path + "/layers", "fixed family needs layers");
    for (std::size_t i = 0; i < j["layers"].size(); ++i) {
      a.layers.push_back(get_pairs(j["layers"][i], path + "/layers/" + std::to_string(i)));
    }
  }
  if (a.family == "patchwork") {
    if (!top_level) field_error(path + "/family", "patch templates cannot be patchworks");
    if (j.contains("xi")) a.xi = get_int(j["xi"], path + "/xi");
    if (j.contains("repetitions")) a.repetitions = get_int(j["repetitions"], path + "/repetitions");
    if (a.xi < 1) field_error(path + "/xi", "must be >= 1");
    if (a.repetitions < 0) field_error(path + "/repetitions", "must be >= 0");
    if (a.n_sites % (2 * a.xi) != 0) field_error(path + "/xi", "N must be a multiple of 2*xi");
    json tmpl = j.contains("patch") ? j["patch"] : json::object();
    if (!tmpl.is_object()) field_error(path + "/patch", "expected an object");
    if (!tmpl.contains("n_sites")) tmpl["n_sites"] = 2 * a.xi;
    if (!tmpl.contains("local_dim")) tmpl["local_dim"] = a.local_dim;
    if (!tmpl.contains("family")) tmpl["family"] = "brickwork";
    if (!tmpl.contains("locals") && j.contains("locals")) tmpl["locals"] = j["locals"];
    a.patch = std::make_shared<ArchitectureSpec>(parse_architecture(tmpl, path + "/patch", false));
    if (a.patch->family != "fixed" && a.patch->family != "brickwork") {
      field_error(path + "/patch/family", "patch template must be fixed or brickwork");
    }
    if (a.patch->n_sites != 2 * a.xi) field_error(path + "/patch/n_sites", "must equal 2*xi");
    if (a.patch->local_dim != a.local_dim) field_error(path + "/patch/local_dim", "must equal local_dim");
  }
  if (j.contains("locals")) a.locals = parse_locals(j["locals"], path + "/locals");
  return a;
}

std::string line_column(const std::string& text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

}  // namespace

CMatrix parse_gate(const std::string& expr, Index dim) { return GateParser(expr, dim).parse(); }

GateEnsemble build_gate_set(const GateSetSpec& spec, Index dim) {
  std::vector<GateMember> members;
  const double uniform = 1.0 / static_cast<double>(spec.gates.size());
  for (std::size_t i = 0; i < spec.gates.size(); ++i) {
    const GateSpec& g = spec.gates[i];
    CMatrix u = g.matrix ? *g.matrix : parse_gate(g.expr, dim);
    if (u.rows() != dim || u.cols() != dim) {
      throw ConfigError("gate " + std::to_string(i) + " (" + (g.matrix ? "literal" : g.expr) + ") is " +
                        std::to_string(u.rows()) + "x" + std::to_string(u.cols()) + ", expected " +
                        std::to_string(dim) + "x" + std::to_string(dim));
    }
    members.push_back({spec.probabilities.empty() ? uniform : spec.probabilities[i], std::move(u)});
  }
  return spec.validate_members ? GateEnsemble(std::move(members)) : GateEnsemble::unchecked(std::move(members));
}

LocalsProvider build_locals(const LocalsSpec& spec, int d, std::uint64_t seed) {
  const Index q = static_cast<Index>(d) * d;
  switch (spec.kind) {
    case LocalsSpec::Kind::haar:
      return shared_locals(LocalEnsemble::haar());
    case LocalsSpec::Kind::gates:
      return shared_locals(LocalEnsemble::discrete(build_gate_set(spec.gate_set, q)));
    case LocalsSpec::Kind::random:
      break;
  }
  const int members = spec.random_members;
  return [seed, members, q](std::size_t index, const Pair& p) {
    const std::uint64_t s =
        derive_seed(seed, index * 131 + static_cast<std::uint64_t>(p.a) * 17 + static_cast<std::uint64_t>(p.b));
    return LocalEnsemble::discrete(ensembles::random(q, members, s));
  };
}

BuiltArchitecture build_architecture(const ArchitectureSpec& spec, std::uint64_t seed) {
  BuiltArchitecture b;
  b.family = spec.family;
  b.n_sites = spec.n_sites;
  b.local_dim = spec.local_dim;
  const int n = spec.n_sites, d = spec.local_dim;
  if (spec.family == "patchwork") {
    b.fixed = build_architecture(*spec.patch, seed).fixed;
    b.xi = spec.xi;
    b.repetitions = spec.repetitions;
    return b;
  }
  const LocalsProvider locals = build_locals(spec.locals, d, seed);
  if (spec.family == "local1d") b.layer = make_1d_local(n, d, locals);
  if (spec.family == "parallel1d") b.layer = make_1d_parallel(n, d, locals);
  if (spec.family == "alltoall") b.layer = make_all_to_all(n, d, locals);
  if (spec.family == "graph") b.layer = make_graph(n, d, spec.edges, locals);
  if (spec.family == "brickwork") b.fixed = make_brickwork_block(n, d, locals);
  if (spec.family == "fixed") b.fixed = make_fixed(n, d, spec.layers, locals);
  return b;
}

RunConfig parse_config(const std::string& text, const std::string& source) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    const std::string what = e.what();
    const auto colon = what.rfind(": ");
    throw ConfigError(source + ": " + line_column(text, e.byte == 0 ? 0 : e.byte - 1) + ": " +
                      (colon == std::string::npos ? what : what.substr(colon + 2)));
  }
  try {
    if (!j.is_object()) field_error("/", "the configuration must be a JSON object");
    for (const auto& [k, v] : j.items()) {
      if (!known_keys().count(k)) field_error("/" + k, "unknown key");
    }
    RunConfig c;
    c.arch = parse_architecture(j, "", true);
    if (j.contains("gate_set")) c.gate_set = parse_gate_set(j["gate_set"], "/gate_set");
    if (j.contains("t")) c.t_values = get_int_list(j["t"], "/t");
    for (int t : c.t_values) {
      if (t < 1) field_error("/t", "t must be >= 1");
    }
    if (j.contains("eps")) c.eps = get_number(j["eps"], "/eps");
    if (!(c.eps > 0.0)) field_error("/eps", "eps must be positive");
    if (j.contains("seed") && j.contains("seeds")) field_error("/seed", "give either seed or seeds");
    if (j.contains("seed") || j.contains("seeds")) {
      const std::string key = j.contains("seed") ? "seed" : "seeds";
      c.seeds.clear();
      for (int s : get_int_list(j[key], "/" + key)) {
        if (s < 0) field_error("/" + key, "seeds must be nonnegative");
        c.seeds.push_back(static_cast<std::uint64_t>(s));
      }
    }
    if (j.contains("budgets")) {
      const json& b = j["budgets"];
      if (!b.is_object()) field_error("/budgets", "expected an object");
      for (const auto& [k, v] : b.items()) {
        if (k == "max_dim") {
          const double md = get_number(v, "/budgets/max_dim");
          if (md < 1) field_error("/budgets/max_dim", "must be positive");
          if (md > static_cast<double>(dense_max_dim())) {
            field_error("/budgets/max_dim", "exceeds the global guardrail " + std::to_string(dense_max_dim()));
          }
          c.max_dim = static_cast<std::size_t>(md);
        } else if (k == "m_max") {
          c.m_max = get_int(v, "/budgets/m_max");
          if (c.m_max < 0) field_error("/budgets/m_max", "must be >= 0");
        } else {
          field_error("/budgets/" + k, "unknown key");
        }
      }
    } else {
      c.max_dim = dense_max_dim();
    }
    if (j.contains("c0")) c.c0 = get_number(j["c0"], "/c0");
    if (j.contains("max_depth")) c.max_depth = get_int(j["max_depth"], "/max_depth");
    if (j.contains("convolution_powers")) c.convolution_powers = get_int_list(j["convolution_powers"], "/convolution_powers");
    if (j.contains("checks")) {
      const json& ch = j["checks"];
      if (!ch.is_array()) field_error("/checks", "expected a list of check names");
      for (std::size_t i = 0; i < ch.size(); ++i) {
        if (!ch[i].is_string()) field_error("/checks/" + std::to_string(i), "expected a string");
        c.checks.push_back(ch[i].get<std::string>());
      }
    }
    if (j.contains("sweep")) {
      const json& s = j["sweep"];
      if (!s.is_object()) field_error("/sweep", "expected an object");
      for (const auto& [k, v] : s.items()) {
        if (k == "parameter") {
          if (!v.is_string() || (v != "t" && v != "n")) field_error("/sweep/parameter", "expected \"t\" or \"n\"");
          c.sweep.parameter = v.get<std::string>();
        } else if (k == "values") {
          c.sweep.values = get_int_list(v, "/sweep/values");
        } else if (k == "range") {
          const auto r = get_int_list(v, "/sweep/range");
          if (r.size() != 2) field_error("/sweep/range", "expected [first, last]");
          for (int x = r[0]; x <= r[1]; ++x) c.sweep.values.push_back(x);
        } else {
          field_error("/sweep/" + k, "unknown key");
        }
      }
    }
    if (j.contains("frame")) {
      const json& f = j["frame"];
      if (!f.is_object()) field_error("/frame", "expected an object");
      for (const auto& [k, v] : f.items()) {
        if (k == "depth") {
          c.frame.depth = get_int(v, "/frame/depth");
        } else if (k == "samples") {
          c.frame.samples = get_int(v, "/frame/samples");
        } else {
          field_error("/frame/" + k, "unknown key");
        }
      }
      if (c.frame.depth < 0) field_error("/frame/depth", "must be >= 0");
      if (c.frame.samples < 2) field_error("/frame/samples", "must be >= 2");
    }
    return c;
  } catch (const ConfigError& e) {
    throw ConfigError(source + ": " + e.what());
  }
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path);
}

}  // namespace designgap
