#include "vspace/io.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <unordered_map>

#include "json.hpp"
#include "vspace/errors.hpp"

namespace vs::io {

using nlohmann::json;

namespace {

std::string position_text(const std::string& text, std::size_t byte) {
  const std::size_t end = std::min(byte, text.size());
  std::size_t line = 1;
  std::size_t column = 1;
  for (std::size_t i = 0; i < end; ++i) {
    if (text[i] == '\n') {
      ++line;
      column = 1;
    } else {
      ++column;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(column);
}

// ---- JSON schema helpers ----

const json& field(const json& obj, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end()) throw ParseError(std::string("missing key \"") + key + "\"");
  return *it;
}

std::string name_of(const json& v, const char* what) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_integer()) return std::to_string(v.get<std::int64_t>());
  throw ParseError(std::string(what) + " must be strings");
}

// Names used in comma-joined subset keys may not contain commas.
std::vector<std::string> name_list(const json& v, const char* what, bool key_safe = true) {
  if (!v.is_array()) throw ParseError(std::string("\"") + what + "\" must be an array");
  std::vector<std::string> out;
  std::set<std::string> seen;
  for (const auto& item : v) {
    std::string name = name_of(item, what);
    if (name.empty() || (key_safe && name.find(',') != std::string::npos)) {
      throw ParseError(std::string("invalid name '") + name + "' in \"" + what + "\"");
    }
    if (!seen.insert(name).second) throw ParseError("duplicate name '" + name + "'");
    out.push_back(std::move(name));
  }
  return out;
}

class NameIndex {
 public:
  explicit NameIndex(const std::vector<std::string>& names) {
    for (std::size_t i = 0; i < names.size(); ++i) index_[names[i]] = i;
  }

  std::size_t at(const std::string& name) const {
    auto it = index_.find(name);
    if (it == index_.end()) throw ParseError("unknown name '" + name + "'");
    return it->second;
  }

  /// Parses a comma-joined subset key.
  Mask key_mask(const std::string& key) const {
    Mask m = 0;
    if (key.empty()) return m;
    std::size_t start = 0;
    while (true) {
      const std::size_t comma = key.find(',', start);
      const std::string part = key.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
      const Mask bit = Mask{1} << at(part);
      if (m & bit) throw ParseError("name '" + part + "' repeated in key '" + key + "'");
      m |= bit;
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    return m;
  }

  /// Like key_mask and list_mask, for ground sets of any size.
  ConstraintSet key_set(const std::string& key, std::size_t n) const {
    ConstraintSet G(n);
    if (key.empty()) return G;
    std::size_t start = 0;
    while (true) {
      const std::size_t comma = key.find(',', start);
      const std::string part = key.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
      const std::size_t h = at(part);
      if (G.contains(h)) throw ParseError("name '" + part + "' repeated in key '" + key + "'");
      G.insert(h);
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    return G;
  }

  ConstraintSet list_set(const json& v, std::size_t n) const {
    if (!v.is_array()) throw ParseError("expected an array of names");
    ConstraintSet G(n);
    for (const auto& item : v) {
      const std::size_t h = at(name_of(item, "set members"));
      if (G.contains(h)) throw ParseError("repeated member in a set");
      G.insert(h);
    }
    return G;
  }

  Mask list_mask(const json& v) const {
    if (!v.is_array()) throw ParseError("expected an array of names");
    Mask m = 0;
    for (const auto& item : v) {
      const Mask bit = Mask{1} << at(name_of(item, "set members"));
      if (m & bit) throw ParseError("repeated member in a set");
      m |= bit;
    }
    return m;
  }

 private:
  std::unordered_map<std::string, std::size_t> index_;
};

void require_keys(const json& obj, std::initializer_list<const char*> allowed) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (std::none_of(allowed.begin(), allowed.end(), [&](const char* k) { return it.key() == k; })) {
      throw ParseError("unexpected key \"" + it.key() + "\"");
    }
  }
}

std::size_t checked_size(const std::vector<std::string>& names) {
  if (names.size() > ExplicitViolatorSpace::kMaxSize) throw SizeGuard("tables are limited to 24 constraints");
  return names.size();
}

// Reads an object keyed by every subset of the ground set.
template <class Fn>
void for_each_subset_entry(const json& obj, const std::vector<std::string>& names, Fn&& fn) {
  const NameIndex idx(names);
  const std::size_t n = names.size();
  if (!obj.is_object()) throw ParseError("subset table must be an object");
  std::vector<char> seen(std::size_t{1} << n, 0);
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    const Mask G = idx.key_mask(it.key());
    if (seen[G]) throw ParseError("subset key '" + it.key() + "' given twice");
    seen[G] = 1;
    fn(G, it.value());
  }
  for (std::size_t g = 0; g < seen.size(); ++g) {
    if (!seen[g]) {
      throw ParseError("missing subset key '" + subset_key(names, static_cast<Mask>(g)) + "'");
    }
  }
}

ExplicitViolatorSpace parse_explicit(const json& obj) {
  require_keys(obj, {"names", "violators"});
  auto names = name_list(field(obj, "names"), "names");
  const std::size_t n = checked_size(names);
  const NameIndex idx(names);
  std::vector<Mask> table(std::size_t{1} << n, 0);
  for_each_subset_entry(field(obj, "violators"), names, [&](Mask G, const json& v) { table[G] = idx.list_mask(v); });
  return ExplicitViolatorSpace(std::move(table), std::move(names));
}

AbstractLpTable parse_abstract(const json& obj) {
  require_keys(obj, {"names", "order", "values"});
  AbstractLpTable t;
  t.names = name_list(field(obj, "names"), "names");
  const std::size_t n = checked_size(t.names);
  const json& order = field(obj, "order");
  if (!order.is_array()) throw ParseError("\"order\" must be an array");
  std::unordered_map<std::string, AbstractLpTable::Value> rank;
  for (const auto& item : order) {
    std::string token = name_of(item, "order tokens");
    if (token == AbstractLpTable::kInfinityToken) throw ParseError("\"+inf\" is reserved and may not appear in \"order\"");
    if (!rank.emplace(token, static_cast<AbstractLpTable::Value>(t.order.size())).second) {
      throw ParseError("duplicate order token '" + token + "'");
    }
    t.order.push_back(std::move(token));
  }
  t.values.assign(std::size_t{1} << n, 0);
  for_each_subset_entry(field(obj, "values"), t.names, [&](Mask G, const json& v) {
    const std::string token = name_of(v, "values");
    if (token == AbstractLpTable::kInfinityToken) {
      t.values[G] = AbstractLpTable::kInfinity;
      return;
    }
    auto it = rank.find(token);
    if (it == rank.end()) throw ParseError("value '" + token + "' is not listed in \"order\"");
    t.values[G] = it->second;
  });
  return t;
}

ConcreteLpProblem parse_concrete(const json& obj) {
  require_keys(obj, {"points", "constraints", "names"});
  ConcreteLpProblem p;
  p.points = name_list(field(obj, "points"), "points", false);
  const NameIndex points(p.points);
  const json& cons = field(obj, "constraints");
  if (!cons.is_array()) throw ParseError("\"constraints\" must be an array");
  for (const auto& c : cons) {
    if (!c.is_array()) throw ParseError("every constraint must be an array of point names");
    std::vector<std::size_t> members;
    for (const auto& item : c) members.push_back(points.at(name_of(item, "constraint members")));
    std::sort(members.begin(), members.end());
    if (std::adjacent_find(members.begin(), members.end()) != members.end()) {
      throw ParseError("constraint lists a point twice");
    }
    p.constraints.push_back(std::move(members));
  }
  p.names = obj.contains("names") ? name_list(obj.at("names"), "names") : default_names(p.constraints.size());
  if (p.names.size() != p.constraints.size()) throw ParseError("\"names\" must have one entry per constraint");
  p.validate_shape();
  return p;
}

NamedUso parse_uso(const json& obj) {
  require_keys(obj, {"blocks", "outmap"});
  const json& blocks_json = field(obj, "blocks");
  if (!blocks_json.is_array() || blocks_json.empty()) throw ParseError("\"blocks\" must be a nonempty array");
  std::vector<std::string> names;
  std::vector<std::vector<std::size_t>> blocks;
  for (const auto& b : blocks_json) {
    const auto members = name_list(b, "blocks");
    std::vector<std::size_t> block;
    for (const auto& m : members) {
      block.push_back(names.size());
      names.push_back(m);
    }
    blocks.push_back(std::move(block));
  }
  {
    auto sorted = names;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
      throw ParseError("an element appears in two blocks");
    }
  }
  const std::size_t n = names.size();
  GridPartition partition(std::move(blocks));
  if (partition.vertex_count() > kMaxUsoFileVertices) throw SizeGuard("USO files are limited to 65536 vertices");
  const NameIndex idx(names);
  const json& out_json = field(obj, "outmap");
  if (!out_json.is_object()) throw ParseError("\"outmap\" must be an object");
  const std::uint64_t count = partition.vertex_count();
  const GridUso shape = coordinate_order_uso(partition, partition.blocks());
  std::vector<ConstraintSet> out(count);
  std::vector<char> seen(count, 0);
  for (auto it = out_json.begin(); it != out_json.end(); ++it) {
    const auto G = idx.key_set(it.key(), n);
    if (!partition.is_vertex(G)) throw ParseError("outmap key '" + it.key() + "' is not a vertex");
    const std::uint64_t id = shape.vertex_id(partition.vertex_of(G));
    if (seen[id]) throw ParseError("vertex '" + it.key() + "' given twice");
    seen[id] = 1;
    out[id] = idx.list_set(it.value(), n);
  }
  for (std::uint64_t id = 0; id < count; ++id) {
    if (!seen[id]) {
      throw ParseError("missing outmap for vertex '" + subset_key(names, shape.vertex_at(id).as_set(n)) + "'");
    }
  }
  return NamedUso{std::make_shared<const GridUso>(std::move(partition), std::move(out)), std::move(names)};
}

Instance parse_json(const std::string& text) {
  json obj;
  try {
    obj = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(position_text(text, e.byte == 0 ? 0 : e.byte - 1) + ": malformed JSON");
  }
  if (!obj.is_object()) throw ParseError("top-level JSON value must be an object");
  const bool is_explicit = obj.contains("violators");
  const bool is_abstract = obj.contains("values");
  const bool is_concrete = obj.contains("constraints");
  const bool is_uso = obj.contains("outmap");
  const int matches = int{is_explicit} + int{is_abstract} + int{is_concrete} + int{is_uso};
  if (matches == 0) {
    throw ParseError("unrecognized JSON instance: expected \"violators\", \"values\", \"constraints\" or \"outmap\"");
  }
  if (matches > 1) throw ParseError("ambiguous JSON instance: keys of more than one file kind present");
  try {
    if (is_explicit) return parse_explicit(obj);
    if (is_abstract) return parse_abstract(obj);
    if (is_concrete) return parse_concrete(obj);
    return parse_uso(obj);
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed instance: ") + e.what());
  }
}

// ---- CSV ----

struct Cell {
  std::string text;
  std::size_t column;
};

std::vector<Cell> split_csv_line(const std::string& line) {
  std::vector<Cell> cells;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    std::string raw = line.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
    std::size_t lead = 0;
    while (lead < raw.size() && std::isspace(static_cast<unsigned char>(raw[lead]))) ++lead;
    std::size_t end = raw.size();
    while (end > lead && std::isspace(static_cast<unsigned char>(raw[end - 1]))) --end;
    cells.push_back({raw.substr(lead, end - lead), start + lead + 1});
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return cells;
}

std::string lower(std::string s) {
  for (auto& ch : s) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
  return s;
}

enum class CsvKind { points, halfplanes };

Instance parse_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::pair<std::size_t, std::vector<Cell>>> rows;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto first = line.find_first_not_of(" \t");
    if (first == std::string::npos || line[first] == '#') continue;
    rows.emplace_back(line_no, split_csv_line(line));
  }
  if (rows.empty()) throw ParseError("empty input");

  const auto& [header_line, header] = rows.front();
  std::vector<std::string> cols;
  for (const auto& c : header) cols.push_back(lower(c.text));
  const bool has_name = !cols.empty() && cols.front() == "name";
  const std::vector<std::string> value_cols(cols.begin() + (has_name ? 1 : 0), cols.end());
  const auto at = [&](std::size_t l, std::size_t c) {
    return "line " + std::to_string(l) + ", column " + std::to_string(c);
  };

  CsvKind kind;
  if (value_cols == std::vector<std::string>{"a", "b", "c"}) {
    kind = CsvKind::halfplanes;
  } else if (value_cols == std::vector<std::string>{"x", "y"} || value_cols == std::vector<std::string>{"x", "y", "z"}) {
    kind = CsvKind::points;
  } else {
    bool numbered = !value_cols.empty();
    for (std::size_t i = 0; i < value_cols.size() && numbered; ++i) numbered = value_cols[i] == "x" + std::to_string(i + 1);
    if (!numbered) {
      throw ParseError(at(header_line, 1) +
                       ": unrecognized CSV header; expected [name,]a,b,c or [name,]x,y[,z] or [name,]x1,...,xd");
    }
    kind = CsvKind::points;
  }

  std::vector<std::string> names;
  std::vector<std::vector<Rational>> values;
  std::set<std::string> seen;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& [l, cells] = rows[r];
    if (cells.size() != cols.size()) {
      throw ParseError(at(l, 1) + ": expected " + std::to_string(cols.size()) + " fields, found " +
                       std::to_string(cells.size()));
    }
    std::vector<Rational> row;
    for (std::size_t c = has_name ? 1 : 0; c < cells.size(); ++c) {
      try {
        row.push_back(parse_rational(cells[c].text));
      } catch (const ParseError& e) {
        throw ParseError(at(l, cells[c].column) + ": " + e.what());
      }
    }
    if (has_name) {
      const std::string& name = cells[0].text;
      if (name.empty()) throw ParseError(at(l, cells[0].column) + ": empty name");
      if (!seen.insert(name).second) throw ParseError(at(l, cells[0].column) + ": duplicate name '" + name + "'");
      names.push_back(name);
    }
    values.push_back(std::move(row));
  }
  if (values.empty()) throw ParseError("CSV file has a header but no rows");
  if (!has_name) names = default_names(values.size());

  if (kind == CsvKind::halfplanes) {
    HalfplaneLp lp;
    for (auto& v : values) lp.halfplanes.push_back({v[0], v[1], v[2]});
    lp.names = std::move(names);
    return lp;
  }
  PointSet ps;
  ps.dimension = value_cols.size();
  ps.points = std::move(values);
  ps.names = std::move(names);
  ps.validate();
  return ps;
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

}  // namespace

std::string kind_name(const Instance& instance) {
  static const char* const kNames[] = {"explicit", "abstract", "concrete", "uso", "points", "halfplanes"};
  return kNames[instance.index()];
}

Instance parse(const std::string& text) {
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) throw ParseError("empty input");
  if (text[first] == '{' || text[first] == '[') return parse_json(text);
  return parse_csv(text);
}

Instance load(const std::string& path) { return parse(read_file(path)); }

std::string subset_key(const std::vector<std::string>& names, Mask G) {
  std::string key;
  for (Mask m = G; m != 0; m &= m - 1) {
    if (!key.empty()) key += ",";
    key += names.at(static_cast<std::size_t>(std::countr_zero(m)));
  }
  return key;
}

std::string subset_key(const std::vector<std::string>& names, const ConstraintSet& G) {
  std::string key;
  G.for_each([&](ConstraintSet::Index h) {
    if (!key.empty()) key += ",";
    key += names.at(h);
  });
  return key;
}

namespace {

json name_array(const std::vector<std::string>& names, Mask m) {
  json arr = json::array();
  for (; m != 0; m &= m - 1) arr.push_back(names[static_cast<std::size_t>(std::countr_zero(m))]);
  return arr;
}

}  // namespace

std::string to_json(const ExplicitViolatorSpace& space) {
  json obj;
  obj["names"] = space.names();
  json v = json::object();
  for (std::size_t g = 0; g < space.table().size(); ++g) {
    v[subset_key(space.names(), static_cast<Mask>(g))] = name_array(space.names(), space.table()[g]);
  }
  obj["violators"] = std::move(v);
  return dump(obj);
}

std::string to_json(const AbstractLpTable& t) {
  json obj;
  obj["names"] = t.names;
  obj["order"] = t.order;
  json v = json::object();
  for (std::size_t g = 0; g < t.values.size(); ++g) v[subset_key(t.names, static_cast<Mask>(g))] = t.token(t.values[g]);
  obj["values"] = std::move(v);
  return dump(obj);
}

std::string to_json(const ConcreteLpProblem& p) {
  json obj;
  obj["points"] = p.points;
  json cons = json::array();
  for (const auto& c : p.constraints) {
    json arr = json::array();
    for (auto i : c) arr.push_back(p.points[i]);
    cons.push_back(std::move(arr));
  }
  obj["constraints"] = std::move(cons);
  obj["names"] = p.names;
  return dump(obj);
}

std::string to_json(const NamedUso& u) {
  const GridUso& g = *u.uso;
  json obj;
  json blocks = json::array();
  for (const auto& b : g.partition().blocks()) {
    json arr = json::array();
    for (auto h : b) arr.push_back(u.names[h]);
    blocks.push_back(std::move(arr));
  }
  obj["blocks"] = std::move(blocks);
  json out = json::object();
  const std::uint64_t count = g.partition().vertex_count();
  for (std::uint64_t id = 0; id < count; ++id) {
    const Vertex J = g.vertex_at(id);
    json arr = json::array();
    g.outmap(J).for_each([&](ConstraintSet::Index h) { arr.push_back(u.names[h]); });
    out[subset_key(u.names, J.as_set(g.size()))] = std::move(arr);
  }
  obj["outmap"] = std::move(out);
  return dump(obj);
}

std::string to_csv(const PointSet& ps) {
  std::string s = "name";
  if (ps.dimension <= 3) {
    static const char* const kAxes[] = {"x", "y", "z"};
    for (std::size_t c = 0; c < ps.dimension; ++c) s += std::string(",") + kAxes[c];
  } else {
    for (std::size_t c = 0; c < ps.dimension; ++c) s += ",x" + std::to_string(c + 1);
  }
  s += "\n";
  for (std::size_t i = 0; i < ps.size(); ++i) {
    s += ps.names[i];
    for (const auto& v : ps.points[i]) s += "," + v.get_str();
    s += "\n";
  }
  return s;
}

std::string to_csv(const HalfplaneLp& lp) {
  std::string s = "name,a,b,c\n";
  for (std::size_t i = 0; i < lp.size(); ++i) {
    const auto& h = lp.halfplanes[i];
    s += lp.names[i] + "," + h.a.get_str() + "," + h.b.get_str() + "," + h.c.get_str() + "\n";
  }
  return s;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path + "'");
  out << content;
}

}  // namespace vs::io
