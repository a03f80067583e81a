#include "ips/model_io.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>
#include <vector>

namespace ips {

namespace {

// Just enough of a TOML reader for the model format: sections, array-of-table
// sections, integer / string / array / inline-table values, # comments.
struct Value {
  enum class Type { Int, Str, Array, Table } type = Type::Int;
  long i = 0;
  std::string s;
  std::vector<Value> arr;
  std::map<std::string, Value> tbl;
};

struct Cursor {
  const std::string& text;
  size_t pos = 0;

  bool done() const { return pos >= text.size(); }
  char peek() const { return text[pos]; }
  void skip_ws(bool newlines) {
    while (!done()) {
      char c = text[pos];
      if (c == '#') {
        while (!done() && text[pos] != '\n') ++pos;
      } else if (c == ' ' || c == '\t' || c == '\r' || (newlines && c == '\n')) {
        ++pos;
      } else {
        break;
      }
    }
  }
  void expect(char c) {
    if (done() || text[pos] != c)
      throw ModelParseError(std::string("expected '") + c + "'");
    ++pos;
  }
};

std::string parse_key(Cursor& cur) {
  cur.skip_ws(false);
  std::string key;
  while (!cur.done() &&
         (std::isalnum(cur.peek()) || cur.peek() == '_' || cur.peek() == '-'))
    key += cur.text[cur.pos++];
  if (key.empty()) throw ModelParseError("expected a key");
  return key;
}

Value parse_value(Cursor& cur) {
  cur.skip_ws(true);
  if (cur.done()) throw ModelParseError("expected a value");
  Value v;
  char c = cur.peek();
  if (c == '"') {
    ++cur.pos;
    v.type = Value::Type::Str;
    while (!cur.done() && cur.peek() != '"') v.s += cur.text[cur.pos++];
    cur.expect('"');
  } else if (c == '[') {
    ++cur.pos;
    v.type = Value::Type::Array;
    cur.skip_ws(true);
    while (!cur.done() && cur.peek() != ']') {
      v.arr.push_back(parse_value(cur));
      cur.skip_ws(true);
      if (!cur.done() && cur.peek() == ',') {
        ++cur.pos;
        cur.skip_ws(true);
      }
    }
    cur.expect(']');
  } else if (c == '{') {
    ++cur.pos;
    v.type = Value::Type::Table;
    cur.skip_ws(true);
    while (!cur.done() && cur.peek() != '}') {
      std::string key = parse_key(cur);
      cur.skip_ws(false);
      cur.expect('=');
      v.tbl[key] = parse_value(cur);
      cur.skip_ws(true);
      if (!cur.done() && cur.peek() == ',') {
        ++cur.pos;
        cur.skip_ws(true);
      }
    }
    cur.expect('}');
  } else if (c == '-' || std::isdigit(c)) {
    std::string num;
    while (!cur.done() && (std::isdigit(cur.peek()) || cur.peek() == '-'))
      num += cur.text[cur.pos++];
    v.type = Value::Type::Int;
    v.i = std::stol(num);
  } else {
    throw ModelParseError("unsupported value syntax");
  }
  return v;
}

struct Document {
  std::map<std::string, Value> root;     // top-level keys
  std::map<std::string, Value> tables;   // [section]
  std::map<std::string, std::vector<Value>> arrays;  // [[section]]
};

Document parse_document(const std::string& text) {
  Document doc;
  Cursor cur{text};
  std::string section;
  bool array_section = false;
  for (;;) {
    cur.skip_ws(true);
    if (cur.done()) break;
    if (cur.peek() == '[') {
      ++cur.pos;
      array_section = !cur.done() && cur.peek() == '[';
      if (array_section) ++cur.pos;
      section = parse_key(cur);
      cur.expect(']');
      if (array_section) cur.expect(']');
      if (array_section)
        doc.arrays[section].emplace_back(Value{Value::Type::Table});
      else
        doc.tables.emplace(section, Value{Value::Type::Table});
      continue;
    }
    std::string key = parse_key(cur);
    cur.skip_ws(false);
    cur.expect('=');
    Value v = parse_value(cur);
    if (section.empty())
      doc.root[key] = std::move(v);
    else if (array_section)
      doc.arrays[section].back().tbl[key] = std::move(v);
    else
      doc.tables[section].tbl[key] = std::move(v);
  }
  return doc;
}

long get_int(const std::map<std::string, Value>& tbl, const std::string& key) {
  auto it = tbl.find(key);
  if (it == tbl.end() || it->second.type != Value::Type::Int)
    throw ModelParseError("missing integer key '" + key + "'");
  return it->second.i;
}

std::string get_str(const std::map<std::string, Value>& tbl,
                    const std::string& key) {
  auto it = tbl.find(key);
  if (it == tbl.end() || it->second.type != Value::Type::Str)
    throw ModelParseError("missing string key '" + key + "'");
  return it->second.s;
}

Kernel parse_kernel(const Value& ktbl) {
  const std::string type = get_str(ktbl.tbl, "type");
  if (type == "nearest_neighbor")
    return Kernel::nearest_neighbor(int(get_int(ktbl.tbl, "d")));
  if (type == "stencil") {
    Kernel k;
    k.type = Kernel::Type::Stencil;
    k.dim = int(get_int(ktbl.tbl, "d"));
    auto it = ktbl.tbl.find("offsets");
    if (it == ktbl.tbl.end() || it->second.type != Value::Type::Array)
      throw ModelParseError("stencil kernel needs an 'offsets' array");
    for (const Value& entry : it->second.arr) {
      auto off_it = entry.tbl.find("offset");
      if (off_it == entry.tbl.end() || off_it->second.type != Value::Type::Array)
        throw ModelParseError("stencil entry needs an 'offset' array");
      std::vector<int> off;
      for (const Value& c : off_it->second.arr) off.push_back(int(c.i));
      if (int(off.size()) != k.dim)
        throw ModelParseError("stencil offset has the wrong dimension");
      k.stencil.emplace_back(off, rat_parse(get_str(entry.tbl, "p")));
    }
    return k;
  }
  if (type == "pairs") {
    Kernel k;
    k.type = Kernel::Type::Pairs;
    k.n_sites = int(get_int(ktbl.tbl, "sites"));
    auto it = ktbl.tbl.find("pairs");
    if (it == ktbl.tbl.end() || it->second.type != Value::Type::Array)
      throw ModelParseError("pairs kernel needs a 'pairs' array");
    for (const Value& entry : it->second.arr)
      k.pairs[{int(get_int(entry.tbl, "x")), int(get_int(entry.tbl, "y"))}] =
          rat_parse(get_str(entry.tbl, "p"));
    return k;
  }
  throw ModelParseError("unknown kernel type '" + type + "'");
}

}  // namespace

ModelFile ModelFile::wrap(const RateSpec& spec, const Kernel& kernel,
                          DeathKernelDirection dir) {
  ModelFile m;
  m.space = spec.space();
  m.spec = spec;
  m.kernel = kernel;
  m.death_dir = dir;
  return m;
}

ModelFile parse_model(const std::string& text) {
  const Document doc = parse_document(text);
  ModelFile m;
  if (auto it = doc.root.find("schema_version"); it != doc.root.end())
    m.schema_version = int(it->second.i);
  m.space.max_occupancy = int(get_int(doc.root, "state_max"));

  if (auto it = doc.root.find("death_kernel_direction"); it != doc.root.end()) {
    if (it->second.s == "reverse")
      m.death_dir = DeathKernelDirection::Reverse;
    else if (it->second.s == "forward")
      m.death_dir = DeathKernelDirection::Forward;
    else
      throw ModelParseError("death_kernel_direction must be forward or reverse");
  }

  auto kt = doc.tables.find("kernel");
  if (kt == doc.tables.end()) throw ModelParseError("missing [kernel] section");
  m.kernel = parse_kernel(kt->second);

  int k_max = 0;
  auto rates_it = doc.arrays.find("rates");
  if (rates_it != doc.arrays.end())
    for (const Value& entry : rates_it->second)
      k_max = std::max(k_max, int(get_int(entry.tbl, "k")));
  m.spec = RateSpec(m.space, k_max);
  if (rates_it != doc.arrays.end()) {
    for (const Value& entry : rates_it->second) {
      auto kind = rate_kind_from_name(get_str(entry.tbl, "kind"));
      if (!kind) throw ModelParseError("unknown rate kind");
      const int k = int(get_int(entry.tbl, "k"));
      const bool needs_a = *kind == RateKind::Jump || *kind == RateKind::BirthPair ||
                           *kind == RateKind::DeathPair || *kind == RateKind::DeathSite;
      const bool needs_b = *kind != RateKind::DeathSite;
      const int a = needs_a ? int(get_int(entry.tbl, "alpha")) : 0;
      const int b = needs_b ? int(get_int(entry.tbl, "beta")) : 0;
      m.spec.set(*kind, k, a, b, rat_parse(get_str(entry.tbl, "value")));
    }
  }

  if (auto pt = doc.tables.find("params"); pt != doc.tables.end())
    for (const auto& [key, v] : pt->second.tbl)
      m.params[key] = v.type == Value::Type::Str ? v.s : std::to_string(v.i);
  return m;
}

ModelFile load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ModelParseError("cannot open model file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_model(ss.str());
}

std::string export_model(const ModelFile& model) {
  std::ostringstream out;
  out << "schema_version = " << model.schema_version << "\n";
  out << "state_max = " << model.space.max_occupancy << "\n";
  out << "death_kernel_direction = \""
      << (model.death_dir == DeathKernelDirection::Reverse ? "reverse" : "forward")
      << "\"\n\n";

  out << "[kernel]\n";
  if (model.kernel.type == Kernel::Type::Stencil) {
    // Recognize the nearest-neighbor stencil and keep the compact form.
    const Kernel nn = Kernel::nearest_neighbor(std::max(model.kernel.dim, 1));
    bool is_nn = model.kernel.dim >= 1 &&
                 model.kernel.stencil.size() == nn.stencil.size();
    if (is_nn)
      for (const auto& [off, p] : nn.stencil)
        if (model.kernel.offset_prob(off) != p) {
          is_nn = false;
          break;
        }
    if (is_nn) {
      out << "type = \"nearest_neighbor\"\n";
      out << "d = " << model.kernel.dim << "\n";
    } else {
      out << "type = \"stencil\"\n";
      out << "d = " << model.kernel.dim << "\n";
      out << "offsets = [\n";
      for (const auto& [off, p] : model.kernel.stencil) {
        out << "  { offset = [";
        for (size_t i = 0; i < off.size(); ++i)
          out << (i ? ", " : "") << off[i];
        out << "], p = \"" << rat_str(p) << "\" },\n";
      }
      out << "]\n";
    }
  } else {
    out << "type = \"pairs\"\n";
    out << "sites = " << model.kernel.n_sites << "\n";
    out << "pairs = [\n";
    for (const auto& [xy, p] : model.kernel.pairs)
      out << "  { x = " << xy.first << ", y = " << xy.second << ", p = \""
          << rat_str(p) << "\" },\n";
    out << "]\n";
  }

  if (!model.params.empty()) {
    out << "\n[params]\n";
    for (const auto& [key, value] : model.params)
      out << key << " = \"" << value << "\"\n";
  }

  for (const auto& e : model.spec.entries()) {
    out << "\n[[rates]]\n";
    out << "kind = \"" << rate_kind_name(e.kind) << "\"\n";
    out << "k = " << e.k << "\n";
    if (e.a >= 0) out << "alpha = " << e.a << "\n";
    if (e.b >= 0) out << "beta = " << e.b << "\n";
    out << "value = \"" << rat_str(e.value) << "\"\n";
  }
  return out.str();
}

}  // namespace ips
