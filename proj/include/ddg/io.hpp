#pragma once

// OFF meshes, the JSON complex schema, polygon vertex lists, CSV tables and run configuration.

#include <cctype>
#include <charconv>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "ddg/core.hpp"
#include "ddg/mesh.hpp"
#include "ddg/polyhedral.hpp"

namespace ddg {

/// Shortest decimal text that parses back to the same double.
inline std::string format_double(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

inline std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::InvalidArgument, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

namespace detail {

struct Token {
  std::string_view text;
  int line = 0;
  int column = 0;
};

/// Whitespace-separated tokens with 1-based positions; '#' starts a comment.
inline std::vector<Token> tokenize(std::string_view text) {
  std::vector<Token> out;
  int line = 1, col = 1;
  std::size_t i = 0;
  while (i < text.size()) {
    const char c = text[i];
    if (c == '\n') {
      ++line;
      col = 1;
      ++i;
    } else if (c == '#') {
      while (i < text.size() && text[i] != '\n') ++i;
    } else if (std::isspace(static_cast<unsigned char>(c))) {
      ++col;
      ++i;
    } else {
      const std::size_t start = i;
      const int start_col = col;
      while (i < text.size() && !std::isspace(static_cast<unsigned char>(text[i])) && text[i] != '#') {
        ++i;
        ++col;
      }
      out.push_back({text.substr(start, i - start), line, start_col});
    }
  }
  return out;
}

inline std::string where(const Token& t) {
  return "line " + std::to_string(t.line) + ", column " + std::to_string(t.column);
}

class TokenStream {
 public:
  explicit TokenStream(std::string_view text) : tokens_(tokenize(text)) {}

  bool done() const { return pos_ >= tokens_.size(); }
  const Token& peek() const { return tokens_.at(pos_); }

  const Token& next(std::string_view what) {
    if (done()) {
      const std::string at = tokens_.empty() ? "start of input" : "after " + where(tokens_.back());
      throw Error(ErrorKind::ParseError, "unexpected end of input " + at + ", expected " + std::string(what));
    }
    return tokens_[pos_++];
  }

  template <class T>
  T number(std::string_view what, const Token** tok = nullptr) {
    const Token& t = next(what);
    if (tok) *tok = &t;
    T value{};
    const auto res = std::from_chars(t.text.data(), t.text.data() + t.text.size(), value);
    if (res.ec != std::errc() || res.ptr != t.text.data() + t.text.size())
      throw Error(ErrorKind::ParseError,
                  where(t) + ": expected " + std::string(what) + ", found '" + std::string(t.text) + "'");
    return value;
  }

 private:
  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
};

}  // namespace detail

using SurfaceMesh = std::variant<TriangleMesh, ConvexPolyhedron>;

/// Raw OFF content before any mesh validation.
struct OffData {
  std::vector<Vector3> vertices;
  std::vector<std::vector<int>> faces;
};

inline OffData parse_off_data(std::string_view text) {
  detail::TokenStream ts(text);
  const auto& header = ts.next("OFF header");
  if (header.text != "OFF")
    throw Error(ErrorKind::ParseError, detail::where(header) + ": expected 'OFF', found '" + std::string(header.text) + "'");
  const long nv = ts.number<long>("vertex count");
  const long nf = ts.number<long>("face count");
  ts.number<long>("edge count");
  if (nv < 0 || nf < 0) throw Error(ErrorKind::ParseError, "negative element count in OFF header");
  OffData d;
  d.vertices.reserve(nv);
  for (long i = 0; i < nv; ++i) {
    Vector3 p;
    for (int k = 0; k < 3; ++k) p[k] = ts.number<double>("vertex coordinate");
    d.vertices.push_back(p);
  }
  for (long f = 0; f < nf; ++f) {
    const detail::Token* start = nullptr;
    const long k = ts.number<long>("face vertex count", &start);
    if (k < 3)
      throw Error(ErrorKind::ParseError, detail::where(*start) + ": face needs at least 3 vertices, got " + std::to_string(k));
    std::vector<int> face;
    for (long j = 0; j < k; ++j) {
      const detail::Token* tok = nullptr;
      const long idx = ts.number<long>("vertex index", &tok);
      if (idx < 0 || idx >= nv)
        throw Error(ErrorKind::IndexOutOfRange, detail::where(*tok) + ": vertex index " + std::to_string(idx) +
                                                    " out of range for " + std::to_string(nv) + " vertices");
      face.push_back(static_cast<int>(idx));
    }
    // Optional per-face colour values run to the end of the line.
    while (!ts.done() && ts.peek().line == start->line) ts.next("colour");
    d.faces.push_back(std::move(face));
  }
  if (!ts.done())
    throw Error(ErrorKind::ParseError, detail::where(ts.peek()) + ": trailing content after the last face");
  return d;
}

/// Triangle-only files give a TriangleMesh, anything with a larger face a ConvexPolyhedron.
inline SurfaceMesh parse_off(std::string_view text, const Tolerances& tol = default_tolerances()) {
  OffData d = parse_off_data(text);
  bool triangles = true;
  for (const auto& f : d.faces) triangles = triangles && f.size() == 3;
  if (triangles) {
    std::vector<std::array<int, 3>> tris;
    tris.reserve(d.faces.size());
    for (const auto& f : d.faces) tris.push_back({f[0], f[1], f[2]});
    return TriangleMesh(std::move(d.vertices), std::move(tris), tol);
  }
  return ConvexPolyhedron(std::move(d.vertices), std::move(d.faces), tol);
}

inline std::string write_off(const std::vector<Vector3>& vertices, const std::vector<std::vector<int>>& faces) {
  std::ostringstream os;
  os << "OFF\n" << vertices.size() << ' ' << faces.size() << " 0\n";
  for (const auto& p : vertices)
    os << format_double(p.x()) << ' ' << format_double(p.y()) << ' ' << format_double(p.z()) << '\n';
  for (const auto& f : faces) {
    os << f.size();
    for (int v : f) os << ' ' << v;
    os << '\n';
  }
  return os.str();
}

template <ClosedSurface M>
std::string write_off(const M& m) {
  return write_off(m.surface().vertices(), m.surface().faces());
}

/// Contents of a complex file prior to building the metric.
struct ComplexData {
  int dim = 0;
  std::vector<Simplex> top_simplices;
  EdgeLengths lengths;
};

inline ComplexData parse_complex_data(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorKind::ParseError, std::string("invalid JSON: ") + e.what());
  }
  if (!j.is_object()) throw Error(ErrorKind::ParseError, "complex file must hold a JSON object");
  for (const auto& [key, value] : j.items())
    if (key != "dim" && key != "top_simplices" && key != "lengths")
      throw Error(ErrorKind::ParseError, "unknown key '" + key + "'");
  for (const char* key : {"dim", "top_simplices", "lengths"})
    if (!j.contains(key)) throw Error(ErrorKind::ParseError, std::string("missing key '") + key + "'");
  if (!j["dim"].is_number_integer() || j["dim"].get<int>() < 1)
    throw Error(ErrorKind::ParseError, "'dim' must be a positive integer");
  ComplexData d;
  d.dim = j["dim"].get<int>();
  if (!j["top_simplices"].is_array() || j["top_simplices"].empty())
    throw Error(ErrorKind::ParseError, "'top_simplices' must be a non-empty array");
  for (std::size_t t = 0; t < j["top_simplices"].size(); ++t) {
    const auto& s = j["top_simplices"][t];
    if (!s.is_array()) throw Error(ErrorKind::ParseError, "top_simplices[" + std::to_string(t) + "] is not an array");
    if (s.size() != static_cast<std::size_t>(d.dim + 1))
      throw Error(ErrorKind::ParseError, "top_simplices[" + std::to_string(t) + "] has " + std::to_string(s.size()) +
                                             " vertices but dim " + std::to_string(d.dim) + " needs " +
                                             std::to_string(d.dim + 1));
    Simplex simplex;
    for (const auto& v : s) {
      if (!v.is_number_integer() || v.get<long>() < 0)
        throw Error(ErrorKind::ParseError, "top_simplices[" + std::to_string(t) + "] has a non-integer or negative id");
      simplex.push_back(v.get<int>());
    }
    d.top_simplices.push_back(std::move(simplex));
  }
  if (!j["lengths"].is_array()) throw Error(ErrorKind::ParseError, "'lengths' must be an array");
  for (std::size_t k = 0; k < j["lengths"].size(); ++k) {
    const auto& e = j["lengths"][k];
    const std::string at = "lengths[" + std::to_string(k) + "]";
    if (!e.is_array() || e.size() != 3 || !e[0].is_number_integer() || !e[1].is_number_integer() || !e[2].is_number())
      throw Error(ErrorKind::ParseError, at + " must be [i, j, value]");
    const int a = e[0].get<int>(), b = e[1].get<int>();
    if (a == b) throw Error(ErrorKind::ParseError, at + " joins a vertex to itself");
    const Edge edge = make_edge(a, b);
    if (!d.lengths.emplace(edge, e[2].get<double>()).second)
      throw Error(ErrorKind::ParseError, at + " repeats the length of edge " + describe({edge.first, edge.second}));
  }
  return d;
}

inline PolyhedralMetric parse_complex_json(std::string_view text, const Tolerances& tol = default_tolerances()) {
  ComplexData d = parse_complex_data(text);
  return PolyhedralMetric(SimplicialComplex(d.dim, std::move(d.top_simplices)), d.lengths, tol);
}

/// One top simplex or edge length per line; numbers use shortest round-trip text.
inline std::string write_complex_json(const PolyhedralMetric& c) {
  std::ostringstream os;
  os << "{\n  \"dim\": " << c.dim() << ",\n  \"top_simplices\": [";
  const auto& tops = c.complex().top_simplices();
  for (std::size_t t = 0; t < tops.size(); ++t) os << (t ? ",\n" : "\n") << "    " << nlohmann::json(tops[t]).dump();
  os << "\n  ],\n  \"lengths\": [";
  const auto& edges = c.complex().faces(1);
  for (std::size_t e = 0; e < edges.size(); ++e)
    os << (e ? ",\n" : "\n") << "    " << nlohmann::json({edges[e][0], edges[e][1], c.lengths()[e]}).dump();
  os << "\n  ]\n}\n";
  return os.str();
}

/// A polygon read from a vertex list, before choosing the planar or space model.
struct PolygonData {
  int dim = 0;
  bool closed = true;
  std::vector<std::vector<double>> vertices;

  std::vector<Vector2> planar() const {
    if (dim != 2) throw Error(ErrorKind::InvalidArgument, "polygon is not planar");
    std::vector<Vector2> out;
    for (const auto& v : vertices) out.emplace_back(v[0], v[1]);
    return out;
  }
  std::vector<Vector3> spatial() const {
    std::vector<Vector3> out;
    for (const auto& v : vertices) out.emplace_back(v[0], v[1], dim == 3 ? v[2] : 0.0);
    return out;
  }
};

/// JSON form: {"closed": bool, "vertices": [[x, y], ...]}. Text form: one vertex per line with
/// two or three coordinates, optionally preceded by a line reading "open" or "closed".
inline PolygonData parse_polygon(std::string_view text) {
  PolygonData d;
  auto add_vertex = [&](std::vector<double> v, const std::string& at) {
    if (v.size() != 2 && v.size() != 3)
      throw Error(ErrorKind::ParseError, at + ": a vertex needs 2 or 3 coordinates, got " + std::to_string(v.size()));
    if (d.vertices.empty()) d.dim = static_cast<int>(v.size());
    if (static_cast<int>(v.size()) != d.dim)
      throw Error(ErrorKind::ParseError, at + ": vertex has " + std::to_string(v.size()) +
                                             " coordinates, earlier ones have " + std::to_string(d.dim));
    d.vertices.push_back(std::move(v));
  };
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string_view::npos && text[first] == '{') {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
      throw Error(ErrorKind::ParseError, std::string("invalid JSON: ") + e.what());
    }
    for (const auto& [key, value] : j.items())
      if (key != "closed" && key != "vertices") throw Error(ErrorKind::ParseError, "unknown key '" + key + "'");
    if (j.contains("closed")) {
      if (!j["closed"].is_boolean()) throw Error(ErrorKind::ParseError, "'closed' must be a boolean");
      d.closed = j["closed"].get<bool>();
    }
    if (!j.contains("vertices") || !j["vertices"].is_array())
      throw Error(ErrorKind::ParseError, "'vertices' must be an array");
    for (std::size_t i = 0; i < j["vertices"].size(); ++i) {
      const auto& v = j["vertices"][i];
      const std::string at = "vertices[" + std::to_string(i) + "]";
      if (!v.is_array()) throw Error(ErrorKind::ParseError, at + " is not an array");
      std::vector<double> coords;
      for (const auto& x : v) {
        if (!x.is_number()) throw Error(ErrorKind::ParseError, at + " has a non-numeric coordinate");
        coords.push_back(x.get<double>());
      }
      add_vertex(std::move(coords), at);
    }
  } else {
    const auto tokens = detail::tokenize(text);
    std::size_t i = 0;
    if (i < tokens.size() && (tokens[i].text == "open" || tokens[i].text == "closed")) {
      d.closed = tokens[i].text == "closed";
      ++i;
    }
    while (i < tokens.size()) {
      const int line = tokens[i].line;
      const std::string at = "line " + std::to_string(line);
      std::vector<double> coords;
      for (; i < tokens.size() && tokens[i].line == line; ++i) {
        double x = 0.0;
        const auto& t = tokens[i];
        const auto res = std::from_chars(t.text.data(), t.text.data() + t.text.size(), x);
        if (res.ec != std::errc() || res.ptr != t.text.data() + t.text.size())
          throw Error(ErrorKind::ParseError, detail::where(t) + ": expected a coordinate, found '" + std::string(t.text) + "'");
        coords.push_back(x);
      }
      add_vertex(std::move(coords), at);
    }
  }
  if (d.vertices.empty()) throw Error(ErrorKind::ParseError, "polygon has no vertices");
  return d;
}

/// A named table of already formatted cells.
struct Table {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  template <class... Cells>
  void add(const Cells&... cells) {
    rows.push_back({cell(cells)...});
  }

  static std::string cell(double x) { return format_double(x); }
  static std::string cell(int x) { return std::to_string(x); }
  static std::string cell(long x) { return std::to_string(x); }
  static std::string cell(std::size_t x) { return std::to_string(x); }
  static std::string cell(bool x) { return x ? "true" : "false"; }
  static std::string cell(const std::string& x) { return x; }
  static std::string cell(const char* x) { return x; }
};

inline std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

inline void write_csv(std::ostream& os, const Table& t) {
  for (std::size_t i = 0; i < t.columns.size(); ++i) os << (i ? "," : "") << csv_escape(t.columns[i]);
  os << '\n';
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << csv_escape(row[i]);
    os << '\n';
  }
}

enum class OutputFormat { Csv, Json };

/// Seed, sample budget, tolerance overrides and output destination for one command.
struct RunConfig {
  std::uint64_t seed = kDefaultSeed;
  std::uint64_t samples = 1'000'000;
  std::map<std::string, double> tolerance_overrides;
  std::string out;
  OutputFormat format = OutputFormat::Csv;

  MonteCarloConfig monte_carlo() const { return {samples, seed}; }
};

/// Tolerance names accepted in overrides, with their defaults. "check" is the residual bound for
/// exact identities reported by the command-line checks.
inline std::map<std::string, double> tolerance_defaults() {
  const Tolerances t;
  return {{"eps_unit", t.eps_unit},         {"eps_degenerate", t.eps_degenerate}, {"eps_embed", t.eps_embed},
          {"eps_angle", t.eps_angle},       {"eps_turning", t.eps_turning},       {"eps_convex", t.eps_convex},
          {"eps_planar", t.eps_planar},     {"eps_singular", t.eps_singular},     {"eps_hemisphere", t.eps_hemisphere},
          {"check", 1e-8}};
}

inline void validate_config(const RunConfig& cfg) {
  if (cfg.seed == 0) throw Error(ErrorKind::InvalidArgument, "seed must be positive");
  if (cfg.samples == 0) throw Error(ErrorKind::InvalidArgument, "sample count must be positive");
  const auto known = tolerance_defaults();
  for (const auto& [key, value] : cfg.tolerance_overrides) {
    if (!known.count(key)) throw Error(ErrorKind::InvalidArgument, "unknown tolerance '" + key + "'");
    if (!(value > 0.0)) throw Error(ErrorKind::InvalidArgument, "tolerance '" + key + "' must be positive");
  }
}

inline double tolerance_value(const RunConfig& cfg, const std::string& key) {
  if (auto it = cfg.tolerance_overrides.find(key); it != cfg.tolerance_overrides.end()) return it->second;
  const auto defaults = tolerance_defaults();
  if (auto it = defaults.find(key); it != defaults.end()) return it->second;
  throw Error(ErrorKind::InvalidArgument, "unknown tolerance '" + key + "'");
}

inline Tolerances tolerances(const RunConfig& cfg) {
  validate_config(cfg);
  Tolerances t;
  const std::pair<const char*, double Tolerances::*> fields[] = {
      {"eps_unit", &Tolerances::eps_unit},         {"eps_degenerate", &Tolerances::eps_degenerate},
      {"eps_embed", &Tolerances::eps_embed},       {"eps_angle", &Tolerances::eps_angle},
      {"eps_turning", &Tolerances::eps_turning},   {"eps_convex", &Tolerances::eps_convex},
      {"eps_planar", &Tolerances::eps_planar},     {"eps_singular", &Tolerances::eps_singular},
      {"eps_hemisphere", &Tolerances::eps_hemisphere}};
  for (const auto& [name, member] : fields)
    if (auto it = cfg.tolerance_overrides.find(name); it != cfg.tolerance_overrides.end()) t.*member = it->second;
  return t;
}

/// Parses "key=value" override strings.
inline std::map<std::string, double> parse_tolerance_overrides(const std::vector<std::string>& items) {
  std::map<std::string, double> out;
  for (const auto& item : items) {
    const auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0)
      throw Error(ErrorKind::InvalidArgument, "tolerance override '" + item + "' is not of the form key=value");
    const std::string key = item.substr(0, eq);
    const std::string text = item.substr(eq + 1);
    double value = 0.0;
    const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
    if (res.ec != std::errc() || res.ptr != text.data() + text.size())
      throw Error(ErrorKind::InvalidArgument, "tolerance override '" + item + "' has a non-numeric value");
    out[key] = value;
  }
  return out;
}

}  // namespace ddg
