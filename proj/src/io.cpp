#include "morselab/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace morselab {

using nlohmann::json;

namespace {

template <typename T>
T field(const json& j, const char* name) {
  if (!j.is_object() || !j.contains(name)) throw InvalidInput(std::string("missing field '") + name + "'");
  try {
    return j.at(name).get<T>();
  } catch (const json::exception& e) {
    throw InvalidInput(std::string("bad field '") + name + "': " + e.what());
  }
}

}  // namespace

json to_json(const ModelSpace& space) {
  json j{{"kind", to_string(space.kind())}};
  if (space.is_tree()) {
    json edges = json::array();
    for (const auto& e : space.tree().edges()) edges.push_back({e.u, e.v, e.length});
    j["edges"] = edges;
    j["rays"] = space.tree().ray_leaves();
  }
  return j;
}

ModelSpace space_from_json(const json& j) {
  const auto kind = field<std::string>(j, "kind");
  if (kind == "lattice_ray_plane") return ModelSpace::lattice_ray_plane();
  if (kind == "euclidean_plane") return ModelSpace::euclidean_plane();
  if (kind == "metric_tree") {
    const json& edges = j.contains("edges") ? j.at("edges") : json();
    if (!edges.is_array()) throw InvalidInput("metric_tree needs an 'edges' array");
    std::vector<TreeEdge> out;
    for (const auto& e : edges) {
      if (!e.is_array() || e.size() != 3 || !e[0].is_number_integer() || !e[1].is_number_integer() ||
          !e[2].is_number())
        throw InvalidInput("tree edges must be [u, v, length] triples");
      out.push_back({e[0].get<std::int64_t>(), e[1].get<std::int64_t>(), e[2].get<double>()});
    }
    std::optional<std::vector<std::int64_t>> rays;
    if (j.contains("rays")) rays = field<std::vector<std::int64_t>>(j, "rays");
    return ModelSpace::metric_tree(std::move(out), std::move(rays));
  }
  throw InvalidInput("unknown space kind '" + kind + "'");
}

json to_json(const ModelPoint& p) {
  if (p.is_plane()) return {{"chart", "plane"}, {"x", p.as_plane().x}, {"y", p.as_plane().y}};
  if (p.is_ray()) return {{"chart", "ray"}, {"m", p.as_ray().m}, {"n", p.as_ray().n}, {"h", p.as_ray().h}};
  return {{"chart", "edge"}, {"u", p.as_edge().u}, {"v", p.as_edge().v}, {"t", p.as_edge().t}};
}

ModelPoint point_from_json(const json& j) {
  const auto chart = field<std::string>(j, "chart");
  if (chart == "plane") return ModelPoint::plane(field<double>(j, "x"), field<double>(j, "y"));
  if (chart == "ray")
    return ModelPoint::ray(field<std::int64_t>(j, "m"), field<std::int64_t>(j, "n"), field<double>(j, "h"));
  if (chart == "edge")
    return ModelPoint::edge(field<std::int64_t>(j, "u"), field<std::int64_t>(j, "v"), field<double>(j, "t"));
  throw InvalidInput("unknown chart '" + chart + "'");
}

json to_json(const BoundaryPoint& b) { return json::array({b.m, b.n}); }

BoundaryPoint boundary_from_json(const json& j) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number_integer() || !j[1].is_number_integer())
    throw InvalidInput("boundary points are [m, n] integer pairs");
  return {j[0].get<std::int64_t>(), j[1].get<std::int64_t>()};
}

json load_json_arg(const std::string& arg) {
  std::string text = arg;
  if (arg.empty() || (arg.front() != '{' && arg.front() != '[')) {
    std::ifstream in(arg);
    if (!in) throw InvalidInput("cannot open '" + arg + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    text = ss.str();
  }
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw InvalidInput(std::string("JSON parse error: ") + e.what());
  }
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

namespace {

class SpecParser {
 public:
  explicit SpecParser(const std::string& s) : s_(s) {}

  std::pair<Endpoint, Endpoint> parse() {
    Endpoint a = endpoint();
    expect(':');
    Endpoint b = endpoint();
    skip();
    if (pos_ != s_.size()) fail("unexpected trailing input");
    return {a, b};
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw InvalidInput("geodesic spec: " + what + " at position " + std::to_string(pos_) + " in '" + s_ + "'");
  }
  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  bool accept(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }
  void expect(char c) {
    if (!accept(c)) fail(std::string("expected '") + c + "'");
  }
  double number() {
    skip();
    const char* first = s_.data() + pos_;
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(first, s_.data() + s_.size(), v);
    if (ec != std::errc() || ptr == first) fail("expected a number");
    pos_ += static_cast<std::size_t>(ptr - first);
    return v;
  }
  std::int64_t integer() {
    skip();
    const char* first = s_.data() + pos_;
    std::int64_t v = 0;
    auto [ptr, ec] = std::from_chars(first, s_.data() + s_.size(), v);
    if (ec != std::errc() || ptr == first) fail("expected an integer");
    pos_ += static_cast<std::size_t>(ptr - first);
    return v;
  }
  std::string word() {
    skip();
    const std::size_t start = pos_;
    while (pos_ < s_.size() && std::isalpha(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    return s_.substr(start, pos_ - start);
  }
  Endpoint endpoint() {
    skip();
    const std::size_t start = pos_;
    const std::string w = word();
    if (w == "r") {
      expect('[');
      const auto m = integer();
      std::int64_t n = 0;
      if (accept(',')) n = integer();
      expect(']');
      return BoundaryPoint{m, n};
    }
    if (w == "p") {
      expect('(');
      const double x = number();
      expect(',');
      const double y = number();
      expect(')');
      return ModelPoint::plane(x, y);
    }
    if (w == "ray" || w == "e") {
      expect('(');
      const auto a = integer();
      expect(',');
      const auto b = integer();
      expect(',');
      const double t = number();
      expect(')');
      return w == "ray" ? ModelPoint::ray(a, b, t) : ModelPoint::edge(a, b, t);
    }
    pos_ = start;
    fail("expected r[..], p(..), ray(..) or e(..)");
  }

  const std::string& s_;
  std::size_t pos_ = 0;
};

}  // namespace

std::pair<Endpoint, Endpoint> parse_geodesic_spec(const std::string& spec) { return SpecParser(spec).parse(); }

std::string to_spec(const Endpoint& e) {
  if (const auto* b = std::get_if<BoundaryPoint>(&e))
    return "r[" + std::to_string(b->m) + "," + std::to_string(b->n) + "]";
  return std::visit(
      [](const auto& c) -> std::string {
        using T = std::decay_t<decltype(c)>;
        if constexpr (std::is_same_v<T, PlanePoint>) return "p(" + format_double(c.x) + "," + format_double(c.y) + ")";
        else if constexpr (std::is_same_v<T, RayPoint>)
          return "ray(" + std::to_string(c.m) + "," + std::to_string(c.n) + "," + format_double(c.h) + ")";
        else return "e(" + std::to_string(c.u) + "," + std::to_string(c.v) + "," + format_double(c.t) + ")";
      },
      std::get<ModelPoint>(e).chart());
}

}  // namespace morselab
