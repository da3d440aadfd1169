#include "cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>

#include "morselab/boundary.hpp"
#include "morselab/contracting.hpp"
#include "morselab/extension.hpp"
#include "morselab/io.hpp"
#include "morselab/repro.hpp"
#include "morselab/tables.hpp"

namespace morselab::cli {
namespace {

using nlohmann::json;

struct RunConfig {
  std::string space = "lattice";
  std::string space_y;  // defaults to --space
  std::string map = "identity";
  double D = 2.0;
  std::optional<double> D_prime;
  std::optional<double> R;
  double window = 8.0;
  std::uint64_t seed = 1;
  std::size_t samples = 0;  // 0: subcommand default
  std::string out;          // empty: stdout
  std::string format;       // empty: subcommand default
};

ModelSpace parse_space(const std::string& arg) {
  if (arg == "lattice" || arg == "lattice_ray_plane") return ModelSpace::lattice_ray_plane();
  if (arg == "euclidean" || arg == "euclidean_plane") return ModelSpace::euclidean_plane();
  return space_from_json(load_json_arg(arg));
}

BoundaryMap parse_map(const std::string& arg) {
  if (arg == "identity") return BoundaryMap::identity();
  if (arg == "paper_swap") return BoundaryMap::paper_swap();
  return BoundaryMap::from_json(load_json_arg(arg));
}

std::string chart_name(const ModelPoint& p) {
  return p.is_plane() ? "plane" : p.is_ray() ? "ray" : "edge";
}

std::string chart_coords(const ModelPoint& p) {
  if (p.is_plane()) return format_double(p.as_plane().x) + ";" + format_double(p.as_plane().y);
  if (p.is_ray()) {
    const auto& r = p.as_ray();
    return std::to_string(r.m) + ";" + std::to_string(r.n) + ";" + format_double(r.h);
  }
  const auto& e = p.as_edge();
  return std::to_string(e.u) + ";" + std::to_string(e.v) + ";" + format_double(e.t);
}

void check_format(const std::string& format, std::initializer_list<const char*> allowed) {
  for (const char* a : allowed)
    if (format == a) return;
  throw InvalidInput("unsupported --format '" + format + "' for this subcommand");
}

class Sink {
 public:
  Sink(const std::string& path, std::ostream& fallback) : path_(path), fallback_(fallback) {}
  std::ostream& stream() { return path_.empty() ? fallback_ : buffer_; }
  void flush() {
    if (path_.empty()) return;
    std::ofstream f(path_, std::ios::binary);
    if (!f) throw InvalidInput("cannot write '" + path_ + "'");
    f << buffer_.str();
  }

 private:
  std::string path_;
  std::ostream& fallback_;
  std::ostringstream buffer_;
};

std::string dump(const json& j) { return j.dump(2) + "\n"; }

// ---- repro-example -------------------------------------------------------

void cmd_repro(const RunConfig& cfg, int n_max, std::ostream& out) {
  const std::string format = cfg.format.empty() ? "csv" : cfg.format;
  check_format(format, {"csv", "json"});
  const auto rows = repro_example(n_max);
  Sink sink(cfg.out, out);
  if (format == "csv") {
    sink.stream() << "n,D_alpha,D_f_alpha,cr_before,cr_after\n";
    for (const auto& r : rows)
      sink.stream() << r.n << ',' << format_double(r.D_alpha) << ',' << format_double(r.D_f_alpha) << ','
                    << format_double(r.cr_before) << ',' << format_double(r.cr_after) << '\n';
  } else {
    json a = json::array();
    for (const auto& r : rows)
      a.push_back({{"n", r.n},
                   {"D_alpha", r.D_alpha},
                   {"D_f_alpha", r.D_f_alpha},
                   {"cr_before", r.cr_before},
                   {"cr_after", r.cr_after}});
    sink.stream() << dump(a);
  }
  sink.flush();
}

// ---- contracting ---------------------------------------------------------

void cmd_contracting(const RunConfig& cfg, const std::string& spec, const std::string& mode, std::ostream& out) {
  if (!cfg.format.empty()) check_format(cfg.format, {"json"});
  const auto space = parse_space(cfg.space);
  const auto [a, b] = parse_geodesic_spec(spec);
  const auto gamma = geodesic(space, a, b);
  ContractingCertificate cert;
  if (mode == "exact") {
    cert = contracting_constant_exact(space, gamma);
  } else {
    SamplerConfig sc;
    sc.window_radius = cfg.window;
    sc.seed = cfg.seed;
    if (cfg.samples) sc.ball_count = cfg.samples;
    cert = contracting_constant_sampled(space, gamma, sc);
  }
  json j{{"geodesic", to_spec(a) + ":" + to_spec(b)},
         {"space", to_json(space)},
         {"mode", mode},
         {"D", cert.D},
         {"witness",
          {{"center", to_json(cert.witness.center)},
           {"radius", cert.witness.radius},
           {"param_lo", cert.witness.param_lo},
           {"param_hi", cert.witness.param_hi}}}};
  if (cert.sampler) {
    j["seed"] = cert.sampler->seed;
    j["window"] = cert.sampler->window_radius;
    j["balls"] = cert.sampler->ball_count;
    j["samples_per_ball"] = cert.sampler->samples_per_ball;
  }
  Sink sink(cfg.out, out);
  sink.stream() << dump(j);
  sink.flush();
}

// ---- probe ---------------------------------------------------------------

std::string bp_cols(const BoundaryPoint& p) { return std::to_string(p.m) + ',' + std::to_string(p.n); }

void cmd_probe(const RunConfig& cfg, const std::string& kind, int doublings, std::ostream& out, std::ostream& err) {
  const std::string format = cfg.format.empty() ? "csv" : cfg.format;
  check_format(format, {"csv"});
  const auto X = parse_space(cfg.space);
  const auto Y = cfg.space_y.empty() ? X : parse_space(cfg.space_y);
  const auto f = parse_map(cfg.map);
  ProbeConfig pc;
  pc.D = cfg.D;
  pc.window = cfg.window;
  pc.doublings = doublings;
  pc.seed = cfg.seed;
  if (cfg.samples) pc.sample_count = cfg.samples;

  Sink sink(cfg.out, out);
  std::ostream& csv = sink.stream();
  // The verdict goes to stdout unless the CSV occupies it.
  std::ostream& msg = cfg.out.empty() ? err : out;
  if (kind == "two_stable") {
    const auto r = two_stable_probe(X, Y, f, pc);
    csv << "window,a_m,a_n,b_m,b_n,constant_in,constant_out\n";
    for (const auto& p : r.scatter)
      csv << format_double(p.window) << ',' << bp_cols(p.a) << ',' << bp_cols(p.b) << ','
          << format_double(p.constant_in) << ',' << format_double(p.constant_out) << '\n';
    sink.flush();
    msg << "verdict: " << to_string(r.verdict) << '\n';
    for (const auto& w : r.witnesses)
      msg << "  window " << format_double(w.window) << ": " << to_spec(w.a) << " " << to_spec(w.b) << " D="
          << format_double(w.constant_in) << " -> D'=" << format_double(w.constant_out) << '\n';
  } else if (kind == "quasi_mobius") {
    const auto r = quasi_mobius_probe(X, Y, f, pc);
    csv << "window,index,a_m,a_n,b_m,b_n,c_m,c_n,d_m,d_n,cr_in,cr_out,slack\n";
    for (const auto& s : r.scatter) {
      csv << format_double(s.window) << ',' << s.index;
      for (const auto& p : s.tuple) csv << ',' << bp_cols(p);
      csv << ',' << format_double(s.cr_in) << ',' << format_double(s.cr_out) << ',' << format_double(s.slack) << '\n';
    }
    sink.flush();
    double slope = 0.0;
    for (const auto& [t, psi] : r.envelope)
      if (t > 0.0) slope = std::max(slope, psi / t);
    msg << "verdict: " << (r.identity ? std::string("envelope = identity") : to_string(r.verdict)) << '\n';
    msg << "envelope slope <= " << format_double(slope) << '\n';
    for (const auto& w : r.witnesses)
      msg << "  window " << format_double(w.window) << ": " << to_spec(w.tuple[0]) << " " << to_spec(w.tuple[1])
          << " " << to_spec(w.tuple[2]) << " " << to_spec(w.tuple[3]) << " |cr|=" << format_double(w.cr_in)
          << " -> " << format_double(w.cr_out) << '\n';
  } else {
    throw InvalidInput("unknown probe kind '" + kind + "'");
  }
}

// ---- extend --------------------------------------------------------------

json bound_json(const LinearBound& b) { return {{"lambda", b.lambda}, {"eps", b.eps}}; }

void cmd_extend(const RunConfig& cfg, int per_side, const std::string& report_path, std::ostream& out,
                std::ostream& err) {
  const std::string format = cfg.format.empty() ? "csv" : cfg.format;
  check_format(format, {"csv", "json"});
  const auto X = parse_space(cfg.space);
  const auto Y = cfg.space_y.empty() ? X : parse_space(cfg.space_y);
  const auto f = parse_map(cfg.map);
  const double D_prime = cfg.D_prime.value_or(cfg.D);

  // The construction needs a 2-stable map; refuse with the witness otherwise.
  {
    ProbeConfig pc;
    pc.D = cfg.D;
    pc.window = cfg.window;
    pc.doublings = 2;
    pc.seed = cfg.seed;
    const auto probe = two_stable_probe(X, Y, f, pc);
    if (probe.verdict == Verdict::Violation) {
      const auto& w = probe.worst_pair;
      throw StratumFailure("the map is not 2-stable: " + to_spec(w.a) + " " + to_spec(w.b) + " has D=" +
                           format_double(w.constant_in) + " but its image has D'=" + format_double(w.constant_out));
    }
  }

  const auto queries = grid_queries(X, {0.0, 0.0}, cfg.window, per_side);
  if (X.is_euclidean()) throw InvalidInput("the Euclidean plane has no boundary to extend from");
  // Boundary agreement is measured along the ray at the origin, or the first
  // ray leaf of a tree.
  const BoundaryPoint p0 = X.is_tree() ? BoundaryPoint{X.tree().ray_leaves().front(), 0} : BoundaryPoint{0, 0};
  // Ray points high above the plane need a far larger preimage radius than
  // the grid, so boundary agreement gets its own extension unless --R is set.
  const std::vector<double> heights{4.0, 8.0, 16.0, 32.0};
  std::vector<ModelPoint> ray_queries{X.attachment(p0)};
  for (double h : heights) ray_queries.push_back(X.canonical(ModelPoint::ray(p0.m, p0.n, h)));
  const auto& pi = *BarycenterMap::shared(X, cfg.D);
  const double R = cfg.R ? *cfg.R : select_radius(pi, queries);
  const double R_ray = cfg.R ? *cfg.R : std::max(R, select_radius(pi, ray_queries));
  const ExtendedMap h(X, Y, f, {cfg.D, D_prime, R, cfg.seed, 20000});
  const ExtendedMap h_ray(X, Y, f, {cfg.D, D_prime, R_ray, cfg.seed, 20000});

  std::vector<Evaluation> evals;
  evals.reserve(queries.size());
  for (const auto& x : queries) evals.push_back(h.evaluate(x));

  const auto pairs = sample_pairs(X, {0.0, 0.0}, cfg.window, cfg.samples ? cfg.samples : 500, cfg.seed);
  const auto qi = qi_probe(h, pairs);
  const auto inv = h.quasi_inverse();
  json qinv = json::array();
  std::vector<ModelPoint> xs;
  for (int k = 0; k < 4; ++k) {
    const double W = cfg.window * std::ldexp(1.0, k - 3);
    const auto fresh = random_queries(X, {0.0, 0.0}, W, 32, cfg.seed + 1 + static_cast<std::uint64_t>(k));
    xs.insert(xs.end(), fresh.begin(), fresh.end());
    const auto r = quasi_inverse_probe(h, inv, xs, xs);
    qinv.push_back({{"window", W}, {"max_displacement_XX", r.max_displacement_XX},
                    {"max_displacement_YY", r.max_displacement_YY}});
  }
  const auto agree = boundary_agreement_probe(h_ray, p0, heights);

  json report{{"map", f.to_json()},
              {"D", cfg.D},
              {"D_prime", D_prime},
              {"R", R},
              {"M", h.M()},
              {"C2_observed", h.C2_observed()},
              {"qi", {{"upper", bound_json(qi.upper)}, {"lower", bound_json(qi.lower)}, {"pairs", pairs.size()}}},
              {"quasi_inverse", qinv},
              {"boundary_agreement",
               {{"base", to_json(p0)},
                {"R", R_ray},
                {"M", h_ray.M()},
                {"heights", agree.heights},
                {"deviations", agree.deviations},
                {"bound", R_ray + h_ray.M()},
                {"verdict", to_string(agree.verdict)}}}};

  Sink sink(cfg.out, out);
  if (format == "csv") {
    sink.stream() << "x_chart,x_coords,h_chart,h_coords,pi_diameter,triangle_count\n";
    for (const auto& e : evals)
      sink.stream() << chart_name(e.x) << ',' << chart_coords(e.x) << ',' << chart_name(e.h) << ','
                    << chart_coords(e.h) << ',' << format_double(e.pi_diameter) << ',' << e.triangle_count << '\n';
    sink.flush();
    if (!report_path.empty()) {
      Sink rs(report_path, out);
      rs.stream() << dump(report);
      rs.flush();
    } else {
      (cfg.out.empty() ? err : out) << dump(report);
    }
  } else {
    json ev = json::array();
    for (const auto& e : evals)
      ev.push_back({{"x", to_json(e.x)}, {"h", to_json(e.h)}, {"pi_diameter", e.pi_diameter},
                    {"triangle_count", e.triangle_count}});
    report["evaluations"] = ev;
    sink.stream() << dump(report);
    sink.flush();
  }
}

// ---- ek ------------------------------------------------------------------

void cmd_ek(const RunConfig& cfg, const std::string& triangle_spec, std::ostream& out) {
  if (!cfg.format.empty()) check_format(cfg.format, {"csv"});
  const auto space = parse_space(cfg.space);
  // "A:B:C" reuses the geodesic grammar pairwise.
  const auto mid = triangle_spec.rfind(':');
  if (mid == std::string::npos) throw InvalidInput("triangle spec needs three endpoints A:B:C");
  const auto [a, b] = parse_geodesic_spec(triangle_spec.substr(0, mid));
  const auto [c, unused] = parse_geodesic_spec(triangle_spec.substr(mid + 1) + ":" + triangle_spec.substr(mid + 1));
  (void)unused;
  const auto* pa = std::get_if<BoundaryPoint>(&a);
  const auto* pb = std::get_if<BoundaryPoint>(&b);
  const auto* pc = std::get_if<BoundaryPoint>(&c);
  if (!pa || !pb || !pc) throw InvalidInput("triangle vertices must be boundary points r[..]");
  const Triangle T{*pa, *pb, *pc};
  const auto check = in_stratum(space, {T.begin(), T.end()}, cfg.D);
  if (!check.member) throw StratumFailure("triangle is not in the D-stratum for --D " + format_double(cfg.D));
  const double K = ConstantsTable::for_space(space).K(cfg.D);
  const auto ek = ek_set(space, T, K);

  Sink sink(cfg.out, out);
  auto& s = sink.stream();
  s << "role,x_chart,x_coords\n";
  for (int i = 0; i < 3; ++i) {
    const auto side = geodesic(space, T[static_cast<std::size_t>(i)], T[static_cast<std::size_t>((i + 1) % 3)]);
    for (const auto& [t, q] : sample_geodesic(space, side, 33, 2.0 * K))
      s << "side" << i << ',' << chart_name(q) << ',' << chart_coords(q) << '\n';
  }
  for (const auto& q : ek.samples) s << "sample," << chart_name(q) << ',' << chart_coords(q) << '\n';
  s << "barycenter," << chart_name(ek.ball.center) << ',' << chart_coords(ek.ball.center) << '\n';
  sink.flush();
}

// ---- tables --------------------------------------------------------------

void cmd_tables(const RunConfig& cfg, std::ostream& out) {
  if (!cfg.format.empty()) check_format(cfg.format, {"json"});
  const auto space = parse_space(cfg.space);
  auto& table = ConstantsTable::for_space(space);
  for (double D : kDGrid) {
    if (D > cfg.D) break;
    for (auto c : {Constant::Delta, Constant::BoundedImage, Constant::Triangle, Constant::EKDiameter,
                   Constant::CentersC, Constant::FlipC1})
      table.entry(c, D);
  }
  Sink sink(cfg.out, out);
  sink.stream() << dump(table.to_json());
  sink.flush();
}

// ---- plot ----------------------------------------------------------------

struct Csv {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::size_t column(const std::string& name) const {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw InvalidInput("input CSV is missing column '" + name + "'");
    return static_cast<std::size_t>(it - header.begin());
  }
};

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) out.push_back(cur);
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

Csv parse_csv(const std::string& text) {
  Csv csv;
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw InvalidInput("input CSV is empty");
  csv.header = split(line, ',');
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto cells = split(line, ',');
    if (cells.size() != csv.header.size()) throw InvalidInput("ragged CSV row: " + line);
    csv.rows.push_back(std::move(cells));
  }
  return csv;
}

double to_num(const std::string& s) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used == s.size()) return v;
  } catch (const std::exception&) {
  }
  throw InvalidInput("not a number: '" + s + "'");
}

// Plane-chart location of a point plus its ray height (0 off the rays).
struct Placed {
  double x = 0.0, y = 0.0, h = 0.0;
};

std::optional<Placed> place(const std::string& chart, const std::string& coords) {
  const auto c = split(coords, ';');
  if (chart == "plane" && c.size() == 2) return Placed{to_num(c[0]), to_num(c[1]), 0.0};
  if (chart == "ray" && c.size() == 3) return Placed{to_num(c[0]), to_num(c[1]), to_num(c[2])};
  if (chart == "edge") return std::nullopt;  // not plane-chart geometry
  throw InvalidInput("bad point '" + chart + "," + coords + "'");
}

class Svg {
 public:
  void fit(const std::vector<Placed>& pts) {
    for (const auto& p : pts) {
      lo_x_ = std::min(lo_x_, p.x);
      hi_x_ = std::max(hi_x_, p.x);
      lo_y_ = std::min(lo_y_, p.y);
      hi_y_ = std::max(hi_y_, p.y);
    }
    if (pts.empty()) lo_x_ = lo_y_ = -1.0, hi_x_ = hi_y_ = 1.0;
    const double span = std::max({hi_x_ - lo_x_, hi_y_ - lo_y_, 1e-6});
    scale_ = (kSize - 2 * kMargin) / span;
  }
  double sx(double x) const { return kMargin + (x - lo_x_) * scale_; }
  double sy(double y) const { return kSize - kMargin - (y - lo_y_) * scale_; }

  void line(double x0, double y0, double x1, double y1, const char* style) {
    emit("<line x1=\"%.3f\" y1=\"%.3f\" x2=\"%.3f\" y2=\"%.3f\" %s/>\n", sx(x0), sy(y0), sx(x1), sy(y1), style);
  }
  void dot(double x, double y, double r, const char* style) {
    emit("<circle cx=\"%.3f\" cy=\"%.3f\" r=\"%.2f\" %s/>\n", sx(x), sy(y), r, style);
  }
  // Ray points are drawn at their attachment with a tick whose length grows
  // with the height.
  void tick(const Placed& p, const char* style) {
    if (p.h <= 0.0) return;
    const double len = 4.0 + 2.0 * std::log2(1.0 + p.h);
    emit("<line x1=\"%.3f\" y1=\"%.3f\" x2=\"%.3f\" y2=\"%.3f\" %s/>\n", sx(p.x), sy(p.y), sx(p.x) + 0.7 * len,
         sy(p.y) - len, style);
  }
  void raw(const std::string& s) { body_ += s; }

  std::string finish() const {
    char head[256];
    std::snprintf(head, sizeof head,
                  "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%d\" height=\"%d\" viewBox=\"0 0 %d %d\">\n",
                  kSize, kSize, kSize, kSize);
    return std::string(head) +
           "<defs><marker id=\"arrow\" viewBox=\"0 0 10 10\" refX=\"10\" refY=\"5\" markerWidth=\"6\" "
           "markerHeight=\"6\" orient=\"auto\"><path d=\"M0,0 L10,5 L0,10 z\" fill=\"#c0392b\"/></marker></defs>\n"
           "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n" +
           body_ + "</svg>\n";
  }

 private:
  static constexpr int kSize = 640;
  static constexpr double kMargin = 24.0;
  template <typename... A>
  void emit(const char* fmt, A... a) {
    char buf[320];
    std::snprintf(buf, sizeof buf, fmt, a...);
    body_ += buf;
  }
  double lo_x_ = 1e300, hi_x_ = -1e300, lo_y_ = 1e300, hi_y_ = -1e300, scale_ = 1.0;
  std::string body_;
};

void cmd_plot(const RunConfig& cfg, const std::string& input, const std::string& style, std::ostream& out) {
  if (!cfg.format.empty()) check_format(cfg.format, {"svg"});
  std::ifstream in(input, std::ios::binary);
  if (!in) throw InvalidInput("cannot open '" + input + "'");
  std::ostringstream text;
  text << in.rdbuf();
  Sink sink(cfg.out, out);
  sink.stream() << render_svg(text.str(), style);
  sink.flush();
}

}  // namespace

std::string render_svg(const std::string& text, const std::string& style) {
  if (style != "arrows" && style != "cloud") throw InvalidInput("unknown plot style '" + style + "'");
  const Csv csv = parse_csv(text);
  Svg svg;
  if (style == "arrows") {
    const auto xc = csv.column("x_chart"), xv = csv.column("x_coords");
    const auto hc = csv.column("h_chart"), hv = csv.column("h_coords");
    std::vector<std::pair<Placed, Placed>> arrows;
    std::vector<Placed> all;
    for (const auto& r : csv.rows) {
      const auto a = place(r[xc], r[xv]);
      const auto b = place(r[hc], r[hv]);
      if (!a || !b) continue;
      arrows.emplace_back(*a, *b);
      all.push_back(*a);
      all.push_back(*b);
    }
    svg.fit(all);
    for (const auto& [a, b] : arrows) {
      svg.dot(a.x, a.y, 1.5, "fill=\"#34495e\"");
      svg.tick(a, "stroke=\"#34495e\" stroke-width=\"1\"");
      svg.tick(b, "stroke=\"#c0392b\" stroke-width=\"1\"");
      svg.line(a.x, a.y, b.x, b.y, "stroke=\"#c0392b\" stroke-width=\"0.8\" marker-end=\"url(#arrow)\"");
    }
    return svg.finish();
  }
  const auto rc = csv.column("role"), xc = csv.column("x_chart"), xv = csv.column("x_coords");
  std::map<std::string, std::vector<Placed>> groups;
  std::vector<Placed> all;
  for (const auto& r : csv.rows) {
    const auto p = place(r[xc], r[xv]);
    if (!p) continue;
    groups[r[rc]].push_back(*p);
    all.push_back(*p);
  }
  svg.fit(all);
  for (const auto& [role, pts] : groups) {
    if (role.rfind("side", 0) == 0) {
      // Sides run plane-chart segments between ray stubs.
      for (std::size_t i = 0; i + 1 < pts.size(); ++i)
        if (pts[i].h == 0.0 || pts[i + 1].h == 0.0)
          svg.line(pts[i].x, pts[i].y, pts[i + 1].x, pts[i + 1].y, "stroke=\"#2c3e50\" stroke-width=\"1.2\"");
      for (const auto& p : pts) svg.tick(p, "stroke=\"#2c3e50\" stroke-width=\"1\"");
    } else if (role == "barycenter") {
      for (const auto& p : pts) svg.dot(p.x, p.y, 4.0, "fill=\"#c0392b\"");
    } else {
      for (const auto& p : pts) {
        svg.dot(p.x, p.y, 1.2, "fill=\"#2980b9\" fill-opacity=\"0.6\"");
        svg.tick(p, "stroke=\"#2980b9\" stroke-width=\"0.6\"");
      }
    }
  }
  return svg.finish();
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"morselab: Morse-boundary computations on model CAT(0) spaces"};
  app.require_subcommand(1);
  RunConfig cfg;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--out", cfg.out, "output path (default stdout)");
    sub->add_option("--format", cfg.format, "output format: csv, json or svg");
  };
  auto spaces = [&](CLI::App* sub) {
    sub->add_option("--space", cfg.space, "space: lattice | euclidean | JSON (inline or path)");
  };
  auto sampling = [&](CLI::App* sub) {
    sub->add_option("--seed", cfg.seed, "random seed");
    sub->add_option("--samples", cfg.samples, "sample count");
    sub->add_option("--window", cfg.window, "window radius");
  };

  int n_max = 10;
  auto* repro = app.add_subcommand("repro-example", "exact constants and cross-ratios of the swap example");
  repro->add_option("--n-max", n_max, "largest n")->capture_default_str();
  common(repro);

  std::string spec, mode = "exact";
  auto* contracting = app.add_subcommand("contracting", "contracting constant of a geodesic");
  contracting->add_option("geodesic", spec, "endpoints A:B, e.g. r[0,0]:r[3,4]")->required();
  contracting->add_option("--mode", mode)->check(CLI::IsMember({"exact", "sampled"}))->capture_default_str();
  spaces(contracting);
  sampling(contracting);
  common(contracting);

  std::string kind;
  int doublings = 2;
  auto* probe = app.add_subcommand("probe", "2-stability or quasi-mobius probe of a boundary map");
  probe->add_option("--kind", kind)->required()->check(CLI::IsMember({"two_stable", "quasi_mobius"}));
  probe->add_option("--space-y", cfg.space_y, "target space (default --space)");
  probe->add_option("--map", cfg.map, "identity | paper_swap | JSON map description");
  probe->add_option("--D", cfg.D, "stratum constant");
  probe->add_option("--doublings", doublings)->capture_default_str();
  spaces(probe);
  sampling(probe);
  common(probe);

  int per_side = 16;
  std::string report;
  auto* extend = app.add_subcommand("extend", "extend a boundary map to the interior and probe it");
  extend->add_option("--space-y", cfg.space_y, "target space (default --space)");
  extend->add_option("--map", cfg.map, "identity | JSON map description");
  extend->add_option("--D", cfg.D, "stratum constant for triangles in X");
  extend->add_option("--Dprime", cfg.D_prime, "stratum constant for triangles in Y (default --D)");
  extend->add_option("--R", cfg.R, "preimage radius (default: smallest power of 2 covering the queries)");
  extend->add_option("--grid", per_side, "query grid points per side")->capture_default_str();
  extend->add_option("--report", report, "path for the JSON report when --format csv");
  spaces(extend);
  sampling(extend);
  common(extend);

  std::string triangle;
  auto* ek = app.add_subcommand("ek", "E_K cloud and barycenter of a boundary triangle");
  ek->add_option("triangle", triangle, "vertices A:B:C, e.g. r[0,0]:r[1,0]:r[0,1]")->required();
  ek->add_option("--D", cfg.D, "stratum constant");
  spaces(ek);
  common(ek);

  auto* tables = app.add_subcommand("tables", "compute and export the constants table");
  tables->add_option("--D", cfg.D, "largest grid value to compute");
  spaces(tables);
  common(tables);

  std::string input, plot_style = "arrows";
  auto* plot = app.add_subcommand("plot", "SVG of the plane chart");
  plot->add_option("input", input, "CSV from `extend` (arrows) or `ek` (cloud)")->required();
  plot->add_option("--style", plot_style, "arrows | cloud")->capture_default_str();
  common(plot);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  }

  try {
    if (*repro) cmd_repro(cfg, n_max, out);
    else if (*contracting) cmd_contracting(cfg, spec, mode, out);
    else if (*probe) cmd_probe(cfg, kind, doublings, out, err);
    else if (*extend) cmd_extend(cfg, per_side, report, out, err);
    else if (*ek) cmd_ek(cfg, triangle, out);
    else if (*tables) cmd_tables(cfg, out);
    else if (*plot) cmd_plot(cfg, input, plot_style, out);
  } catch (const InvalidInput& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const StratumFailure& e) {
    err << "stratum failure: " << e.what() << '\n';
    return kStratum;
  } catch (const InvariantViolation& e) {
    err << "invariant violation: " << e.what() << '\n';
    return kInvariant;
  } catch (const nlohmann::json::exception& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  }
  return kOk;
}

}  // namespace morselab::cli
