#include "morselab/tables.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <unistd.h>

#include "morselab/boundary.hpp"
#include "morselab/contracting.hpp"
#include "morselab/extension.hpp"
#include "morselab/io.hpp"

namespace morselab {

std::string to_string(Constant c) {
  switch (c) {
    case Constant::Delta:
      return "delta";
    case Constant::BoundedImage:
      return "bounded_image";
    case Constant::Triangle:
      return "triangle";
    case Constant::EKDiameter:
      return "ek_diameter";
    case Constant::CentersC:
      return "centers_C";
    case Constant::FlipC1:
      return "flip_C1";
  }
  return "unknown";
}

namespace {

std::optional<Constant> constant_from_string(const std::string& s) {
  for (auto c : {Constant::Delta, Constant::BoundedImage, Constant::Triangle, Constant::EKDiameter,
                 Constant::CentersC, Constant::FlipC1})
    if (to_string(c) == s) return c;
  return std::nullopt;
}

double seg_point(const PlanePoint& p, const PlanePoint& a, const PlanePoint& b) {
  const double ux = b.x - a.x, uy = b.y - a.y;
  const double l2 = ux * ux + uy * uy;
  double s = l2 > 0.0 ? ((p.x - a.x) * ux + (p.y - a.y) * uy) / l2 : 0.0;
  s = std::clamp(s, 0.0, 1.0);
  return std::hypot(p.x - a.x - s * ux, p.y - a.y - s * uy);
}

double orient(const PlanePoint& a, const PlanePoint& b, const PlanePoint& c) {
  return (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x);
}

double seg_seg(const PlanePoint& a, const PlanePoint& b, const PlanePoint& c, const PlanePoint& d) {
  const double o1 = orient(a, b, c), o2 = orient(a, b, d), o3 = orient(c, d, a), o4 = orient(c, d, b);
  if (((o1 > 0 && o2 < 0) || (o1 < 0 && o2 > 0)) && ((o3 > 0 && o4 < 0) || (o3 < 0 && o4 > 0))) return 0.0;
  return std::min({seg_point(a, c, d), seg_point(b, c, d), seg_point(c, a, b), seg_point(d, a, b)});
}

// Parameter (arc length from a) of the Euclidean foot of p on [a, b].
double seg_param(const PlanePoint& p, const PlanePoint& a, const PlanePoint& b) {
  const double ux = b.x - a.x, uy = b.y - a.y;
  const double l2 = ux * ux + uy * uy;
  const double s = std::clamp(((p.x - a.x) * ux + (p.y - a.y) * uy) / l2, 0.0, 1.0);
  return s * std::sqrt(l2);
}

double norm(double x, double y) { return std::sqrt(x * x + y * y); }

struct Observed {
  double value = 0.0;
  std::size_t count = 0;
  void add(double v) {
    value = std::max(value, v);
    ++count;
  }
};

// Slim triangles with a at the origin: the side (a,b) against the two
// geodesics through the projection p of b on (a,c). Only the plane segment
// of (a,b) can be off them; distance to [A,P] grows and distance to [P,B]
// shrinks along it, so the worst point is where they cross.
Observed lattice_delta(double G) {
  std::vector<PlanePoint> pts;
  const int r = static_cast<int>(std::floor(2.0 * G));
  for (int i = -r; i <= r; ++i)
    for (int j = -r; j <= r; ++j)
      if ((i != 0 || j != 0) && norm(i / 2.0, j / 2.0) <= G + kGeomEps) pts.push_back({i / 2.0, j / 2.0});
  const PlanePoint A{0.0, 0.0};
  Observed obs;
  for (const auto& B : pts) {
    for (const auto& C : pts) {
      if (B == C || norm(B.x - C.x, B.y - C.y) > G + kGeomEps) continue;
      const double t = seg_param(B, A, C) / norm(C.x, C.y);
      const PlanePoint P{t * C.x, t * C.y};
      double lo = 0.0, hi = 1.0;
      for (int it = 0; it < 60; ++it) {
        const double s = 0.5 * (lo + hi);
        const PlanePoint Q{s * B.x, s * B.y};
        if (seg_point(Q, A, P) < seg_point(Q, P, B)) lo = s;
        else hi = s;
      }
      const PlanePoint Q{lo * B.x, lo * B.y}, Q2{hi * B.x, hi * B.y};
      obs.add(std::max(std::min(seg_point(Q, A, P), seg_point(Q, P, B)),
                       std::min(seg_point(Q2, A, P), seg_point(Q2, P, B))));
    }
  }
  return obs;
}

// gamma = (a, c) with a at the origin; beta between lattice rays in the
// window. min(projection diameter, distance) is what a bound must exceed.
Observed lattice_bounded_image(double G) {
  const auto offsets = lattice_offsets(G);
  const auto w = static_cast<int>(std::floor(2.0 * G));
  std::vector<PlanePoint> window;
  for (int i = -w; i <= w; ++i)
    for (int j = -w; j <= w; ++j) window.push_back({static_cast<double>(i), static_cast<double>(j)});
  const PlanePoint A{0.0, 0.0};
  Observed obs;
  for (const auto& o : offsets) {
    const PlanePoint C{static_cast<double>(o.m), static_cast<double>(o.n)};
    std::vector<double> t(window.size());
    for (std::size_t i = 0; i < window.size(); ++i) t[i] = seg_param(window[i], A, C);
    for (std::size_t i = 0; i < window.size(); ++i) {
      const auto& U = window[i];
      if (U == A || U == C) {
        obs.count += window.size() - i - 1;  // shares a ray: distance 0
        continue;
      }
      for (std::size_t j = i + 1; j < window.size(); ++j) {
        const auto& V = window[j];
        if (V == A || V == C) {
          ++obs.count;
          continue;
        }
        const double diam = std::abs(t[i] - t[j]);
        if (diam <= obs.value) {
          ++obs.count;
          continue;
        }
        obs.add(std::min(diam, seg_seg(U, V, A, C)));
      }
    }
  }
  return obs;
}

Observed lattice_triangle(double G) {
  const auto offsets = lattice_offsets(G);
  Observed obs;
  for (const auto& b : offsets)
    for (const auto& o : offsets) {
      const BoundaryPoint c{b.m + o.m, b.n + o.n};
      if (c.m == 0 && c.n == 0) continue;
      obs.add(norm(static_cast<double>(c.m), static_cast<double>(c.n)));
    }
  return obs;
}

using Tuple4 = std::array<BoundaryPoint, 4>;

template <typename Visit>
void lattice_tuples(double G, Visit visit) {
  const auto pts = lattice_offsets(G);
  const BoundaryPoint a{0, 0};
  auto close = [&](const BoundaryPoint& p, const BoundaryPoint& q) {
    return norm(static_cast<double>(p.m - q.m), static_cast<double>(p.n - q.n)) <= G + kGeomEps;
  };
  for (const auto& b : pts)
    for (const auto& c : pts) {
      if (b == c || !close(b, c)) continue;
      for (const auto& d : pts) {
        if (d == b || d == c || !close(b, d) || !close(c, d)) continue;
        visit(Tuple4{a, b, c, d});
      }
    }
}

template <typename Visit>
void tree_tuples(const ModelSpace& space, double G, int arity, Visit visit) {
  std::vector<BoundaryPoint> leaves;
  for (auto l : space.tree().ray_leaves()) leaves.push_back({l, 0});
  const std::size_t n = leaves.size();
  std::vector<std::size_t> idx(static_cast<std::size_t>(arity), 0);
  auto rec = [&](auto&& self, int depth) -> void {
    if (depth == arity) {
      std::vector<BoundaryPoint> t;
      for (auto i : idx) t.push_back(leaves[i]);
      if (tuple_constant(space, t) <= G + kGeomEps) visit(t);
      return;
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (std::find(idx.begin(), idx.begin() + depth, i) != idx.begin() + depth) continue;
      idx[static_cast<std::size_t>(depth)] = i;
      self(self, depth + 1);
    }
  };
  rec(rec, 0);
}

double centers_gap(const ModelSpace& space, const BarycenterMap& pi, const Tuple4& t) {
  const double cr = std::abs(cross_ratio_value(space, t[0], t[1], t[2], t[3]));
  const double d = distance(space, pi(Triangle{t[0], t[1], t[2]}), pi(Triangle{t[0], t[2], t[3]}));
  return std::abs(d - cr);
}

double smallest_flip(const ModelSpace& space, const Tuple4& t) {
  return std::min({std::abs(cross_ratio_value(space, t[0], t[1], t[2], t[3])),
                   std::abs(cross_ratio_value(space, t[0], t[2], t[1], t[3])),
                   std::abs(cross_ratio_value(space, t[0], t[2], t[3], t[1]))});
}

std::string sanitize(const std::string& key) {
  std::string out = key;
  for (auto& ch : out)
    if (!std::isalnum(static_cast<unsigned char>(ch)) && ch != '_' && ch != '-') ch = '_';
  return out;
}

}  // namespace

ConstantsTable& ConstantsTable::for_space(const ModelSpace& space) {
  if (space.is_euclidean()) throw InvalidInput("the Euclidean plane has no boundary and no constant tables");
  static std::mutex mutex;
  static std::map<std::string, std::unique_ptr<ConstantsTable>> registry;
  std::lock_guard lock(mutex);
  auto& slot = registry[space.key()];
  if (!slot) slot = std::make_unique<ConstantsTable>(space);
  return *slot;
}

double ConstantsTable::grid_value(double D) {
  if (!(D >= 0.0)) throw InvalidInput("D must be non-negative");
  for (double g : kDGrid)
    if (D <= g + kGeomEps) return g;
  throw InvalidInput("D = " + format_double(D) + " is beyond the constant tables (max " +
                     format_double(kDGrid.back()) + ")");
}

ConstantsTable::ConstantsTable(const ModelSpace& space) : space_(space) {
  if (const char* dir = std::getenv("MORSELAB_TABLES"); dir && *dir)
    path_ = std::filesystem::path(dir) / (sanitize(space.key()) + ".json");
  load();
}

const TableEntry& ConstantsTable::entry(Constant c, double D) {
  const double G = grid_value(D);
  std::lock_guard lock(mutex_);
  if (auto it = entries_.find({c, G}); it != entries_.end()) return it->second;
  TableEntry e = compute(c, G);
  auto& slot = entries_[{c, G}] = std::move(e);
  save();
  return slot;
}

TableEntry ConstantsTable::compute(Constant c, double G) {
  Observed obs;
  std::string method;
  if (space_.is_lattice()) {
    switch (c) {
      case Constant::Delta:
        obs = lattice_delta(G);
        method = "exhaustive: a at the origin, b and c at half-integer points, pairwise <= D";
        break;
      case Constant::BoundedImage:
        obs = lattice_bounded_image(G);
        method = "exhaustive: gamma from the origin to lattice c with |c| <= D, beta over lattice pairs in [-2D, 2D]^2";
        break;
      case Constant::Triangle:
        obs = lattice_triangle(G);
        method = "exhaustive: a at the origin, two sides <= D";
        break;
      case Constant::EKDiameter: {
        const auto pi = BarycenterMap::shared(space_, G);
        for (const auto& T : lattice_shapes(G)) obs.add(pi->cloud_diameter(T));
        method = "every triangle shape with pairwise <= D, E_K at pitch K/32";
        break;
      }
      case Constant::CentersC: {
        const auto pi = BarycenterMap::shared(space_, G);
        lattice_tuples(G, [&](const Tuple4& t) { obs.add(centers_gap(space_, *pi, t)); });
        method = "every 4-tuple (0,b,c,d) with pairwise <= D";
        break;
      }
      case Constant::FlipC1:
        lattice_tuples(G, [&](const Tuple4& t) { obs.add(smallest_flip(space_, t)); });
        method = "every 4-tuple (0,b,c,d) with pairwise <= D";
        break;
    }
  } else {
    const double inf = std::numeric_limits<double>::infinity();
    switch (c) {
      case Constant::Delta:
        tree_tuples(space_, G, 3, [&](const std::vector<BoundaryPoint>& t) {
          obs.add(verify_slim_triangle(space_, t[0], t[1], t[2], inf).worst_violation);
        });
        method = "every ordered leaf triple with pairwise <= D";
        break;
      case Constant::BoundedImage:
        tree_tuples(space_, G, 2, [&](const std::vector<BoundaryPoint>& g) {
          if (!(g[0] < g[1])) return;
          const auto gamma = geodesic(space_, g[0], g[1]);
          tree_tuples(space_, inf, 2, [&](const std::vector<BoundaryPoint>& b) {
            if (!(b[0] < b[1])) return;
            const auto r = verify_bounded_geodesic_image(space_, gamma, geodesic(space_, b[0], b[1]), 0.0);
            obs.add(std::min(r.projection_diameter, r.min_distance));
          });
        });
        method = "every pair of leaf geodesics";
        break;
      case Constant::Triangle:
        tree_tuples(space_, G, 3, [&](const std::vector<BoundaryPoint>& t) {
          obs.add(pair_constant(space_, t[0], t[2]));
        });
        method = "every leaf triangle with pairwise <= D";
        break;
      case Constant::EKDiameter: {
        const auto pi = BarycenterMap::shared(space_, G);
        tree_tuples(space_, G, 3, [&](const std::vector<BoundaryPoint>& t) {
          if (t[0] < t[1] && t[1] < t[2]) obs.add(pi->cloud_diameter({t[0], t[1], t[2]}));
        });
        method = "every leaf triangle";
        break;
      }
      case Constant::CentersC: {
        const auto pi = BarycenterMap::shared(space_, G);
        tree_tuples(space_, G, 4, [&](const std::vector<BoundaryPoint>& t) {
          obs.add(centers_gap(space_, *pi, {t[0], t[1], t[2], t[3]}));
        });
        method = "every ordered leaf 4-tuple";
        break;
      }
      case Constant::FlipC1:
        tree_tuples(space_, G, 4, [&](const std::vector<BoundaryPoint>& t) {
          obs.add(smallest_flip(space_, {t[0], t[1], t[2], t[3]}));
        });
        method = "every ordered leaf 4-tuple";
        break;
    }
  }
  TableEntry e;
  e.observed = obs.value;
  e.value = kSafetyFactor * obs.value + kTableFloor;
  e.grid_D = G;
  e.configurations = obs.count;
  e.method = method;
  return e;
}

nlohmann::json ConstantsTable::to_json() const {
  std::lock_guard lock(mutex_);
  auto entries = nlohmann::json::array();
  for (const auto& [k, e] : entries_) {
    entries.push_back({{"constant", to_string(k.first)},
                       {"D", k.second},
                       {"value", e.value},
                       {"observed", e.observed},
                       {"configurations", e.configurations},
                       {"method", e.method}});
  }
  return {{"space", space_.key()},
          {"safety_factor", kSafetyFactor},
          {"floor", kTableFloor},
          {"grid", kDGrid},
          {"entries", entries}};
}

void ConstantsTable::load() {
  if (!path_ || !std::filesystem::exists(*path_)) return;
  std::ifstream in(*path_);
  const auto j = nlohmann::json::parse(in, nullptr, false);
  // An unreadable or foreign file is recomputed rather than trusted.
  if (j.is_discarded() || !j.is_object() || j.value("space", "") != space_.key()) return;
  if (j.value("safety_factor", 0.0) != kSafetyFactor || j.value("floor", 0.0) != kTableFloor) return;
  for (const auto& e : j.value("entries", nlohmann::json::array())) {
    const auto c = constant_from_string(e.value("constant", ""));
    if (!c) continue;
    TableEntry t;
    t.grid_D = e.value("D", 0.0);
    t.value = e.value("value", 0.0);
    t.observed = e.value("observed", 0.0);
    t.configurations = e.value("configurations", std::size_t{0});
    t.method = e.value("method", "");
    entries_[{*c, t.grid_D}] = t;
  }
}

void ConstantsTable::save() const {
  if (!path_) return;
  std::filesystem::create_directories(path_->parent_path());
  const auto tmp = path_->string() + ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp);
    out << to_json().dump(2) << '\n';
    if (!out) throw Error("cannot write constant table " + tmp);
  }
  std::filesystem::rename(tmp, *path_);
}

}  // namespace morselab
