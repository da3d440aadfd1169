#include "morselab/boundary.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "morselab/io.hpp"
#include "morselab/random.hpp"
#include "morselab/tables.hpp"

namespace morselab {

BoundaryMap BoundaryMap::identity() { return BoundaryMap{}; }

BoundaryMap BoundaryMap::translation(std::int64_t dx, std::int64_t dy) {
  BoundaryMap f;
  if (dx == 0 && dy == 0) return f;
  f.kind_ = Kind::Translation;
  f.dx_ = dx;
  f.dy_ = dy;
  f.label_ = "translation(" + std::to_string(dx) + "," + std::to_string(dy) + ")";
  return f;
}

BoundaryMap BoundaryMap::paper_swap() {
  BoundaryMap f;
  f.kind_ = Kind::Swap;
  f.label_ = "paper_swap";
  return f;
}

BoundaryMap BoundaryMap::table(const std::vector<std::pair<BoundaryPoint, BoundaryPoint>>& pairs) {
  BoundaryMap f;
  f.kind_ = Kind::Table;
  f.label_ = "table";
  std::set<BoundaryPoint> sources, targets;
  for (const auto& [s, t] : pairs) {
    if (!sources.insert(s).second) throw InvalidInput("boundary map table lists a source twice");
    if (!targets.insert(t).second) throw InvalidInput("boundary map table is not injective");
    f.forward_[s] = t;
    f.backward_[t] = s;
  }
  if (sources != targets)
    throw InvalidInput("boundary map table must permute the listed points (unlisted points are fixed)");
  return f;
}

BoundaryMap BoundaryMap::from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("kind")) throw InvalidInput("boundary map JSON needs a \"kind\"");
  const auto kind = j.at("kind").get<std::string>();
  try {
    if (kind == "identity") return identity();
    if (kind == "translation") return translation(j.at("dx").get<std::int64_t>(), j.at("dy").get<std::int64_t>());
    if (kind == "paper_swap") return paper_swap();
    if (kind == "table") {
      std::vector<std::pair<BoundaryPoint, BoundaryPoint>> pairs;
      for (const auto& p : j.at("pairs")) {
        if (!p.is_array() || p.size() != 2) throw InvalidInput("table pairs are [[m,n],[m',n']]");
        pairs.emplace_back(boundary_from_json(p[0]), boundary_from_json(p[1]));
      }
      return table(pairs);
    }
  } catch (const nlohmann::json::exception& e) {
    throw InvalidInput(std::string("malformed boundary map: ") + e.what());
  }
  throw InvalidInput("unknown boundary map kind: " + kind);
}

nlohmann::json BoundaryMap::to_json() const {
  switch (kind_) {
    case Kind::Identity:
      return {{"kind", "identity"}};
    case Kind::Translation:
      return {{"kind", "translation"}, {"dx", dx_}, {"dy", dy_}};
    case Kind::Swap:
      return {{"kind", "paper_swap"}};
    case Kind::Table: {
      auto pairs = nlohmann::json::array();
      for (const auto& [s, t] : forward_) pairs.push_back({morselab::to_json(s), morselab::to_json(t)});
      return {{"kind", "table"}, {"pairs", pairs}};
    }
  }
  return {};
}

BoundaryPoint BoundaryMap::operator()(const BoundaryPoint& b) const {
  switch (kind_) {
    case Kind::Identity:
      return b;
    case Kind::Translation:
      return {b.m + dx_, b.n + dy_};
    case Kind::Swap:
      return b.n == 0 ? BoundaryPoint{-b.m, 0} : b;
    case Kind::Table: {
      const auto it = forward_.find(b);
      return it == forward_.end() ? b : it->second;
    }
  }
  return b;
}

BoundaryPoint BoundaryMap::inverse_of(const BoundaryPoint& b) const {
  switch (kind_) {
    case Kind::Translation:
      return {b.m - dx_, b.n - dy_};
    case Kind::Table: {
      const auto it = backward_.find(b);
      return it == backward_.end() ? b : it->second;
    }
    default:
      return (*this)(b);  // identity and the swap are involutions
  }
}

BoundaryMap BoundaryMap::inverse() const {
  switch (kind_) {
    case Kind::Translation:
      return translation(-dx_, -dy_);
    case Kind::Table: {
      BoundaryMap f = *this;
      std::swap(f.forward_, f.backward_);
      f.label_ = "table^-1";
      return f;
    }
    default:
      return *this;
  }
}

void BoundaryMap::check_space(const ModelSpace& space) const {
  if ((kind_ == Kind::Translation || kind_ == Kind::Swap) && !space.is_lattice())
    throw InvalidInput(label_ + " is defined on the lattice-ray plane only");
  if (kind_ == Kind::Table) {
    for (const auto& [s, t] : forward_) space.validate(s);
  }
}

double tuple_constant(const ModelSpace& space, const std::vector<BoundaryPoint>& points) {
  double d = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i)
    for (std::size_t j = i + 1; j < points.size(); ++j)
      if (points[i] != points[j]) d = std::max(d, pair_constant(space, points[i], points[j]));
  return d;
}

StratumCheck in_stratum(const ModelSpace& space, const std::vector<BoundaryPoint>& points, double D) {
  for (const auto& p : points) space.validate(p);
  for (std::size_t i = 0; i < points.size(); ++i)
    for (std::size_t j = i + 1; j < points.size(); ++j)
      if (points[i] == points[j]) throw InvalidInput("stratum tuples need distinct points");

  StratumCheck out;
  StratumTuple tuple{points, D, {}};
  if (!std::isinf(D)) {
    for (std::size_t i = 0; i < points.size(); ++i) {
      for (std::size_t j = i + 1; j < points.size(); ++j) {
        const double c = pair_constant(space, points[i], points[j]);
        if (c > D + kGeomEps) {
          out.counterexample = std::make_pair(points[i], points[j]);
          out.counterexample_constant = c;
          return out;
        }
        tuple.constants.push_back(c);
      }
    }
  }
  out.member = true;
  out.tuple = std::move(tuple);
  return out;
}

double cross_ratio_value(const ModelSpace& space, const BoundaryPoint& a, const BoundaryPoint& b,
                         const BoundaryPoint& c, const BoundaryPoint& d) {
  if (a == c) throw InvalidInput("cross-ratio needs a != c");
  if (b == a || b == c || d == a || d == c) throw InvalidInput("cross-ratio needs b, d distinct from a and c");
  const auto gamma = geodesic(space, a, c);
  const double tb = project_boundary(space, gamma, b).barycenter_param;
  const double td = b == d ? tb : project_boundary(space, gamma, d).barycenter_param;
  return td - tb;
}

CrossRatio cross_ratio(const ModelSpace& space, const BoundaryPoint& a, const BoundaryPoint& b,
                       const BoundaryPoint& c, const BoundaryPoint& d) {
  CrossRatio cr;
  cr.value = cross_ratio_value(space, a, b, c, d);
  cr.points = {a, b, c, d};
  cr.D = tuple_constant(space, {a, b, c, d});
  cr.slack = ConstantsTable::in_range(cr.D) ? 6.0 * ConstantsTable::for_space(space).delta(cr.D)
                                            : std::numeric_limits<double>::infinity();
  return cr;
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::CertifiedBounded:
      return "certified-bounded";
    case Verdict::Violation:
      return "violation";
    case Verdict::Inconclusive:
      return "inconclusive";
  }
  return "inconclusive";
}

Verdict growth_verdict(const std::vector<double>& maxima) {
  if (maxima.size() < 2) return Verdict::Inconclusive;
  std::size_t grew = 0;
  for (std::size_t k = 0; k + 1 < maxima.size(); ++k) {
    const double lo = maxima[k], hi = maxima[k + 1];
    if (hi > 1.5 * lo && hi > kGeomEps) ++grew;
  }
  if (grew == maxima.size() - 1) return Verdict::Violation;
  if (grew == 0) return Verdict::CertifiedBounded;
  return Verdict::Inconclusive;
}

std::vector<BoundaryPoint> lattice_offsets(double D) {
  std::vector<BoundaryPoint> out;
  const auto r = static_cast<std::int64_t>(std::floor(D));
  for (std::int64_t i = -r; i <= r; ++i)
    for (std::int64_t j = -r; j <= r; ++j)
      if ((i != 0 || j != 0) && static_cast<double>(i * i + j * j) <= D * D + kGeomEps) out.push_back({i, j});
  return out;
}

namespace {

BoundaryWindow window_for(const ModelSpace& space, double W) {
  if (space.is_tree()) return TreeDepth{static_cast<int>(std::ceil(W))};
  const auto w = static_cast<std::int64_t>(std::floor(W));
  return LatticeBox::square(-w, w);
}

bool in_box(const BoundaryPoint& p, const LatticeBox& box) {
  return p.m >= box.m_lo && p.m <= box.m_hi && p.n >= box.n_lo && p.n <= box.n_hi;
}

}  // namespace

TwoStableResult two_stable_probe(const ModelSpace& X, const ModelSpace& Y, const BoundaryMap& f,
                                 const ProbeConfig& config) {
  f.check_space(X);
  f.check_space(Y);
  if (!(config.window >= 1.0) || config.doublings < 0 || config.sample_count == 0)
    throw InvalidInput("probe needs window >= 1, doublings >= 0 and a positive sample count");
  TwoStableResult result;
  Rng rng(config.seed);
  for (int k = 0; k <= config.doublings; ++k) {
    const double W = config.window * std::ldexp(1.0, k);
    const auto window = window_for(X, W);
    std::vector<std::pair<BoundaryPoint, BoundaryPoint>> pairs;
    if (const auto* box = std::get_if<LatticeBox>(&window)) {
      const auto offsets = lattice_offsets(config.D);
      for (const auto& a : enumerate_boundary(X, window)) {
        for (const auto& o : offsets) {
          const BoundaryPoint b{a.m + o.m, a.n + o.n};
          if (a < b && in_box(b, *box)) pairs.emplace_back(a, b);
        }
      }
    } else {
      const auto pts = enumerate_boundary(X, window);
      for (std::size_t i = 0; i < pts.size(); ++i)
        for (std::size_t j = i + 1; j < pts.size(); ++j) pairs.emplace_back(pts[i], pts[j]);
    }
    if (pairs.size() > config.sample_count) {
      for (std::size_t i = 0; i < config.sample_count; ++i)
        std::swap(pairs[i], pairs[i + rng.index(pairs.size() - i)]);
      pairs.resize(config.sample_count);
    }

    PairRecord worst{W, {}, {}, 0.0, -1.0};
    std::size_t used = 0;
    for (const auto& [a, b] : pairs) {
      const double in = pair_constant(X, a, b);
      if (in > config.D + kGeomEps) continue;
      const double out = pair_constant(Y, f(a), f(b));
      PairRecord rec{W, a, b, in, out};
      result.scatter.push_back(rec);
      if (out > worst.constant_out) worst = rec;
      ++used;
    }
    if (used == 0) throw StratumFailure("no pairs of the stratum inside the probe window");
    result.windows.push_back(W);
    result.window_max.push_back(worst.constant_out);
    result.witnesses.push_back(worst);
    if (worst.constant_out > result.D_prime_estimate) {
      result.D_prime_estimate = worst.constant_out;
      result.worst_pair = worst;
    }
  }
  result.verdict = growth_verdict(result.window_max);
  return result;
}

std::vector<std::pair<double, double>> monotone_envelope(const std::vector<CrossRatioSample>& scatter) {
  std::vector<std::pair<double, double>> pts;
  pts.reserve(scatter.size());
  for (const auto& s : scatter) pts.emplace_back(s.cr_in, s.cr_out);
  std::sort(pts.begin(), pts.end());
  std::vector<std::pair<double, double>> env;
  double run = -std::numeric_limits<double>::infinity();
  for (const auto& [t, v] : pts) {
    run = std::max(run, v);
    if (!env.empty() && env.back().first == t)
      env.back().second = run;
    else
      env.emplace_back(t, run);
  }
  return env;
}

QuasiMobiusResult quasi_mobius_probe(const ModelSpace& X, const ModelSpace& Y, const BoundaryMap& f,
                                     const ProbeConfig& config) {
  f.check_space(X);
  f.check_space(Y);
  if (!(config.window >= 1.0) || config.doublings < 0 || config.sample_count == 0)
    throw InvalidInput("probe needs window >= 1, doublings >= 0 and a positive sample count");
  QuasiMobiusResult result;
  result.identity = true;
  Rng rng(config.seed);
  const auto offsets = lattice_offsets(config.D);
  auto& tables = ConstantsTable::for_space(X);

  for (int k = 0; k <= config.doublings; ++k) {
    const double W = config.window * std::ldexp(1.0, k);
    const auto window = window_for(X, W);
    const auto* box = std::get_if<LatticeBox>(&window);
    std::vector<BoundaryPoint> leaves;
    if (!box) leaves = enumerate_boundary(X, window);
    if (box && offsets.size() < 3) throw StratumFailure("no 4-tuples of the stratum inside the probe window");
    if (!box && leaves.size() < 4) throw StratumFailure("no 4-tuples of the stratum inside the probe window");

    std::size_t found = 0, attempts = 0;
    const std::size_t max_attempts = config.sample_count * 200;
    CrossRatioSample worst;
    worst.cr_out = -1.0;
    while (found < config.sample_count && attempts < max_attempts) {
      ++attempts;
      std::array<BoundaryPoint, 4> t;
      if (box) {
        t[0] = {rng.integer(box->m_lo, box->m_hi), rng.integer(box->n_lo, box->n_hi)};
        for (int i = 1; i < 4; ++i) {
          const auto& o = offsets[rng.index(offsets.size())];
          t[static_cast<std::size_t>(i)] = {t[0].m + o.m, t[0].n + o.n};
        }
        if (!std::all_of(t.begin(), t.end(), [&](const BoundaryPoint& p) { return in_box(p, *box); })) continue;
      } else {
        for (auto& p : t) p = leaves[rng.index(leaves.size())];
      }
      bool distinct = true;
      for (int i = 0; i < 4 && distinct; ++i)
        for (int j = i + 1; j < 4 && distinct; ++j) distinct = t[static_cast<std::size_t>(i)] != t[static_cast<std::size_t>(j)];
      if (!distinct) continue;
      const double D_in = tuple_constant(X, {t.begin(), t.end()});
      if (D_in > config.D + kGeomEps) continue;

      CrossRatioSample s;
      s.window = W;
      s.index = result.scatter.size();
      s.tuple = t;
      s.cr_in = std::abs(cross_ratio_value(X, t[0], t[1], t[2], t[3]));
      s.cr_out = std::abs(cross_ratio_value(Y, f(t[0]), f(t[1]), f(t[2]), f(t[3])));
      s.slack = 6.0 * tables.delta(D_in);
      if (std::abs(s.cr_out - s.cr_in) > 1e-9) result.identity = false;
      if (s.cr_out > worst.cr_out) worst = s;
      result.scatter.push_back(s);
      ++found;
    }
    if (found == 0) throw StratumFailure("no 4-tuples of the stratum inside the probe window");
    result.windows.push_back(W);
    result.window_max.push_back(worst.cr_out);
    result.witnesses.push_back(worst);
  }
  result.envelope = monotone_envelope(result.scatter);
  result.verdict = growth_verdict(result.window_max);
  return result;
}

}  // namespace morselab
