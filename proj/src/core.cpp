#include "blip/core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace blip {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

double sq_dist(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

void require_same_dim(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw ValidationError("region dimension mismatch");
}

// Distance from a point to an axis-aligned cube.
double cube_distance(const Cube& c, std::span<const double> x) {
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double d = std::max(0.0, std::abs(x[i] - c.center[i]) - c.halfwidth);
    s += d * d;
  }
  return std::sqrt(s);
}

bool sets_intersect(const std::vector<Index>& a, const std::vector<Index>& b) {
  auto i = a.begin();
  auto j = b.begin();
  while (i != a.end() && j != b.end()) {
    if (*i < *j) {
      ++i;
    } else if (*j < *i) {
      ++j;
    } else {
      return true;
    }
  }
  return false;
}

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  // splitmix finalizer
  h ^= h >> 30;
  h *= 0xbf58476d1ce4e5b9ULL;
  h ^= h >> 27;
  h *= 0x94d049bb133111ebULL;
  h ^= h >> 31;
  return h;
}

}  // namespace

// ----------------------------------------------------------------------------
// LocationSpace
// ----------------------------------------------------------------------------
LocationSpace LocationSpace::discrete(Index p) {
  if (p < 1) throw ValidationError("discrete location space needs p >= 1");
  LocationSpace s;
  s.p_ = p;
  return s;
}

LocationSpace LocationSpace::continuous(std::vector<Bounds> bounds) {
  if (bounds.empty()) throw ValidationError("continuous location space needs d >= 1");
  for (const auto& b : bounds) {
    if (!(b.lo < b.hi)) throw ValidationError("continuous bounds need lo < hi");
  }
  LocationSpace s;
  s.bounds_ = std::move(bounds);
  return s;
}

bool LocationSpace::contains(std::span<const double> point) const {
  if (point.size() != bounds_.size()) return false;
  for (std::size_t i = 0; i < point.size(); ++i) {
    if (point[i] < bounds_[i].lo || point[i] > bounds_[i].hi) return false;
  }
  return true;
}

double LocationSpace::max_extent() const {
  double m = 0.0;
  for (const auto& b : bounds_) m = std::max(m, b.hi - b.lo);
  return m;
}

double LocationSpace::min_extent() const {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& b : bounds_) m = std::min(m, b.hi - b.lo);
  return m;
}

// ----------------------------------------------------------------------------
// Regions
// ----------------------------------------------------------------------------
Region make_index_set(std::vector<Index> indices) {
  std::sort(indices.begin(), indices.end());
  indices.erase(std::unique(indices.begin(), indices.end()), indices.end());
  return IndexSet{std::move(indices)};
}

bool is_index_set(const Region& r) noexcept { return std::holds_alternative<IndexSet>(r); }
bool is_continuous(const Region& r) noexcept { return !is_index_set(r); }

std::size_t region_size(const Region& r) {
  if (const auto* s = std::get_if<IndexSet>(&r)) return s->indices.size();
  return 0;
}

void validate_region(const Region& r, const LocationSpace* space) {
  std::visit(
      overloaded{
          [&](const IndexSet& s) {
            if (s.indices.empty()) throw ValidationError("index set region is empty");
            for (std::size_t i = 0; i < s.indices.size(); ++i) {
              if (s.indices[i] < 0) throw ValidationError("negative location index");
              if (i > 0 && s.indices[i] <= s.indices[i - 1])
                throw ValidationError("index set must be sorted and duplicate-free");
            }
            if (space) {
              if (!space->is_discrete())
                throw ValidationError("index set region in a continuous space");
              if (s.indices.back() >= space->size())
                throw ValidationError("location index out of range");
            }
          },
          [&](const Sphere& s) {
            if (s.center.empty()) throw ValidationError("sphere needs a center");
            if (!(s.radius > 0.0) || !std::isfinite(s.radius))
              throw ValidationError("sphere radius must be positive");
            if (space && space->dim() != s.center.size())
              throw ValidationError("sphere dimension does not match space");
          },
          [&](const Cube& c) {
            if (c.center.empty()) throw ValidationError("cube needs a center");
            if (!(c.halfwidth > 0.0) || !std::isfinite(c.halfwidth))
              throw ValidationError("cube halfwidth must be positive");
            if (space && space->dim() != c.center.size())
              throw ValidationError("cube dimension does not match space");
          }},
      r);
}

bool contains_point(const Region& r, std::span<const double> x) {
  return std::visit(
      overloaded{[](const IndexSet&) -> bool {
                   throw ValidationError("point containment on an index set");
                 },
                 [&](const Sphere& s) {
                   require_same_dim(s.center, x);
                   return sq_dist(s.center, x) <= s.radius * s.radius;
                 },
                 [&](const Cube& c) {
                   require_same_dim(c.center, x);
                   for (std::size_t i = 0; i < x.size(); ++i) {
                     if (std::abs(x[i] - c.center[i]) > c.halfwidth) return false;
                   }
                   return true;
                 }},
      r);
}

bool contains_index(const Region& r, Index idx) {
  const auto* s = std::get_if<IndexSet>(&r);
  if (!s) throw ValidationError("index containment on a continuous region");
  return std::binary_search(s->indices.begin(), s->indices.end(), idx);
}

bool intersects(const Region& a, const Region& b) {
  if (is_index_set(a) != is_index_set(b))
    throw ValidationError("cannot intersect discrete and continuous regions");
  if (const auto* sa = std::get_if<IndexSet>(&a)) {
    return sets_intersect(sa->indices, std::get<IndexSet>(b).indices);
  }
  if (const auto* s1 = std::get_if<Sphere>(&a)) {
    if (const auto* s2 = std::get_if<Sphere>(&b)) {
      require_same_dim(s1->center, s2->center);
      const double rr = s1->radius + s2->radius;
      return sq_dist(s1->center, s2->center) < rr * rr;
    }
    const auto& c = std::get<Cube>(b);
    require_same_dim(s1->center, c.center);
    return cube_distance(c, s1->center) < s1->radius;
  }
  const auto& c1 = std::get<Cube>(a);
  if (const auto* s2 = std::get_if<Sphere>(&b)) {
    require_same_dim(c1.center, s2->center);
    return cube_distance(c1, s2->center) < s2->radius;
  }
  const auto& c2 = std::get<Cube>(b);
  require_same_dim(c1.center, c2.center);
  for (std::size_t i = 0; i < c1.center.size(); ++i) {
    if (!(std::abs(c1.center[i] - c2.center[i]) < c1.halfwidth + c2.halfwidth)) return false;
  }
  return true;
}

bool is_subset(const Region& inner, const Region& outer) {
  if (is_index_set(inner) != is_index_set(outer)) return false;
  if (const auto* si = std::get_if<IndexSet>(&inner)) {
    const auto& so = std::get<IndexSet>(outer);
    return std::includes(so.indices.begin(), so.indices.end(), si->indices.begin(),
                         si->indices.end());
  }
  if (const auto* s1 = std::get_if<Sphere>(&inner)) {
    if (const auto* s2 = std::get_if<Sphere>(&outer)) {
      return std::sqrt(sq_dist(s1->center, s2->center)) + s1->radius <= s2->radius;
    }
    const auto& c = std::get<Cube>(outer);
    for (std::size_t i = 0; i < c.center.size(); ++i) {
      if (std::abs(s1->center[i] - c.center[i]) + s1->radius > c.halfwidth) return false;
    }
    return true;
  }
  const auto& c1 = std::get<Cube>(inner);
  if (const auto* s2 = std::get_if<Sphere>(&outer)) {
    double far = 0.0;
    for (std::size_t i = 0; i < c1.center.size(); ++i) {
      const double d = std::abs(c1.center[i] - s2->center[i]) + c1.halfwidth;
      far += d * d;
    }
    return std::sqrt(far) <= s2->radius;
  }
  const auto& c2 = std::get<Cube>(outer);
  for (std::size_t i = 0; i < c1.center.size(); ++i) {
    if (std::abs(c1.center[i] - c2.center[i]) + c1.halfwidth > c2.halfwidth) return false;
  }
  return true;
}

double distance_to_region(const Region& r, std::span<const double> x) {
  return std::visit(
      overloaded{[](const IndexSet&) -> double {
                   throw ValidationError("distance to an index set is undefined");
                 },
                 [&](const Sphere& s) {
                   require_same_dim(s.center, x);
                   return std::max(0.0, std::sqrt(sq_dist(s.center, x)) - s.radius);
                 },
                 [&](const Cube& c) {
                   require_same_dim(c.center, x);
                   return cube_distance(c, x);
                 }},
      r);
}

// ----------------------------------------------------------------------------
// Groups
// ----------------------------------------------------------------------------
std::string canonical_key(const Region& r, const std::optional<CountInterval>& interval,
                          double quantum) {
  std::ostringstream os;
  auto quant = [&](double x) { return std::llround(x / quantum); };
  std::visit(overloaded{[&](const IndexSet& s) {
                          os << 'I';
                          for (Index i : s.indices) os << ':' << i;
                        },
                        [&](const Sphere& s) {
                          os << 'S';
                          for (double c : s.center) os << ':' << quant(c);
                          os << '/' << quant(s.radius);
                        },
                        [&](const Cube& c) {
                          os << 'C';
                          for (double x : c.center) os << ':' << quant(x);
                          os << '/' << quant(c.halfwidth);
                        }},
             r);
  if (interval) os << '#' << interval->lo << '-' << interval->hi;
  return os.str();
}

GroupId canonical_id(const Region& r, const std::optional<CountInterval>& interval,
                     double quantum) {
  return fnv1a(canonical_key(r, interval, quantum));
}

CandidateGroup make_group(Region region, std::optional<CountInterval> interval) {
  CandidateGroup g;
  g.id = canonical_id(region, interval);
  g.region = std::move(region);
  g.count_interval = interval;
  return g;
}

void validate_group(const CandidateGroup& g, const LocationSpace* space) {
  validate_region(g.region, space);
  if (g.weight && (!(*g.weight >= 0.0) || !std::isfinite(*g.weight)))
    throw ValidationError("group weight must be nonnegative and finite");
  if (!(g.pip >= 0.0 && g.pip <= 1.0)) throw ValidationError("group pip must lie in [0,1]");
  if (g.count_interval &&
      (g.count_interval->lo < 1 || g.count_interval->hi < g.count_interval->lo))
    throw ValidationError("count interval needs 1 <= lo <= hi");
}

// ----------------------------------------------------------------------------
// Weights
// ----------------------------------------------------------------------------
double WeightFn::operator()(const CandidateGroup& g) const {
  double w = 0.0;
  switch (kind) {
    case WeightKind::InverseSize:
    case WeightKind::LogInverseSize: {
      const auto* s = std::get_if<IndexSet>(&g.region);
      if (!s) throw ValidationError("size-based weights need index set regions");
      const auto m = static_cast<double>(s->indices.size());
      w = kind == WeightKind::InverseSize ? 1.0 / m : 1.0 / (1.0 + std::log2(m));
      break;
    }
    case WeightKind::InverseRadius:
      if (const auto* s = std::get_if<Sphere>(&g.region)) {
        w = 1.0 / s->radius;
      } else if (const auto* c = std::get_if<Cube>(&g.region)) {
        w = 1.0 / c->halfwidth;
      } else {
        throw ValidationError("inverse-radius weight needs a sphere or cube");
      }
      break;
    case WeightKind::InverseCountInterval:
      if (!g.count_interval) throw ValidationError("group has no count interval");
      w = 1.0 / g.count_interval->width();
      break;
    case WeightKind::Constant:
      w = constant;
      break;
    case WeightKind::Custom: {
      auto it = table.find(g.id);
      if (it == table.end()) throw ValidationError("no custom weight for group");
      w = it->second;
      break;
    }
    case WeightKind::Stored:
      if (!g.weight) throw ValidationError("group has no stored weight");
      w = *g.weight;
      break;
  }
  if (!(w > 0.0) || !std::isfinite(w)) throw ValidationError("weight must be positive and finite");
  return w;
}

WeightFn parse_weight_fn(const std::string& name) {
  if (name == "inverse-size") return WeightFn::inverse_size();
  if (name == "inverse-radius") return WeightFn::inverse_radius();
  if (name == "inverse-count-interval") return WeightFn::inverse_count_interval();
  if (name == "log-inverse-size") return WeightFn::log_inverse_size();
  if (name == "stored") return WeightFn::stored();
  if (name.rfind("constant:", 0) == 0) return WeightFn::constant_weight(std::stod(name.substr(9)));
  throw ValidationError("unknown weight function: " + name);
}

std::string weight_fn_name(const WeightFn& w) {
  switch (w.kind) {
    case WeightKind::InverseSize: return "inverse-size";
    case WeightKind::InverseRadius: return "inverse-radius";
    case WeightKind::InverseCountInterval: return "inverse-count-interval";
    case WeightKind::LogInverseSize: return "log-inverse-size";
    case WeightKind::Constant: return "constant";
    case WeightKind::Custom: return "custom";
    case WeightKind::Stored: return "stored";
  }
  return "unknown";
}

// ----------------------------------------------------------------------------
// Error rates
// ----------------------------------------------------------------------------
void ErrorRateSpec::validate() const {
  if (kind == ErrorKind::PFER) {
    if (!(v > 0.0) || !std::isfinite(v)) throw ValidationError("PFER level v must be positive");
    return;
  }
  if (!(q > 0.0 && q < 1.0)) throw ValidationError("error level q must lie in (0,1)");
  if (kind == ErrorKind::FWER && !(grid_tol > 0.0))
    throw ValidationError("FWER grid tolerance must be positive");
}

std::string error_kind_name(ErrorKind k) {
  switch (k) {
    case ErrorKind::FDR: return "fdr";
    case ErrorKind::LocalFDR: return "local-fdr";
    case ErrorKind::PFER: return "pfer";
    case ErrorKind::FWER: return "fwer";
  }
  return "unknown";
}

ErrorKind parse_error_kind(const std::string& s) {
  if (s == "fdr") return ErrorKind::FDR;
  if (s == "local-fdr") return ErrorKind::LocalFDR;
  if (s == "pfer") return ErrorKind::PFER;
  if (s == "fwer") return ErrorKind::FWER;
  throw ValidationError("unknown error rate: " + s);
}

}  // namespace blip
