// Domain types shared by every stage of the detection pipeline: location
// spaces, candidate regions, weight functions, error-rate specifications and
// the final detection set.
#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <variant>
#include <vector>

namespace blip {

using Index = std::int64_t;
using GroupId = std::uint64_t;

// ============================================================================
// Errors
// ============================================================================
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent input data.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Operation not defined for the given kind of input.
class UnsupportedError : public Error {
 public:
  using Error::Error;
};

/// Broken internal invariant.
class InternalError : public Error {
 public:
  using Error::Error;
};

// ============================================================================
// Location space
// ============================================================================
struct Bounds {
  double lo = 0.0;
  double hi = 1.0;
};

/// Either a discrete indexed set {0..p-1} or a box in R^d.
class LocationSpace {
 public:
  static LocationSpace discrete(Index p);
  static LocationSpace continuous(std::vector<Bounds> bounds);

  [[nodiscard]] bool is_discrete() const noexcept { return bounds_.empty(); }
  [[nodiscard]] Index size() const noexcept { return p_; }
  [[nodiscard]] std::size_t dim() const noexcept { return bounds_.size(); }
  [[nodiscard]] const std::vector<Bounds>& bounds() const noexcept { return bounds_; }
  [[nodiscard]] bool contains(std::span<const double> point) const;

  /// Largest side length of the box (continuous only).
  [[nodiscard]] double max_extent() const;
  [[nodiscard]] double min_extent() const;

 private:
  Index p_ = 0;
  std::vector<Bounds> bounds_;
};

// ============================================================================
// Regions
// ============================================================================
struct IndexSet {
  std::vector<Index> indices;  // sorted, unique, nonempty
};

struct Sphere {
  std::vector<double> center;
  double radius = 0.0;
};

struct Cube {
  std::vector<double> center;
  double halfwidth = 0.0;
};

using Region = std::variant<IndexSet, Sphere, Cube>;

/// Builds an IndexSet region, sorting and removing duplicates.
Region make_index_set(std::vector<Index> indices);

[[nodiscard]] bool is_index_set(const Region& r) noexcept;
[[nodiscard]] bool is_continuous(const Region& r) noexcept;

/// Number of locations for IndexSets, 0 for continuous regions.
[[nodiscard]] std::size_t region_size(const Region& r);

/// Throws ValidationError if the region breaks its invariants. When `space`
/// is given, IndexSet entries must be < p and continuous dimensions must match.
void validate_region(const Region& r, const LocationSpace* space = nullptr);

/// Closed containment: |x - c| <= r for spheres, max_i |x_i - c_i| <= h for cubes.
[[nodiscard]] bool contains_point(const Region& r, std::span<const double> point);
[[nodiscard]] bool contains_index(const Region& r, Index idx);

/// Positive-overlap intersection. Tangent spheres and cubes sharing only a
/// face are disjoint. Mixing IndexSet with continuous regions throws.
[[nodiscard]] bool intersects(const Region& a, const Region& b);

/// True if `inner` is a subset of `outer` (sets: inclusion, spheres:
/// |c1 - c2| + r1 <= r2, cubes: per-axis containment).
[[nodiscard]] bool is_subset(const Region& inner, const Region& outer);

/// Geometric distance from a point to a region (0 inside).
[[nodiscard]] double distance_to_region(const Region& r, std::span<const double> point);

// ============================================================================
// Candidate groups
// ============================================================================
struct CountInterval {
  int lo = 1;
  int hi = 1;
  [[nodiscard]] int width() const noexcept { return hi - lo + 1; }
  [[nodiscard]] bool contains(int count) const noexcept { return count >= lo && count <= hi; }
  friend bool operator==(const CountInterval&, const CountInterval&) = default;
};

struct CandidateGroup {
  GroupId id = 0;
  Region region;
  std::optional<CountInterval> count_interval;
  std::optional<double> weight;
  double pip = 0.0;
};

/// Canonical textual key of a region (+ count interval). Continuous centers
/// are quantized to `quantum` (absolute units) before formatting.
[[nodiscard]] std::string canonical_key(const Region& r,
                                        const std::optional<CountInterval>& interval,
                                        double quantum = 1e-9);

/// Stable 64-bit id derived from the canonical key.
[[nodiscard]] GroupId canonical_id(const Region& r,
                                   const std::optional<CountInterval>& interval = std::nullopt,
                                   double quantum = 1e-9);

CandidateGroup make_group(Region region,
                          std::optional<CountInterval> interval = std::nullopt);

void validate_group(const CandidateGroup& g, const LocationSpace* space = nullptr);

// ============================================================================
// Weight functions
// ============================================================================
enum class WeightKind {
  InverseSize,
  InverseRadius,
  InverseCountInterval,
  LogInverseSize,
  Constant,
  Custom,
  Stored,  // use CandidateGroup::weight
};

struct WeightFn {
  WeightKind kind = WeightKind::InverseSize;
  double constant = 1.0;
  std::unordered_map<GroupId, double> table;

  static WeightFn inverse_size() { return {}; }
  static WeightFn inverse_radius() { return {WeightKind::InverseRadius, 1.0, {}}; }
  static WeightFn inverse_count_interval() { return {WeightKind::InverseCountInterval, 1.0, {}}; }
  static WeightFn log_inverse_size() { return {WeightKind::LogInverseSize, 1.0, {}}; }
  static WeightFn constant_weight(double c) { return {WeightKind::Constant, c, {}}; }
  static WeightFn custom(std::unordered_map<GroupId, double> t) {
    return {WeightKind::Custom, 1.0, std::move(t)};
  }
  static WeightFn stored() { return {WeightKind::Stored, 1.0, {}}; }

  /// Evaluates the weight; result is strictly positive and finite or throws.
  [[nodiscard]] double operator()(const CandidateGroup& g) const;
};

WeightFn parse_weight_fn(const std::string& name);
std::string weight_fn_name(const WeightFn& w);

// ============================================================================
// Error rates
// ============================================================================
enum class ErrorKind { FDR, LocalFDR, PFER, FWER };

struct ErrorRateSpec {
  ErrorKind kind = ErrorKind::FDR;
  double q = 0.1;          // FDR, LocalFDR, FWER
  double v = 0.0;          // PFER
  double grid_tol = 1e-3;  // FWER bisection tolerance

  static ErrorRateSpec fdr(double q) { return {ErrorKind::FDR, q, 0.0, 1e-3}; }
  static ErrorRateSpec local_fdr(double q) { return {ErrorKind::LocalFDR, q, 0.0, 1e-3}; }
  static ErrorRateSpec pfer(double v) { return {ErrorKind::PFER, 0.0, v, 1e-3}; }
  static ErrorRateSpec fwer(double q, double grid_tol = 1e-3) {
    return {ErrorKind::FWER, q, 0.0, grid_tol};
  }

  void validate() const;
  /// Level used by PIP thresholding: q, or v for PFER.
  [[nodiscard]] double level() const noexcept { return kind == ErrorKind::PFER ? v : q; }
};

std::string error_kind_name(ErrorKind k);
ErrorKind parse_error_kind(const std::string& s);

// ============================================================================
// Detection output
// ============================================================================
struct Discovery {
  CandidateGroup group;
  double selection_prob = 1.0;
};

/// Diagnostics recorded while solving.
struct SolveReport {
  std::size_t n_candidates = 0;   // groups entering the LP
  std::size_t n_noninteger = 0;   // |H| after the relaxed solve
  std::size_t backtrack_steps = 0;
  bool used_randomized_rounding = false;
  bool used_exact_search = false;
  bool residual_optimal = true;   // false if a node cap stopped the search
  std::vector<std::pair<GroupId, double>> relaxed;  // nonzero relaxed values
};

struct DetectionSet {
  std::vector<Discovery> discoveries;
  double objective = 0.0;
  double upper_bound = 0.0;
  double error_budget_used = 0.0;
  ErrorRateSpec error_spec;
  SolveReport report;
};

}  // namespace blip
