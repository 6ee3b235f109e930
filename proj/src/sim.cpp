#include "blip/sim.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>

#include "blip/blip.hpp"
#include "blip/groups.hpp"
#include "blip/pips.hpp"
#include "blip/rng.hpp"
#include "blip/samplers.hpp"

namespace blip {

namespace {

struct ArCoefficients {
  std::vector<double> innovation;          // rho_0 per column
  std::vector<std::vector<double>> lags;   // rho_1.. per column, lag l at index l-1
};

ArCoefficients ar_coefficients(Index p, int k, std::uint64_t seed, Eigen::MatrixXd* cov) {
  if (p < 1) throw ValidationError("p must be positive");
  if (k < 1) throw ValidationError("k must be at least 1");
  Rng rng(seed, 0);
  ArCoefficients ar;
  ar.innovation.resize(static_cast<std::size_t>(p));
  ar.lags.resize(static_cast<std::size_t>(p));
  Eigen::MatrixXd S = Eigen::MatrixXd::Zero(p, p);
  for (Index j = 0; j < p; ++j) {
    const int n_lags = static_cast<int>(std::min<Index>(j, k - 1));
    std::vector<double> w(static_cast<std::size_t>(k));
    double total = 0.0;
    for (int l = 0; l < k; ++l) {
      w[static_cast<std::size_t>(l)] = rng.gamma(l == 0 ? 0.2 : 0.8 / (k - 1));
      total += w[static_cast<std::size_t>(l)];
    }
    for (double& x : w) x /= total;
    double var = w[0] * w[0];
    for (int a = 1; a <= n_lags; ++a) {
      for (int b = 1; b <= n_lags; ++b) var += w[static_cast<std::size_t>(a)] * w[static_cast<std::size_t>(b)] * S(j - a, j - b);
    }
    if (!(var > 0.0)) {
      w.assign(static_cast<std::size_t>(k), 0.0);
      w[0] = 1.0;
      var = 1.0;
    }
    const double c = 1.0 / std::sqrt(var);
    auto& col = ar.lags[static_cast<std::size_t>(j)];
    ar.innovation[static_cast<std::size_t>(j)] = c * w[0];
    for (int l = 1; l <= n_lags; ++l) col.push_back(c * w[static_cast<std::size_t>(l)]);
    for (Index i = 0; i < j; ++i) {
      double v = 0.0;
      for (int l = 1; l <= n_lags; ++l) v += col[static_cast<std::size_t>(l - 1)] * S(j - l, i);
      S(j, i) = v;
      S(i, j) = v;
    }
    S(j, j) = 1.0;
  }
  if (cov) *cov = std::move(S);
  return ar;
}

bool sorted_contains(const std::vector<Index>& v, Index x) { return std::binary_search(v.begin(), v.end(), x); }

double jaccard(const std::vector<Index>& a, const std::vector<Index>& b) {
  std::size_t inter = 0;
  auto i = a.begin();
  auto j = b.begin();
  while (i != a.end() && j != b.end()) {
    if (*i < *j) {
      ++i;
    } else if (*j < *i) {
      ++j;
    } else {
      ++inter;
      ++i;
      ++j;
    }
  }
  const std::size_t uni = a.size() + b.size() - inter;
  return uni == 0 ? 1.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

const std::vector<Index>& indices_of(const Discovery& d) {
  const auto* s = std::get_if<IndexSet>(&d.group.region);
  if (!s) throw ValidationError("average Jaccard similarity needs index-set regions");
  return s->indices;
}

ErrorRateSpec spec_for(const std::string& error, double level) {
  switch (parse_error_kind(error)) {
    case ErrorKind::FDR: return ErrorRateSpec::fdr(level);
    case ErrorKind::LocalFDR: return ErrorRateSpec::local_fdr(level);
    case ErrorKind::PFER: return ErrorRateSpec::pfer(level);
    case ErrorKind::FWER: return ErrorRateSpec::fwer(level);
  }
  throw InternalError("unknown error kind");
}

}  // namespace

Eigen::MatrixXd gen_ark_design(Index n, Index p, int k, std::uint64_t seed) {
  if (n < 1) throw ValidationError("n must be positive");
  const ArCoefficients ar = ar_coefficients(p, k, seed, nullptr);
  Rng rng(seed, 1);
  Eigen::MatrixXd X(n, p);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < p; ++j) {
      double v = ar.innovation[static_cast<std::size_t>(j)] * rng.normal();
      const auto& col = ar.lags[static_cast<std::size_t>(j)];
      for (std::size_t l = 0; l < col.size(); ++l) v += col[l] * X(i, j - 1 - static_cast<Index>(l));
      X(i, j) = v;
    }
  }
  return X;
}

Eigen::MatrixXd ark_covariance(Index p, int k, std::uint64_t seed) {
  Eigen::MatrixXd S;
  ar_coefficients(p, k, seed, &S);
  return S;
}

Link parse_link(const std::string& s) {
  if (s == "gaussian" || s == "linear") return Link::Gaussian;
  if (s == "probit") return Link::Probit;
  throw ValidationError("unknown link: " + s);
}

std::string link_name(Link l) { return l == Link::Gaussian ? "gaussian" : "probit"; }

Index n_nonzero(double s, Index p) {
  if (!(s > 0.0 && s <= 1.0)) throw ValidationError("sparsity must lie in (0,1]");
  const double sp = s * static_cast<double>(p);
  // Guard against products like 0.1 * 30 landing a hair above an integer.
  const double rounded = std::round(sp);
  const auto m = std::abs(sp - rounded) <= 1e-9 * std::max(1.0, sp) ? static_cast<Index>(rounded)
                                                                    : static_cast<Index>(std::ceil(sp));
  return std::clamp<Index>(m, 1, p);
}

GlmData gen_sparse_glm(const Eigen::MatrixXd& X, double s, double tau2, double sigma2, Link link,
                       std::uint64_t seed) {
  if (X.rows() < 1 || X.cols() < 1) throw ValidationError("design matrix must be non-empty");
  if (!X.allFinite()) throw ValidationError("design matrix must be finite");
  if (!(tau2 > 0.0) || !(sigma2 > 0.0)) throw ValidationError("tau2 and sigma2 must be positive");
  const Index p = X.cols();
  const Index m = n_nonzero(s, p);
  Rng rng(seed, 2);
  std::vector<Index> perm(static_cast<std::size_t>(p));
  std::iota(perm.begin(), perm.end(), Index{0});
  for (Index i = 0; i < m; ++i) {
    const auto j = i + static_cast<Index>(rng.below(static_cast<std::uint64_t>(p - i)));
    std::swap(perm[static_cast<std::size_t>(i)], perm[static_cast<std::size_t>(j)]);
  }
  GlmData out;
  out.signals.assign(perm.begin(), perm.begin() + m);
  std::sort(out.signals.begin(), out.signals.end());
  out.beta = Eigen::VectorXd::Zero(p);
  const double tau = std::sqrt(tau2);
  for (Index j : out.signals) {
    double b;
    do {
      b = tau * rng.normal();
    } while (!(std::abs(b) > 0.1 * tau));
    out.beta(j) = b;
  }
  Eigen::VectorXd y = X * out.beta;
  const double sigma = std::sqrt(sigma2);
  for (Index i = 0; i < y.size(); ++i) y(i) += sigma * rng.normal();
  if (link == Link::Probit) {
    for (Index i = 0; i < y.size(); ++i) y(i) = y(i) >= 0.0 ? 1.0 : 0.0;
  }
  out.response = std::move(y);
  return out;
}

Eigen::MatrixXd changepoint_design(Index T) {
  if (T < 2) throw ValidationError("changepoint design needs T >= 2");
  Eigen::MatrixXd X = Eigen::MatrixXd::Zero(T, T);
  for (Index j = 0; j < T; ++j) X.col(j).tail(T - j).setOnes();
  return X;
}

bool is_true_discovery(const CandidateGroup& g, const Truth& truth, double slack) {
  if (!(slack >= 0.0)) throw ValidationError("slack must be nonnegative");
  std::size_t count = 0;
  if (truth.dim == 0) {
    const auto* s = std::get_if<IndexSet>(&g.region);
    if (!s) throw ValidationError("discrete truth needs index-set regions");
    std::vector<Index> sig = truth.signals;
    std::sort(sig.begin(), sig.end());
    for (Index l : s->indices) count += sorted_contains(sig, l) ? 1 : 0;
  } else {
    if (!is_continuous(g.region)) throw ValidationError("point truth needs sphere or cube regions");
    for (std::size_t i = 0; i < truth.size(); ++i) {
      std::span<const double> x(truth.points.data() + i * truth.dim, truth.dim);
      if (distance_to_region(g.region, x) <= slack) ++count;
    }
  }
  if (g.count_interval) return g.count_interval->contains(static_cast<int>(count));
  return count > 0;
}

EvalResult evaluate(const DetectionSet& det, const Truth& truth, const WeightFn& weight, double slack) {
  EvalResult r;
  for (const auto& d : det.discoveries) {
    if (is_true_discovery(d.group, truth, slack)) {
      r.power += weight(d.group);
      ++r.n_true;
    } else {
      ++r.n_false;
    }
  }
  const std::size_t R = det.discoveries.size();
  r.fdp = static_cast<double>(r.n_false) / static_cast<double>(std::max<std::size_t>(1, R));
  r.normalized_power = truth.size() > 0 ? r.power / static_cast<double>(truth.size()) : 0.0;
  return r;
}

double avg_jaccard(const DetectionSet& a, const DetectionSet& b) {
  const auto& A = a.discoveries;
  const auto& B = b.discoveries;
  if (A.empty() && B.empty()) return 1.0;
  if (A.empty() || B.empty()) return 0.0;
  auto best = [](const Discovery& d, const std::vector<Discovery>& others) {
    double m = 0.0;
    for (const auto& o : others) m = std::max(m, jaccard(indices_of(d), indices_of(o)));
    return m;
  };
  double total = 0.0;
  for (const auto& d : A) total += best(d, B);
  for (const auto& d : B) total += best(d, A);
  return total / static_cast<double>(A.size() + B.size());
}

void Scenario::validate() const {
  if (n < 1 || p < 1) throw ValidationError("scenario needs n, p >= 1");
  if (k < 1) throw ValidationError("scenario needs k >= 1");
  if (!(s > 0.0 && s <= 1.0)) throw ValidationError("scenario sparsity must lie in (0,1]");
  if (!(tau2 > 0.0 && sigma2 > 0.0)) throw ValidationError("scenario variances must be positive");
  spec_for(error, q).validate();
  if (replicates < 1) throw ValidationError("scenario needs at least one replicate");
  if (methods.empty()) throw ValidationError("scenario needs at least one method");
  for (const auto& m : methods) {
    if (m != "well" && m != "misspec") throw ValidationError("unknown method: " + m);
  }
  if (max_group_size < 1) throw ValidationError("max group size must be positive");
}

std::vector<SimRow> run_scenario(const Scenario& sc, std::uint64_t seed, int threads) {
  sc.validate();
  const ErrorRateSpec spec = spec_for(sc.error, sc.q);
  const WeightFn weight = WeightFn::inverse_size();
  std::vector<SimRow> rows;
  for (int rep = 0; rep < sc.replicates; ++rep) {
    const auto r = static_cast<std::uint64_t>(rep);
    const Eigen::MatrixXd X = gen_ark_design(sc.n, sc.p, sc.k, derive_seed(seed, r, 1));
    const GlmData data = gen_sparse_glm(X, sc.s, sc.tau2, sc.sigma2, sc.link, derive_seed(seed, r, 2));
    for (std::size_t mi = 0; mi < sc.methods.size(); ++mi) {
      const auto start = std::chrono::steady_clock::now();
      LssConfig cfg;
      cfg.n_iter = sc.n_iter;
      cfg.burn_in = sc.burn_in;
      cfg.chains = sc.chains;
      cfg.block_size = sc.block_size;
      cfg.threads = threads;
      cfg.seed = derive_seed(seed, r, 3 + mi);
      if (sc.methods[mi] == "well") {
        const double p0 = 1.0 - static_cast<double>(n_nonzero(sc.s, sc.p)) / static_cast<double>(sc.p);
        cfg.fixed = FixedHyper{sc.sigma2, sc.tau2, std::clamp(p0, 1e-6, 1.0 - 1e-6)};
      } else {
        cfg.prior = Hyperpriors::misspecified();
      }
      const LssResult fit = sc.link == Link::Gaussian ? lss_gibbs(X, data.response, cfg)
                                                      : pss_gibbs(X, data.response, cfg);
      RegressionGroupOptions gopts;
      gopts.max_size = sc.max_group_size;
      auto groups = default_regression_groups(fit.samples, sc.p, X, gopts);
      pips_from_samples(fit.samples, groups).apply(groups);
      BlipOptions bopts;
      bopts.seed = derive_seed(seed, r, 100 + mi);
      const DetectionSet det = spec.kind == ErrorKind::FWER
                                   ? run_fwer(groups, weight, spec.q, &fit.samples, bopts, spec.grid_tol)
                                   : run_blip(groups, weight, spec, bopts);
      const EvalResult ev = evaluate(det, Truth::discrete(data.signals), weight);
      const auto stop = std::chrono::steady_clock::now();
      SimRow row;
      row.scenario = sc.name;
      row.replicate = rep;
      row.method = sc.methods[mi];
      row.power = ev.power;
      row.normalized_power = ev.normalized_power;
      row.fdp = ev.fdp;
      row.n_discoveries = det.discoveries.size();
      row.runtime_ms = std::chrono::duration<double, std::milli>(stop - start).count();
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

}  // namespace blip
