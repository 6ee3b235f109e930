#include "blip/samplers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <thread>

#include <boost/math/special_functions/beta.hpp>

namespace blip {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_finite(const Eigen::MatrixXd& X, const char* what) {
  if (!X.allFinite()) throw ValidationError(std::string(what) + " must be finite");
}

// Log-weights over all subsets of one block, from its Gram block and X_J^T r.
void subset_log_weights(const Eigen::MatrixXd& GJ, const Eigen::VectorXd& bJ, double sigma2, double tau2,
                        double p0, std::vector<double>& out) {
  const int k = static_cast<int>(bJ.size());
  const double c = tau2 / sigma2;
  const double lp0 = std::log(p0);
  const double lp1 = std::log1p(-p0);
  const double quad_scale = tau2 / (2.0 * sigma2 * sigma2);
  out.assign(std::size_t{1} << k, 0.0);
  std::vector<int> idx;
  for (std::size_t mask = 0; mask < out.size(); ++mask) {
    idx.clear();
    for (int i = 0; i < k; ++i) {
      if (mask >> i & 1U) idx.push_back(i);
    }
    const auto m = static_cast<Eigen::Index>(idx.size());
    double lw = (k - static_cast<double>(m)) * lp0;
    if (m > 0) {
      lw += static_cast<double>(m) * lp1;
      Eigen::MatrixXd Q(m, m);
      Eigen::VectorXd b(m);
      for (Eigen::Index a = 0; a < m; ++a) {
        b(a) = bJ(idx[static_cast<std::size_t>(a)]);
        for (Eigen::Index d = 0; d < m; ++d)
          Q(a, d) = c * GJ(idx[static_cast<std::size_t>(a)], idx[static_cast<std::size_t>(d)]);
        Q(a, a) += 1.0;
      }
      Eigen::LLT<Eigen::MatrixXd> llt(Q);
      const Eigen::MatrixXd L = llt.matrixL();
      double logdet = 0.0;
      for (Eigen::Index a = 0; a < m; ++a) logdet += 2.0 * std::log(L(a, a));
      const Eigen::VectorXd v = llt.matrixL().solve(b);
      lw += -0.5 * logdet + quad_scale * v.squaredNorm();
    }
    out[mask] = lw;
  }
}

std::size_t sample_log_categorical(const std::vector<double>& lw, Rng& rng) {
  const double top = *std::max_element(lw.begin(), lw.end());
  double total = 0.0;
  for (double v : lw) total += std::exp(v - top);
  double u = rng.uniform() * total;
  for (std::size_t i = 0; i < lw.size(); ++i) {
    const double w = std::exp(lw[i] - top);
    if (u < w) return i;
    u -= w;
  }
  for (std::size_t i = lw.size(); i-- > 0;) {
    if (std::exp(lw[i] - top) > 0.0) return i;
  }
  return 0;
}

double exp_tail(double a, double b, Rng& rng) {
  // Robert's translated-exponential proposal for a > 0.
  const double alpha = 0.5 * (a + std::sqrt(a * a + 4.0));
  while (true) {
    const double z = a + rng.exponential() / alpha;
    if (z > b) continue;
    const double d = z - alpha;
    if (rng.uniform() <= std::exp(-0.5 * d * d)) return z;
  }
}

// Standard normal restricted to (a, b) with a < b.
double std_truncnorm(double a, double b, Rng& rng) {
  if (std::isinf(a) && std::isinf(b)) return rng.normal();
  if (b <= 0.0) return -std_truncnorm(-b, -a, rng);
  if (a < 0.0) {
    if (std::isinf(a) || std::isinf(b) || b - a > 2.5066282746310002) {
      while (true) {
        const double z = rng.normal();
        if (z > a && z < b) return z;
      }
    }
    while (true) {
      const double z = a + (b - a) * rng.uniform();
      if (rng.uniform() <= std::exp(-0.5 * z * z)) return z;
    }
  }
  const double alpha = 0.5 * (a + std::sqrt(a * a + 4.0));
  const double width = b - a;
  if (std::isfinite(b) && width < 1.0 / alpha) {
    while (true) {
      const double z = a + width * rng.uniform();
      if (rng.uniform() <= std::exp(0.5 * (a * a - z * z))) return z;
    }
  }
  if (a < 0.5) {
    while (true) {
      const double z = std::abs(rng.normal());
      if (z > a && z < b) return z;
    }
  }
  return exp_tail(a, b, rng);
}

struct ChainOut {
  std::vector<std::vector<Index>> signals;
  Eigen::MatrixXd beta;
  double drift = 0.0;
};

double prior_mean_inv_gamma(double a, double b) { return a > 1.0 ? b / (a - 1.0) : b; }

void run_chain(const Eigen::MatrixXd& X, const Eigen::MatrixXd& gram, const Eigen::VectorXd& data,
               bool probit, const LssConfig& cfg, int chain, ChainOut& out) {
  const Eigen::Index n = X.rows();
  const Eigen::Index p = X.cols();
  Rng rng(cfg.seed, static_cast<std::uint64_t>(chain));
  double sigma2, tau2, p0;
  if (cfg.fixed) {
    sigma2 = cfg.fixed->sigma2;
    tau2 = cfg.fixed->tau2;
    p0 = cfg.fixed->p0;
  } else {
    sigma2 = prior_mean_inv_gamma(cfg.prior.a_sigma, cfg.prior.b_sigma);
    tau2 = prior_mean_inv_gamma(cfg.prior.a_tau, cfg.prior.b_tau);
    const double m = cfg.prior.a0 / (cfg.prior.a0 + cfg.prior.b0);
    p0 = m >= cfg.prior.p_min ? m : 0.5 * (cfg.prior.p_min + 1.0);
  }

  Eigen::VectorXd beta = Eigen::VectorXd::Zero(p);
  if (cfg.init_active_prob > 0.0) {
    for (Eigen::Index j = 0; j < p; ++j) {
      if (rng.uniform() < cfg.init_active_prob) beta(j) = std::sqrt(tau2) * rng.normal();
    }
  }
  Eigen::VectorXd y = data;
  if (probit) {
    const Eigen::VectorXd mu = X * beta;
    for (Eigen::Index i = 0; i < n; ++i) {
      y(i) = data(i) > 0.5 ? sample_truncated_normal(mu(i), sigma2, 0.0, kInf, rng)
                           : sample_truncated_normal(mu(i), sigma2, -kInf, 0.0, rng);
    }
  }
  Eigen::VectorXd r = y - X * beta;

  const int k = std::min<int>(cfg.block_size, static_cast<int>(p));
  const int kept = cfg.n_iter - cfg.burn_in;
  if (cfg.store_beta) out.beta.resize(kept, p);
  out.signals.reserve(static_cast<std::size_t>(kept));
  std::vector<double> lw;
  Eigen::VectorXd bJ, mu;
  for (int it = 0; it < cfg.n_iter; ++it) {
    const Eigen::Index offset = cfg.shift_blocks && k > 1 ? static_cast<Eigen::Index>(rng.below(static_cast<std::uint64_t>(k))) : 0;
    Eigen::Index start = 0;
    while (start < p) {
      const Eigen::Index end = start == 0 && offset > 0 ? offset : std::min<Eigen::Index>(p, start + k);
      const Eigen::Index len = end - start;
      if (probit) {
        mu = y - r;
        for (Eigen::Index i = 0; i < n; ++i) {
          y(i) = data(i) > 0.5 ? sample_truncated_normal(mu(i), sigma2, 0.0, kInf, rng)
                               : sample_truncated_normal(mu(i), sigma2, -kInf, 0.0, rng);
        }
        r = y - mu;
      }
      auto XJ = X.middleCols(start, len);
      r.noalias() += XJ * beta.segment(start, len);
      bJ.noalias() = XJ.transpose() * r;
      subset_log_weights(gram.block(start, start, len, len), bJ, sigma2, tau2, p0, lw);
      const std::size_t mask = sample_log_categorical(lw, rng);
      beta.segment(start, len).setZero();
      std::vector<Eigen::Index> act;
      for (Eigen::Index i = 0; i < len; ++i) {
        if (mask >> i & 1U) act.push_back(i);
      }
      if (!act.empty()) {
        const auto m = static_cast<Eigen::Index>(act.size());
        const double c = tau2 / sigma2;
        Eigen::MatrixXd Q(m, m);
        Eigen::VectorXd b(m);
        for (Eigen::Index a = 0; a < m; ++a) {
          b(a) = bJ(act[static_cast<std::size_t>(a)]);
          for (Eigen::Index d = 0; d < m; ++d)
            Q(a, d) = c * gram(start + act[static_cast<std::size_t>(a)], start + act[static_cast<std::size_t>(d)]);
          Q(a, a) += 1.0;
        }
        Eigen::LLT<Eigen::MatrixXd> llt(Q);
        Eigen::VectorXd mean = c * llt.solve(b);
        Eigen::VectorXd zeta(m);
        for (Eigen::Index a = 0; a < m; ++a) zeta(a) = rng.normal();
        const Eigen::VectorXd noise = llt.matrixU().solve(zeta);
        const Eigen::VectorXd draw = mean + std::sqrt(tau2) * noise;
        for (Eigen::Index a = 0; a < m; ++a) beta(start + act[static_cast<std::size_t>(a)]) = draw(a);
      }
      r.noalias() -= XJ * beta.segment(start, len);
      start = end;
    }
    if (cfg.recompute_every > 0 && (it + 1) % cfg.recompute_every == 0) {
      const Eigen::VectorXd exact = y - X * beta;
      out.drift = std::max(out.drift, (exact - r).cwiseAbs().maxCoeff());
      r = exact;
    }
    if (!cfg.fixed) {
      tau2 = draw_tau2(beta, cfg.prior, rng);
      sigma2 = draw_sigma2(r, cfg.prior, rng);
      Eigen::Index active = 0;
      for (Eigen::Index j = 0; j < p; ++j) active += beta(j) != 0.0 ? 1 : 0;
      p0 = draw_p0(p, active, cfg.prior, rng);
    }
    if (it >= cfg.burn_in) {
      std::vector<Index> sig;
      for (Eigen::Index j = 0; j < p; ++j) {
        if (beta(j) != 0.0) sig.push_back(j);
      }
      out.signals.push_back(std::move(sig));
      if (cfg.store_beta) out.beta.row(it - cfg.burn_in) = beta.transpose();
    }
  }
}

LssResult run_sampler(const Eigen::MatrixXd& X, const Eigen::VectorXd& data, bool probit,
                      const LssConfig& cfg) {
  cfg.validate();
  if (X.rows() < 1 || X.cols() < 1) throw ValidationError("design matrix must be non-empty");
  if (data.size() != X.rows()) throw ValidationError("response length must match the design rows");
  require_finite(X, "design matrix");
  require_finite(data, "response");
  if (probit) {
    for (Eigen::Index i = 0; i < data.size(); ++i) {
      if (data(i) != 0.0 && data(i) != 1.0) throw ValidationError("probit responses must be 0 or 1");
    }
  }
  const Eigen::MatrixXd gram = X.transpose() * X;
  std::vector<ChainOut> outs(static_cast<std::size_t>(cfg.chains));
  unsigned hw = std::max(1U, std::thread::hardware_concurrency());
  const int cap = cfg.threads > 0 ? cfg.threads : static_cast<int>(hw);
  const int width = std::max(1, std::min(cap, cfg.chains));
  for (int first = 0; first < cfg.chains; first += width) {
    const int last = std::min(cfg.chains, first + width);
    if (last - first == 1) {
      run_chain(X, gram, data, probit, cfg, first, outs[static_cast<std::size_t>(first)]);
      continue;
    }
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(last - first));
    for (int c = first; c < last; ++c) {
      pool.emplace_back([&, c] {
        try {
          run_chain(X, gram, data, probit, cfg, c, outs[static_cast<std::size_t>(c)]);
        } catch (...) {
          errors[static_cast<std::size_t>(c - first)] = std::current_exception();
        }
      });
    }
    for (auto& t : pool) t.join();
    for (auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  }
  LssResult res;
  for (int c = 0; c < cfg.chains; ++c) {
    auto& o = outs[static_cast<std::size_t>(c)];
    for (auto& s : o.signals) res.samples.add_discrete(std::move(s), c);
    if (cfg.store_beta) res.beta.push_back(std::move(o.beta));
    res.max_residual_drift = std::max(res.max_residual_drift, o.drift);
  }
  return res;
}

}  // namespace

void LssConfig::validate() const {
  if (n_iter < 1 || burn_in < 0 || burn_in >= n_iter)
    throw ValidationError("need 0 <= burn_in < n_iter");
  if (block_size < 1) throw ValidationError("block size must be at least 1");
  if (block_size > 16) throw ValidationError("block size above 16 is not supported");
  if (chains < 1) throw ValidationError("need at least one chain");
  if (!(prior.p_min >= 0.0 && prior.p_min < 1.0)) throw ValidationError("p_min must lie in [0,1)");
  if (!(prior.a_sigma > 0 && prior.b_sigma > 0 && prior.a_tau > 0 && prior.b_tau > 0 && prior.a0 > 0 &&
        prior.b0 > 0))
    throw ValidationError("hyperprior parameters must be positive");
  if (fixed && !(fixed->sigma2 > 0.0 && fixed->tau2 > 0.0 && fixed->p0 > 0.0 && fixed->p0 < 1.0))
    throw ValidationError("fixed hyperparameters need sigma2, tau2 > 0 and p0 in (0,1)");
  if (!(init_active_prob >= 0.0 && init_active_prob <= 1.0))
    throw ValidationError("init_active_prob must lie in [0,1]");
}

LssResult lss_gibbs(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const LssConfig& cfg) {
  return run_sampler(X, y, false, cfg);
}

LssResult pss_gibbs(const Eigen::MatrixXd& X, const Eigen::VectorXd& z, const LssConfig& cfg) {
  return run_sampler(X, z, true, cfg);
}

double sample_truncated_normal(double mu, double sigma2, double lo, double hi, Rng& rng) {
  if (!(sigma2 > 0.0) || !std::isfinite(sigma2)) throw ValidationError("variance must be positive");
  if (!(lo < hi) || std::isnan(mu)) throw ValidationError("truncation needs lo < hi");
  const double s = std::sqrt(sigma2);
  const double a = std::isinf(lo) ? lo : (lo - mu) / s;
  const double b = std::isinf(hi) ? hi : (hi - mu) / s;
  return mu + s * std_truncnorm(a, b, rng);
}

std::vector<double> block_log_weights(const Eigen::MatrixXd& XJ, const Eigen::VectorXd& r, double sigma2,
                                      double tau2, double p0) {
  if (XJ.rows() != r.size()) throw ValidationError("residual length must match the block rows");
  if (XJ.cols() > 16) throw ValidationError("block too large to enumerate");
  std::vector<double> out;
  subset_log_weights(XJ.transpose() * XJ, XJ.transpose() * r, sigma2, tau2, p0, out);
  return out;
}

GaussianMoments active_conditional(const Eigen::MatrixXd& XA, const Eigen::VectorXd& r, double sigma2,
                                   double tau2) {
  const double c = tau2 / sigma2;
  const Eigen::Index m = XA.cols();
  const Eigen::MatrixXd Q = Eigen::MatrixXd::Identity(m, m) + c * XA.transpose() * XA;
  Eigen::LLT<Eigen::MatrixXd> llt(Q);
  GaussianMoments g;
  g.mean = c * llt.solve(XA.transpose() * r);
  g.cov = tau2 * llt.solve(Eigen::MatrixXd::Identity(m, m));
  return g;
}

double draw_sigma2(const Eigen::VectorXd& r, const Hyperpriors& prior, Rng& rng) {
  return rng.inv_gamma(static_cast<double>(r.size()) / 2.0 + prior.a_sigma, r.squaredNorm() / 2.0 + prior.b_sigma);
}

double draw_tau2(const Eigen::VectorXd& beta, const Hyperpriors& prior, Rng& rng) {
  double ss = 0.0;
  Eigen::Index active = 0;
  for (Eigen::Index j = 0; j < beta.size(); ++j) {
    if (beta(j) != 0.0) {
      ss += beta(j) * beta(j);
      ++active;
    }
  }
  return rng.inv_gamma(static_cast<double>(active) / 2.0 + prior.a_tau, ss / 2.0 + prior.b_tau);
}

double draw_p0(Eigen::Index p, Eigen::Index n_active, const Hyperpriors& prior, Rng& rng) {
  const double a = prior.a0 + static_cast<double>(p - n_active);
  const double b = prior.b0 + static_cast<double>(n_active);
  for (int attempt = 0; attempt < 10000; ++attempt) {
    const double x = rng.beta(a, b);
    if (x >= prior.p_min) return x;
  }
  // Invert the upper tail directly; 1 - ibeta loses all precision near 1.
  const double upper = boost::math::ibetac(a, b, prior.p_min);
  const double u = upper * rng.uniform();
  return std::clamp(boost::math::ibetac_inv(a, b, u), prior.p_min, 1.0);
}

}  // namespace blip
