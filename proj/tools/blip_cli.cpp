// blip: command-line driver for group generation, PIP estimation, detection,
// posterior sampling, simulation and evaluation.
//
// Exit codes: 0 success, 2 usage, 3 invalid data, 4 internal failure.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "blip/blip.hpp"
#include "blip/groups.hpp"
#include "blip/io.hpp"
#include "blip/pips.hpp"
#include "blip/samplers.hpp"
#include "blip/sim.hpp"

namespace {

using namespace blip;

constexpr int kExitUsage = 2;
constexpr int kExitData = 3;
constexpr int kExitInternal = 4;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open " + path);
  return in;
}

// Writes to `path`, or stdout when it is empty or "-".
template <typename F>
void with_out(const std::string& path, F&& f) {
  if (path.empty() || path == "-") {
    f(std::cout);
    return;
  }
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw UsageError("cannot write " + path);
  f(out);
  if (!out) throw InternalError("write failed: " + path);
}

std::vector<Index> parse_locations(const std::string& spec) {
  std::vector<Index> out;
  std::stringstream ss(spec);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (tok.empty()) continue;
    const auto dots = tok.find("..");
    try {
      if (dots == std::string::npos) {
        out.push_back(std::stoll(tok));
      } else {
        const Index lo = std::stoll(tok.substr(0, dots));
        const Index hi = std::stoll(tok.substr(dots + 2));
        if (hi < lo) throw UsageError("empty location range " + tok);
        for (Index l = lo; l <= hi; ++l) out.push_back(l);
      }
    } catch (const std::logic_error&) {
      throw UsageError("bad location list entry: " + tok);
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<double> parse_radii_log(const std::string& spec) {
  double lo = 0, hi = 0;
  int n = 0;
  char c1 = 0, c2 = 0;
  std::istringstream ss(spec);
  if (!(ss >> lo >> c1 >> hi >> c2 >> n) || c1 != ':' || c2 != ':')
    throw UsageError("--radii-log expects lo:hi:n");
  return log_spaced(lo, hi, n);
}

Bounds parse_bounds(const std::string& spec) {
  Bounds b;
  char c = 0;
  std::istringstream ss(spec);
  if (!(ss >> b.lo >> c >> b.hi) || c != ':') throw UsageError("--bounds expects lo:hi");
  return b;
}

std::string fmt(double x) { return io::format_double(x); }

// ---------------------------------------------------------------------------
// groups
// ---------------------------------------------------------------------------
struct GroupsArgs {
  std::string out;
  int max_size = kDefaultMaxGroupSize;
  std::string locations;
  Index p = 0;
  std::string corr, dissim, data, linkage = "average", kind = "abs-one-minus";
  std::vector<double> radii;
  std::string radii_log, bounds = "0:1", shape = "sphere", centers;
  int dim = 2;
  std::string samples;
  std::vector<double> kappa;
};

void add_groups(CLI::App& app, GroupsArgs& a, std::function<void()>& action) {
  auto* g = app.add_subcommand("groups", "Generate candidate groups")->require_subcommand(1);

  auto* contig = g->add_subcommand("contiguous", "All windows of consecutive locations");
  auto* loc = contig->add_option("--locations", a.locations, "Locations, e.g. 0..99 or 1,2,5");
  auto* pp = contig->add_option("--p", a.p, "Use locations 0..p-1")->check(CLI::PositiveNumber);
  loc->excludes(pp);
  contig->add_option("--max-size", a.max_size)->check(CLI::PositiveNumber);
  contig->add_option("--out,-o", a.out);
  contig->callback([&] {
    action = [&] {
      std::vector<Index> locs;
      if (!a.locations.empty()) {
        locs = parse_locations(a.locations);
      } else if (a.p > 0) {
        for (Index l = 0; l < a.p; ++l) locs.push_back(l);
      } else {
        throw UsageError("contiguous needs --locations or --p");
      }
      const auto groups = contiguous_groups(locs, a.max_size);
      with_out(a.out, [&](std::ostream& os) { io::write_groups(os, groups); });
    };
  });

  auto* cl = g->add_subcommand("cluster", "Agglomerative clustering tree groups");
  auto* o1 = cl->add_option("--corr", a.corr, "Correlation matrix CSV")->check(CLI::ExistingFile);
  auto* o2 = cl->add_option("--dissimilarity", a.dissim, "Dissimilarity matrix CSV")->check(CLI::ExistingFile);
  auto* o3 = cl->add_option("--data", a.data, "Design CSV; columns are correlated")->check(CLI::ExistingFile);
  o1->excludes(o2)->excludes(o3);
  o2->excludes(o3);
  cl->add_option("--linkage", a.linkage)->check(CLI::IsMember({"single", "average", "complete"}));
  cl->add_option("--kind", a.kind)->check(CLI::IsMember({"abs-one-minus", "one-plus"}));
  cl->add_option("--max-size", a.max_size)->check(CLI::PositiveNumber);
  cl->add_option("--out,-o", a.out);
  cl->callback([&] {
    action = [&] {
      Eigen::MatrixXd D;
      const auto kind = a.kind == "one-plus" ? DissimilarityKind::OnePlus : DissimilarityKind::AbsOneMinus;
      if (!a.dissim.empty()) {
        auto in = open_in(a.dissim);
        D = io::read_matrix_csv(in);
      } else if (!a.corr.empty()) {
        auto in = open_in(a.corr);
        D = dissimilarity_from_corr(io::read_matrix_csv(in), kind);
      } else if (!a.data.empty()) {
        auto in = open_in(a.data);
        D = dissimilarity_from_corr(column_correlation(io::read_matrix_csv(in)), kind);
      } else {
        throw UsageError("cluster needs --corr, --dissimilarity or --data");
      }
      const auto groups = hierarchical_groups(D, parse_linkage(a.linkage), a.max_size);
      with_out(a.out, [&](std::ostream& os) { io::write_groups(os, groups); });
    };
  });

  auto* lat = g->add_subcommand("lattice", "Spheres or cubes centered on a lattice");
  auto* r1 = lat->add_option("--radii", a.radii, "Explicit radii")->delimiter(',');
  auto* r2 = lat->add_option("--radii-log", a.radii_log, "lo:hi:n log-spaced radii");
  r1->excludes(r2);
  lat->add_option("--dim", a.dim)->check(CLI::PositiveNumber);
  lat->add_option("--bounds", a.bounds, "lo:hi applied to every axis");
  lat->add_option("--shape", a.shape)->check(CLI::IsMember({"sphere", "cube"}));
  lat->add_option("--extra-centers", a.centers, "CSV of additional centers")->check(CLI::ExistingFile);
  lat->add_option("--out,-o", a.out);
  lat->callback([&] {
    action = [&] {
      std::vector<double> radii = a.radii_log.empty() ? a.radii : parse_radii_log(a.radii_log);
      if (radii.empty()) throw UsageError("lattice needs --radii or --radii-log");
      const auto space = LocationSpace::continuous(std::vector<Bounds>(static_cast<std::size_t>(a.dim), parse_bounds(a.bounds)));
      std::vector<std::vector<double>> extra;
      if (!a.centers.empty()) {
        auto in = open_in(a.centers);
        const auto M = io::read_matrix_csv(in);
        if (M.size() > 0 && M.cols() != a.dim) throw ValidationError("extra centers have the wrong dimension");
        for (Eigen::Index i = 0; i < M.rows(); ++i) {
          std::vector<double> c(static_cast<std::size_t>(M.cols()));
          for (Eigen::Index j = 0; j < M.cols(); ++j) c[static_cast<std::size_t>(j)] = M(i, j);
          extra.push_back(std::move(c));
        }
      }
      const auto res = lattice_regions(space, radii, a.shape == "cube" ? Shape::Cube : Shape::Sphere, extra);
      for (const auto& w : res.warnings) std::cerr << "warning: " << w << '\n';
      with_out(a.out, [&](std::ostream& os) { io::write_groups(os, res.groups); });
    };
  });

  auto* dr = g->add_subcommand("default-regression", "Contiguous and clustered groups over a kappa grid");
  dr->add_option("--samples", a.samples, "Samples file")->required()->check(CLI::ExistingFile);
  dr->add_option("--data", a.data, "Design CSV (last column is the response)")->check(CLI::ExistingFile);
  dr->add_option("--p", a.p, "Number of locations (inferred from --data)")->check(CLI::PositiveNumber);
  dr->add_option("--max-size", a.max_size)->check(CLI::PositiveNumber);
  dr->add_option("--kappa", a.kappa, "Kappa grid")->delimiter(',');
  dr->add_option("--out,-o", a.out);
  dr->callback([&] {
    action = [&] {
      auto sin = open_in(a.samples);
      const SampleSet samples = io::read_samples(sin);
      if (!samples.is_discrete()) throw ValidationError("default-regression needs discrete samples");
      std::vector<CandidateGroup> groups;
      if (samples.size() > 0) {
        Eigen::MatrixXd X;
        Index p = a.p;
        if (!a.data.empty()) {
          auto din = open_in(a.data);
          X = io::read_data_csv(din).X;
          if (p == 0) p = X.cols();
          if (p != X.cols()) throw UsageError("--p disagrees with the design width");
        }
        if (p == 0) throw UsageError("default-regression needs --p or --data");
        RegressionGroupOptions opts;
        opts.max_size = a.max_size;
        if (!a.kappa.empty()) opts.kappa_grid = a.kappa;
        groups = default_regression_groups(samples, p, X, opts);
      }
      with_out(a.out, [&](std::ostream& os) { io::write_groups(os, groups); });
    };
  });
}

// ---------------------------------------------------------------------------
// pips
// ---------------------------------------------------------------------------
struct PipsArgs {
  std::string groups, samples, susie, out, groups_out;
  double delta = 0.0;
  std::string chain_weighting = "sample";
};

void add_pips(CLI::App& app, PipsArgs& a, std::function<void()>& action) {
  auto* c = app.add_subcommand("pips", "Estimate group PIPs");
  c->add_option("--groups", a.groups, "Groups file")->required()->check(CLI::ExistingFile);
  auto* s = c->add_option("--samples", a.samples, "Samples file")->check(CLI::ExistingFile);
  auto* z = c->add_option("--susie-alphas", a.susie, "SuSiE alpha CSV")->check(CLI::ExistingFile);
  s->excludes(z);
  c->add_option("--delta", a.delta, "Lower-bound shift subtracted from every pip")->check(CLI::Range(0.0, 1.0));
  c->add_option("--chain-weighting", a.chain_weighting)->check(CLI::IsMember({"sample", "chain"}));
  c->add_option("--out,-o", a.out);
  c->add_option("--groups-out", a.groups_out, "Also write the groups with pips attached");
  c->callback([&] {
    action = [&] {
      if (a.samples.empty() == a.susie.empty()) throw UsageError("pips needs exactly one of --samples, --susie-alphas");
      auto gin = open_in(a.groups);
      auto groups = io::read_groups(gin);
      PipTable table;
      if (!a.susie.empty()) {
        auto in = open_in(a.susie);
        table = pips_from_susie(io::read_susie_csv(in), groups);
      } else {
        auto in = open_in(a.samples);
        const SampleSet samples = io::read_samples(in);
        if (samples.is_discrete()) {
          if (a.chain_weighting == "chain") {
            std::map<int, SampleSet> split;
            for (std::size_t i = 0; i < samples.size(); ++i) {
              const int ch = i < samples.chain.size() ? samples.chain[i] : 0;
              split[ch].add_discrete(samples.signals[i], ch);
            }
            std::vector<PipTable> per;
            for (const auto& [ch, ss] : split) per.push_back(pips_from_samples(ss, groups));
            table = merge_chains(per, ChainWeighting::PerChain);
          } else {
            table = pips_from_samples(samples, groups);
          }
        } else {
          std::vector<CandidateGroup> plain;
          std::vector<std::size_t> counted;
          for (std::size_t i = 0; i < groups.size(); ++i) {
            if (groups[i].count_interval) {
              counted.push_back(i);
            } else {
              plain.push_back(groups[i]);
            }
          }
          if (samples.size() > 0) {
            table = pips_continuous(samples, plain, RegionLocator(plain));
            for (std::size_t i : counted) {
              const auto res = count_interval_pips(samples, {groups[i].region}, {*groups[i].count_interval});
              table.pips[groups[i].id] = res.front().pip;
            }
          }
          for (const auto& g : groups) table.pips.emplace(g.id, 0.0);
        }
      }
      if (a.delta > 0.0) table = lower_bound_pips(table, a.delta);
      with_out(a.out, [&](std::ostream& os) { io::write_pips(os, table); });
      if (!a.groups_out.empty()) {
        table.apply(groups);
        with_out(a.groups_out, [&](std::ostream& os) { io::write_groups(os, groups); });
      }
    };
  });
}

// ---------------------------------------------------------------------------
// solve
// ---------------------------------------------------------------------------
struct SolveArgs {
  std::string groups, pips, samples, out, error = "fdr", weight = "inverse-size", fwer_mode = "auto";
  std::optional<double> q, v;
  std::uint64_t seed = 0;
  bool no_prefilter = false, no_prenarrow = false;
  double delta = 0.0, grid_tol = 1e-3;
};

void add_solve(CLI::App& app, SolveArgs& a, std::function<void()>& action) {
  auto* c = app.add_subcommand("solve", "Select disjoint discoveries under an error-rate constraint");
  c->add_option("--groups", a.groups, "Groups file")->required()->check(CLI::ExistingFile);
  c->add_option("--pips", a.pips, "PIP file (otherwise the pips stored on the groups)")->check(CLI::ExistingFile);
  c->add_option("--samples", a.samples, "Samples for FWER bisection")->check(CLI::ExistingFile);
  c->add_option("--error", a.error)->check(CLI::IsMember({"fdr", "local-fdr", "pfer", "fwer"}));
  const auto open_unit = CLI::Validator(
      [](std::string& s) {
        double x = 0;
        try {
          x = std::stod(s);
        } catch (const std::exception&) {
          return std::string("not a number");
        }
        return x > 0.0 && x < 1.0 ? std::string() : std::string("q must lie in (0,1)");
      },
      "(0,1)");
  c->add_option("--q", a.q, "Target level")->check(open_unit);
  c->add_option("--v", a.v, "PFER budget")->check(CLI::PositiveNumber);
  c->add_option("--weight", a.weight)->check(CLI::IsMember({"inverse-size", "inverse-radius", "inverse-count-interval", "log-inverse-size", "stored"}) | CLI::Validator([](std::string& s) { return s.rfind("constant:", 0) == 0 ? std::string() : std::string("unknown weight"); }, "constant:c"));
  c->add_option("--seed", a.seed);
  c->add_flag("--no-prefilter", a.no_prefilter);
  c->add_flag("--no-prenarrow", a.no_prenarrow);
  c->add_option("--delta", a.delta, "Robust lower-bound shift")->check(CLI::Range(0.0, 1.0));
  c->add_option("--fwer-mode", a.fwer_mode)->check(CLI::IsMember({"auto", "pfer", "bisection"}));
  c->add_option("--grid-tol", a.grid_tol)->check(CLI::PositiveNumber);
  c->add_option("--out,-o", a.out, "Detection file");
  c->callback([&] {
    action = [&] {
      const ErrorKind kind = parse_error_kind(a.error);
      if (kind == ErrorKind::PFER && !a.v) throw UsageError("--error pfer needs --v");
      if (kind != ErrorKind::PFER && a.v) throw UsageError("--v only applies to --error pfer");
      auto gin = open_in(a.groups);
      auto groups = io::read_groups(gin);
      PipTable table;
      const PipTable* table_ptr = nullptr;
      if (!a.pips.empty()) {
        auto pin = open_in(a.pips);
        table = io::read_pips(pin);
        groups = attach_pips(std::move(groups), table);
        table_ptr = &table;
      }
      std::optional<SampleSet> samples;
      if (!a.samples.empty()) {
        auto sin = open_in(a.samples);
        samples = io::read_samples(sin);
      }
      const WeightFn weight = parse_weight_fn(a.weight);
      BlipOptions opts;
      opts.seed = a.seed;
      opts.prefilter = !a.no_prefilter;
      opts.prenarrow = !a.no_prenarrow;
      opts.delta = a.delta;
      const double q = a.q.value_or(0.1);
      ErrorRateSpec spec;
      DetectionSet det;
      if (kind == ErrorKind::FWER) {
        spec = ErrorRateSpec::fwer(q, a.grid_tol);
        const FwerMode mode = a.fwer_mode == "pfer" ? FwerMode::PferBound
                              : a.fwer_mode == "bisection" ? FwerMode::Bisection
                                                           : FwerMode::Auto;
        if (mode == FwerMode::Bisection && !samples) throw UsageError("--fwer-mode bisection needs --samples");
        det = run_fwer(groups, weight, q, samples ? &*samples : nullptr, opts, a.grid_tol, mode);
      } else {
        spec = kind == ErrorKind::FDR ? ErrorRateSpec::fdr(q)
               : kind == ErrorKind::LocalFDR ? ErrorRateSpec::local_fdr(q)
                                             : ErrorRateSpec::pfer(*a.v);
        det = run_blip(groups, weight, spec, opts);
      }
      const Certificate cert = certify(det, det.error_spec, table_ptr);
      std::cout << "error " << error_kind_name(det.error_spec.kind) << '\n'
                << "discoveries " << det.discoveries.size() << '\n'
                << "objective " << fmt(det.objective) << '\n'
                << "upper_bound " << fmt(det.upper_bound) << '\n'
                << "gap " << fmt(cert.gap) << '\n'
                << "budget_used " << fmt(det.error_budget_used) << '\n'
                << "noninteger " << det.report.n_noninteger << '\n';
      for (const auto& [id, x] : det.report.relaxed) std::cout << "relaxed " << id << ' ' << fmt(x) << '\n';
      for (const auto& d : det.discoveries) std::cout << "selected " << d.group.id << ' ' << fmt(d.group.pip) << '\n';
      std::cout << "certificate " << (cert.passed() ? "ok" : "FAILED") << '\n';
      if (!a.out.empty()) with_out(a.out, [&](std::ostream& os) { io::write_detection(os, det, cert); });
      if (!cert.passed()) throw InternalError("certificate check failed");
    };
  });
}

// ---------------------------------------------------------------------------
// sample
// ---------------------------------------------------------------------------
struct SampleArgs {
  std::string data, out, beta_out, preset = "misspec";
  int chains = 1, iters = 2000, block_size = 5;
  std::optional<int> burnin;
  std::uint64_t seed = 0;
  double sigma2 = 1.0, tau2 = 1.0, p0 = 0.9, init_active = 0.0;
};

void add_sample(CLI::App& app, SampleArgs& a, int& threads, std::function<void()>& action) {
  auto* c = app.add_subcommand("sample", "Spike-and-slab posterior sampling")->require_subcommand(1);
  for (const char* name : {"lss", "pss"}) {
    const bool probit = std::string(name) == "pss";
    auto* s = c->add_subcommand(name, probit ? "Probit regression sampler" : "Linear regression sampler");
    s->add_option("--data", a.data, "CSV with features and the response in the last column")->required()->check(CLI::ExistingFile);
    s->add_option("--chains", a.chains)->check(CLI::PositiveNumber);
    s->add_option("--iters", a.iters)->check(CLI::PositiveNumber);
    s->add_option("--burnin", a.burnin, "Default: 10% of --iters")->check(CLI::NonNegativeNumber);
    s->add_option("--block-size", a.block_size)->check(CLI::Range(1, 16));
    s->add_option("--seed", a.seed);
    s->add_option("--preset", a.preset)->check(CLI::IsMember({"well", "misspec"}));
    s->add_option("--sigma2", a.sigma2, "Noise variance for --preset well")->check(CLI::PositiveNumber);
    s->add_option("--tau2", a.tau2, "Slab variance for --preset well")->check(CLI::PositiveNumber);
    s->add_option("--p0", a.p0, "Null probability for --preset well")->check(CLI::Range(0.0, 1.0));
    s->add_option("--init-active", a.init_active, "Random initial active fraction")->check(CLI::Range(0.0, 1.0));
    s->add_option("--out,-o", a.out, "Samples file");
    s->add_option("--beta-out", a.beta_out, "CSV of coefficient draws");
    s->callback([&, probit] {
      action = [&, probit] {
        auto in = open_in(a.data);
        const io::DataSet d = io::read_data_csv(in);
        LssConfig cfg;
        cfg.n_iter = a.iters;
        cfg.burn_in = a.burnin.value_or(a.iters / 10);
        cfg.chains = a.chains;
        cfg.block_size = a.block_size;
        cfg.seed = a.seed;
        cfg.threads = threads;
        cfg.init_active_prob = a.init_active;
        cfg.store_beta = !a.beta_out.empty();
        if (a.preset == "well") {
          if (!(a.p0 > 0.0 && a.p0 < 1.0)) throw UsageError("--p0 must lie in (0,1)");
          cfg.fixed = FixedHyper{a.sigma2, a.tau2, a.p0};
        } else {
          cfg.prior = Hyperpriors::misspecified();
        }
        if (cfg.burn_in >= cfg.n_iter) throw UsageError("--burnin must be below --iters");
        const LssResult res = probit ? pss_gibbs(d.X, d.y, cfg) : lss_gibbs(d.X, d.y, cfg);
        with_out(a.out, [&](std::ostream& os) { io::write_samples(os, res.samples); });
        if (!a.beta_out.empty()) {
          with_out(a.beta_out, [&](std::ostream& os) {
            os << "chain,draw";
            for (Eigen::Index j = 0; j < d.X.cols(); ++j) os << ",b" << j;
            os << '\n';
            for (std::size_t ch = 0; ch < res.beta.size(); ++ch) {
              const auto& B = res.beta[ch];
              for (Eigen::Index i = 0; i < B.rows(); ++i) {
                os << ch << ',' << i;
                for (Eigen::Index j = 0; j < B.cols(); ++j) os << ',' << fmt(B(i, j));
                os << '\n';
              }
            }
          });
        }
      };
    });
  }
}

// ---------------------------------------------------------------------------
// simulate / eval
// ---------------------------------------------------------------------------
struct SimArgs {
  Index n = 100, p = 50, T = 0;
  int k = 5;
  double s = 0.05, tau2 = 1.0, sigma2 = 1.0;
  std::string link = "gaussian", design = "ar", out_data, out_truth, config, out;
  std::uint64_t seed = 0;
  std::optional<std::uint64_t> seed_override;
  bool timing = false;
  std::vector<Index> changepoints;
  std::vector<double> shifts;
};

void add_simulate(CLI::App& app, SimArgs& a, int& threads, std::function<void()>& action) {
  auto* c = app.add_subcommand("simulate", "Synthetic data and simulation studies")->require_subcommand(1);
  auto* d = c->add_subcommand("data", "Write one synthetic regression data set");
  d->add_option("--design", a.design)->check(CLI::IsMember({"ar", "changepoint"}));
  d->add_option("--n", a.n)->check(CLI::PositiveNumber);
  d->add_option("--p", a.p)->check(CLI::PositiveNumber);
  d->add_option("--k", a.k)->check(CLI::PositiveNumber);
  d->add_option("--s", a.s, "Sparsity")->check(CLI::Range(0.0, 1.0));
  d->add_option("--tau2", a.tau2)->check(CLI::PositiveNumber);
  d->add_option("--sigma2", a.sigma2)->check(CLI::PositiveNumber);
  d->add_option("--link", a.link)->check(CLI::IsMember({"gaussian", "probit"}));
  d->add_option("--T", a.T, "Series length for the changepoint design");
  d->add_option("--changepoints", a.changepoints, "Changepoint times (changepoint design)")->delimiter(',');
  d->add_option("--shifts", a.shifts, "Mean shift at each changepoint")->delimiter(',');
  d->add_option("--seed", a.seed);
  d->add_option("--out", a.out_data, "Data CSV")->required();
  d->add_option("--truth", a.out_truth, "Truth JSON");
  d->callback([&] {
    action = [&] {
      Eigen::MatrixXd X;
      Eigen::VectorXd y;
      std::vector<Index> signals;
      if (a.design == "changepoint") {
        const Index T = a.T > 0 ? a.T : a.n;
        X = changepoint_design(T);
        if (a.changepoints.size() != a.shifts.size()) throw UsageError("--changepoints and --shifts must pair up");
        Eigen::VectorXd beta = Eigen::VectorXd::Zero(T);
        for (std::size_t i = 0; i < a.changepoints.size(); ++i) {
          if (a.changepoints[i] < 0 || a.changepoints[i] >= T) throw ValidationError("changepoint out of range");
          beta(a.changepoints[i]) = a.shifts[i];
        }
        for (Index j = 0; j < T; ++j) {
          if (beta(j) != 0.0) signals.push_back(j);
        }
        Rng rng(a.seed, 7);
        y = X * beta;
        for (Index i = 0; i < T; ++i) y(i) += std::sqrt(a.sigma2) * rng.normal();
        if (parse_link(a.link) == Link::Probit) {
          for (Index i = 0; i < T; ++i) y(i) = y(i) >= 0.0 ? 1.0 : 0.0;
        }
      } else {
        X = gen_ark_design(a.n, a.p, a.k, derive_seed(a.seed, 1));
        GlmData g = gen_sparse_glm(X, a.s, a.tau2, a.sigma2, parse_link(a.link), derive_seed(a.seed, 2));
        y = std::move(g.response);
        signals = std::move(g.signals);
      }
      with_out(a.out_data, [&](std::ostream& os) { io::write_data_csv(os, X, y); });
      if (!a.out_truth.empty())
        with_out(a.out_truth, [&](std::ostream& os) { io::write_truth(os, Truth::discrete(signals)); });
    };
  });

  auto* r = c->add_subcommand("run", "Run the scenario grid of a config file");
  r->add_option("--config", a.config, "JSON config")->required()->check(CLI::ExistingFile);
  r->add_option("--seed", a.seed_override, "Override the config seed");
  r->add_option("--out,-o", a.out, "Results CSV");
  r->add_flag("--timing", a.timing, "Record wall-clock runtime (output no longer reproducible)");
  r->callback([&] {
    action = [&] {
      auto in = open_in(a.config);
      const io::SimConfig cfg = io::read_sim_config(in);
      const std::uint64_t seed = a.seed_override.value_or(cfg.seed);
      std::vector<SimRow> rows;
      for (std::size_t i = 0; i < cfg.scenarios.size(); ++i) {
        auto part = run_scenario(cfg.scenarios[i], derive_seed(seed, i), threads);
        rows.insert(rows.end(), part.begin(), part.end());
      }
      with_out(a.out, [&](std::ostream& os) { io::write_sim_rows(os, rows, a.timing); });
    };
  });
}

struct EvalArgs {
  std::string detections, truth, weight = "inverse-size", out, compare;
  double slack = 0.0;
};

void add_eval(CLI::App& app, EvalArgs& a, std::function<void()>& action) {
  auto* c = app.add_subcommand("eval", "Score a detection file against the truth");
  c->add_option("--detections", a.detections)->required()->check(CLI::ExistingFile);
  c->add_option("--truth", a.truth)->required()->check(CLI::ExistingFile);
  c->add_option("--weight", a.weight);
  c->add_option("--slack", a.slack)->check(CLI::NonNegativeNumber);
  c->add_option("--compare", a.compare, "Second detection file for average Jaccard similarity")->check(CLI::ExistingFile);
  c->add_option("--out,-o", a.out, "Metrics CSV");
  c->callback([&] {
    action = [&] {
      auto din = open_in(a.detections);
      const DetectionSet det = io::read_detection(din);
      auto tin = open_in(a.truth);
      const Truth truth = io::read_truth(tin);
      const EvalResult r = evaluate(det, truth, parse_weight_fn(a.weight), a.slack);
      std::optional<double> jac;
      if (!a.compare.empty()) {
        auto cin = open_in(a.compare);
        jac = avg_jaccard(det, io::read_detection(cin));
      }
      auto emit = [&](std::ostream& os) {
        os << "power,normalized_power,fdp,n_true,n_false" << (jac ? ",avg_jaccard" : "") << '\n'
           << fmt(r.power) << ',' << fmt(r.normalized_power) << ',' << fmt(r.fdp) << ',' << r.n_true << ','
           << r.n_false;
        if (jac) os << ',' << fmt(*jac);
        os << '\n';
      };
      emit(std::cout);
      if (!a.out.empty()) with_out(a.out, emit);
    };
  });
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Resolution-adaptive signal detection"};
  app.require_subcommand(1);
  int threads = 0;
  app.add_option("--threads", threads, "Worker thread cap (0: hardware)")
      ->envname("BLIP_THREADS")
      ->check(CLI::NonNegativeNumber);

  std::function<void()> action;
  GroupsArgs ga;
  PipsArgs pa;
  SolveArgs sa;
  SampleArgs sma;
  SimArgs sia;
  EvalArgs ea;
  add_groups(app, ga, action);
  add_pips(app, pa, action);
  add_solve(app, sa, action);
  add_sample(app, sma, threads, action);
  add_simulate(app, sia, threads, action);
  add_eval(app, ea, action);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitUsage;
  }
  try {
    if (action) action();
    std::cout.flush();
    return 0;
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ValidationError& e) {
    std::cerr << "invalid input: " << e.what() << '\n';
    return kExitData;
  } catch (const UnsupportedError& e) {
    std::cerr << "unsupported: " << e.what() << '\n';
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return kExitInternal;
  }
}
