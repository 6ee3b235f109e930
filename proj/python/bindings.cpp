#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "blip/blip.hpp"
#include "blip/ecc.hpp"
#include "blip/groups.hpp"
#include "blip/io.hpp"
#include "blip/lpsolve.hpp"
#include "blip/pips.hpp"
#include "blip/samplers.hpp"
#include "blip/sim.hpp"

namespace py = pybind11;
using namespace blip;

namespace {

std::vector<CandidateGroup> groups_from_jsonl(const std::string& text) {
  std::istringstream in(text);
  return io::read_groups(in);
}

std::string groups_to_jsonl(const std::vector<CandidateGroup>& groups) {
  std::ostringstream out;
  io::write_groups(out, groups);
  return out.str();
}

SampleSet discrete_samples(const std::vector<std::vector<Index>>& rows, const std::vector<int>& chains) {
  SampleSet s;
  for (std::size_t i = 0; i < rows.size(); ++i) s.add_discrete(rows[i], i < chains.size() ? chains[i] : 0);
  return s;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Resolution-adaptive signal detection";

  py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
  py::register_exception<UnsupportedError>(m, "UnsupportedError", PyExc_NotImplementedError);
  py::register_exception<InternalError>(m, "InternalError", PyExc_RuntimeError);

  py::class_<CountInterval>(m, "CountInterval")
      .def(py::init<int, int>(), py::arg("lo"), py::arg("hi"))
      .def_readwrite("lo", &CountInterval::lo)
      .def_readwrite("hi", &CountInterval::hi);

  py::class_<CandidateGroup>(m, "CandidateGroup")
      .def_readwrite("id", &CandidateGroup::id)
      .def_readwrite("pip", &CandidateGroup::pip)
      .def_readwrite("weight", &CandidateGroup::weight)
      .def_readwrite("count_interval", &CandidateGroup::count_interval)
      .def_property_readonly("kind",
                             [](const CandidateGroup& g) {
                               return std::visit(
                                   [](const auto& r) -> std::string {
                                     using T = std::decay_t<decltype(r)>;
                                     if constexpr (std::is_same_v<T, IndexSet>) return "index";
                                     else if constexpr (std::is_same_v<T, Sphere>) return "sphere";
                                     else return "cube";
                                   },
                                   g.region);
                             })
      .def_property_readonly("indices",
                             [](const CandidateGroup& g) -> std::vector<Index> {
                               const auto* s = std::get_if<IndexSet>(&g.region);
                               return s ? s->indices : std::vector<Index>{};
                             })
      .def_property_readonly("center",
                             [](const CandidateGroup& g) -> std::vector<double> {
                               if (const auto* s = std::get_if<Sphere>(&g.region)) return s->center;
                               if (const auto* c = std::get_if<Cube>(&g.region)) return c->center;
                               return {};
                             })
      .def_property_readonly("radius",
                             [](const CandidateGroup& g) -> double {
                               if (const auto* s = std::get_if<Sphere>(&g.region)) return s->radius;
                               if (const auto* c = std::get_if<Cube>(&g.region)) return c->halfwidth;
                               return 0.0;
                             })
      .def("__repr__", [](const CandidateGroup& g) {
        std::ostringstream os;
        os << "<CandidateGroup id=" << g.id << " pip=" << g.pip << ">";
        return os.str();
      });

  m.def("index_group", [](std::vector<Index> idx, double pip) {
    auto g = make_group(make_index_set(std::move(idx)));
    g.pip = pip;
    return g;
  }, py::arg("indices"), py::arg("pip") = 0.0);
  m.def("sphere_group", [](std::vector<double> c, double r, double pip) {
    auto g = make_group(Sphere{std::move(c), r});
    validate_group(g);
    g.pip = pip;
    return g;
  }, py::arg("center"), py::arg("radius"), py::arg("pip") = 0.0);

  m.def("groups_from_jsonl", &groups_from_jsonl);
  m.def("groups_to_jsonl", &groups_to_jsonl);

  m.def("contiguous_groups", [](std::vector<Index> locs, int max_size) { return contiguous_groups(locs, max_size); },
        py::arg("locations"), py::arg("max_size") = kDefaultMaxGroupSize);
  m.def("hierarchical_groups",
        [](const Eigen::MatrixXd& D, const std::string& linkage, int max_size) {
          return hierarchical_groups(D, parse_linkage(linkage), max_size);
        },
        py::arg("dissimilarity"), py::arg("linkage") = "average", py::arg("max_size") = kDefaultMaxGroupSize);
  m.def("lattice_regions",
        [](const std::vector<std::pair<double, double>>& bounds, std::vector<double> radii, const std::string& shape) {
          std::vector<Bounds> b;
          for (const auto& [lo, hi] : bounds) b.push_back({lo, hi});
          return lattice_regions(LocationSpace::continuous(b), radii, shape == "cube" ? Shape::Cube : Shape::Sphere).groups;
        },
        py::arg("bounds"), py::arg("radii"), py::arg("shape") = "sphere");
  m.def("dedupe", [](const std::vector<CandidateGroup>& g) { return dedupe(g); });

  m.def("pips_from_samples",
        [](const std::vector<std::vector<Index>>& rows, std::vector<CandidateGroup> groups, std::vector<int> chains) {
          pips_from_samples(discrete_samples(rows, chains), groups).apply(groups);
          return groups;
        },
        py::arg("samples"), py::arg("groups"), py::arg("chains") = std::vector<int>{},
        "Returns the groups with pips set to sample inclusion frequencies.");
  m.def("pips_from_susie",
        [](const Eigen::MatrixXd& alpha, std::vector<CandidateGroup> groups) {
          SusieAlphas a{alpha};
          a.validate();
          pips_from_susie(a, groups).apply(groups);
          return groups;
        },
        py::arg("alpha"), py::arg("groups"));

  m.def("run_blip",
        [](const std::vector<CandidateGroup>& groups, const std::string& error, double level,
           const std::string& weight, std::uint64_t seed) {
          const ErrorKind kind = parse_error_kind(error);
          BlipOptions opts;
          opts.seed = seed;
          const WeightFn w = parse_weight_fn(weight);
          if (kind == ErrorKind::FWER) return run_fwer(groups, w, level, nullptr, opts);
          ErrorRateSpec spec = kind == ErrorKind::FDR        ? ErrorRateSpec::fdr(level)
                               : kind == ErrorKind::LocalFDR ? ErrorRateSpec::local_fdr(level)
                                                             : ErrorRateSpec::pfer(level);
          return run_blip(groups, w, spec, opts);
        },
        py::arg("groups"), py::arg("error") = "fdr", py::arg("level") = 0.1, py::arg("weight") = "inverse-size",
        py::arg("seed") = 0);

  py::class_<DetectionSet>(m, "DetectionSet")
      .def_property_readonly("groups",
                             [](const DetectionSet& d) {
                               std::vector<CandidateGroup> out;
                               for (const auto& x : d.discoveries) out.push_back(x.group);
                               return out;
                             })
      .def_readonly("objective", &DetectionSet::objective)
      .def_readonly("upper_bound", &DetectionSet::upper_bound)
      .def_readonly("budget_used", &DetectionSet::error_budget_used)
      .def_property_readonly("relaxed", [](const DetectionSet& d) { return d.report.relaxed; })
      .def_property_readonly("n_noninteger", [](const DetectionSet& d) { return d.report.n_noninteger; })
      .def("certified", [](const DetectionSet& d) { return certify(d, d.error_spec).passed(); })
      .def("__len__", [](const DetectionSet& d) { return d.discoveries.size(); });

  m.def("solve_relaxed",
        [](const std::vector<double>& objective, const std::vector<std::vector<std::pair<int, double>>>& rows,
           const std::vector<double>& rhs) {
          if (rows.size() != rhs.size()) throw ValidationError("rows and rhs differ in length");
          LpProblem p;
          p.objective = objective;
          for (std::size_t i = 0; i < rows.size(); ++i) p.rows.push_back({rows[i], rhs[i], RowKind::Packing});
          const LpSolution s = solve_relaxed(p);
          if (s.status != LpStatus::Optimal) throw ValidationError("linear program has no optimal solution");
          return py::make_tuple(s.x, s.objective);
        },
        py::arg("objective"), py::arg("rows"), py::arg("rhs"),
        "Maximizes c.x over 0 <= x <= 1 subject to sparse rows a.x <= b.");

  m.def("lss_gibbs",
        [](const Eigen::MatrixXd& X, const Eigen::VectorXd& y, int n_iter, int burn_in, int chains, int block_size,
           std::uint64_t seed, std::optional<std::tuple<double, double, double>> fixed, bool probit) {
          LssConfig cfg;
          cfg.n_iter = n_iter;
          cfg.burn_in = burn_in;
          cfg.chains = chains;
          cfg.block_size = block_size;
          cfg.seed = seed;
          if (fixed) cfg.fixed = FixedHyper{std::get<0>(*fixed), std::get<1>(*fixed), std::get<2>(*fixed)};
          LssResult r;
          {
            py::gil_scoped_release release;
            r = probit ? pss_gibbs(X, y, cfg) : lss_gibbs(X, y, cfg);
          }
          return py::make_tuple(r.samples.signals, r.samples.chain);
        },
        py::arg("X"), py::arg("y"), py::arg("n_iter") = 2000, py::arg("burn_in") = 200, py::arg("chains") = 1,
        py::arg("block_size") = 5, py::arg("seed") = 0, py::arg("fixed") = py::none(), py::arg("probit") = false,
        "Returns (signal sets, chain ids) of the post burn-in draws.");

  m.def("sample_truncated_normal",
        [](double mu, double sigma2, double lo, double hi, std::size_t n, std::uint64_t seed) {
          Rng rng(seed);
          std::vector<double> out(n);
          for (auto& x : out) x = sample_truncated_normal(mu, sigma2, lo, hi, rng);
          return out;
        },
        py::arg("mu"), py::arg("sigma2"), py::arg("lo"), py::arg("hi"), py::arg("n") = 1, py::arg("seed") = 0);

  m.def("gen_ark_design", &gen_ark_design, py::arg("n"), py::arg("p"), py::arg("k") = 5, py::arg("seed") = 0);
  m.def("gen_sparse_glm",
        [](const Eigen::MatrixXd& X, double s, double tau2, double sigma2, const std::string& link, std::uint64_t seed) {
          GlmData d = gen_sparse_glm(X, s, tau2, sigma2, parse_link(link), seed);
          return py::make_tuple(d.response, d.beta, d.signals);
        },
        py::arg("X"), py::arg("s"), py::arg("tau2") = 1.0, py::arg("sigma2") = 1.0, py::arg("link") = "gaussian",
        py::arg("seed") = 0);
  m.def("changepoint_design", &changepoint_design, py::arg("T"));
  m.def("evaluate",
        [](const DetectionSet& det, std::vector<Index> truth, const std::string& weight) {
          const EvalResult r = evaluate(det, Truth::discrete(std::move(truth)), parse_weight_fn(weight));
          py::dict d;
          d["power"] = r.power;
          d["normalized_power"] = r.normalized_power;
          d["fdp"] = r.fdp;
          d["n_true"] = r.n_true;
          d["n_false"] = r.n_false;
          return d;
        },
        py::arg("detection"), py::arg("truth"), py::arg("weight") = "inverse-size");
  m.def("avg_jaccard", &avg_jaccard);
  m.def("edge_clique_cover",
        [](int n, const std::vector<std::pair<int, int>>& edges) {
          return edge_clique_cover(IntersectionGraph::from_edges(n, edges));
        },
        py::arg("n"), py::arg("edges"));
}
