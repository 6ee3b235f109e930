#include <doctest.h>

#include <sstream>

#include "blip/blip.hpp"
#include "blip/io.hpp"
#include "blip/sim.hpp"

using namespace blip;

TEST_CASE("groups round trip") {
  auto a = make_group(make_index_set({3, 1}));
  a.pip = 0.25;
  auto b = make_group(Sphere{{0.5, 0.1}, 0.2}, CountInterval{1, 2});
  b.pip = 0.7;
  b.weight = 2.0;
  auto c = make_group(Cube{{0.1, 0.9}, 0.05});
  c.pip = 1.0 / 3.0;
  std::stringstream ss;
  io::write_groups(ss, {a, b, c});
  const std::string text = ss.str();
  const auto back = io::read_groups(ss);
  REQUIRE(back.size() == 3);
  CHECK(back[0].id == a.id);
  CHECK(back[1].count_interval == CountInterval{1, 2});
  CHECK(back[1].weight == 2.0);
  CHECK(back[2].pip == c.pip);
  std::stringstream again;
  io::write_groups(again, back);
  CHECK(again.str() == text);

  std::stringstream noid("{\"region\":{\"kind\":\"index\",\"indices\":[2,5]},\"pip\":0.5}\n");
  const auto filled = io::read_groups(noid);
  CHECK(filled[0].id == canonical_id(make_index_set({2, 5})));
  std::stringstream bad("{\"region\":{\"kind\":\"blob\"}}\n");
  CHECK_THROWS_AS(io::read_groups(bad), ValidationError);
}

TEST_CASE("samples round trip") {
  SampleSet d;
  d.add_discrete({1, 4}, 0);
  d.add_discrete({}, 1);
  std::stringstream ss;
  io::write_samples(ss, d);
  const auto back = io::read_samples(ss);
  CHECK(back.signals == d.signals);
  CHECK(back.chain == d.chain);

  SampleSet c;
  c.dim = 2;
  c.add_continuous({0.1, 0.2, 0.3, 0.4}, 0);
  c.add_continuous({}, 0);
  std::stringstream cs;
  io::write_samples(cs, c);
  const auto cb = io::read_samples(cs);
  CHECK(cb.dim == 2);
  CHECK(cb.points == c.points);

  std::stringstream empty;
  CHECK(io::read_samples(empty).size() == 0);
}

TEST_CASE("csv readers") {
  std::stringstream m("x0,x1,y\n1,2,3\n4,5,6\n");
  const auto ds = io::read_data_csv(m);
  CHECK(ds.X.rows() == 2);
  CHECK(ds.X.cols() == 2);
  CHECK(ds.y(1) == 6.0);
  std::stringstream out;
  io::write_data_csv(out, ds.X, ds.y);
  const auto again = io::read_data_csv(out);
  CHECK(again.X == ds.X);
  CHECK(again.y == ds.y);

  std::stringstream s("0.5,0.5,0,0\n0.5,0.5,0,0\n");
  const auto alpha = io::read_susie_csv(s);
  CHECK(alpha.alpha.rows() == 2);
  std::stringstream ragged("1,2\n3\n");
  CHECK_THROWS_AS(io::read_matrix_csv(ragged), ValidationError);
  CHECK(io::format_double(0.1) == "0.10000000000000001");
}

TEST_CASE("detections and truth round trip") {
  auto a = make_group(make_index_set({1, 2}));
  a.pip = 0.95;
  a.weight = 0.5;
  const auto det = run_blip({a}, WeightFn::inverse_size(), ErrorRateSpec::fdr(0.1));
  std::stringstream ss;
  io::write_detection(ss, det, certify(det, det.error_spec));
  const auto back = io::read_detection(ss);
  REQUIRE(back.discoveries.size() == 1);
  CHECK(back.discoveries[0].group.id == a.id);
  CHECK(back.objective == det.objective);
  CHECK(back.error_spec.kind == ErrorKind::FDR);

  std::stringstream ts;
  io::write_truth(ts, Truth::discrete({3, 9}));
  CHECK(io::read_truth(ts).signals == std::vector<Index>{3, 9});
  std::stringstream cs;
  io::write_truth(cs, Truth::continuous({0.1, 0.2}, 2));
  const auto ct = io::read_truth(cs);
  CHECK(ct.dim == 2);
  CHECK(ct.size() == 1);
}

TEST_CASE("pip tables and simulation config") {
  PipTable t;
  t.pips[5] = 0.5;
  t.pips[2] = 0.25;
  t.marginals[0] = 0.75;
  std::stringstream ss;
  io::write_pips(ss, t);
  const auto back = io::read_pips(ss);
  CHECK(back.get(5) == 0.5);
  CHECK(back.marginals.at(0) == 0.75);

  std::stringstream cfg(R"({"seed": 4, "scenarios": [{"name": "a", "n": 50, "p": 10, "replicates": 3,
                              "methods": ["misspec"]}]})");
  const auto c = io::read_sim_config(cfg);
  CHECK(c.seed == 4);
  REQUIRE(c.scenarios.size() == 1);
  CHECK(c.scenarios[0].p == 10);
  CHECK(c.scenarios[0].methods == std::vector<std::string>{"misspec"});
  std::stringstream badcfg(R"({"scenarios": [{"p": -1}]})");
  CHECK_THROWS_AS(io::read_sim_config(badcfg), ValidationError);

  std::stringstream rows;
  io::write_sim_rows(rows, {SimRow{"a", 0, "well", 1.0, 0.5, 0.0, 2, 12.0}}, false);
  CHECK(rows.str().find("NA") != std::string::npos);
}
