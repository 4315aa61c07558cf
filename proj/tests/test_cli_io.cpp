#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <string>

#include <json.hpp>

#include "calcap/io.hpp"
#include "calcap/rect2d.hpp"

using namespace calcap;

namespace {

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("calcap_test_" + name)).string();
}

std::string error_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const InputError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("FNV-1a reference values") {
  CHECK(fnv1a64("") == 0xcbf29ce484222325ull);
  CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cull);
  CHECK(fnv1a64("foobar") == 0x85944171f73967e8ull);
}

TEST_CASE("config hash") {
  RunConfig a;
  a.command = "estimate-capacity";
  RunConfig b = a;
  CHECK(a.hash() == b.hash());
  CHECK(a.hash().size() == 16);
  b.seed = 2;
  CHECK(a.hash() != b.hash());
  b = a;
  b.both_kernels = true;
  CHECK(a.hash() != b.hash());
  CHECK(nlohmann::json::parse(a.canonical()).contains("generation"));
}

TEST_CASE("config ranges") {
  RunConfig c;
  CHECK_NOTHROW(c.validate());
  auto bad = [](auto mutate) {
    RunConfig c;
    mutate(c);
    CHECK_THROWS_AS(c.validate(), InputError);
  };
  bad([](RunConfig& c) { c.generation = -1; });
  bad([](RunConfig& c) { c.generation = 13; });
  bad([](RunConfig& c) { c.grid_x = 1; });
  bad([](RunConfig& c) { c.tau0 = -1.0; });
  bad([](RunConfig& c) { c.safety = -0.5; });
  bad([](RunConfig& c) { c.gap = 0.0; });
  bad([](RunConfig& c) { c.iterations = 0; });
  bad([](RunConfig& c) { c.lx = 0.0; });
  bad([](RunConfig& c) { c.r = NAN; });
  bad([](RunConfig& c) { c.kernel = "Q"; });
  bad([](RunConfig& c) { c.suite = "nope"; });
  bad([](RunConfig& c) { c.point = {1.0}; });
}

TEST_CASE("set JSON") {
  const BoxUnionSet s = parse_set_json(R"({"n": 1, "boxes": [{"min": [0, 0], "max": [1, 2]}, {"min": [3, 0], "max": [4, 1]}]})");
  REQUIRE(s.boxes().size() == 2);
  CHECK(s.boxes()[0].max()[1] == 2.0);
  CHECK(s.n() == 1);
  const BoxUnionSet back = parse_set_json(set_to_json(s));
  CHECK(back.boxes() == s.boxes());

  const std::string syntax = error_of([] { parse_set_json("{\"n\": 1,\n \"boxes\": [}", "E.json"); });
  CHECK(syntax.find("E.json:2:") == 0);
  CHECK(syntax.find("malformed JSON") != std::string::npos);
  CHECK(error_of([] { parse_set_json(R"({"boxes": [{"min": [0], "max": [1, 1]}]})", "E.json"); }).find("/boxes/0/min") !=
        std::string::npos);
  CHECK(error_of([] { parse_set_json(R"({"boxes": [{"min": [0, "a"], "max": [1, 1]}]})"); }).find("/boxes/0/min/1") !=
        std::string::npos);
  CHECK(error_of([] { parse_set_json(R"({"boxes": []})"); }).find("/boxes") != std::string::npos);
  CHECK(error_of([] { parse_set_json(R"({"n": 9, "boxes": []})"); }).find("/n") != std::string::npos);
  CHECK(error_of([] { parse_set_json(R"({"boxes": [{"min": [2, 0], "max": [1, 1]}]})"); }).find("/boxes/0") !=
        std::string::npos);
  CHECK_THROWS_AS(read_set_json(temp_path("missing.json")), InputError);
}

TEST_CASE("measure artifact round trip") {
  const CellMeasure mu(1, {Cell{AxisBox(Point::xt(0, 0), Point::xt(0.5, 1)), 0.25},
                           Cell{AxisBox(Point::xt(0.5, 0), Point::xt(1, 1)), 0.75}});
  RunConfig cfg;
  cfg.command = "variational";
  const std::string doc = measure_artifact(mu, 0.125, cfg, nullptr);
  const auto j = nlohmann::json::parse(doc);
  CHECK(j["version"] == std::string(kVersion));
  CHECK(j["config_hash"] == cfg.hash());
  const MeasureFile back = parse_measure_json(doc);
  CHECK(back.tau0 == 0.125);
  CHECK(back.measure.densities() == mu.densities());
  CHECK(back.measure.total_mass() == mu.total_mass());
  CHECK(error_of([] { parse_measure_json(R"({"cells": [{"min": [0, 0], "max": [1, 1]}]})"); }).find("density") !=
        std::string::npos);
  CHECK(error_of([] { parse_measure_json(R"({"cells": [{"min": [0, 0], "max": [1, 1], "density": -1}]})"); }) != "");
}

TEST_CASE("rect artifact") {
  RunConfig cfg;
  cfg.command = "rect-capacity";
  const auto j = nlohmann::json::parse(rect_artifact(1.0, 1.0, cfg));
  CHECK(j["capacity"].get<double>() == doctest::Approx(1.0 / (0.5 * std::log(2.0) + M_PI / 4)).epsilon(1e-14));
  CHECK(std::abs(j["capacity"].get<double>() - 0.88341) <= 1e-5);
  CHECK(j["bracket"][0].get<double>() == doctest::Approx(1.0 / rect_max_M(1.0)));
  CHECK(j["bracket"][1].get<double>() == doctest::Approx(2.0 / rect_min_m(1.0)));
  CHECK(j["tool"] == "calcap");
}

TEST_CASE("surface export") {
  RunConfig cfg;
  cfg.command = "potential-surface";
  const SurfaceGrid s = rect_surface(0.5, 101, 101, KernelKind::P);
  CHECK(s.values.size() == 10201);
  std::size_t best = 0;
  for (std::size_t k = 1; k < s.values.size(); ++k) {
    if (s.values[k] > s.values[best]) best = k;
  }
  CHECK(s.xs[best / 101] == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(s.ts[best % 101] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(s.values[best] == doctest::Approx(rect_max_M(0.5)).epsilon(1e-12));

  const std::string a = temp_path("surface_a.csv"), b = temp_path("surface_b.csv");
  export_surface(s, a, cfg);
  export_surface(rect_surface(0.5, 101, 101, KernelKind::P), b, cfg);
  const std::string text = read_text_file(a);
  CHECK(text == read_text_file(b));
  CHECK(text.rfind("x,t,value\n", 0) == 0);
  std::size_t lines = 0;
  for (char ch : text) lines += ch == '\n';
  CHECK(lines == 10202);
  // lexicographic order: x non-decreasing, t increasing within equal x
  double px = -INFINITY, pt = -INFINITY;
  std::size_t pos = text.find('\n') + 1;
  bool ordered = true;
  while (pos < text.size()) {
    double x, t, v;
    std::sscanf(text.c_str() + pos, "%lf,%lf,%lf", &x, &t, &v);
    ordered = ordered && (x > px || (x == px && t > pt));
    px = x;
    pt = t;
    pos = text.find('\n', pos) + 1;
  }
  CHECK(ordered);
  const auto meta = nlohmann::json::parse(read_text_file(a + ".meta.json"));
  CHECK(meta["config_hash"] == cfg.hash());
  CHECK(meta["rows"] == 10201);
  CHECK_THROWS_AS(export_surface(s, "/nonexistent-dir/x.csv", cfg), OutputError);
  std::filesystem::remove(a);
  std::filesystem::remove(b);
  std::filesystem::remove(a + ".meta.json");
  std::filesystem::remove(b + ".meta.json");
}

TEST_CASE("symmetric surface") {
  const SurfaceGrid s = rect_surface(1.0, 21, 41, KernelKind::P_SYM);
  const SurfaceGrid p = rect_surface(1.0, 21, 41, KernelKind::P);
  const SurfaceGrid q = rect_surface(1.0, 21, 41, KernelKind::P_CONJ);
  for (std::size_t k = 0; k < s.values.size(); ++k) {
    CHECK(s.values[k] == doctest::Approx(0.5 * (p.values[k] + q.values[k])).epsilon(1e-14));
  }
  CHECK_THROWS_AS(rect_surface(-1.0, 5, 5, KernelKind::P), InputError);
}
