#include "calcap/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "calcap/parallel.hpp"
#include "calcap/rect2d.hpp"

namespace calcap {

using nlohmann::json;

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

namespace {

const std::vector<std::string> kSuites = {"rect", "kernels", "capacity", "variational", "whitney", "all"};

void require(bool ok, const std::string& what) {
  if (!ok) throw InputError(what);
}

json box_json(const AxisBox& b) {
  json lo = json::array(), hi = json::array();
  for (int i = 0; i < b.dim(); ++i) {
    lo.push_back(b.min()[i]);
    hi.push_back(b.max()[i]);
  }
  return json{{"min", lo}, {"max", hi}};
}

json provenance(const RunConfig& config) {
  return json{{"tool", "calcap"}, {"version", std::string(kVersion)}, {"config_hash", config.hash()},
              {"command", config.command}, {"seed", config.seed}};
}

// line and column of a byte offset, both from 1
std::string location(std::string_view text, std::size_t byte, const std::string& source) {
  byte = std::min(byte, text.size());
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i + 1 < byte; ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return source + ":" + std::to_string(line) + ":" + std::to_string(col);
}

json parse_document(std::string_view text, const std::string& source) {
  try {
    return json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    std::string msg = e.what();
    // nlohmann prefixes "[json.exception.parse_error.101] parse error at line 1, column 2: "
    const auto colon = msg.find(": ", msg.find("parse error"));
    if (colon != std::string::npos) msg = msg.substr(colon + 2);
    throw InputError(location(text, e.byte, source) + ": malformed JSON: " + msg);
  }
}

[[noreturn]] void structural(const std::string& source, const std::string& pointer, const std::string& what) {
  throw InputError(source + ": " + pointer + ": " + what);
}

Point read_point(const json& v, int dim, const std::string& source, const std::string& pointer) {
  if (!v.is_array() || static_cast<int>(v.size()) != dim) {
    structural(source, pointer, "expected an array of " + std::to_string(dim) + " numbers");
  }
  std::vector<double> c;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!v[i].is_number()) structural(source, pointer + "/" + std::to_string(i), "expected a number");
    const double x = v[i].get<double>();
    if (!std::isfinite(x)) structural(source, pointer + "/" + std::to_string(i), "expected a finite number");
    c.push_back(x);
  }
  return Point::from_coords(c);
}

int read_n(const json& doc, const std::string& source) {
  if (!doc.is_object()) structural(source, "/", "expected an object");
  if (!doc.contains("n")) return 1;
  if (!doc["n"].is_number_integer()) structural(source, "/n", "expected an integer");
  const int n = doc["n"].get<int>();
  if (n < 1 || n > kMaxSpatialDim) {
    structural(source, "/n", "spatial dimension must be in [1, " + std::to_string(kMaxSpatialDim) + "]");
  }
  return n;
}

AxisBox read_box(const json& b, int n, const std::string& source, const std::string& pointer) {
  if (!b.is_object() || !b.contains("min") || !b.contains("max")) structural(source, pointer, "expected {\"min\", \"max\"}");
  const Point lo = read_point(b["min"], n + 1, source, pointer + "/min");
  const Point hi = read_point(b["max"], n + 1, source, pointer + "/max");
  try {
    return AxisBox(lo, hi);
  } catch (const InputError& e) {
    structural(source, pointer, e.what());
  }
}

}  // namespace

void RunConfig::validate() const {
  require(generation >= 0 && generation <= 12, "generation must be in [0, 12]");
  require(grid_x >= 2 && grid_x <= 10001 && grid_t >= 2 && grid_t <= 10001, "grid resolutions must be in [2, 10001]");
  require(std::isfinite(tau0) && tau0 >= 0.0, "tau0 must be nonnegative (0 picks the default)");
  require(std::isfinite(safety) && safety >= 0.0 && safety <= 10.0, "safety factor must be in [0, 10]");
  require(std::isfinite(gap) && gap > 0.0 && gap <= 1.0, "duality gap must be in (0, 1]");
  require(iterations >= 1 && iterations <= 1000000, "iterations must be in [1, 10^6]");
  require(std::isfinite(lx) && lx > 0.0 && std::isfinite(lt) && lt > 0.0, "rectangle sides must be positive");
  require(std::isfinite(r) && r > 0.0, "r must be positive");
  require(std::isfinite(tau) && tau >= 0.0, "tau must be nonnegative");
  require(point.empty() || (point.size() >= 2 && point.size() <= kMaxDim), "point needs 2 to 4 coordinates");
  for (double c : point) require(std::isfinite(c), "point coordinates must be finite");
  require(std::find(kSuites.begin(), kSuites.end(), suite) != kSuites.end(),
          "unknown suite '" + suite + "' (rect, kernels, capacity, variational, whitney, all)");
  kernel_kind_from_string(kernel);
}

std::string RunConfig::canonical() const {
  json j{{"command", command},   {"set", set_path},       {"mu0", mu0_path},
         {"out", out_path},      {"generation", generation}, {"grid", {grid_x, grid_t}},
         {"tau0", tau0},         {"safety", safety},      {"gap", gap},
         {"seed", seed},         {"iterations", iterations}, {"both_kernels", both_kernels},
         {"p4_hypothesis", p4_hypothesis}, {"lx", lx},    {"lt", lt},
         {"r", r},               {"kernel", kernel},      {"point", point},
         {"tau", tau},           {"suite", suite}};
  return j.dump();
}

std::string RunConfig::hash() const {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(canonical())));
  return buf;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::string& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw OutputError("cannot write '" + path + "'");
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  out.close();
  if (!out) throw OutputError("write to '" + path + "' failed");
}

BoxUnionSet parse_set_json(std::string_view text, const std::string& source) {
  const json doc = parse_document(text, source);
  const int n = read_n(doc, source);
  if (!doc.contains("boxes") || !doc["boxes"].is_array()) structural(source, "/boxes", "expected an array of boxes");
  std::vector<AxisBox> boxes;
  for (std::size_t i = 0; i < doc["boxes"].size(); ++i) {
    boxes.push_back(read_box(doc["boxes"][i], n, source, "/boxes/" + std::to_string(i)));
  }
  if (boxes.empty()) structural(source, "/boxes", "the set needs at least one box");
  return BoxUnionSet(n, std::move(boxes));
}

BoxUnionSet read_set_json(const std::string& path) { return parse_set_json(read_text_file(path), path); }

std::string set_to_json(const BoxUnionSet& set) {
  json boxes = json::array();
  for (const AxisBox& b : set.boxes()) boxes.push_back(box_json(b));
  return json{{"n", set.n()}, {"boxes", boxes}}.dump(2) + "\n";
}

MeasureFile parse_measure_json(std::string_view text, const std::string& source) {
  const json doc = parse_document(text, source);
  const int n = read_n(doc, source);
  if (!doc.contains("cells") || !doc["cells"].is_array()) structural(source, "/cells", "expected an array of cells");
  std::vector<Cell> cells;
  for (std::size_t i = 0; i < doc["cells"].size(); ++i) {
    const std::string ptr = "/cells/" + std::to_string(i);
    const json& c = doc["cells"][i];
    const AxisBox box = read_box(c, n, source, ptr);
    if (!c.contains("density") || !c["density"].is_number()) structural(source, ptr + "/density", "expected a number");
    cells.push_back(Cell{box, c["density"].get<double>()});
  }
  MeasureFile out;
  if (doc.contains("tau0")) {
    if (!doc["tau0"].is_number() || doc["tau0"].get<double>() < 0.0) structural(source, "/tau0", "expected a nonnegative number");
    out.tau0 = doc["tau0"].get<double>();
  }
  try {
    out.measure = CellMeasure(n, std::move(cells));
  } catch (const InputError& e) {
    structural(source, "/cells", e.what());
  }
  return out;
}

MeasureFile read_measure_json(const std::string& path) { return parse_measure_json(read_text_file(path), path); }

std::string measure_artifact(const CellMeasure& mu, double tau0, const RunConfig& config, const AscentResult* ascent) {
  json cells = json::array();
  for (const Cell& c : mu.cells()) {
    json b = box_json(c.box);
    b["density"] = c.density;
    cells.push_back(b);
  }
  json j = provenance(config);
  j["n"] = mu.n();
  j["tau0"] = tau0;
  j["mass"] = mu.total_mass();
  j["cells"] = cells;
  if (ascent) {
    j["ascent"] = {{"F", ascent->value},
                   {"mass", ascent->mass},
                   {"energy", ascent->energy},
                   {"start_F", ascent->start_value},
                   {"accepted", ascent->accepted},
                   {"conditional_steps", ascent->conditional_steps},
                   {"rescalings", ascent->rescalings},
                   {"growth_worst_ratio", ascent->growth_worst_ratio},
                   {"trace", ascent->trace}};
  }
  return j.dump(2) + "\n";
}

std::string bracket_artifact(const CapacityBracket& b, const RunConfig& config) {
  const ConstraintReport& r = b.constraint_report;
  const UpperBound& u = b.upper_detail;
  json j = provenance(config);
  j["capacity"] = b.capacity;
  j["lower"] = b.lower;
  j["upper"] = b.upper;
  j["hausdorff_content"] = b.hausdorff_content;
  j["constraints"] = {{"cells", r.cells},
                      {"potential_rows", r.potential_rows},
                      {"growth_rows", r.growth_rows},
                      {"pruned_growth_rows", r.pruned_growth_rows},
                      {"cap_rows", r.cap_rows},
                      {"safety", r.safety},
                      {"solve_spacing", r.solve_spacing},
                      {"verify_spacing", r.verify_spacing},
                      {"verify_points", r.verify_points},
                      {"density_cap", r.density_cap},
                      {"max_potential_solve", r.max_potential_solve},
                      {"max_potential_verify", r.max_potential_verify},
                      {"max_violation", r.max_violation},
                      {"growth_worst_ratio", r.growth_worst_ratio},
                      {"lp_iterations", r.lp_iterations},
                      {"lp_degenerate_pivots", r.lp_degenerate_pivots},
                      {"lp_residual", r.lp_residual},
                      {"both_kernels", r.both_kernels}};
  json argmin = json::array();
  for (double c : u.argmin.coords()) argmin.push_back(c);
  j["duality"] = {{"reference_mass", u.reference_mass},
                  {"best_sample", u.best_sample},
                  {"certified_inf", u.certified_inf},
                  {"argmin", argmin},
                  {"boxes", u.boxes},
                  {"gap", u.gap}};
  return j.dump(2) + "\n";
}

std::string cover_artifact(const WhitneyCover& cover, const RunConfig& config) {
  json cubes = json::array();
  for (const AxisBox& q : cover.cubes) cubes.push_back(box_json(q));
  const CoverStats& s = cover.stats;
  json j = provenance(config);
  j["theta"] = cover.theta;
  j["theta_shrinks"] = cover.theta_shrinks;
  j["truncated"] = cover.truncated;
  j["cubes"] = cubes;
  j["stats"] = {{"count", s.count},
                {"overlap5", s.overlap5},
                {"max_diam", s.max_diam},
                {"max_diam_ratio", s.max_diam_ratio},
                {"p1", s.p1},
                {"halves_disjoint", s.halves_disjoint},
                {"covers_samples", s.covers_samples},
                {"p4_hypothesis", s.p4_hypothesis},
                {"p4", s.p4}};
  const WhitneyDecomposition& d = cover.decomposition;
  j["decomposition"] = {{"cubes", d.cubes.size()},
                        {"inner_factor", d.inner_factor},
                        {"outer_factor", d.outer_factor},
                        {"outer_failures", d.outer_failures},
                        {"worst_outer_factor", d.worst_outer_factor},
                        {"unresolved_cells", d.unresolved_cells}};
  const FieldGrid& g = cover.field;
  json origin = json::array(), nodes = json::array();
  for (int i = 0; i < g.dim(); ++i) {
    origin.push_back(g.origin[i]);
    nodes.push_back(g.nodes[i]);
  }
  j["field"] = {{"origin", origin}, {"spacing", g.spacing}, {"nodes", nodes}, {"values", g.values}};
  return j.dump(2) + "\n";
}

std::string rect_artifact(double lx, double lt, const RunConfig& config) {
  const NormalizedRect rect = NormalizedRect::from_sides(lx, lt);
  const double r = rect.r;
  const AsymptoticBounds a = asymptotic_bounds(r);
  json j = provenance(config);
  j["lx"] = lx;
  j["lt"] = lt;
  j["r"] = r;
  j["capacity"] = capacity_formula(lx, lt);
  j["M"] = rect_max_M(r);
  j["m"] = rect_min_m(r);
  j["bracket"] = {lt * r / rect_max_M(r), lt * 2.0 * r / rect_min_m(r)};
  j["asymptotic"] = {{"regime", to_string(a.regime)}, {"lower", a.lower}, {"upper", a.upper}, {"inside", a.inside}};
  return j.dump(2) + "\n";
}

SurfaceGrid rect_surface(double r, int nx, int nt, KernelKind kind) {
  if (!(r > 0.0)) throw InputError("r must be positive");
  if (nx < 2 || nt < 2) throw InputError("surface grid needs at least 2 nodes per axis");
  const NormalizedRect rect = NormalizedRect::unit_height(r);
  SurfaceGrid s;
  for (int i = 0; i < nx; ++i) s.xs.push_back(-2.0 * r + 5.0 * r * i / (nx - 1));
  for (int j = 0; j < nt; ++j) s.ts.push_back(-2.0 + 5.0 * j / (nt - 1));
  s.values.assign(static_cast<std::size_t>(nx) * nt, 0.0);
  parallel_for(static_cast<std::size_t>(nx), [&](std::size_t i) {
    for (std::size_t j = 0; j < s.ts.size(); ++j) {
      const double x = s.xs[i], t = s.ts[j];
      double v = 0.0;
      switch (kind) {
        case KernelKind::P: v = rect_potential(rect, x, t); break;
        case KernelKind::P_CONJ: v = rect_potential(rect, x, 1.0 - t); break;
        case KernelKind::P_SYM: v = rect_sym_potential(rect, x, t); break;
      }
      s.values[i * s.ts.size() + j] = v;
    }
  });
  return s;
}

void export_surface(const SurfaceGrid& surface, const std::string& path, const RunConfig& config) {
  std::string out = "x,t,value\n";
  out.reserve(out.size() + surface.values.size() * 64);
  char buf[96];
  for (std::size_t i = 0; i < surface.xs.size(); ++i) {
    for (std::size_t j = 0; j < surface.ts.size(); ++j) {
      const int len = std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", surface.xs[i], surface.ts[j], surface.at(i, j));
      out.append(buf, static_cast<std::size_t>(len));
    }
  }
  write_text_file(path, out);
  json meta = provenance(config);
  meta["rows"] = surface.values.size();
  meta["grid"] = {surface.xs.size(), surface.ts.size()};
  meta["columns"] = {"x", "t", "value"};
  write_text_file(path + ".meta.json", meta.dump(2) + "\n");
}

}  // namespace calcap
