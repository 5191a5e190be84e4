#include <chrono>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <openssl/opensslv.h>

#include "CLI11.hpp"
#include "json.hpp"
#include "smoothset/dimension.hpp"
#include "smoothset/grid_io.hpp"
#include "smoothset/modulus.hpp"
#include "smoothset/parallel.hpp"
#include "smoothset/report.hpp"
#include "smoothset/rng.hpp"
#include "smoothset/scaffold.hpp"
#include "smoothset/smoothgen.hpp"
#include "smoothset/transform.hpp"

using namespace smoothset;
using nlohmann::json;

namespace {

constexpr const char* kVersion = "1.0.0";

enum Exit { kOk = 0, kValidation = 2, kCheckFailed = 3, kUnknownCommand = 64 };

struct Options {
  std::string in, out, config;
  int n = 1;
  int K = 12;
  std::uint64_t seed = 1;
  double alpha = 0.5;
  std::string scales;
  int stride = 0;
  int samples = kDefaultSamples;
  int workers = 0;
  // gen
  std::string schedule = "harmonic";
  std::string fixture;
  double param = 0.0;
  double start = 0.5;
  // modulus
  std::string mode = "dyadic";
  double angle = 0.0;
  int maxPairs = 1024;
  // scaffold
  int maxgen = 4;
  int k0 = -1;
  std::vector<double> c;
  // eset
  double tau = 0.05;
  int settle = -1;
  // transform
  std::string check = "all";
  double lambda = 2.0;
  double t = 1.75;
  json map = json{{"kind", "shear"}, {"amplitude", 0.1}, {"frequency", 1.0}};
  std::vector<double> x;
  int maxCubes = 256;
  // boxdim
  double lo = 0.25;
  double hi = 0.75;
  std::string target = "band";
};

json to_json(const Options& o) {
  return json{{"in", o.in},           {"out", o.out},       {"n", o.n},
              {"K", o.K},             {"seed", o.seed},     {"alpha", o.alpha},
              {"scales", o.scales},   {"stride", o.stride}, {"samples", o.samples},
              {"workers", o.workers}, {"schedule", o.schedule}, {"fixture", o.fixture},
              {"param", o.param},     {"start", o.start},   {"mode", o.mode},
              {"angle", o.angle},     {"maxPairs", o.maxPairs}, {"maxgen", o.maxgen},
              {"k0", o.k0},           {"c", o.c},           {"tau", o.tau},
              {"settle", o.settle},   {"check", o.check},   {"lambda", o.lambda},
              {"t", o.t},             {"map", o.map},       {"x", o.x},
              {"maxCubes", o.maxCubes}, {"lo", o.lo},       {"hi", o.hi},
              {"target", o.target}};
}

void apply_json(Options& o, const json& j) {
  if (!j.is_object()) throw Error(ErrorKind::InvalidArgument, "config must be a JSON object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    const auto& k = it.key();
    const auto& v = it.value();
    if (k == "in") o.in = v.get<std::string>();
    else if (k == "out") o.out = v.get<std::string>();
    else if (k == "n") o.n = v.get<int>();
    else if (k == "K") o.K = v.get<int>();
    else if (k == "seed") o.seed = v.get<std::uint64_t>();
    else if (k == "alpha") o.alpha = v.get<double>();
    else if (k == "scales") o.scales = v.get<std::string>();
    else if (k == "stride") o.stride = v.get<int>();
    else if (k == "samples") o.samples = v.get<int>();
    else if (k == "workers") o.workers = v.get<int>();
    else if (k == "schedule") o.schedule = v.get<std::string>();
    else if (k == "fixture") o.fixture = v.get<std::string>();
    else if (k == "param") o.param = v.get<double>();
    else if (k == "start") o.start = v.get<double>();
    else if (k == "mode") o.mode = v.get<std::string>();
    else if (k == "angle") o.angle = v.get<double>();
    else if (k == "maxPairs") o.maxPairs = v.get<int>();
    else if (k == "maxgen") o.maxgen = v.get<int>();
    else if (k == "k0") o.k0 = v.get<int>();
    else if (k == "c") o.c = v.get<std::vector<double>>();
    else if (k == "tau") o.tau = v.get<double>();
    else if (k == "settle") o.settle = v.get<int>();
    else if (k == "check") o.check = v.get<std::string>();
    else if (k == "lambda") o.lambda = v.get<double>();
    else if (k == "t") o.t = v.get<double>();
    else if (k == "map") o.map = v;
    else if (k == "x") o.x = v.get<std::vector<double>>();
    else if (k == "maxCubes") o.maxCubes = v.get<int>();
    else if (k == "lo") o.lo = v.get<double>();
    else if (k == "hi") o.hi = v.get<double>();
    else if (k == "target") o.target = v.get<std::string>();
    else throw Error(ErrorKind::InvalidArgument, "unknown config key: " + k);
  }
}

// "a..b", "a" or "a,b,c"
std::vector<int> parse_scales(const std::string& s) {
  std::vector<int> out;
  try {
    const auto dots = s.find("..");
    if (dots != std::string::npos) {
      const int a = std::stoi(s.substr(0, dots));
      const int b = std::stoi(s.substr(dots + 2));
      require(a <= b, "scale range must satisfy a <= b");
      for (int j = a; j <= b; ++j) out.push_back(j);
      return out;
    }
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) out.push_back(std::stoi(tok));
  } catch (const std::logic_error&) {
    throw Error(ErrorKind::InvalidArgument, "bad scales: " + s);
  }
  require(!out.empty(), "bad scales: " + s);
  return out;
}

std::vector<int> scales_or(const Options& o, int a, int b) {
  if (!o.scales.empty()) return parse_scales(o.scales);
  std::vector<int> v;
  for (int j = a; j <= b; ++j) v.push_back(j);
  return v;
}

MapStep parse_step(const json& j) {
  MapStep s;
  const auto kind = j.at("kind").get<std::string>();
  if (j.contains("center")) s.center = Point(j["center"][0].get<double>(), j["center"][1].get<double>());
  if (kind == "identity") {
    s.kind = MapStep::Kind::Identity;
  } else if (kind == "rotation") {
    s.kind = MapStep::Kind::Rotation;
    s.angle = j.at("angle").get<double>();
  } else if (kind == "dilation") {
    s.kind = MapStep::Kind::Dilation;
    s.lambda = j.at("lambda").get<double>();
    s.axis = j.value("axis", 0);
  } else if (kind == "shear") {
    s.kind = MapStep::Kind::Shear;
    s.amplitude = j.at("amplitude").get<double>();
    s.frequency = j.value("frequency", 1.0);
  } else if (kind == "swap") {
    s.kind = MapStep::Kind::Swap;
  } else if (kind == "warp") {
    s.kind = MapStep::Kind::Warp;
    s.amplitude = j.at("amplitude").get<double>();
    s.frequency = j.value("frequency", 1.0);
    s.axis = j.value("axis", 0);
  } else if (kind == "affine") {
    s.kind = MapStep::Kind::Affine;
    for (int r = 0; r < 2; ++r)
      for (int c = 0; c < 2; ++c) s.A(r, c) = j.at("A")[r][c].get<double>();
    s.b = Point(j.at("b")[0].get<double>(), j.at("b")[1].get<double>());
  } else {
    throw Error(ErrorKind::InvalidArgument, "unknown map kind: " + kind);
  }
  return s;
}

// A single step object, a list of steps, or {"compose": [...]}; steps apply in order.
SmoothMap parse_map(const json& j, int dim) {
  std::vector<MapStep> steps;
  const json& list = j.is_object() && j.contains("compose") ? j["compose"] : j;
  if (list.is_array())
    for (const auto& s : list) steps.push_back(parse_step(s));
  else
    steps.push_back(parse_step(list));
  return SmoothMap(dim, steps, j.dump());
}

void emit(const std::string& path, const std::string& content) {
  if (path.empty())
    std::cout << content;
  else
    write_file(path, content);
}

std::string row(const std::string& check, double scale, double measured, double bound, double stderr_, bool pass) {
  return check + ',' + fmt_double(scale) + ',' + fmt_double(measured) + ',' + fmt_double(bound) + ',' +
         fmt_double(stderr_) + ',' + (pass ? "1" : "0") + '\n';
}

MassGrid load_input(const Options& o) {
  require(!o.in.empty(), "--in is required");
  if (!std::filesystem::exists(o.in)) throw Error(ErrorKind::Io, "missing input: " + o.in);
  return load_grid(o.in);
}

// ---- subcommands -------------------------------------------------------------

int run_gen(const Options& o) {
  require(!o.out.empty(), "--out is required");
  json side;
  if (!o.fixture.empty()) {
    auto g = fixture(o.fixture, o.n, o.K, o.param);
    save_grid(g, o.out);
    side = {{"fixture", o.fixture}, {"param", o.param}, {"n", o.n}, {"K", o.K},
            {"undecidedMass", undecided_mass(g)}};
  } else {
    auto sched = make_schedule(o.schedule, o.K, o.seed, o.start);
    auto g = generate_martingale_set(sched, o.n);
    save_grid(g, o.out);
    side = {{"schedule", {{"preset", sched.preset}, {"eps", sched.eps}, {"levels", sched.levels},
                          {"startDensity", sched.startDensity}}},
            {"seed", o.seed},
            {"rng", kRngName},
            {"n", o.n},
            {"K", o.K},
            {"undecidedMass", undecided_mass(g)}};
  }
  write_file(o.out + ".json", side.dump(2) + "\n");
  return kOk;
}

std::string modulus_text(const MassGrid& g, const Options& o) {
  ModulusOptions mo;
  mo.stride = o.stride;
  mo.samples = o.samples;
  mo.maxPairs = static_cast<std::size_t>(o.maxPairs);
  mo.angle = o.angle;
  if (o.mode == "dyadic") mo.mode = ModulusMode::Dyadic;
  else if (o.mode == "lattice") mo.mode = ModulusMode::Lattice;
  else if (o.mode == "rotated") mo.mode = ModulusMode::Rotated;
  else throw Error(ErrorKind::InvalidArgument, "unknown mode: " + o.mode);
  const int top = mo.mode == ModulusMode::Rotated ? g.level() - 2 : g.level();
  return modulus_csv(estimate_modulus(g, scales_or(o, 0, top), mo));
}

int run_modulus(const Options& o) {
  emit(o.out, modulus_text(load_input(o), o));
  return kOk;
}

Scaffold scaffold_of(const MassGrid& g, const Options& o) {
  ScheduleParams p;
  p.alpha = o.alpha;
  p.k0 = o.k0;
  p.c = o.c;
  p.maxGen = o.maxgen;
  return build_generations(g, p, dyadic_profile(g));
}

int run_scaffold(const Options& o) {
  emit(o.out, scaffold_json(scaffold_of(load_input(o), o)) + "\n");
  return kOk;
}

int run_eset(const Options& o) {
  auto g = load_input(o);
  const int L = o.settle >= 0 ? o.settle : g.level() / 2;
  auto e = estimate_eset(g, o.alpha, o.tau, L);
  auto fit = eset_box_dim(e, scales_or(o, 0, g.level()));
  emit(o.out, boxcount_csv(fit));
  if (!o.out.empty()) {
    json s{{"alpha", e.alpha}, {"tau", e.tau}, {"settleLevel", e.settleLevel}, {"members", e.members.size()},
           {"volume", e.volume}, {"slope", fit.slope}, {"rsq", fit.rsq}, {"flag", fit.flag}};
    std::cout << s.dump(2) << "\n";
  }
  return kOk;
}

struct CheckTable {
  std::string csv = "check,scale,measured,bound,stderr,pass\n";
  bool ok = true;
  void add(const std::string& check, double scale, double measured, double bound, double se, bool pass,
           bool gated = true) {
    csv += row(check, scale, measured, bound, se, pass);
    if (gated && !pass) ok = false;
  }
};

CheckTable transform_checks(const MassGrid& g, const Options& o) {
  const int n = g.dim();
  const auto sc = scales_or(o, 3, std::min(7, g.level() - 2));
  ModulusOptions lo;
  lo.mode = ModulusMode::Lattice;
  lo.stride = o.stride;
  const auto lat = estimate_modulus(g, sc, lo);
  const std::set<std::string> known{"all", "rotation", "dilation", "lemma3a", "lemma3b", "theorem3", "bridge"};
  require(known.count(o.check) == 1, "unknown check: " + o.check);
  auto want = [&](const char* c) { return o.check == "all" || o.check == c; };
  CheckTable t;
  if (want("rotation") && n == 2) {
    const double a = o.angle != 0.0 ? o.angle : std::numbers::pi / 6;
    auto r = verify_rotation_bound(g, a, sc, lat, o.samples, static_cast<std::size_t>(o.maxCubes));
    for (const auto& x : r.rows) {
      const double s = std::ldexp(1.0, -x.level);
      t.add("rotation", s, x.gap, x.decompositionGap, x.gapStderr, x.gap <= x.decompositionGap + 3 * x.gapStderr);
      t.add("rotation_translation", s, x.translation, x.translationBound, 0.0, x.pass);
    }
  }
  if (want("dilation")) {
    auto r = verify_dilation_bound(g, o.lambda, sc, lat, o.stride);
    for (const auto& x : r.rows) {
      const double s = std::ldexp(1.0, -x.level);
      t.add("dilation", s, x.gap, x.bound, 0.0, x.pass);
      t.add("dilation_remark", s, x.gap, x.remarkBound, 0.0, x.remarkPass);
    }
  }
  if (want("lemma3a")) {
    for (const auto& x : lemma3a_check(g, sc, lat, 200000, o.seed)) {
      const double s = std::ldexp(1.0, -x.level);
      t.add("lemma3a", s, x.measured, x.bound, 0.0, x.measured <= x.bound + 1e-12);
      t.add("lemma3a_shift", s, x.shifted, x.shiftedBound, 0.0, x.shifted <= x.shiftedBound + 1e-12);
    }
  }
  if (want("lemma3b")) {
    for (const auto& x : lemma3b_check(g, o.t, sc, lat))
      t.add("lemma3b", std::ldexp(1.0, -x.level), x.measured, x.bound, 0.0, x.pass);
  }
  if (want("theorem3") && n == 2) {
    const auto phi = parse_map(o.map, n);
    const auto rows = theorem3_checks(g, phi, sc, o.samples, static_cast<std::size_t>(o.maxPairs) * 2);
    const double nan = std::numeric_limits<double>::quiet_NaN();
    for (const auto& x : rows) {
      const double s = std::ldexp(1.0, -x.level);
      t.add("theorem3_volume", s, x.volumeGap, nan, 0.0, true, false);
      t.add("theorem3_mass", s, x.massGap, nan, x.stderr_, true, false);
      t.add("theorem3_tangent", s, x.tangent, nan, x.stderr_, true, false);
    }
  }
  if (want("bridge") && !o.x.empty()) {
    require(static_cast<int>(o.x.size()) == n, "--x needs n coordinates");
    const Point p(o.x[0], n == 2 ? o.x[1] : 0.0);
    std::vector<double> hs;
    for (int j : sc) hs.push_back(std::ldexp(1.0, -j));
    for (const auto& x : nondyadic_bridge_check(g, p, hs, lat)) t.add("bridge", x.h, x.gap, x.bound, 0.0, x.pass);
  }
  return t;
}

int run_transform(const Options& o) {
  auto g = load_input(o);
  auto t = transform_checks(g, o);
  emit(o.out, t.csv);
  return t.ok ? kOk : kCheckFailed;
}

json fit_json(const BoxCountFit& f) {
  return json{{"scales", f.scales}, {"counts", f.counts}, {"fitScales", f.fitScales}, {"slope", f.slope},
              {"intercept", f.intercept}, {"rsq", f.rsq}, {"flag", f.flag}};
}

int run_boxdim(const Options& o) {
  auto g = load_input(o);
  json summary;
  BoxCountFit fit;
  if (o.target == "band") {
    fit = box_count(g, o.lo, o.hi, o.scales.empty() ? std::vector<int>{} : parse_scales(o.scales));
    summary = fit_json(fit);
    summary["band"] = {o.lo, o.hi};
  } else if (o.target == "scaffold") {
    auto d = scaffold_box_dim(scaffold_of(g, o), o.scales.empty() ? std::vector<int>{} : parse_scales(o.scales));
    fit = d.fit;
    summary = fit_json(fit);
    summary["P"] = d.P;
    summary["C"] = d.C;
    summary["lemma1Bound"] = d.bound;
    summary["comparable"] = d.comparable;
  } else {
    throw Error(ErrorKind::InvalidArgument, "unknown target: " + o.target);
  }
  emit(o.out, boxcount_csv(fit));
  if (!o.out.empty()) std::cout << summary.dump(2) << "\n";
  return kOk;
}

int run_report(const Options& o) {
  require(!o.out.empty(), "--out directory is required");
  auto g = load_input(o);
  std::filesystem::create_directories(o.out);
  json outputs = json::array(), runtimes = json::object(), checks = json::object();
  auto timed = [&](const std::string& name, const std::string& file, auto&& fn) {
    const auto t0 = std::chrono::steady_clock::now();
    const std::string content = fn();
    runtimes[name] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const auto path = (std::filesystem::path(o.out) / file).string();
    write_file(path, content);
    outputs.push_back({{"file", file}, {"sha256", sha256_hex(content)}, {"bytes", content.size()}});
  };
  timed("modulus", "modulus.csv", [&] { return modulus_text(g, o); });
  timed("boxdim", "boxdim.csv", [&] { return boxcount_csv(box_count(g, o.lo, o.hi)); });
  timed("scaffold", "scaffold.json", [&] {
    try {
      return scaffold_json(scaffold_of(g, o)) + "\n";
    } catch (const Error& e) {
      return json{{"error", e.what()}}.dump(2) + "\n";
    }
  });
  timed("transform", "transform.csv", [&] {
    auto t = transform_checks(g, o);
    checks["transform"] = t.ok;
    return t.csv;
  });

  json manifest{{"tool", "smoothset"},
                {"version", kVersion},
                {"libraries",
                 {{"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                                std::to_string(EIGEN_MINOR_VERSION)},
                  {"openssl", OPENSSL_VERSION_TEXT},
                  {"nlohmann_json", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                                        std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                                        std::to_string(NLOHMANN_JSON_VERSION_PATCH)},
                  {"cli11", CLI11_VERSION}}},
                {"rng", kRngName},
                {"input", {{"path", o.in}, {"sha256", sha256_file(o.in)}}},
                {"seed", o.seed},
                {"config", to_json(o)},
                {"outputs", outputs},
                {"runtimes", runtimes},
                {"checks", checks}};
  if (std::filesystem::exists(o.in + ".json")) {
    const auto side = json::parse(read_file(o.in + ".json"));
    manifest["input"]["sidecar"] = side;
    if (side.contains("seed")) manifest["seed"] = side["seed"];
  }
  write_file((std::filesystem::path(o.out) / "manifest.json").string(), manifest.dump(2) + "\n");
  return kOk;
}

void add_common(CLI::App* s, Options& o) {
  s->add_option("--in", o.in, "input grid (MGR1)");
  s->add_option("--out", o.out, "output path");
  s->add_option("--n", o.n, "dimension (1 or 2)");
  s->add_option("--K", o.K, "resolution level");
  s->add_option("--seed", o.seed, "random seed");
  s->add_option("--alpha", o.alpha, "target density");
  s->add_option("--scales", o.scales, "levels as a..b or a,b,c");
  s->add_option("--stride", o.stride, "lattice exponent S (0: min(K, j+4))");
  s->add_option("--samples", o.samples, "quadrature samples per region");
  s->add_option("--workers", o.workers, "worker threads (fallback SMOOTHSET_WORKERS)");
  s->add_option("--config", o.config, "JSON file whose keys override flags");
}

}  // namespace

int main(int argc, char** argv) {
  const std::set<std::string> commands{"gen", "modulus", "scaffold", "eset", "transform", "boxdim", "report"};
  if (argc > 1 && argv[1][0] != '-' && commands.count(argv[1]) == 0) {
    std::cerr << "unknown subcommand: " << argv[1] << "\n";
    return kUnknownCommand;
  }

  Options o;
  bool printConfig = false;
  std::string mapText;
  CLI::App app{"Smooth-set experiments: generation, modulus, scaffold, dimension and invariance checks"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);

  auto* gen = app.add_subcommand("gen", "generate a martingale set or fixture");
  auto* mod = app.add_subcommand("modulus", "measure the smoothness modulus");
  auto* sca = app.add_subcommand("scaffold", "build the stopping-time generations");
  auto* ese = app.add_subcommand("eset", "estimate E(A, alpha) and its box counts");
  auto* tra = app.add_subcommand("transform", "affine and bilipschitz invariance checks");
  auto* box = app.add_subcommand("boxdim", "box-counting dimension");
  auto* rep = app.add_subcommand("report", "bundle outputs with a hashed manifest");
  for (auto* s : {gen, mod, sca, ese, tra, box, rep}) {
    add_common(s, o);
    s->add_flag("--print-config", printConfig, "print the effective config as JSON and exit");
  }
  gen->add_option("--schedule", o.schedule, "harmonic | sqrt | zero");
  gen->add_option("--fixture", o.fixture, "empty | full | constant | halfspace | checkerboard");
  gen->add_option("--param", o.param, "fixture parameter");
  gen->add_option("--start", o.start, "starting density");
  mod->add_option("--mode", o.mode, "dyadic | lattice | rotated");
  mod->add_option("--angle", o.angle, "rotation angle (rotated mode)");
  mod->add_option("--max-pairs", o.maxPairs, "pair cap per scale (rotated mode)");
  for (auto* s : {sca, box, rep}) {
    s->add_option("--maxgen", o.maxgen, "number of generations");
    s->add_option("--k0", o.k0, "start level (negative: automatic)");
    s->add_option("--c", o.c, "c_1 c_2 ... (default 2n + k)");
  }
  ese->add_option("--tau", o.tau, "band half-width around alpha");
  ese->add_option("--settle", o.settle, "settling level L (default K/2)");
  for (auto* s : {tra, rep}) {
    s->add_option("--check", o.check, "all | rotation | dilation | lemma3a | lemma3b | theorem3 | bridge");
    s->add_option("--angle", o.angle, "rotation angle in [pi/6, pi/4] (default pi/6)");
    s->add_option("--lambda", o.lambda, "dilation factor");
    s->add_option("--t", o.t, "cube dilation t in [1, 2] (lemma3b)");
    s->add_option("--map", mapText, "map as JSON: a step, a list of steps, or {\"compose\": [...]}");
    s->add_option("--x", o.x, "bridge point coordinates");
    s->add_option("--max-cubes", o.maxCubes, "cube cap per scale (rotation)");
    s->add_option("--max-pairs", o.maxPairs, "pair cap per scale is twice this (theorem3)");
  }
  for (auto* s : {box, rep}) {
    s->add_option("--lo", o.lo, "band lower end");
    s->add_option("--hi", o.hi, "band upper end");
  }
  box->add_option("--target", o.target, "band | scaffold");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n";
    return kValidation;
  }

  try {
    if (!mapText.empty()) o.map = json::parse(mapText);
    if (!o.config.empty()) {
      if (!std::filesystem::exists(o.config)) throw Error(ErrorKind::Io, "missing config: " + o.config);
      apply_json(o, json::parse(read_file(o.config)));
    }
    if (printConfig) {
      std::cout << to_json(o).dump(2) << "\n";
      return kOk;
    }
    set_default_workers(resolve_workers(o.workers));
    const auto* sub = app.get_subcommands().front();
    const std::string name = sub->get_name();
    if (name == "gen") return run_gen(o);
    if (name == "modulus") return run_modulus(o);
    if (name == "scaffold") return run_scaffold(o);
    if (name == "eset") return run_eset(o);
    if (name == "transform") return run_transform(o);
    if (name == "boxdim") return run_boxdim(o);
    if (name == "report") return run_report(o);
  } catch (const Error& e) {
    std::cerr << "error (" << to_string(e.kind()) << "): " << e.what() << "\n";
    return kValidation;
  } catch (const json::exception& e) {
    std::cerr << "bad config: " << e.what() << "\n";
    return kValidation;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "error (io): " << e.what() << "\n";
    return kValidation;
  }
  return kUnknownCommand;
}
