// Experiment driver: reproducible runs of the headline checks with flat
// typed config files, CSV outputs, and a JSON summary per experiment.
//
// Exit codes: 0 all checks pass, 2 tolerance failure, 3 infrastructure error.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "extlen/density.hpp"
#include "extlen/diameter.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace extlen;

namespace {

// ---------------------------------------------------------------------------
// configuration

struct ExperimentConfig {
  int genus = 2;
  double h = 0.3;
  std::vector<double> times{100.0, 200.0, 400.0};
  std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  int densities = 5;          // trial bump densities (plus the hyperbolic row)
  double bump_sigma = 0.45;
  double bump_alpha = 0.35;
  int orbit_length = 4;
  double tolerance = 0.05;    // experiment-level pass tolerance
  double oracle_tol = 1e-3;   // solver constraint tolerance
  double kkt_tol = 1e-8;
  std::string curves = "a1; a1 b1";  // semicolon-separated group words
  std::string fixture;               // build-mesh: "grid:k" or "cylinder:m"
  std::string out_dir = "out";

  std::map<std::string, std::string> raw;  // canonical key=value pairs
};

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) {
    size_t a = item.find_first_not_of(" \t");
    size_t b = item.find_last_not_of(" \t");
    if (a == std::string::npos) continue;
    out.push_back(item.substr(a, b - a + 1));
  }
  return out;
}

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

template <typename T>
T parse_number(const std::string& key, const std::string& value) {
  std::istringstream is(value);
  T out{};
  is >> out;
  if (is.fail() || !is.eof())
    throw ConfigError("config: bad value for " + key + ": '" + value + "'");
  return out;
}

ExperimentConfig load_config(const std::string& path) {
  ExperimentConfig cfg;
  if (path.empty()) return cfg;
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open " + path);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    size_t eq = line.find('=');
    if (eq == std::string::npos) {
      if (line.find_first_not_of(" \t\r") != std::string::npos)
        throw ConfigError("config: line " + std::to_string(lineno) +
                          " is not 'key = value'");
      continue;
    }
    auto trim = [](std::string s) {
      size_t a = s.find_first_not_of(" \t\r");
      size_t b = s.find_last_not_of(" \t\r");
      return a == std::string::npos ? std::string{} : s.substr(a, b - a + 1);
    };
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key == "genus") {
      cfg.genus = parse_number<int>(key, value);
    } else if (key == "h") {
      cfg.h = parse_number<double>(key, value);
    } else if (key == "times") {
      cfg.times.clear();
      for (const auto& t : split(value, ','))
        cfg.times.push_back(parse_number<double>(key, t));
    } else if (key == "seeds") {
      cfg.seeds.clear();
      for (const auto& t : split(value, ','))
        cfg.seeds.push_back(parse_number<std::uint64_t>(key, t));
    } else if (key == "densities") {
      cfg.densities = parse_number<int>(key, value);
    } else if (key == "bump_sigma") {
      cfg.bump_sigma = parse_number<double>(key, value);
    } else if (key == "bump_alpha") {
      cfg.bump_alpha = parse_number<double>(key, value);
    } else if (key == "orbit_length") {
      cfg.orbit_length = parse_number<int>(key, value);
    } else if (key == "tolerance") {
      cfg.tolerance = parse_number<double>(key, value);
    } else if (key == "oracle_tol") {
      cfg.oracle_tol = parse_number<double>(key, value);
    } else if (key == "kkt_tol") {
      cfg.kkt_tol = parse_number<double>(key, value);
    } else if (key == "curves") {
      cfg.curves = value;
    } else if (key == "fixture") {
      cfg.fixture = value;
    } else if (key == "out_dir") {
      cfg.out_dir = value;
    } else {
      throw ConfigError("config: unknown key '" + key + "'");
    }
    cfg.raw[key] = value;
  }
  if (cfg.genus < 2) throw ConfigError("config: genus must be >= 2");
  if (!(cfg.h >= 0.01 && cfg.h <= 1.0))
    throw ConfigError("config: h must lie in [0.01, 1]");
  if (cfg.times.empty() || cfg.seeds.empty())
    throw ConfigError("config: times and seeds must be nonempty");
  if (cfg.densities < 1) throw ConfigError("config: densities must be >= 1");
  return cfg;
}

// FNV-1a over the canonical sorted key=value lines; stable across runs.
std::string config_hash(const ExperimentConfig& cfg) {
  std::uint64_t hash = 1469598103934665603ull;
  auto mix = [&](const std::string& s) {
    for (unsigned char c : s) {
      hash ^= c;
      hash *= 1099511628211ull;
    }
  };
  for (const auto& [k, v] : cfg.raw) {
    mix(k);
    mix("=");
    mix(v);
    mix("\n");
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(hash));
  return buf;
}

// ---------------------------------------------------------------------------
// output plumbing

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

void write_csv(const fs::path& path, const std::string& header,
               std::vector<std::string> rows) {
  std::sort(rows.begin(), rows.end());
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << header << "\n";
  for (const auto& r : rows) out << r << "\n";
}

void write_summary(const fs::path& dir, const std::string& experiment,
                   const ExperimentConfig& cfg, bool pass,
                   const json& metrics) {
  json j;
  j["experiment"] = experiment;
  j["config_hash"] = config_hash(cfg);
  j["pass"] = pass;
  j["metrics"] = metrics;
  std::ofstream out(dir / (experiment + "_summary.json"));
  out << j.dump(2) << "\n";
  std::cout << j.dump(2) << std::endl;
}

const SurfacePresentation& surface_for(const ExperimentConfig& cfg) {
  static std::map<int, SurfacePresentation> cache;
  auto it = cache.find(cfg.genus);
  if (it == cache.end())
    it = cache.emplace(cfg.genus, build_surface(cfg.genus)).first;
  return it->second;
}

std::vector<ConformalDensity> trial_densities(const ExperimentConfig& cfg) {
  const SurfacePresentation& s = surface_for(cfg);
  std::vector<ConformalDensity> out;
  out.push_back(ConformalDensity::hyperbolic(s));
  // Deterministic bump placements spiralling inside the polygon.
  for (int i = 1; i < cfg.densities; ++i) {
    double r = 0.15 + 0.5 * s.inradius * (i % 3) / 3.0;
    double th = 2.39996322972865332 * i;  // golden angle
    std::vector<BumpSpec> specs;
    specs.push_back({DiskPoint(r * std::cos(th), r * std::sin(th)),
                     cfg.bump_sigma, cfg.bump_alpha * (i % 2 ? 1.0 : -0.6)});
    if (i % 2 == 0)
      specs.push_back({DiskPoint(0.5 * r * std::cos(th + 2.0),
                                 0.5 * r * std::sin(th + 2.0)),
                       1.3 * cfg.bump_sigma, 0.5 * cfg.bump_alpha});
    out.push_back(
        ConformalDensity::with_bumps(s, std::move(specs), cfg.orbit_length));
  }
  return out;
}

std::vector<WeightedMultiCurve> parse_curves(const ExperimentConfig& cfg) {
  std::vector<WeightedMultiCurve> out;
  for (const auto& w : split(cfg.curves, ';')) {
    WeightedMultiCurve c;
    c.components.push_back({GroupWord::parse(w, cfg.genus), 1.0});
    out.push_back(std::move(c));
  }
  return out;
}

// ---------------------------------------------------------------------------
// subcommands

int cmd_verify_ergodic(const ExperimentConfig& cfg) {
  const SurfacePresentation& s = surface_for(cfg);
  std::vector<ConformalDensity> densities = trial_densities(cfg);
  const std::string hash = config_hash(cfg);

  struct Job {
    int density;
    std::uint64_t seed;
    double T;
  };
  std::vector<Job> jobs;
  for (int d = 0; d < static_cast<int>(densities.size()); ++d)
    for (std::uint64_t seed : cfg.seeds)
      for (double T : cfg.times) jobs.push_back({d, seed, T});

  // space average of rho/rho_X w.r.t. hyperbolic area
  std::vector<double> space(densities.size());
  ConformalDensity hyp = ConformalDensity::hyperbolic(s);
  for (size_t d = 0; d < densities.size(); ++d) {
    const ConformalDensity& rho = densities[d];
    space[d] = polygon_integral(s, [&](const DiskPoint& z) {
                 return rho(z) * hyp(z);
               }).value /
               s.area();
  }

  std::vector<std::string> rows(jobs.size());
  std::vector<double> gaps(jobs.size());
  std::atomic<size_t> next{0};
  auto worker = [&]() {
    for (size_t i = next++; i < jobs.size(); i = next++) {
      const Job& job = jobs[i];
      UnitTangent v = sample_tangent(s, job.seed);
      double ta = birkhoff_average(densities[job.density], v, job.T);
      double sa = space[job.density];
      double gap = std::abs(ta - sa) / sa;
      gaps[i] = gap;
      rows[i] = std::to_string(job.density) + "," +
                std::to_string(job.seed) + "," + fmt(job.T) + "," + fmt(ta) +
                "," + fmt(sa) + "," + fmt(gap) + "," + hash + "," +
                fmt(cfg.tolerance);
    }
  };
  unsigned n = std::max(1u, std::thread::hardware_concurrency());
  std::vector<std::thread> pool;
  for (unsigned t = 0; t + 1 < n; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  double tmax = *std::max_element(cfg.times.begin(), cfg.times.end());
  double mean_gap = 0.0;
  int count = 0;
  for (size_t i = 0; i < jobs.size(); ++i)
    if (jobs[i].T == tmax) {
      mean_gap += gaps[i];
      ++count;
    }
  mean_gap /= std::max(1, count);

  fs::create_directories(cfg.out_dir);
  write_csv(fs::path(cfg.out_dir) / "verify_ergodic.csv",
            "density,seed,T,time_avg,space_avg,gap,config_hash,tolerance",
            std::move(rows));
  bool pass = mean_gap < cfg.tolerance;
  write_summary(cfg.out_dir, "verify_ergodic", cfg, pass,
                {{"mean_gap_at_Tmax", mean_gap},
                 {"T_max", tmax},
                 {"densities", densities.size()},
                 {"seeds", cfg.seeds.size()}});
  return pass ? 0 : 2;
}

int cmd_liouville_ext(const ExperimentConfig& cfg) {
  const SurfacePresentation& s = surface_for(cfg);
  SurfaceMesh mesh = build_mesh(s, cfg.h);
  const double target = kPi * kPi * s.area() / 4.0;
  const std::string hash = config_hash(cfg);
  SolveOptions opts;
  opts.oracle_tol = cfg.oracle_tol;
  opts.kkt_tol = cfg.kkt_tol;

  std::vector<std::string> rows;
  std::vector<double> estimates;
  bool all_converged = true;
  for (double T : cfg.times) {
    std::string row = fmt(T) + ",";
    try {
      UnitTangent v = sample_tangent(s, cfg.seeds.front());
      FlowTrajectory traj = flow(s, v, T);
      WeightedMultiCurve g =
          liouville_approximant(s, close_trajectory(s, traj));
      std::vector<HomotopyClass> classes = snap_curve(mesh, s, g);
      SolveResult res = extremal_solve(mesh, classes, opts);
      estimates.push_back(res.ext);
      all_converged = all_converged && res.converged;
      row += fmt(res.ext) + "," + fmt(res.ext_lower) + "," +
             fmt(res.ext_upper) + "," + fmt(target) + "," + fmt(target) +
             "," + std::to_string(res.converged);
    } catch (const std::exception& e) {
      // solver trouble at one T is reported, the sweep continues
      row += std::string("nan,nan,nan,") + fmt(target) + "," + fmt(target) +
             ",0";
      all_converged = false;
      std::cerr << "liouville-ext T=" << T << ": " << e.what() << "\n";
    }
    rows.push_back(std::move(row));
  }

  bool bracketed = !estimates.empty() &&
                   estimates.back() >= 0.99 * target &&
                   estimates.back() <= 1.15 * target;
  bool pass = all_converged && bracketed;
  fs::create_directories(cfg.out_dir);
  for (auto& r : rows) r += "," + hash + "," + fmt(cfg.oracle_tol);
  write_csv(fs::path(cfg.out_dir) / "liouville_ext.csv",
            "T,ext,ext_lower,ext_upper,target,lower_bound,converged,"
            "config_hash,tolerance",
            std::move(rows));
  write_summary(cfg.out_dir, "liouville_ext", cfg, pass,
                {{"target", target},
                 {"final_estimate", estimates.empty() ? 0.0 : estimates.back()},
                 {"h", cfg.h},
                 {"converged", all_converged}});
  return pass ? 0 : 2;
}

int cmd_diameter_suite(const ExperimentConfig& cfg) {
  const SurfacePresentation& s = surface_for(cfg);
  SurfaceMesh mesh = build_mesh(s, cfg.h);
  const std::string hash = config_hash(cfg);
  SolveOptions opts;
  opts.oracle_tol = cfg.oracle_tol;
  opts.kkt_tol = cfg.kkt_tol;
  std::vector<std::string> rows;
  auto row = [&](const std::string& check, const std::string& item, double val,
                 double bound, bool ok) {
    rows.push_back(check + "," + item + "," + fmt(val) + "," + fmt(bound) +
                   "," + (ok ? "1" : "0") + "," + hash + "," +
                   fmt(cfg.oracle_tol));
  };
  bool pass = true;

  // pants constant and the closed-form bound
  PantsConstant pc = pants_constant(mesh, standard_pants(s), opts);
  DiameterBound bound = diameter_bound(s.genus, pc.dprime);
  row("pants_constant", "dprime", pc.dprime, 0.0, pc.dprime > 0.0);
  row("diameter_bound", "total", bound.total,
      30.0 * (s.genus - 1) * std::sqrt(pc.dprime), true);
  pass = pass && pc.dprime > 0.0;

  // configured curve list: improvement margins, diameters, region suite
  const double tol_factor = 1.0 + 5.0 * cfg.h;
  std::mt19937 rng(static_cast<unsigned>(cfg.seeds.front()));
  for (const WeightedMultiCurve& c : parse_curves(cfg)) {
    std::string name = c.components.front().word.str();
    ImprovementReport rep = hyperbolic_not_extremal(mesh, c, opts);
    row("improvement_margin", name, rep.margin, 0.0,
        rep.conclusive && rep.margin > 0.0);
    pass = pass && rep.conclusive && rep.margin > 0.0;

    EdgeMetric rho = rep.solve.rho;
    double scale = 1.0 / std::sqrt(rep.solve.area);
    for (double& r : rho) r *= scale;
    double diam = discrete_diameter(mesh, rho);
    bool diam_ok = diam <= bound.total * tol_factor;
    row("diameter_vs_bound", name, diam, bound.total * tol_factor, diam_ok);
    pass = pass && diam_ok;

    // random simply connected regions on the extremal metric
    int violations = 0, accepted = 0;
    std::uniform_int_distribution<int> pick(0,
                                            static_cast<int>(mesh.faces.size()) - 1);
    std::uniform_int_distribution<int> rad(1, 3);
    for (int trial = 0; accepted < 50 && trial < 500; ++trial) {
      // grow a dual-graph ball; skip it unless it is a disk
      int seed_face = pick(rng), radius = rad(rng);
      std::vector<int> depth(mesh.faces.size(), -1);
      std::vector<int> frontier{seed_face}, ball{seed_face};
      depth[seed_face] = 0;
      for (int d = 1; d <= radius; ++d) {
        std::vector<int> next;
        for (int f : frontier) {
          const auto& t = mesh.faces[f];
          for (int i = 0; i < 3; ++i) {
            int e = mesh.edge_between(t[i], t[(i + 1) % 3]);
            for (size_t g = 0; g < mesh.faces.size(); ++g) {
              // adjacency by shared edge
              const auto& tg = mesh.faces[g];
              bool shares = false;
              for (int j = 0; j < 3; ++j)
                if (mesh.edge_between(tg[j], tg[(j + 1) % 3]) == e)
                  shares = true;
              if (shares && depth[g] < 0) {
                depth[g] = d;
                next.push_back(static_cast<int>(g));
                ball.push_back(static_cast<int>(g));
              }
            }
          }
        }
        frontier = std::move(next);
      }
      try {
        RegionReport rr = region_check(mesh, rho, ball);
        ++accepted;
        if (rr.violation) ++violations;
      } catch (const DiameterError&) {
        // not a disk at this seed/radius; try another
      }
    }
    row("region_suite", name, violations, 0.0,
        violations == 0 && accepted == 50);
    pass = pass && violations == 0 && accepted == 50;
  }

  // singular example rows
  SingularReport sr = singular_example();
  row("singular_area", "B(0,1/e)", sr.area, 2.0 * kPi,
      std::abs(sr.area - 2.0 * kPi) < 1e-8);
  row("singular_boundary", "computed_vs_stated", sr.boundary_length,
      sr.boundary_stated, sr.boundary_discrepancy);
  pass = pass && std::abs(sr.area - 2.0 * kPi) < 1e-8;

  fs::create_directories(cfg.out_dir);
  write_csv(fs::path(cfg.out_dir) / "diameter_suite.csv",
            "check,item,value,bound,ok,config_hash,tolerance",
            std::move(rows));
  write_summary(cfg.out_dir, "diameter_suite", cfg, pass,
                {{"dprime", pc.dprime},
                 {"bound_total", bound.total},
                 {"tol_factor", tol_factor}});
  return pass ? 0 : 2;
}

int cmd_singular_example(const ExperimentConfig& cfg) {
  SingularReport sr = singular_example();
  const std::string hash = config_hash(cfg);
  std::vector<std::string> rows;
  for (auto [eps, len] : sr.radial)
    rows.push_back(fmt(eps) + "," + fmt(len) + "," + hash + "," +
                   fmt(cfg.tolerance));
  fs::create_directories(cfg.out_dir);
  write_csv(fs::path(cfg.out_dir) / "singular_example.csv",
            "epsilon,radial_length,config_hash,tolerance", std::move(rows));
  bool pass = std::abs(sr.area - 2.0 * kPi) < 1e-8;
  for (auto [eps, len] : sr.radial) {
    double ratio = len / std::log(std::log(1.0 / eps));
    pass = pass && ratio > 0.9 && ratio < 1.1;
  }
  write_summary(cfg.out_dir, "singular_example", cfg, pass,
                {{"area", sr.area},
                 {"boundary_computed", sr.boundary_length},
                 {"boundary_stated", sr.boundary_stated},
                 {"boundary_discrepancy", sr.boundary_discrepancy}});
  return pass ? 0 : 2;
}

int cmd_build_surface(const ExperimentConfig& cfg) {
  const SurfacePresentation& s = surface_for(cfg);
  fs::create_directories(cfg.out_dir);
  fs::path path =
      fs::path(cfg.out_dir) / ("surface_g" + std::to_string(cfg.genus) + ".txt");
  std::ofstream out(path);
  save_surface(s, out);
  write_summary(cfg.out_dir, "build_surface", cfg, true,
                {{"genus", cfg.genus},
                 {"area", s.area()},
                 {"side_length", s.side_length},
                 {"path", path.string()}});
  return 0;
}

int cmd_build_mesh(const ExperimentConfig& cfg) {
  fs::create_directories(cfg.out_dir);
  SurfaceMesh mesh;
  std::string stem;
  if (cfg.fixture.empty()) {
    mesh = build_mesh(surface_for(cfg), cfg.h);
    std::ostringstream name;
    name << "mesh_g" << cfg.genus << "_h" << cfg.h;
    stem = name.str();
  } else {
    auto parts = split(cfg.fixture, ':');
    if (parts.size() != 2)
      throw ConfigError("config: fixture must be grid:<k> or cylinder:<m>");
    int n = parse_number<int>("fixture", parts[1]);
    if (parts[0] == "grid")
      mesh = make_grid_fixture(n);
    else if (parts[0] == "cylinder")
      mesh = make_cylinder_fixture(n);
    else
      throw ConfigError("config: fixture must be grid:<k> or cylinder:<m>");
    stem = parts[0] + "_" + parts[1];
  }
  fs::path path = fs::path(cfg.out_dir) / (stem + ".mesh");
  std::ofstream out(path);
  save_mesh(mesh, out);
  write_summary(cfg.out_dir, "build_mesh", cfg, true,
                {{"vertices", mesh.num_vertices()},
                 {"edges", mesh.edges.size()},
                 {"faces", mesh.faces.size()},
                 {"path", path.string()}});
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"extremal-length experiment driver"};
  app.require_subcommand(1);
  std::string config_path, out_override;
  std::int64_t seed_override = -1;

  std::map<std::string, std::function<int(const ExperimentConfig&)>> cmds = {
      {"verify-ergodic", cmd_verify_ergodic},
      {"liouville-ext", cmd_liouville_ext},
      {"diameter-suite", cmd_diameter_suite},
      {"singular-example", cmd_singular_example},
      {"build-surface", cmd_build_surface},
      {"build-mesh", cmd_build_mesh},
  };
  for (auto& [name, fn] : cmds) {
    CLI::App* sub = app.add_subcommand(name);
    sub->add_option("config", config_path, "experiment config file");
    sub->add_option("--out", out_override, "output directory override");
    sub->add_option("--seed", seed_override, "single-seed override");
  }
  CLI11_PARSE(app, argc, argv);

  try {
    ExperimentConfig cfg = load_config(config_path);
    if (!out_override.empty()) {
      cfg.out_dir = out_override;
      cfg.raw["out_dir"] = out_override;
    }
    if (seed_override >= 0) {
      cfg.seeds = {static_cast<std::uint64_t>(seed_override)};
      cfg.raw["seeds"] = std::to_string(seed_override);
    }
    return cmds.at(app.get_subcommands().front()->get_name())(cfg);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}
