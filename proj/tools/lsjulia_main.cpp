// Command-line driver: every subcommand reads explicit inputs, writes its
// results plus a manifest.json into --out, and never depends on --workers for
// output bytes.
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "lsjulia/boundary.hpp"
#include "lsjulia/dynamics.hpp"
#include "lsjulia/envelope.hpp"
#include "lsjulia/errors.hpp"
#include "lsjulia/green.hpp"
#include "lsjulia/grid.hpp"
#include "lsjulia/io.hpp"
#include "lsjulia/lsgate.hpp"
#include "lsjulia/polynomial.hpp"

namespace fs = std::filesystem;
using lsjulia::cplx;
using lsjulia::CloudMode;
using lsjulia::EscapeParams;
using lsjulia::GridSpec;
using lsjulia::Polynomial;
using nlohmann::json;

namespace {

cplx parse_cplx(const std::string& s) {
  double re = 0, im = 0;
  char extra;
  int got = std::sscanf(s.c_str(), "%lf,%lf%c", &re, &im, &extra);
  if (got == 2) return {re, im};
  if (std::sscanf(s.c_str(), "%lf%c", &re, &extra) == 1) return {re, 0};
  throw lsjulia::precondition_error("expected a complex number as re,im: " + s);
}

std::vector<double> parse_doubles(const std::string& s) {
  std::vector<double> out;
  std::size_t pos = 0;
  while (pos < s.size()) {
    std::size_t next = s.find(',', pos);
    std::string tok = s.substr(pos, next == std::string::npos ? next : next - pos);
    try {
      std::size_t used = 0;
      out.push_back(std::stod(tok, &used));
      if (used != tok.size()) throw std::invalid_argument(tok);
    } catch (const std::exception&) {
      throw lsjulia::precondition_error("expected a comma-separated number list: " + s);
    }
    if (next == std::string::npos) break;
    pos = next + 1;
  }
  if (out.empty()) throw lsjulia::precondition_error("empty number list: " + s);
  return out;
}

std::pair<double, double> parse_band(const std::string& s) {
  auto v = parse_doubles(s);
  if (v.size() != 2) throw lsjulia::precondition_error("expected a band as lo,hi: " + s);
  return {v[0], v[1]};
}

struct Disk {
  double x, y, r;
};

Disk parse_disk(const std::string& s) {
  auto v = parse_doubles(s);
  if (v.size() != 3 || !(v[2] > 0))
    throw lsjulia::precondition_error("expected a disk as x,y,r with r > 0: " + s);
  return {v[0], v[1], v[2]};
}

CloudMode parse_mode(const std::string& s) {
  return s == "random" ? CloudMode::random_paths : CloudMode::full_tree;
}

void ensure_out(const std::string& out) {
  std::error_code ec;
  fs::create_directories(out, ec);
  if (ec) throw lsjulia::io_error("cannot create output directory: " + out);
}

void write_json(const std::string& path, const json& j) {
  lsjulia::write_text_file(path, j.dump(2) + "\n");
}

void write_manifest(const std::string& out, const std::string& command,
                    const std::map<std::string, std::string>& options) {
  json j;
  j["command"] = command;
  j["options"] = options;
  write_json(out + "/manifest.json", j);
}

json cplx_json(cplx z) { return json::array({z.real(), z.imag()}); }

// Potential + distance sources backed by orbit evaluation and a preimage cloud.
struct SourcePack {
  lsjulia::BoundaryCloud cloud;
  std::unique_ptr<lsjulia::NearestIndex> index;
  lsjulia::ScanSources src;
};

SourcePack make_sources(const Polynomial& p, const EscapeParams& params, cplx base,
                        int depth, CloudMode mode, int paths, uint64_t seed,
                        int workers, int series_terms) {
  SourcePack pack;
  pack.cloud = lsjulia::preimage_tree(p, base, depth, mode, paths, seed, workers);
  pack.index = std::make_unique<lsjulia::NearestIndex>(pack.cloud.pts);
  const lsjulia::NearestIndex* idx = pack.index.get();
  pack.src.G = [p, params, series_terms](cplx z) {
    return lsjulia::green_value(p, z, params, series_terms).value;
  };
  pack.src.dist = [p, idx, params](cplx z) {
    return lsjulia::dist_to_filled(p, *idx, z, params);
  };
  return pack;
}

// Exact distance to a union of closed disks (0 inside).
double disks_dist(const std::vector<Disk>& disks, cplx z) {
  double best = std::numeric_limits<double>::infinity();
  for (const Disk& d : disks) best = std::min(best, std::abs(z - cplx{d.x, d.y}) - d.r);
  return std::max(0.0, best);
}

lsjulia::RegionMask disk_mask(const GridSpec& grid, const std::vector<Disk>& a_disks,
                              const Disk& u_disk) {
  lsjulia::RegionMask m;
  m.grid = grid;
  m.in_a.assign(grid.size(), 0);
  m.in_u.assign(grid.size(), 0);
  for (int iy = 0; iy < grid.ny; ++iy)
    for (int ix = 0; ix < grid.nx; ++ix) {
      cplx z = grid.center(ix, iy);
      std::size_t i = grid.idx(ix, iy);
      m.in_u[i] = std::abs(z - cplx{u_disk.x, u_disk.y}) < u_disk.r;
      m.in_a[i] = disks_dist(a_disks, z) == 0.0;
      if (m.in_a[i]) m.in_u[i] = 1;
    }
  m.validate();
  return m;
}

// Shared option state; each subcommand binds the subset it needs.
struct Opts {
  std::string out, poly, grid, box, base = "2,0", mode = "full", z, u_disk;
  std::vector<std::string> a_disks, windows, scales, bands, oboxes;
  std::string ladder, c_list, guards, band;
  double c = 0, guard = 0, dist_cap = 1.0, a = 0, ell = 0, tol = 1e-9;
  double radius_scale = 0.2;
  int iters = 1000, series_terms = 8, depth = 12, paths = 0, workers = 1;
  int samples = 2000, ndiscs = 2000, max_degree = 6, max_sweeps = 200000;
  uint64_t seed = 1;
};

void run_green(const Opts& o) {
  Polynomial p = Polynomial::parse(o.poly);
  GridSpec grid = GridSpec::parse(o.grid);
  EscapeParams params = EscapeParams::standard(p, o.iters);
  auto field = lsjulia::green_field(p, grid, params, o.series_terms, o.workers);
  ensure_out(o.out);
  lsjulia::write_field_csv(o.out + "/green.csv", field);
  lsjulia::write_field_sidecar(o.out + "/green.json", field, o.poly, params,
                               o.series_terms);
  lsjulia::write_pgm(o.out + "/green.pgm", grid, field.value);
  write_manifest(o.out, "green",
                 {{"poly", o.poly},
                  {"grid", o.grid},
                  {"iters", std::to_string(o.iters)},
                  {"series-terms", std::to_string(o.series_terms)}});
}

void run_boundary(const Opts& o) {
  Polynomial p = Polynomial::parse(o.poly);
  auto cloud = lsjulia::preimage_tree(p, parse_cplx(o.base), o.depth,
                                      parse_mode(o.mode), o.paths, o.seed, o.workers);
  ensure_out(o.out);
  lsjulia::write_cloud_csv(o.out + "/cloud.csv", cloud);
  lsjulia::write_cloud_sidecar(o.out + "/cloud.json", cloud, o.poly);
  write_manifest(o.out, "boundary",
                 {{"poly", o.poly},
                  {"base", o.base},
                  {"depth", std::to_string(o.depth)},
                  {"mode", o.mode},
                  {"paths", std::to_string(o.paths)},
                  {"seed", std::to_string(o.seed)}});
}

void run_scan(const Opts& o) {
  if (o.ladder.empty() && !(o.c > 0))
    throw lsjulia::precondition_error("scan needs --c or --ladder");
  Polynomial p = Polynomial::parse(o.poly);
  GridSpec grid = GridSpec::parse(o.grid);
  EscapeParams params = EscapeParams::standard(p, o.iters);
  auto pack = make_sources(p, params, parse_cplx(o.base), o.depth, parse_mode(o.mode),
                           o.paths, o.seed, o.workers, o.series_terms);
  ensure_out(o.out);
  std::map<std::string, std::string> opts{{"poly", o.poly},
                                          {"grid", o.grid},
                                          {"guard", lsjulia::format_double(o.guard)},
                                          {"dist-cap", lsjulia::format_double(o.dist_cap)},
                                          {"base", o.base},
                                          {"depth", std::to_string(o.depth)},
                                          {"mode", o.mode},
                                          {"paths", std::to_string(o.paths)},
                                          {"seed", std::to_string(o.seed)},
                                          {"iters", std::to_string(o.iters)}};
  if (!o.ladder.empty()) {
    auto rungs = parse_doubles(o.ladder);
    auto res = lsjulia::find_c_star(pack.src, grid, rungs, o.guard, o.dist_cap, o.workers);
    json j;
    j["kind"] = "cstar";
    j["cloud_resolution"] = pack.cloud.resolution;
    if (res.c_star)
      j["c_star"] = *res.c_star;
    else
      j["c_star"] = nullptr;
    json lad = json::array();
    for (auto& [cv, count] : res.ladder_counts)
      lad.push_back({{"c", cv}, {"flags", count}});
    j["ladder"] = lad;
    write_json(o.out + "/cstar.json", j);
    opts["ladder"] = o.ladder;
  } else {
    auto rep = lsjulia::scan_obstructions(pack.src, grid, o.c, o.guard, o.dist_cap,
                                          o.workers);
    lsjulia::write_scan_report(o.out + "/scan.json", o.out + "/flagged.csv", rep);
    opts["c"] = lsjulia::format_double(o.c);
  }
  write_manifest(o.out, "scan", opts);
}

void run_fit(const Opts& o) {
  Polynomial p = Polynomial::parse(o.poly);
  GridSpec box = GridSpec::parse(o.box);
  EscapeParams params = EscapeParams::standard(p, o.iters);
  auto pack = make_sources(p, params, parse_cplx(o.base), o.depth, parse_mode(o.mode),
                           o.paths, o.seed, o.workers, o.series_terms);
  auto [lo, hi] = parse_band(o.band);
  auto fit = lsjulia::fit_exponent(pack.src, box, lo, hi, o.samples, o.seed);
  ensure_out(o.out);
  json j;
  j["kind"] = "fit";
  j["slope"] = fit.slope;
  j["intercept"] = fit.intercept;
  j["sup_ratio"] = fit.sup_ratio;
  j["sup_at"] = cplx_json(fit.sup_at);
  j["n"] = fit.n;
  j["band"] = {fit.band_lo, fit.band_hi};
  j["cloud_resolution"] = pack.cloud.resolution;
  write_json(o.out + "/fit.json", j);
  write_manifest(o.out, "fit",
                 {{"poly", o.poly},
                  {"box", o.box},
                  {"band", o.band},
                  {"samples", std::to_string(o.samples)},
                  {"seed", std::to_string(o.seed)},
                  {"base", o.base},
                  {"depth", std::to_string(o.depth)},
                  {"mode", o.mode},
                  {"paths", std::to_string(o.paths)},
                  {"iters", std::to_string(o.iters)}});
}

void run_obstruct(const Opts& o) {
  Polynomial p = Polynomial::parse(o.poly);
  GridSpec box = GridSpec::parse(o.box);
  EscapeParams params = EscapeParams::standard(p, o.iters);
  auto pack = make_sources(p, params, parse_cplx(o.base), o.depth, parse_mode(o.mode),
                           o.paths, o.seed, o.workers, o.series_terms);
  std::vector<lsjulia::ObstructionScaleInput> inputs;
  for (const std::string& s : o.scales) {
    auto [lo, hi] = parse_band(s);
    inputs.push_back({pack.src, box, lo, hi, o.samples, o.seed});
  }
  auto rep = lsjulia::obstruction_scan(inputs);
  ensure_out(o.out);
  json j;
  j["kind"] = "obstruct";
  json sc = json::array();
  for (const auto& s : rep.scales)
    sc.push_back({{"band", {s.band_lo, s.band_hi}},
                  {"sup_ratio", s.sup_ratio},
                  {"argmax", cplx_json(s.argmax)},
                  {"n", s.n}});
  j["scales"] = sc;
  j["ratios_increasing"] = rep.ratios_increasing;
  j["candidate"] = cplx_json(rep.candidate);
  j["fit_residual"] = rep.fit_residual;
  write_json(o.out + "/obstruct.json", j);
  std::string scales_text;
  for (const auto& s : o.scales) scales_text += (scales_text.empty() ? "" : ";") + s;
  write_manifest(o.out, "obstruct",
                 {{"poly", o.poly},
                  {"box", o.box},
                  {"scales", scales_text},
                  {"samples", std::to_string(o.samples)},
                  {"seed", std::to_string(o.seed)},
                  {"base", o.base},
                  {"depth", std::to_string(o.depth)},
                  {"iters", std::to_string(o.iters)}});
}

void run_envelope(const Opts& o) {
  GridSpec grid = GridSpec::parse(o.grid);
  std::vector<Disk> a_disks;
  for (const auto& s : o.a_disks) a_disks.push_back(parse_disk(s));
  Disk u_disk = parse_disk(o.u_disk);
  auto mask = disk_mask(grid, a_disks, u_disk);
  lsjulia::RelaxOptions ropt{o.tol, o.max_sweeps, o.workers};
  auto res = lsjulia::relax_relative_green(mask, ropt);
  ensure_out(o.out);

  lsjulia::GreenField shim;
  shim.grid = grid;
  shim.value = res.field.v;
  shim.bounded = mask.in_a;
  shim.max_error_bound = res.final_update;
  lsjulia::write_field_csv(o.out + "/relax.csv", shim);
  lsjulia::write_region_pgm(o.out + "/region.pgm", mask);

  json j;
  j["kind"] = "envelope";
  j["grid"] = grid.format();
  j["sweeps"] = res.sweeps;
  j["final_update"] = res.final_update;
  if (!o.z.empty()) {
    cplx z = parse_cplx(o.z);
    lsjulia::PoletskyOptions popt;
    popt.n_discs = o.ndiscs;
    popt.max_degree = o.max_degree;
    popt.radius_scale = o.radius_scale;
    popt.seed = o.seed;
    popt.workers = o.workers;
    auto est = lsjulia::poletsky_estimate(mask, z, popt);
    int ix, iy;
    grid.locate(z, ix, iy);
    j["z"] = cplx_json(z);
    j["relax_at_z"] = res.field.at(ix, iy);
    j["estimate"] = est.estimate;
    j["n_valid"] = est.n_valid;
    j["n_total"] = est.n_total;
    json curve = json::array();
    for (auto& [n, v] : est.curve) curve.push_back({n, v});
    j["curve"] = curve;
  }
  write_json(o.out + "/envelope.json", j);
  std::string a_text;
  for (const auto& s : o.a_disks) a_text += (a_text.empty() ? "" : ";") + s;
  write_manifest(o.out, "envelope",
                 {{"grid", o.grid},
                  {"a-disk", a_text},
                  {"u-disk", o.u_disk},
                  {"z", o.z},
                  {"ndiscs", std::to_string(o.ndiscs)},
                  {"max-degree", std::to_string(o.max_degree)},
                  {"radius-scale", lsjulia::format_double(o.radius_scale)},
                  {"seed", std::to_string(o.seed)},
                  {"tol", lsjulia::format_double(o.tol)}});
}

void run_relation(const Opts& o) {
  Polynomial p = Polynomial::parse(o.poly);
  GridSpec grid = GridSpec::parse(o.grid);
  EscapeParams params = EscapeParams::standard(p, o.iters);
  auto field = lsjulia::green_field(p, grid, params, o.series_terms, o.workers);
  lsjulia::RelaxOptions ropt{o.tol, o.max_sweeps, o.workers};
  auto rep = lsjulia::check_relation_level_sets(field, o.a, ropt);
  ensure_out(o.out);
  json j;
  j["kind"] = "relation";
  j["a"] = rep.a;
  j["max_dev"] = rep.max_dev;
  j["worst"] = cplx_json(rep.worst);
  j["cells_compared"] = rep.cells_compared;
  j["sweeps"] = rep.sweeps;
  write_json(o.out + "/relation.json", j);
  write_manifest(o.out, "relation",
                 {{"poly", o.poly},
                  {"grid", o.grid},
                  {"a", lsjulia::format_double(o.a)},
                  {"iters", std::to_string(o.iters)},
                  {"tol", lsjulia::format_double(o.tol)}});
}

void run_corona(const Opts& o) {
  Polynomial p = Polynomial::parse(o.poly);
  GridSpec grid = GridSpec::parse(o.grid);
  EscapeParams params = EscapeParams::standard(p, o.iters);
  auto field = lsjulia::green_field(p, grid, params, o.series_terms, o.workers);
  auto pack = make_sources(p, params, parse_cplx(o.base), o.depth, parse_mode(o.mode),
                           o.paths, o.seed, o.workers, o.series_terms);
  lsjulia::RelaxOptions ropt{o.tol, o.max_sweeps, o.workers};
  auto rep = lsjulia::corona_delta(field, int(p.degree()), pack.src.dist, o.a, o.ell, ropt);
  ensure_out(o.out);
  json j;
  j["kind"] = "corona";
  j["a"] = rep.a;
  j["ell"] = rep.ell;
  j["delta_hat"] = rep.delta_hat;
  j["argmin"] = cplx_json(rep.argmin);
  j["corona_cells"] = rep.corona_cells;
  j["sweeps_exact"] = rep.sweeps_exact;
  j["sweeps_thick"] = rep.sweeps_thick;
  j["cloud_resolution"] = pack.cloud.resolution;
  write_json(o.out + "/corona.json", j);
  write_manifest(o.out, "corona",
                 {{"poly", o.poly},
                  {"grid", o.grid},
                  {"a", lsjulia::format_double(o.a)},
                  {"ell", lsjulia::format_double(o.ell)},
                  {"base", o.base},
                  {"depth", std::to_string(o.depth)},
                  {"iters", std::to_string(o.iters)},
                  {"tol", lsjulia::format_double(o.tol)}});
}

void run_hyperbolic(const Opts& o) {
  Polynomial p = Polynomial::parse(o.poly);
  GridSpec box = GridSpec::parse(o.box);
  EscapeParams params = EscapeParams::standard(p, o.iters);
  auto cert = lsjulia::hyperbolicity_certificate(p);
  auto pack = make_sources(p, params, parse_cplx(o.base), o.depth, parse_mode(o.mode),
                           o.paths, o.seed, o.workers, o.series_terms);
  auto [lo, hi] = parse_band(o.band);
  auto rep = lsjulia::hyperbolic_bound(p, pack.src.dist, box, lo, hi, o.samples, o.seed);
  ensure_out(o.out);
  json j;
  j["kind"] = "hyperbolic";
  j["b_hat"] = rep.b_hat;
  j["c_bound"] = rep.c_bound;
  j["argmin"] = cplx_json(rep.argmin);
  j["n"] = rep.n;
  json orbits = json::array();
  for (const auto& orb : cert.orbits) {
    const char* fate = orb.fate == lsjulia::CriticalFate::escaped     ? "escaped"
                       : orb.fate == lsjulia::CriticalFate::attracted ? "attracted"
                                                                      : "undecided";
    orbits.push_back({{"start", cplx_json(orb.start)},
                      {"fate", fate},
                      {"steps_used", orb.steps_used},
                      {"period", orb.period},
                      {"multiplier_abs", orb.multiplier_abs}});
  }
  j["certificate"] = {{"hyperbolic", cert.hyperbolic}, {"orbits", orbits}};
  write_json(o.out + "/hyperbolic.json", j);
  write_manifest(o.out, "hyperbolic",
                 {{"poly", o.poly},
                  {"box", o.box},
                  {"band", o.band},
                  {"samples", std::to_string(o.samples)},
                  {"seed", std::to_string(o.seed)},
                  {"base", o.base},
                  {"depth", std::to_string(o.depth)},
                  {"iters", std::to_string(o.iters)}});
}

void run_counterexample(const Opts& o) {
  std::vector<Disk> a_disks;
  for (const auto& s : o.a_disks) a_disks.push_back(parse_disk(s));
  Disk u_disk = parse_disk(o.u_disk);
  auto c_values = parse_doubles(o.c_list);
  auto guards = parse_doubles(o.guards);
  const std::size_t levels = 1 + o.windows.size();
  if (c_values.size() != levels || guards.size() != levels ||
      o.bands.size() != levels || o.oboxes.size() != levels)
    throw lsjulia::precondition_error(
        "counterexample: need one --bands/--obox and one c/guard entry per level "
        "(global grid plus each --window)");

  std::vector<GridSpec> grids{GridSpec::parse(o.grid)};
  for (const auto& w : o.windows) grids.push_back(GridSpec::parse(w));

  lsjulia::RelaxOptions ropt{o.tol, o.max_sweeps, o.workers};
  std::vector<lsjulia::ScalarField> fields;
  std::vector<int> sweeps;
  std::vector<lsjulia::RegionMask> masks;
  for (std::size_t k = 0; k < levels; ++k) {
    auto mask = disk_mask(grids[k], a_disks, u_disk);
    if (k > 0) {
      // Window level: border cells hold Dirichlet values from the parent solve.
      const GridSpec& g = grids[k];
      std::vector<double> outer(g.size(), 0.0);
      for (int iy = 0; iy < g.ny; ++iy)
        for (int ix = 0; ix < g.nx; ++ix) {
          std::size_t i = g.idx(ix, iy);
          bool border = ix == 0 || iy == 0 || ix == g.nx - 1 || iy == g.ny - 1;
          if (border && !mask.in_a[i]) mask.in_u[i] = 0;
          if (!mask.in_u[i] && !mask.in_a[i]) outer[i] = fields[k - 1].interp(g.center(ix, iy));
        }
      auto res = lsjulia::relax_relative_green(mask, ropt, &outer);
      fields.push_back(std::move(res.field));
      sweeps.push_back(res.sweeps);
    } else {
      auto res = lsjulia::relax_relative_green(mask, ropt);
      fields.push_back(std::move(res.field));
      sweeps.push_back(res.sweeps);
    }
    masks.push_back(std::move(mask));
  }

  // Per level: potential = v+1 (vanishing on the compact), exact disk distance.
  std::vector<lsjulia::ScanSources> srcs(levels);
  for (std::size_t k = 0; k < levels; ++k) {
    const lsjulia::ScalarField* f = &fields[k];
    srcs[k].G = [f](cplx z) { return f->interp(z) + 1.0; };
    srcs[k].dist = [a_disks](cplx z) { return disks_dist(a_disks, z); };
  }

  json jlevels = json::array();
  std::vector<lsjulia::ObstructionScaleInput> inputs;
  for (std::size_t k = 0; k < levels; ++k) {
    auto [lo, hi] = parse_band(o.bands[k]);
    auto scan = lsjulia::scan_obstructions(srcs[k], grids[k], c_values[k], guards[k],
                                           1.0, o.workers);
    auto ob = parse_doubles(o.oboxes[k]);
    if (ob.size() != 4)
      throw lsjulia::precondition_error("obox must be x0,y0,x1,y1: " + o.oboxes[k]);
    double h = grids[k].h;
    GridSpec sbox{ob[0], ob[1], h, int(std::lround((ob[2] - ob[0]) / h)) + 1,
                  int(std::lround((ob[3] - ob[1]) / h)) + 1};
    inputs.push_back({srcs[k], sbox, lo, hi, o.samples, o.seed});
    jlevels.push_back({{"grid", grids[k].format()},
                       {"c", c_values[k]},
                       {"guard", guards[k]},
                       {"flags", scan.flagged.size()},
                       {"band", {lo, hi}},
                       {"sweeps", sweeps[k]}});
  }
  auto rep = lsjulia::obstruction_scan(inputs);
  for (std::size_t k = 0; k < levels; ++k) {
    jlevels[k]["sup_ratio"] = rep.scales[k].sup_ratio;
    jlevels[k]["argmax"] = cplx_json(rep.scales[k].argmax);
  }

  ensure_out(o.out);
  lsjulia::write_region_pgm(o.out + "/region.pgm", masks[0]);
  json j;
  j["kind"] = "counterexample";
  j["levels"] = jlevels;
  j["ratios_increasing"] = rep.ratios_increasing;
  j["candidate"] = cplx_json(rep.candidate);
  j["fit_residual"] = rep.fit_residual;
  write_json(o.out + "/counterexample.json", j);

  auto joined = [](const std::vector<std::string>& v) {
    std::string s;
    for (const auto& e : v) s += (s.empty() ? "" : ";") + e;
    return s;
  };
  write_manifest(o.out, "counterexample",
                 {{"grid", o.grid},
                  {"a-disk", joined(o.a_disks)},
                  {"u-disk", o.u_disk},
                  {"window", joined(o.windows)},
                  {"c-list", o.c_list},
                  {"guards", o.guards},
                  {"bands", joined(o.bands)},
                  {"obox", joined(o.oboxes)},
                  {"samples", std::to_string(o.samples)},
                  {"seed", std::to_string(o.seed)},
                  {"tol", lsjulia::format_double(o.tol)}});
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Escape-rate potentials of polynomial Julia sets and disc-envelope "
               "potentials of planar compacts, with distance-comparison scans"};
  app.require_subcommand(1);
  app.set_config("--config", "", "key=value defaults, command line wins");
  Opts o;

  auto add_common = [&](CLI::App* sub) {
    sub->fallthrough();  // lets --config appear after the subcommand name
    sub->configurable();
    sub->add_option("--out", o.out, "output directory")->required();
    sub->add_option("--workers", o.workers, "worker threads (never changes results)");
  };
  auto add_poly = [&](CLI::App* sub) {
    sub->add_option("--poly", o.poly, "coefficients, ascending, 're,im' or bare real")
        ->required();
    sub->add_option("--iters", o.iters, "orbit iteration budget");
    sub->add_option("--series-terms", o.series_terms, "refinement terms per value");
  };
  auto add_cloud = [&](CLI::App* sub) {
    sub->add_option("--base", o.base, "preimage-tree base point re,im");
    sub->add_option("--depth", o.depth, "preimage-tree depth");
    sub->add_option("--mode", o.mode, "full|random")
        ->check(CLI::IsMember({"full", "random"}));
    sub->add_option("--paths", o.paths, "random-paths count (mode=random)");
    sub->add_option("--seed", o.seed, "RNG stream seed");
  };

  auto* green = app.add_subcommand("green", "escape-rate field on a grid");
  add_common(green);
  add_poly(green);
  green->add_option("--grid", o.grid, "x0,y0,h,nx,ny")->required();
  green->callback([&] { run_green(o); });

  auto* boundary = app.add_subcommand("boundary", "preimage-tree boundary cloud");
  add_common(boundary);
  add_poly(boundary);
  add_cloud(boundary);
  boundary->callback([&] { run_boundary(o); });

  auto* scan = app.add_subcommand("scan", "flag cells where c*dist^(1/c) beats the potential");
  add_common(scan);
  add_poly(scan);
  add_cloud(scan);
  scan->add_option("--grid", o.grid, "x0,y0,h,nx,ny")->required();
  scan->add_option("--c", o.c, "exponent parameter in (0,1]");
  scan->add_option("--ladder", o.ladder, "descending c list; reports the first clean rung");
  scan->add_option("--guard", o.guard, "ignore cells with dist <= guard");
  scan->add_option("--dist-cap", o.dist_cap, "comparison band upper end");
  scan->callback([&] { run_scan(o); });

  auto* fit = app.add_subcommand("fit", "log-log slope of potential vs distance");
  add_common(fit);
  add_poly(fit);
  add_cloud(fit);
  fit->add_option("--box", o.box, "sample box as x0,y0,h,nx,ny")->required();
  fit->add_option("--band", o.band, "distance band lo,hi")->required();
  fit->add_option("--samples", o.samples, "accepted sample count");
  fit->callback([&] { run_fit(o); });

  auto* obstruct = app.add_subcommand("obstruct", "multi-scale sup of dist/potential");
  add_common(obstruct);
  add_poly(obstruct);
  add_cloud(obstruct);
  obstruct->add_option("--box", o.box, "sample box as x0,y0,h,nx,ny")->required();
  obstruct->add_option("--scale", o.scales, "distance band lo,hi (repeat per scale)")
      ->required();
  obstruct->add_option("--samples", o.samples, "accepted samples per scale");
  obstruct->callback([&] { run_obstruct(o); });

  auto* envelope = app.add_subcommand("envelope", "relaxed and disc-envelope potentials "
                                                  "for a union of disks");
  add_common(envelope);
  envelope->add_option("--grid", o.grid, "x0,y0,h,nx,ny")->required();
  envelope->add_option("--a-disk", o.a_disks, "compact-part disk x,y,r (repeatable)")
      ->required();
  envelope->add_option("--u-disk", o.u_disk, "enclosing open disk x,y,R")->required();
  envelope->add_option("--z", o.z, "disc-envelope query point re,im");
  envelope->add_option("--ndiscs", o.ndiscs, "candidate disc count");
  envelope->add_option("--max-degree", o.max_degree, "polynomial disc degree cap");
  envelope->add_option("--radius-scale", o.radius_scale, "polynomial disc size factor");
  envelope->add_option("--seed", o.seed, "RNG stream seed");
  envelope->add_option("--tol", o.tol, "relaxation stop threshold");
  envelope->add_option("--max-sweeps", o.max_sweeps, "relaxation sweep budget");
  envelope->callback([&] { run_envelope(o); });

  auto* relation = app.add_subcommand("relation", "check potential = a*(v+1) on a sublevel set");
  add_common(relation);
  add_poly(relation);
  relation->add_option("--grid", o.grid, "x0,y0,h,nx,ny")->required();
  relation->add_option("--a", o.a, "sublevel threshold")->required();
  relation->add_option("--tol", o.tol, "relaxation stop threshold");
  relation->add_option("--max-sweeps", o.max_sweeps, "relaxation sweep budget");
  relation->callback([&] { run_relation(o); });

  auto* corona = app.add_subcommand("corona", "thickened-compact comparison constant");
  add_common(corona);
  add_poly(corona);
  add_cloud(corona);
  corona->add_option("--grid", o.grid, "x0,y0,h,nx,ny")->required();
  corona->add_option("--a", o.a, "outer level")->required();
  corona->add_option("--ell", o.ell, "thickening distance")->required();
  corona->add_option("--tol", o.tol, "relaxation stop threshold");
  corona->add_option("--max-sweeps", o.max_sweeps, "relaxation sweep budget");
  corona->callback([&] { run_corona(o); });

  auto* hyper = app.add_subcommand("hyperbolic", "critical-orbit certificate and "
                                                 "empirical expansion floor");
  add_common(hyper);
  add_poly(hyper);
  add_cloud(hyper);
  hyper->add_option("--box", o.box, "sample box as x0,y0,h,nx,ny")->required();
  hyper->add_option("--band", o.band, "distance band lo,hi")->required();
  hyper->add_option("--samples", o.samples, "accepted sample count");
  hyper->callback([&] { run_hyperbolic(o); });

  auto* cx = app.add_subcommand("counterexample", "multi-scale pinch analysis for a "
                                                  "disk-union compact");
  add_common(cx);
  cx->add_option("--grid", o.grid, "global grid x0,y0,h,nx,ny")->required();
  cx->add_option("--a-disk", o.a_disks, "compact-part disk x,y,r (repeatable)")->required();
  cx->add_option("--u-disk", o.u_disk, "enclosing open disk x,y,R")->required();
  cx->add_option("--window", o.windows, "refinement window grid (repeatable, nested)");
  cx->add_option("--c-list", o.c_list, "one c per level")->required();
  cx->add_option("--guards", o.guards, "one guard per level")->required();
  cx->add_option("--bands", o.bands, "distance band lo,hi per level (repeatable)")
      ->required();
  cx->add_option("--obox", o.oboxes, "sample box x0,y0,x1,y1 per level (repeatable)")
      ->required();
  cx->add_option("--samples", o.samples, "accepted samples per scale");
  cx->add_option("--seed", o.seed, "RNG stream seed");
  cx->add_option("--tol", o.tol, "relaxation stop threshold");
  cx->add_option("--max-sweeps", o.max_sweeps, "relaxation sweep budget");
  cx->callback([&] { run_counterexample(o); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  } catch (const lsjulia::precondition_error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const lsjulia::io_error& e) {
    std::fprintf(stderr, "io error: %s\n", e.what());
    return 4;
  } catch (const lsjulia::convergence_error& e) {
    std::fprintf(stderr, "convergence error: %s\n", e.what());
    return 3;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  }
  return 0;
}
