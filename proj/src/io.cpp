#include "lsjulia/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "lsjulia/errors.hpp"

namespace lsjulia {

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

namespace {

std::ofstream open_out(const std::string& path, bool binary = false) {
  std::ofstream f(path, binary ? std::ios::binary : std::ios::out);
  if (!f) throw io_error("cannot open for writing: " + path);
  return f;
}

std::ifstream open_in(const std::string& path, bool binary = false) {
  std::ifstream f(path, binary ? std::ios::binary : std::ios::in);
  if (!f) throw io_error("cannot open for reading: " + path);
  return f;
}

void finish(std::ofstream& f, const std::string& path) {
  f.flush();
  if (!f) throw io_error("write failed: " + path);
}

}  // namespace

void write_field_csv(const std::string& path, const GreenField& field) {
  auto f = open_out(path);
  f << "ix,iy,re,im,value\n";
  char buf[160];
  const GridSpec& g = field.grid;
  for (int iy = 0; iy < g.ny; ++iy)
    for (int ix = 0; ix < g.nx; ++ix) {
      cplx z = g.center(ix, iy);
      std::snprintf(buf, sizeof buf, "%d,%d,%.17g,%.17g,%.17g\n", ix, iy, z.real(),
                    z.imag(), field.at(ix, iy));
      f << buf;
    }
  finish(f, path);
}

GreenField read_field_csv(const std::string& path) {
  auto f = open_in(path);
  std::string line;
  if (!std::getline(f, line) || line.rfind("ix,iy", 0) != 0)
    throw io_error("bad field csv header: " + path);
  struct Row {
    int ix, iy;
    double re, im, value;
  };
  std::vector<Row> rows;
  int max_ix = -1, max_iy = -1;
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    Row r;
    if (std::sscanf(line.c_str(), "%d,%d,%lf,%lf,%lf", &r.ix, &r.iy, &r.re, &r.im,
                    &r.value) != 5)
      throw io_error("bad field csv row: " + line);
    max_ix = std::max(max_ix, r.ix);
    max_iy = std::max(max_iy, r.iy);
    rows.push_back(r);
  }
  if (rows.empty()) throw io_error("empty field csv: " + path);
  GreenField out;
  out.grid.nx = max_ix + 1;
  out.grid.ny = max_iy + 1;
  if (rows.size() != out.grid.size()) throw io_error("field csv is not a full grid: " + path);
  // Geometry from the first two cells of the first row.
  out.grid.x0 = rows[0].re;
  out.grid.y0 = rows[0].im;
  out.grid.h = out.grid.nx > 1 ? rows[1].re - rows[0].re
                               : (out.grid.ny > 1 ? rows[out.grid.nx].im - rows[0].im : 1.0);
  out.value.assign(out.grid.size(), 0.0);
  out.bounded.assign(out.grid.size(), 0);
  for (const Row& r : rows) {
    if (!out.grid.contains(r.ix, r.iy)) throw io_error("field csv index out of range");
    out.value[out.grid.idx(r.ix, r.iy)] = r.value;
  }
  return out;
}

void write_field_sidecar(const std::string& path, const GreenField& field,
                         const std::string& poly_text, const EscapeParams& params,
                         int series_terms) {
  nlohmann::json j;
  j["kind"] = "field";
  j["polynomial"] = poly_text;
  j["grid"] = field.grid.format();
  j["escape_radius"] = params.radius;
  j["big_radius"] = params.big_radius;
  j["max_iterations"] = params.max_iterations;
  j["series_terms"] = series_terms;
  j["max_error_bound"] = field.max_error_bound;
  auto f = open_out(path);
  f << j.dump(2) << "\n";
  finish(f, path);
}

void write_pgm(const std::string& path, const GridSpec& grid,
               const std::vector<double>& values) {
  if (values.size() != grid.size()) throw precondition_error("pgm: value array mismatch");
  double lo = values.empty() ? 0.0 : values[0], hi = lo;
  for (double v : values) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  if (!(hi > lo)) hi = lo + 1.0;
  auto f = open_out(path, true);
  f << "P5\n# affine " << format_double(lo) << " " << format_double(hi) << "\n"
    << grid.nx << " " << grid.ny << "\n255\n";
  std::string bytes(grid.size(), '\0');
  // Image rows run top to bottom: flip iy so north is up.
  for (int iy = 0; iy < grid.ny; ++iy)
    for (int ix = 0; ix < grid.nx; ++ix) {
      double t = (values[grid.idx(ix, grid.ny - 1 - iy)] - lo) / (hi - lo);
      bytes[std::size_t(iy) * grid.nx + ix] = char(uint8_t(std::lround(255.0 * t)));
    }
  f.write(bytes.data(), std::streamsize(bytes.size()));
  finish(f, path);
}

void write_region_pgm(const std::string& path, const RegionMask& mask) {
  auto f = open_out(path, true);
  const GridSpec& g = mask.grid;
  f << "P5\n# regions 0=outside 128=open 255=compact\n" << g.nx << " " << g.ny << "\n255\n";
  std::string bytes(g.size(), '\0');
  for (int iy = 0; iy < g.ny; ++iy)
    for (int ix = 0; ix < g.nx; ++ix) {
      std::size_t i = g.idx(ix, g.ny - 1 - iy);
      bytes[std::size_t(iy) * g.nx + ix] =
          mask.in_a[i] ? char(uint8_t(255)) : (mask.in_u[i] ? char(uint8_t(128)) : '\0');
    }
  f.write(bytes.data(), std::streamsize(bytes.size()));
  finish(f, path);
}

void write_cloud_csv(const std::string& path, const BoundaryCloud& cloud) {
  auto f = open_out(path);
  f << "re,im\n";
  char buf[96];
  for (cplx z : cloud.pts) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", z.real(), z.imag());
    f << buf;
  }
  finish(f, path);
}

void write_cloud_sidecar(const std::string& path, const BoundaryCloud& cloud,
                         const std::string& poly_text) {
  nlohmann::json j;
  j["kind"] = "cloud";
  j["polynomial"] = poly_text;
  j["base"] = {cloud.base.real(), cloud.base.imag()};
  j["depth"] = cloud.depth;
  j["mode"] = cloud.mode == CloudMode::full_tree ? "full" : "random";
  j["seed"] = cloud.seed;
  j["points"] = cloud.pts.size();
  j["resolution"] = cloud.resolution;
  auto f = open_out(path);
  f << j.dump(2) << "\n";
  finish(f, path);
}

std::vector<cplx> read_cloud_csv(const std::string& path) {
  auto f = open_in(path);
  std::string line;
  if (!std::getline(f, line) || line.rfind("re,im", 0) != 0)
    throw io_error("bad cloud csv header: " + path);
  std::vector<cplx> pts;
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    double re, im;
    if (std::sscanf(line.c_str(), "%lf,%lf", &re, &im) != 2)
      throw io_error("bad cloud csv row: " + line);
    pts.emplace_back(re, im);
  }
  return pts;
}

void write_scan_report(const std::string& json_path, const std::string& csv_path,
                       const ScanReport& report) {
  {
    nlohmann::json j;
    j["kind"] = "scan";
    j["c"] = report.c;
    j["guard"] = report.guard;
    j["dist_cap"] = report.dist_cap;
    j["grid"] = report.grid.format();
    j["cells_tested"] = report.cells_tested;
    j["flag_count"] = report.flagged.size();
    j["nonempty"] = report.nonempty();
    auto f = open_out(json_path);
    f << j.dump(2) << "\n";
    finish(f, json_path);
  }
  auto f = open_out(csv_path);
  f << "re,im,G,dist,rhs\n";
  char buf[200];
  for (const auto& fc : report.flagged) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g\n", fc.z.real(),
                  fc.z.imag(), fc.G, fc.dist, fc.rhs);
    f << buf;
  }
  finish(f, csv_path);
}

std::map<std::string, std::string> read_config(const std::string& path) {
  auto f = open_in(path);
  std::map<std::string, std::string> out;
  std::string line, section;
  auto trim = [](std::string s) {
    auto issp = [](unsigned char c) { return std::isspace(c); };
    while (!s.empty() && issp(s.front())) s.erase(s.begin());
    while (!s.empty() && issp(s.back())) s.pop_back();
    return s;
  };
  while (std::getline(f, line)) {
    auto cut = line.find_first_of("#;");
    if (cut != std::string::npos) line.erase(cut);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[' && line.back() == ']') {
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    auto eq = line.find('=');
    if (eq == std::string::npos) throw io_error("config line without '=': " + line);
    std::string key = trim(line.substr(0, eq)), val = trim(line.substr(eq + 1));
    if (key.empty()) throw io_error("config line with empty key: " + line);
    out[section.empty() ? key : section + "." + key] = val;
  }
  return out;
}

void write_text_file(const std::string& path, const std::string& content) {
  auto f = open_out(path);
  f << content;
  finish(f, path);
}

}  // namespace lsjulia
