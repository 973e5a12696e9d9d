#pragma once
#include <map>
#include <string>

#include "lsjulia/boundary.hpp"
#include "lsjulia/envelope.hpp"
#include "lsjulia/green.hpp"
#include "lsjulia/grid.hpp"
#include "lsjulia/lsgate.hpp"

namespace lsjulia {

// All writers throw io_error on failure and produce byte-deterministic output
// (fixed %.17g float formatting, sorted JSON keys, '\n' line endings).

std::string format_double(double x);  // shortest round-trip-safe via %.17g

// Field CSV: header "ix,iy,re,im,value", one row per cell, iy-major.
void write_field_csv(const std::string& path, const GreenField& field);
GreenField read_field_csv(const std::string& path);  // sidecar must accompany for grid

// JSON sidecar describing a field (grid, escape params, polynomial text...).
void write_field_sidecar(const std::string& path, const GreenField& field,
                         const std::string& poly_text, const EscapeParams& params,
                         int series_terms);

// 8-bit grayscale PGM (binary P5) of a scalar array; the affine value->gray
// map is recorded in the header comment as "# affine lo hi".
void write_pgm(const std::string& path, const GridSpec& grid,
               const std::vector<double>& values);

// Region PGM: exterior 0, U\A 128, A 255.
void write_region_pgm(const std::string& path, const RegionMask& mask);

// Cloud CSV: header "re,im", one row per point; JSON sidecar with base,
// depth, mode, seed, resolution.
void write_cloud_csv(const std::string& path, const BoundaryCloud& cloud);
void write_cloud_sidecar(const std::string& path, const BoundaryCloud& cloud,
                         const std::string& poly_text);
std::vector<cplx> read_cloud_csv(const std::string& path);

// Scan report JSON + flagged-cell CSV ("re,im,G,dist,rhs").
void write_scan_report(const std::string& json_path, const std::string& csv_path,
                       const ScanReport& report);

// Flat key=value config with optional [section] headers flattened to
// "section.key". '#' and ';' start comments. Later keys win.
std::map<std::string, std::string> read_config(const std::string& path);

void write_text_file(const std::string& path, const std::string& content);

}  // namespace lsjulia
