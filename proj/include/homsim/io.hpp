#pragma once

#include <string>

#include "homsim/config.hpp"
#include "homsim/experiment.hpp"
#include "homsim/field.hpp"

namespace homsim {

/// Field dump, CSV flavor: `# key=value` header lines with the grid metadata,
/// then `x,y,re,im` rows in node order (y fastest).
void write_field_csv(const std::string& path, const ComplexField2D<double>& field);

/// Field dump, binary flavor: magic "HSF1", int64 nx, ny, double extents,
/// then nx*ny (re, im) double pairs in node order (y fastest), little-endian.
void write_field_binary(const std::string& path, const ComplexField2D<double>& field);
ComplexField2D<double> read_field_binary(const std::string& path);

/// Scan CSV body: header `delay_um,rate[,count]` then one row per sample.
/// Formatting is fixed so identical runs produce byte-identical bodies.
std::string curve_to_csv(const CoincidenceCurve<double>& curve);

/// JSON sidecar: full scenario echo, coherence length and visibility (null
/// when the scan lacks baseline samples).
std::string curve_sidecar_json(const CoincidenceCurve<double>& curve, const RunConfig& cfg);

/// Write a file atomically (temp file in the same directory, then rename).
void write_file_atomic(const std::string& path, const std::string& body);

}  // namespace homsim
