#include "homsim/io.hpp"

#include <cstdint>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace homsim {

namespace {

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

}  // namespace

void write_file_atomic(const std::string& path, const std::string& body) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  if (!target.parent_path().empty()) fs::create_directories(target.parent_path());
  const fs::path tmp = target.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw NumericGuardError("io: cannot open " + tmp.string() + " for writing");
    out << body;
  }
  fs::rename(tmp, target);
}

void write_field_csv(const std::string& path, const ComplexField2D<double>& field) {
  std::ostringstream out;
  const auto& g = field.grid;
  out << "# homsim field dump v1\n";
  out << "# nx=" << g.nx << " ny=" << g.ny << " extent_x_m=" << format_double(g.extent_x)
      << " extent_y_m=" << format_double(g.extent_y) << "\n";
  out << "x,y,re,im\n";
  for (Eigen::Index i = 0; i < g.nx; ++i)
    for (Eigen::Index j = 0; j < g.ny; ++j)
      out << format_double(g.x(i)) << ',' << format_double(g.y(j)) << ','
          << format_double(field.values(i, j).real()) << ','
          << format_double(field.values(i, j).imag()) << '\n';
  write_file_atomic(path, out.str());
}

void write_field_binary(const std::string& path, const ComplexField2D<double>& field) {
  const auto& g = field.grid;
  std::string body;
  body.reserve(4 + 2 * sizeof(std::int64_t) + 2 * sizeof(double) +
               std::size_t(g.nx) * std::size_t(g.ny) * 2 * sizeof(double));
  body.append("HSF1", 4);
  auto append = [&body](const void* p, std::size_t n) {
    body.append(reinterpret_cast<const char*>(p), n);
  };
  const std::int64_t nx = g.nx, ny = g.ny;
  append(&nx, sizeof nx);
  append(&ny, sizeof ny);
  append(&g.extent_x, sizeof(double));
  append(&g.extent_y, sizeof(double));
  for (Eigen::Index i = 0; i < g.nx; ++i)
    for (Eigen::Index j = 0; j < g.ny; ++j) {
      const double re = field.values(i, j).real();
      const double im = field.values(i, j).imag();
      append(&re, sizeof re);
      append(&im, sizeof im);
    }
  write_file_atomic(path, body);
}

ComplexField2D<double> read_field_binary(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("io: cannot open " + path);
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, "HSF1", 4) != 0)
    throw ValidationError("io: " + path + " is not a homsim field dump");
  std::int64_t nx = 0, ny = 0;
  double ex = 0, ey = 0;
  in.read(reinterpret_cast<char*>(&nx), sizeof nx);
  in.read(reinterpret_cast<char*>(&ny), sizeof ny);
  in.read(reinterpret_cast<char*>(&ex), sizeof ex);
  in.read(reinterpret_cast<char*>(&ey), sizeof ey);
  if (!in || nx < 2 || ny < 2 || !(ex > 0) || !(ey > 0))
    throw ValidationError("io: corrupt field dump header in " + path);
  ComplexField2D<double> field{make_grid(nx, ny, ex, ey),
                               ComplexField2D<double>::Values(nx, ny)};
  for (Eigen::Index i = 0; i < nx; ++i)
    for (Eigen::Index j = 0; j < ny; ++j) {
      double re = 0, im = 0;
      in.read(reinterpret_cast<char*>(&re), sizeof re);
      in.read(reinterpret_cast<char*>(&im), sizeof im);
      field.values(i, j) = {re, im};
    }
  if (!in) throw ValidationError("io: truncated field dump " + path);
  return field;
}

std::string curve_to_csv(const CoincidenceCurve<double>& curve) {
  std::ostringstream out;
  const bool with_counts = !curve.counts.empty();
  out << (with_counts ? "delay_um,rate,count\n" : "delay_um,rate\n");
  for (std::size_t i = 0; i < curve.delays.size(); ++i) {
    out << format_double(curve.delays[i] * 1e6) << ',' << format_double(curve.rates[i]);
    if (with_counts) out << ',' << curve.counts[i];
    out << '\n';
  }
  return out.str();
}

std::string curve_sidecar_json(const CoincidenceCurve<double>& curve, const RunConfig& cfg) {
  nlohmann::json side;
  side["scenario"] = nlohmann::json::parse(config_to_json(cfg));
  if (!cfg.preset_name.empty()) side["preset"] = cfg.preset_name;
  side["coherence_length_um"] = curve.coherence_len * 1e6;
  try {
    side["visibility"] = visibility(curve);
  } catch (const ValidationError&) {
    side["visibility"] = nullptr;  // scan lacks a zero sample or a baseline
  }
  return side.dump(2) + "\n";
}

}  // namespace homsim
