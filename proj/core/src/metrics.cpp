#include "flowref/metrics.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "flowref/errors.hpp"
#include "flowref/fd_ops.hpp"
#include "flowref/flow_io.hpp"

namespace flowref {

double endpoint_error(const FlowField& w, const FlowField& truth) {
  if (!w.same_shape(truth))
    throw std::invalid_argument("endpoint_error: shape mismatch");
  double acc = 0.0;
  long count = 0;
  for (int y = 1; y + 1 < w.height(); ++y)
    for (int x = 1; x + 1 < w.width(); ++x) {
      const double du = w.u.at(x, y) - truth.u.at(x, y);
      const double dv = w.v.at(x, y) - truth.v.at(x, y);
      acc += std::sqrt(du * du + dv * dv);
      ++count;
    }
  return count > 0 ? acc / count : 0.0;
}

std::vector<std::pair<double, double>> extract_profile(const FlowField& w,
                                                       int row) {
  if (row < 0 || row >= w.height())
    throw std::out_of_range("extract_profile: row out of range");
  std::vector<std::pair<double, double>> out;
  out.reserve(w.width());
  for (int x = 0; x < w.width(); ++x)
    out.emplace_back(x * w.u.dx(), w.u.at(x, row));
  return out;
}

std::vector<ProfileSample> extract_profile_uv(const FlowField& w, int row) {
  if (row < 0 || row >= w.height())
    throw std::out_of_range("extract_profile_uv: row out of range");
  std::vector<ProfileSample> out;
  out.reserve(w.width());
  for (int x = 0; x < w.width(); ++x)
    out.push_back({x * w.u.dx(), w.u.at(x, row), w.v.at(x, row)});
  return out;
}

namespace {

DivCurlStats interior_abs_stats(const ScalarField& s) {
  DivCurlStats stats;
  double acc = 0.0;
  long count = 0;
  for (int y = 1; y + 1 < s.height(); ++y)
    for (int x = 1; x + 1 < s.width(); ++x) {
      const double a = std::abs(s.at(x, y));
      acc += a;
      stats.max_abs = std::max(stats.max_abs, a);
      ++count;
    }
  stats.mean_abs = count > 0 ? acc / count : 0.0;
  return stats;
}

}  // namespace

DivCurlStats divergence_stats(const FlowField& w) {
  return interior_abs_stats(divergence(w));
}

DivCurlStats curl_stats(const FlowField& w) {
  return interior_abs_stats(curl(w));
}

void magnitude_raster(const std::string& path, const FlowField& w) {
  ScalarField mag(w.width(), w.height(), 0.0, w.u.dx(), w.u.dy());
  double peak = 0.0;
  for (size_t i = 0; i < mag.data().size(); ++i) {
    mag.data()[i] = std::sqrt(w.u.data()[i] * w.u.data()[i] +
                              w.v.data()[i] * w.v.data()[i]);
    peak = std::max(peak, mag.data()[i]);
  }
  if (peak > 0.0)
    for (double& v : mag.data()) v /= peak;
  write_image_pgm(path, mag, 255);
}

void write_report_csv(const std::string& path, const FlowReport& report) {
  const std::vector<std::pair<std::string, double>> kv = {
      {"aee", report.aee},
      {"div_mean_abs", report.div_stats.mean_abs},
      {"div_max_abs", report.div_stats.max_abs},
      {"curl_mean_abs", report.curl_stats.mean_abs},
      {"curl_max_abs", report.curl_stats.max_abs},
  };
  std::string body = "metric,value\n";
  char buf[64];
  for (const auto& [k, v] : kv) {
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    body += k + "," + buf + "\n";
  }
  for (size_t i = 0; i < report.energy_trace.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%.9g", report.energy_trace[i]);
    body += "energy_" + std::to_string(i + 1) + "," + buf + "\n";
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("write_report_csv: cannot open " + path);
  out << body;
}

void write_profile_csv(const std::string& path,
                       const std::vector<ProfileSample>& profile) {
  std::vector<std::vector<double>> rows;
  rows.reserve(profile.size());
  for (const auto& p : profile) rows.push_back({p.x, p.u, p.v});
  write_csv(path, {"x", "u", "v"}, rows);
}

}  // namespace flowref
