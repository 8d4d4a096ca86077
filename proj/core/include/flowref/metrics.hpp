#pragma once

#include <string>
#include <vector>

#include "flowref/field.hpp"

namespace flowref {

struct DivCurlStats {
  double mean_abs = 0.0;
  double max_abs = 0.0;
};

struct ProfileSample {
  double x = 0.0;
  double u = 0.0;
  double v = 0.0;
};

/// Metrics bundle emitted with every pipeline run.
struct FlowReport {
  double aee = -1.0;  ///< average endpoint error; negative when no truth given
  std::vector<ProfileSample> profile;
  DivCurlStats div_stats;
  DivCurlStats curl_stats;
  std::vector<double> energy_trace;
};

/// Mean over interior pixels of sqrt((u - u_t)^2 + (v - v_t)^2).
double endpoint_error(const FlowField& w, const FlowField& truth);

/// u-component along a grid row as (x, u) samples, sorted by x.
std::vector<std::pair<double, double>> extract_profile(const FlowField& w,
                                                       int row);

/// Both components along a row; what the report CSVs carry.
std::vector<ProfileSample> extract_profile_uv(const FlowField& w, int row);

/// Interior statistics of |divergence| and |curl|.
DivCurlStats divergence_stats(const FlowField& w);
DivCurlStats curl_stats(const FlowField& w);

/// Writes sqrt(u^2 + v^2), normalized by its maximum, as an 8-bit PGM.
void magnitude_raster(const std::string& path, const FlowField& w);

/// report.csv (key,value rows) + profile.csv for a run output directory.
void write_report_csv(const std::string& path, const FlowReport& report);
void write_profile_csv(const std::string& path,
                       const std::vector<ProfileSample>& profile);

}  // namespace flowref
