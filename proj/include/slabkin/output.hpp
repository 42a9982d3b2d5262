#pragma once

#include "slabkin/diagnostics.hpp"
#include "slabkin/dynamics.hpp"

#include <json.hpp>

#include <filesystem>
#include <string>
#include <vector>

namespace slabkin {

/// Shortest round-trip form of a double.
std::string format_double(double v);
/// 17 significant digits, the CSV number format.
std::string format_csv(double v);

inline constexpr const char* profile_header = "x,rho,u1,theta,q1,a,b1,c,theta1";
inline constexpr const char* series_header = "t,sup_norm,l2_norm,min_F";

/// All writers throw IoError on failure.
void write_profile_csv(const std::filesystem::path& path, const MomentProfile& p);
void write_timeseries_csv(const std::filesystem::path& path, const TimeSeries& ts);
void write_text(const std::filesystem::path& path, const std::string& text);
void write_json(const std::filesystem::path& path, const nlohmann::json& j);

/// Rows of numbers below a header; throws IoError on a missing file or bad row.
std::vector<std::vector<double>> read_csv_rows(const std::filesystem::path& path, std::string* header = nullptr);
MomentProfile read_profile_csv(const std::filesystem::path& path);
TimeSeries read_timeseries_csv(const std::filesystem::path& path);

struct PlotSeries
{
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

/// Static line plot: axes with ticks, one polyline per series, a legend.
std::string render_svg(const std::string& title, const std::string& x_label, const std::string& y_label,
                       const std::vector<PlotSeries>& series);

} // namespace slabkin
