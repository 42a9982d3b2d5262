#include "slabkin/output.hpp"

#include "slabkin/error.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace slabkin {

std::string format_double(double v)
{
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, r.ptr);
}

std::string format_csv(double v)
{
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_text(const std::filesystem::path& path, const std::string& text)
{
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw IoError("cannot open for writing: " + path.string());
  os << text;
  os.flush();
  if (!os) throw IoError("failed writing: " + path.string());
}

void write_json(const std::filesystem::path& path, const nlohmann::json& j) { write_text(path, j.dump(2) + "\n"); }

void write_profile_csv(const std::filesystem::path& path, const MomentProfile& p)
{
  std::string s = std::string(profile_header) + "\n";
  for (std::size_t k = 0; k < p.size(); ++k) {
    const double row[9] = {p.x[k], p.rho[k], p.u[k][0], p.theta[k], p.q[k][0], p.a[k], p.b[k][0], p.c[k], p.theta1[k]};
    for (int c = 0; c < 9; ++c) {
      if (c) s += ',';
      s += format_csv(row[c]);
    }
    s += '\n';
  }
  write_text(path, s);
}

void write_timeseries_csv(const std::filesystem::path& path, const TimeSeries& ts)
{
  std::string s = std::string(series_header) + "\n";
  for (std::size_t k = 0; k < ts.times.size(); ++k) {
    s += format_csv(ts.times[k]) + ',' + format_csv(ts.sup_norms[k]) + ',' + format_csv(ts.l2_norms[k]) + ',' +
         format_csv(ts.min_F[k]) + '\n';
  }
  write_text(path, s);
}

std::vector<std::vector<double>> read_csv_rows(const std::filesystem::path& path, std::string* header)
{
  std::ifstream is(path);
  if (!is) throw IoError("cannot read: " + path.string());
  std::string line;
  if (!std::getline(is, line)) throw IoError("empty CSV file: " + path.string());
  if (header) *header = line;
  std::vector<std::vector<double>> rows;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      char* end = nullptr;
      const double v = std::strtod(cell.c_str(), &end);
      if (end == cell.c_str()) throw IoError("bad number '" + cell + "' in " + path.string());
      row.push_back(v);
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

MomentProfile read_profile_csv(const std::filesystem::path& path)
{
  std::string header;
  const auto rows = read_csv_rows(path, &header);
  if (header != profile_header) throw IoError("unexpected profile header in " + path.string());
  MomentProfile p;
  p.resize(rows.size());
  for (std::size_t k = 0; k < rows.size(); ++k) {
    if (rows[k].size() != 9) throw IoError("profile row with wrong column count in " + path.string());
    const auto& r = rows[k];
    p.x[k] = r[0];
    p.rho[k] = r[1];
    p.u[k][0] = r[2];
    p.theta[k] = r[3];
    p.q[k][0] = r[4];
    p.a[k] = r[5];
    p.b[k][0] = r[6];
    p.c[k] = r[7];
    p.theta1[k] = r[8];
  }
  return p;
}

TimeSeries read_timeseries_csv(const std::filesystem::path& path)
{
  std::string header;
  const auto rows = read_csv_rows(path, &header);
  if (header != series_header) throw IoError("unexpected series header in " + path.string());
  TimeSeries ts;
  for (const auto& r : rows) {
    if (r.size() != 4) throw IoError("series row with wrong column count in " + path.string());
    ts.times.push_back(r[0]);
    ts.sup_norms.push_back(r[1]);
    ts.l2_norms.push_back(r[2]);
    ts.min_F.push_back(r[3]);
  }
  return ts;
}

namespace {

std::string fixed(double v, int digits)
{
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  return buf;
}

std::string tick_label(double v)
{
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.3g", std::abs(v) < 1e-12 ? 0.0 : v);
  return buf;
}

std::string escape(const std::string& s)
{
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      default: out += c;
    }
  }
  return out;
}

} // namespace

std::string render_svg(const std::string& title, const std::string& x_label, const std::string& y_label,
                       const std::vector<PlotSeries>& series)
{
  const double width = 640, height = 440;
  const double left = 70, right = 150, top = 40, bottom = 60;
  const double pw = width - left - right, ph = height - top - bottom;
  double xmin = 0, xmax = 1, ymin = 0, ymax = 1;
  bool first = true;
  for (const auto& s : series) {
    for (std::size_t k = 0; k < s.x.size(); ++k) {
      if (!std::isfinite(s.x[k]) || !std::isfinite(s.y[k])) continue;
      if (first) {
        xmin = xmax = s.x[k];
        ymin = ymax = s.y[k];
        first = false;
      }
      xmin = std::min(xmin, s.x[k]);
      xmax = std::max(xmax, s.x[k]);
      ymin = std::min(ymin, s.y[k]);
      ymax = std::max(ymax, s.y[k]);
    }
  }
  if (xmax - xmin < 1e-300) xmax = xmin + 1.0;
  if (ymax - ymin < 1e-300) {
    ymin -= 0.5;
    ymax += 0.5;
  }
  const double pad = 0.05 * (ymax - ymin);
  ymin -= pad;
  ymax += pad;
  auto sx = [&](double x) { return left + (x - xmin) / (xmax - xmin) * pw; };
  auto sy = [&](double y) { return top + (ymax - y) / (ymax - ymin) * ph; };

  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2"};
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
     << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << left + pw / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" << escape(title)
     << "</text>\n";
  os << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << pw << "\" height=\"" << ph
     << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int t = 0; t <= 4; ++t) {
    const double xv = xmin + (xmax - xmin) * t / 4.0;
    const double yv = ymin + (ymax - ymin) * t / 4.0;
    os << "<line x1=\"" << fixed(sx(xv), 2) << "\" y1=\"" << top + ph << "\" x2=\"" << fixed(sx(xv), 2) << "\" y2=\""
       << top + ph + 5 << "\" stroke=\"black\"/>\n";
    os << "<text x=\"" << fixed(sx(xv), 2) << "\" y=\"" << top + ph + 18 << "\" text-anchor=\"middle\">"
       << tick_label(xv) << "</text>\n";
    os << "<line x1=\"" << left - 5 << "\" y1=\"" << fixed(sy(yv), 2) << "\" x2=\"" << left << "\" y2=\""
       << fixed(sy(yv), 2) << "\" stroke=\"black\"/>\n";
    os << "<text x=\"" << left - 8 << "\" y=\"" << fixed(sy(yv) + 4, 2) << "\" text-anchor=\"end\">"
       << tick_label(yv) << "</text>\n";
  }
  os << "<text x=\"" << left + pw / 2 << "\" y=\"" << height - 15 << "\" text-anchor=\"middle\">" << escape(x_label)
     << "</text>\n";
  os << "<text x=\"18\" y=\"" << top + ph / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 18 " << top + ph / 2
     << ")\">" << escape(y_label) << "</text>\n";
  for (std::size_t s = 0; s < series.size(); ++s) {
    const char* col = colors[s % (sizeof(colors) / sizeof(colors[0]))];
    os << "<polyline fill=\"none\" stroke=\"" << col << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t k = 0; k < series[s].x.size(); ++k) {
      if (k) os << ' ';
      os << fixed(sx(series[s].x[k]), 2) << ',' << fixed(sy(series[s].y[k]), 2);
    }
    os << "\"/>\n";
    const double ly = top + 15 + 18.0 * static_cast<double>(s);
    os << "<line x1=\"" << left + pw + 12 << "\" y1=\"" << ly << "\" x2=\"" << left + pw + 36 << "\" y2=\"" << ly
       << "\" stroke=\"" << col << "\" stroke-width=\"2\"/>\n";
    os << "<text x=\"" << left + pw + 42 << "\" y=\"" << ly + 4 << "\">" << escape(series[s].label) << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

} // namespace slabkin
