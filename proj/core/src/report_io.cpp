#include "layersolve/report_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <system_error>

#include "layersolve/error.hpp"

namespace layersolve {

namespace {

std::string printf_string(const char* fmt, double v) {
  char buf[64];
  const int len = std::snprintf(buf, sizeof buf, fmt, v);
  return std::string(buf, static_cast<std::size_t>(len));
}

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(sep, start);
    out.push_back(line.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

template <typename T>
T parse_number(std::string_view s, std::size_t line_no) {
  T value{};
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc{} || ptr != s.data() + s.size()) {
    throw Error(ErrorCode::IoError,
                "line " + std::to_string(line_no) + ": cannot parse '" + std::string(s) + "'");
  }
  return value;
}

std::string pad(std::string s, std::size_t width) {
  // Widths count code points, not bytes.
  std::size_t glyphs = 0;
  for (unsigned char ch : s) glyphs += (ch & 0xC0) != 0x80;
  if (glyphs < width) s.insert(0, width - glyphs, ' ');
  return s;
}

}  // namespace

std::string format_exact(double v) { return printf_string("%.17g", v); }

std::string render_report_csv(const ConvergenceReport& report) {
  std::ostringstream os;
  os << "N,M,E,R\n";
  for (const auto& rec : report.levels) {
    os << rec.n << ',' << rec.m << ',' << format_exact(rec.error) << ',';
    if (rec.order) os << format_exact(*rec.order);
    os << '\n';
  }
  return os.str();
}

std::vector<LevelRecord> parse_report_csv(std::string_view text) {
  std::vector<LevelRecord> out;
  std::size_t line_no = 0;
  bool header_seen = false;
  while (!text.empty()) {
    const std::size_t eol = text.find('\n');
    std::string_view line = text.substr(0, eol);
    text = eol == std::string_view::npos ? std::string_view{} : text.substr(eol + 1);
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    if (!header_seen) {
      if (line != "N,M,E,R") throw Error(ErrorCode::IoError, "missing N,M,E,R header");
      header_seen = true;
      continue;
    }
    const auto fields = split(line, ',');
    if (fields.size() != 4) {
      throw Error(ErrorCode::IoError, "line " + std::to_string(line_no) + ": expected 4 fields");
    }
    LevelRecord rec;
    rec.n = parse_number<std::size_t>(fields[0], line_no);
    rec.m = parse_number<std::size_t>(fields[1], line_no);
    rec.error = parse_number<double>(fields[2], line_no);
    if (!fields[3].empty()) rec.order = parse_number<double>(fields[3], line_no);
    out.push_back(rec);
  }
  if (!header_seen) throw Error(ErrorCode::IoError, "empty report");
  return out;
}

std::string render_table(const std::vector<ConvergenceReport>& reports) {
  std::vector<std::size_t> columns;
  for (const auto& r : reports) {
    for (const auto& rec : r.levels) {
      if (std::ranges::find(columns, rec.n) == columns.end()) columns.push_back(rec.n);
    }
  }
  std::ranges::sort(columns);

  constexpr std::size_t kLabel = 10;
  constexpr std::size_t kCell = 12;
  std::ostringstream os;
  double last_eps = -1.0;
  for (const auto& r : reports) {
    if (r.params.epsilon != last_eps) {
      if (last_eps >= 0.0) os << '\n';
      last_eps = r.params.epsilon;
      os << "eps = " << format_parameter(r.params.epsilon) << '\n';
      std::string head = pad("mu", kLabel) + "    ";
      for (std::size_t n : columns) head += pad("N=" + std::to_string(n), kCell);
      os << head << '\n';
    }
    std::map<std::size_t, const LevelRecord*> by_n;
    for (const auto& rec : r.levels) by_n[rec.n] = &rec;
    std::string e_row = pad(format_parameter(r.params.mu), kLabel) + "  E ";
    std::string r_row = std::string(kLabel, ' ') + "  R ";
    for (std::size_t n : columns) {
      const auto it = by_n.find(n);
      if (it == by_n.end()) {
        e_row += pad("", kCell);
        r_row += pad("", kCell);
        continue;
      }
      e_row += pad(printf_string("%.6g", it->second->error), kCell);
      r_row += pad(it->second->order ? printf_string("%.4f", *it->second->order) : "—", kCell);
    }
    os << e_row << '\n' << r_row << '\n';
  }
  return os.str();
}

std::string format_parameter(double v) {
  if (v > 0.0) {
    const double e = std::round(std::log10(v));
    if (std::pow(10.0, e) == v || std::abs(std::pow(10.0, e) - v) <= 1e-15 * v) {
      return e == 0.0 ? "1" : "1e" + std::to_string(static_cast<long>(e));
    }
  }
  std::string s = printf_string("%g", v);
  // %g writes exponents as e-08; drop the padding zero.
  const auto pos = s.find('e');
  if (pos != std::string::npos) {
    std::size_t k = pos + 1;
    if (k < s.size() && (s[k] == '-' || s[k] == '+')) ++k;
    while (k + 1 < s.size() && s[k] == '0') s.erase(k, 1);
    if (s[pos + 1] == '+') s.erase(pos + 1, 1);
  }
  return s;
}

std::string report_filename(double epsilon, double mu) {
  return "report_eps" + format_parameter(epsilon) + "_mu" + format_parameter(mu) + ".csv";
}

std::string render_mesh_dump(const SpatialMesh& mesh) {
  const auto& tau = mesh.tau();
  std::ostringstream os;
  os << "# N=" << mesh.n() << " theta1=" << format_exact(mesh.layer().theta1)
     << " theta2=" << format_exact(mesh.layer().theta2) << " tau1=" << format_exact(tau.tau1)
     << " tau2=" << format_exact(tau.tau2) << " tau3=" << format_exact(tau.tau3)
     << " tau4=" << format_exact(tau.tau4) << '\n';
  for (std::size_t i = 0; i <= mesh.n(); ++i) {
    os << i << ' ' << format_exact(mesh.x(i)) << ' ' << format_exact(mesh.h(i)) << ' '
       << to_string(mesh.segment_of(i)) << '\n';
  }
  return os.str();
}

std::string render_solution_csv(const DiscreteSolution& sol) {
  std::string out = "t,x,u\n";
  for (std::size_t j = 0; j <= sol.grid().m(); ++j) {
    const std::string t = format_exact(sol.grid().time(j));
    for (std::size_t i = 0; i <= sol.mesh().n(); ++i) {
      out += t;
      out += ',';
      out += format_exact(sol.mesh().x(i));
      out += ',';
      out += format_exact(sol.at(j, i));
      out += '\n';
    }
  }
  return out;
}

std::string render_plot_data(const DiscreteSolution& sol, std::size_t stride) {
  if (stride == 0) stride = 1;
  const std::size_t m = sol.grid().m();
  std::string out;
  for (std::size_t j = 0; j <= m; ++j) {
    if (j % stride != 0 && j != m) continue;
    if (!out.empty()) out += '\n';
    out += "# t=" + format_exact(sol.grid().time(j)) + '\n';
    for (std::size_t i = 0; i <= sol.mesh().n(); ++i) {
      out += format_exact(sol.mesh().x(i)) + ' ' + format_exact(sol.at(j, i)) + '\n';
    }
  }
  return out;
}

std::string render_temporal_csv(const TemporalReport& report) {
  std::ostringstream os;
  os << "M,error,temporal_error,ratio,order,temporal_ratio,above_floor\n";
  const auto opt = [](const std::optional<double>& v) { return v ? format_exact(*v) : ""; };
  for (const auto& rec : report.records) {
    os << rec.m << ',' << format_exact(rec.error) << ',' << format_exact(rec.temporal_error) << ','
       << opt(rec.ratio) << ',' << opt(rec.order) << ',' << opt(rec.temporal_ratio) << ','
       << (rec.above_floor ? 1 : 0) << '\n';
  }
  return os.str();
}

void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
  namespace fs = std::filesystem;
  const fs::path tmp = path.string() + ".tmp" + std::to_string(std::hash<std::string>{}(path.string()) ^
                                                             reinterpret_cast<std::uintptr_t>(&content));
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::IoError, "cannot open " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) throw Error(ErrorCode::IoError, "write failed for " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw Error(ErrorCode::IoError, "cannot rename into " + path.string());
  }
}

}  // namespace layersolve
