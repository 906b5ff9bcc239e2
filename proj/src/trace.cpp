#include <cstdio>
#include <fstream>
#include <sstream>

#include "okpf/error.hpp"
#include "okpf/io.hpp"

namespace okpf {

namespace {

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  return out;
}

double to_double(const std::string& s, const std::string& where) {
  try {
    std::size_t used = 0;
    const double x = std::stod(s, &used);
    if (used != s.size() && s.find_first_not_of(" \t\r", used) != std::string::npos) throw std::invalid_argument(s);
    return x;
  } catch (const std::exception&) {
    throw Error(Errc::corrupt_file, "bad number '" + s + "' in " + where);
  }
}

}  // namespace

void append_trace(const std::filesystem::path& path, const TraceRow& row) {
  std::error_code ec;
  const bool fresh = !std::filesystem::exists(path, ec) || std::filesystem::file_size(path, ec) == 0;
  std::ofstream os(path, std::ios::app);
  if (!os) throw Error(Errc::io, "cannot open " + path.string() + " for appending");
  if (fresh) os << trace_header << '\n';
  char line[512];
  std::snprintf(line, sizeof line, "%llu,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n",
                static_cast<unsigned long long>(row.step), row.time, row.energy.total, row.energy.perimeter,
                row.energy.nonlocal, row.energy.constraint, row.energy.v_regularization, row.mass_u, row.mass_v,
                row.residual);
  os << line;
  os.flush();
  if (!os) throw Error(Errc::io, "write failed: " + path.string());
}

std::vector<TraceRow> read_trace(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw Error(Errc::io, "cannot open " + path.string());
  std::string line;
  if (!std::getline(is, line) || line.substr(0, line.find_last_not_of("\r") + 1) != trace_header)
    throw Error(Errc::corrupt_file, path.string() + ": missing trace header");
  std::vector<TraceRow> rows;
  while (std::getline(is, line)) {
    if (line.empty() || line == "\r") continue;
    const auto c = split_csv(line);
    const std::string where = path.string() + " row " + std::to_string(rows.size() + 1);
    if (c.size() != 10) throw Error(Errc::corrupt_file, "expected 10 columns in " + where);
    TraceRow r;
    r.step = static_cast<std::uint64_t>(to_double(c[0], where));
    r.time = to_double(c[1], where);
    r.energy.total = to_double(c[2], where);
    r.energy.perimeter = to_double(c[3], where);
    r.energy.nonlocal = to_double(c[4], where);
    r.energy.constraint = to_double(c[5], where);
    r.energy.v_regularization = to_double(c[6], where);
    r.mass_u = to_double(c[7], where);
    r.mass_v = to_double(c[8], where);
    r.residual = to_double(c[9], where);
    rows.push_back(r);
  }
  return rows;
}

std::vector<std::pair<double, double>> read_points(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw Error(Errc::io, "cannot open " + path.string());
  std::string first;
  std::getline(is, first);
  if (first.rfind("step,", 0) == 0) {
    const auto rows = read_trace(path);
    if (rows.empty()) throw Error(Errc::corrupt_file, path.string() + ": trace has no rows");
    const auto& r = rows.back();
    return {{r.mass_u, r.energy.total / r.mass_u}};
  }
  std::vector<std::pair<double, double>> pts;
  std::string line = first;
  do {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    for (char& ch : line)
      if (ch == ',') ch = ' ';
    std::istringstream ls(line);
    double m, y;
    if (ls >> m >> y) {
      pts.emplace_back(m, y);
    } else if (line.find_first_not_of(" \t\r") != std::string::npos) {
      throw Error(Errc::corrupt_file, path.string() + ": cannot parse line '" + line + "'");
    }
  } while (std::getline(is, line));
  return pts;
}

}  // namespace okpf
