#include "routh/trajectory_io.hpp"

#include "routh/errors.hpp"

#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace routh {

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string join(const Vec& v) {
  std::string out;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (i) out += ' ';
    out += fmt(v[i]);
  }
  return out;
}

double parse_double(const std::string& s, const std::string& path) {
  errno = 0;
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size() || errno == ERANGE) {
    throw Error(ErrorKind::Config, path + ": bad number '" + s + "'");
  }
  return v;
}

Vec parse_vec(const std::string& s, const std::string& path) {
  std::istringstream in(s);
  std::vector<double> vals;
  std::string tok;
  while (in >> tok) vals.push_back(parse_double(tok, path));
  return Eigen::Map<const Vec>(vals.data(), static_cast<Eigen::Index>(vals.size()));
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(line);
  while (std::getline(in, cur, sep)) out.push_back(cur);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

}  // namespace

void write_trajectory(const std::string& path, const Trajectory& traj,
                      const std::vector<std::string>& columns) {
  traj.validate();
  for (const Vec& s : traj.states) {
    if (s.size() != static_cast<Eigen::Index>(columns.size())) {
      throw Error(ErrorKind::GridMismatch, "state length does not match the column list");
    }
  }
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::trunc);
    if (!out) throw Error(ErrorKind::Config, "cannot open " + tmp + " for writing");
    out << "# system=" << traj.meta.system_id << '\n';
    out << "# chart=" << traj.meta.chart_id << '\n';
    if (traj.meta.momentum) {
      out << "# xi=" << join(traj.meta.momentum->xi) << '\n';
      out << "# eta=" << join(traj.meta.momentum->eta) << '\n';
    }
    out << "# energy0=" << fmt(traj.meta.energy0) << '\n';
    out << 't';
    for (const auto& c : columns) out << ',' << c;
    out << '\n';
    for (std::size_t i = 0; i < traj.size(); ++i) {
      out << fmt(traj.times[i]);
      for (Eigen::Index j = 0; j < traj.states[i].size(); ++j) out << ',' << fmt(traj.states[i][j]);
      out << '\n';
    }
    if (!out) throw Error(ErrorKind::Config, "write to " + tmp + " failed");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw Error(ErrorKind::Config, "cannot move " + tmp + " to " + path + ": " + ec.message());
}

TrajectoryFile read_trajectory(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Config, "cannot open " + path);
  TrajectoryFile file;
  auto& meta = file.traj.meta;
  std::optional<Vec> xi, eta;
  bool header = false;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      const auto eq = line.find('=');
      if (eq == std::string::npos) continue;
      const std::string key = line.substr(2, eq - 2);
      const std::string val = line.substr(eq + 1);
      if (key == "system") meta.system_id = val;
      else if (key == "chart") meta.chart_id = val;
      else if (key == "xi") xi = parse_vec(val, path);
      else if (key == "eta") eta = parse_vec(val, path);
      else if (key == "energy0") meta.energy0 = parse_double(val, path);
      continue;
    }
    const auto cells = split(line, ',');
    if (!header) {
      if (cells.empty() || cells[0] != "t") throw Error(ErrorKind::Config, path + ": missing header row");
      file.columns.assign(cells.begin() + 1, cells.end());
      header = true;
      continue;
    }
    if (cells.size() != file.columns.size() + 1) {
      throw Error(ErrorKind::Config, path + ": row has wrong number of cells");
    }
    file.traj.times.push_back(parse_double(cells[0], path));
    Vec s(static_cast<Eigen::Index>(file.columns.size()));
    for (std::size_t j = 0; j < file.columns.size(); ++j) s[j] = parse_double(cells[j + 1], path);
    file.traj.states.push_back(std::move(s));
  }
  if (!header) throw Error(ErrorKind::Config, path + ": missing header row");
  if (xi || eta) meta.momentum = MomentumValue{xi.value_or(Vec()), eta.value_or(Vec())};
  try {
    file.traj.validate();
  } catch (const Error& e) {
    throw Error(ErrorKind::Config, path + ": " + e.what());
  }
  return file;
}

}  // namespace routh
