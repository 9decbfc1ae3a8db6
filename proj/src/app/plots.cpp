#include <cstdio>
#include <fstream>
#include <sstream>

#include "tori/app.hpp"
#include "tori/errors.hpp"

namespace tori::app {

namespace {

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(item);
  return out;
}

void convergence_table(const std::filesystem::path& dir) {
  std::ifstream in(dir / "convergence.csv");
  if (!in) throw InvalidData("missing " + (dir / "convergence.csv").string());
  std::string line;
  std::getline(in, line);
  const auto head = split(line, ',');
  std::vector<int> cols;
  for (const char* name : {"step", "E_K", "E_W", "dlambda"}) {
    int found = -1;
    for (std::size_t i = 0; i < head.size(); ++i)
      if (head[i] == name) found = static_cast<int>(i);
    if (found < 0) throw InvalidData(std::string("convergence.csv has no column ") + name);
    cols.push_back(found);
  }
  std::ofstream out(dir / "fig1_convergence.dat");
  out << "# step |E_K| |E_W| |dlambda|\n";
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = split(line, ',');
    for (std::size_t i = 0; i < cols.size(); ++i) {
      if (cols[i] >= static_cast<int>(f.size())) throw InvalidData("short row in convergence.csv");
      out << (i ? " " : "") << f[cols[i]];
    }
    out << '\n';
  }
}

void surfaces(const std::filesystem::path& dir) {
  std::ifstream in(dir / "K.coeffs");
  if (!in) throw InvalidData("missing " + (dir / "K.coeffs").string());
  const FourierSeries K = read_coeff_dump(in);
  const Grid& g = K.grid();
  for (int j = 0; j < K.rows(); ++j) {
    std::ofstream out(dir / ("surface_K" + std::to_string(j + 1) + ".dat"));
    out << (g.dims() == 1 ? "# theta K" : "# theta1 theta2 K") << j + 1 << '\n';
    const auto s = K.samples(j);
    for (std::size_t p = 0; p < g.points(); ++p) {
      char buf[128];
      for (Real th : g.angles(p)) {
        std::snprintf(buf, sizeof buf, "%.10e ", static_cast<double>(th));
        out << buf;
      }
      std::snprintf(buf, sizeof buf, "%.16e\n", static_cast<double>(s[p]));
      out << buf;
    }
  }
}

}  // namespace

void emit_plots(const std::filesystem::path& run_dir) {
  convergence_table(run_dir);
  surfaces(run_dir);
}

}  // namespace tori::app
