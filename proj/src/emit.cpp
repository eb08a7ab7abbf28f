#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "susacer/harness.hpp"

namespace susacer {

namespace {
std::string fmt17(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return std::string(buf);
}

std::string fmt2(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return std::string(buf);
}

std::string fmt_cell(double mean, double sd, bool bold) {
  char buf[96];
  std::snprintf(buf, sizeof buf, bold ? "**%.3f ± %.3f**" : "%.3f ± %.3f", mean, sd);
  return std::string(buf);
}
}  // namespace

void emit_csv(const RunRecord& rec, const std::string& path) {
  SUSACER_CHECK(!rec.points.empty(), "cannot emit an empty record");
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  const std::size_t n_eps = rec.points.front().episode_returns.size();
  out << "step,mean_return";
  for (std::size_t i = 1; i <= n_eps; i++) out << ",ep" << i;
  out << "\n";
  for (const EvalPoint& p : rec.points) {
    SUSACER_CHECK(p.episode_returns.size() == n_eps, "ragged evaluation record");
    out << p.step << "," << fmt17(p.mean_return);
    for (double r : p.episode_returns) out << "," << fmt17(r);
    out << "\n";
  }
}

CsvData parse_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  CsvData data;
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("empty csv: " + path);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ss(line);
    std::string tok;
    std::getline(ss, tok, ',');
    data.steps.push_back(std::stoull(tok));
    std::getline(ss, tok, ',');
    data.mean_returns.push_back(std::stod(tok));
    dvec eps;
    while (std::getline(ss, tok, ',')) eps.push_back(std::stod(tok));
    data.episodes.push_back(std::move(eps));
  }
  return data;
}

void emit_svg(const std::vector<CsvData>& runs, const std::string& path,
              const std::string& title) {
  SUSACER_CHECK(!runs.empty(), "no curves to plot");
  const std::size_t n_pts = runs.front().steps.size();
  SUSACER_CHECK(n_pts >= 1, "empty curve");
  for (const CsvData& r : runs)
    SUSACER_CHECK(r.steps == runs.front().steps, "curves use different evaluation grids");

  dvec mean(n_pts, 0.0), sd(n_pts, 0.0);
  for (std::size_t i = 0; i < n_pts; i++) {
    double m = 0.0;
    for (const CsvData& r : runs) m += r.mean_returns[i];
    m /= double(runs.size());
    double var = 0.0;
    for (const CsvData& r : runs) var += (r.mean_returns[i] - m) * (r.mean_returns[i] - m);
    mean[i] = m;
    sd[i] = runs.size() > 1 ? std::sqrt(var / double(runs.size() - 1)) : 0.0;
  }

  double ymin = mean[0] - sd[0], ymax = mean[0] + sd[0];
  for (std::size_t i = 0; i < n_pts; i++) {
    ymin = std::min(ymin, mean[i] - sd[i]);
    ymax = std::max(ymax, mean[i] + sd[i]);
  }
  if (ymax - ymin < 1e-12) {
    ymax += 0.5;
    ymin -= 0.5;
  }
  const double xmax = double(runs.front().steps.back());
  const double xmin = double(runs.front().steps.front());
  const double xspan = xmax > xmin ? xmax - xmin : 1.0;

  const double w = 640, h = 420, ml = 70, mr = 20, mt = 40, mb = 50;
  auto px = [&](double step) { return ml + (step - xmin) / xspan * (w - ml - mr); };
  auto py = [&](double y) { return h - mb - (y - ymin) / (ymax - ymin) * (h - mt - mb); };

  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h
      << "\" viewBox=\"0 0 " << w << " " << h << "\">\n";
  out << "<rect width=\"" << w << "\" height=\"" << h << "\" fill=\"white\"/>\n";
  out << "<text x=\"" << w / 2 << "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" "
         "font-size=\"15\">"
      << title << "</text>\n";

  // axes with 5 ticks per side
  out << "<line x1=\"" << ml << "\" y1=\"" << h - mb << "\" x2=\"" << w - mr << "\" y2=\""
      << h - mb << "\" stroke=\"black\"/>\n";
  out << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml << "\" y2=\"" << h - mb
      << "\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 4; i++) {
    const double xs = xmin + xspan * i / 4.0;
    const double xpix = px(xs);
    out << "<line x1=\"" << fmt2(xpix) << "\" y1=\"" << h - mb << "\" x2=\"" << fmt2(xpix)
        << "\" y2=\"" << h - mb + 5 << "\" stroke=\"black\"/>\n";
    out << "<text x=\"" << fmt2(xpix) << "\" y=\"" << h - mb + 20
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">"
        << (std::uint64_t)std::llround(xs) << "</text>\n";
    const double yv = ymin + (ymax - ymin) * i / 4.0;
    const double ypix = py(yv);
    out << "<line x1=\"" << ml - 5 << "\" y1=\"" << fmt2(ypix) << "\" x2=\"" << ml << "\" y2=\""
        << fmt2(ypix) << "\" stroke=\"black\"/>\n";
    char ybuf[32];
    std::snprintf(ybuf, sizeof ybuf, "%.3g", yv);
    out << "<text x=\"" << ml - 8 << "\" y=\"" << fmt2(ypix + 4)
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" << ybuf
        << "</text>\n";
  }
  out << "<text x=\"" << (ml + w - mr) / 2 << "\" y=\"" << h - 12
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">environment "
         "steps</text>\n";
  out << "<text x=\"16\" y=\"" << (mt + h - mb) / 2
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\" "
         "transform=\"rotate(-90 16 "
      << (mt + h - mb) / 2 << ")\">mean return</text>\n";

  // sd band
  out << "<path d=\"M";
  for (std::size_t i = 0; i < n_pts; i++)
    out << fmt2(px(double(runs.front().steps[i]))) << " " << fmt2(py(mean[i] + sd[i]))
        << (i + 1 < n_pts ? " L" : " ");
  for (std::size_t i = n_pts; i-- > 0;)
    out << "L" << fmt2(px(double(runs.front().steps[i]))) << " " << fmt2(py(mean[i] - sd[i]))
        << " ";
  out << "Z\" fill=\"#4878cf\" fill-opacity=\"0.25\" stroke=\"none\"/>\n";

  // mean line
  out << "<polyline fill=\"none\" stroke=\"#274c8f\" stroke-width=\"1.8\" points=\"";
  for (std::size_t i = 0; i < n_pts; i++)
    out << fmt2(px(double(runs.front().steps[i]))) << "," << fmt2(py(mean[i])) << " ";
  out << "\"/>\n";
  out << "</svg>\n";
}

void emit_sweep(const SweepTable& table, const std::string& dir, bool write_runs) {
  std::filesystem::create_directories(dir);

  std::ofstream csv(dir + "/sweep.csv");
  if (!csv) throw std::runtime_error("cannot write " + dir + "/sweep.csv");
  csv << "e0,te,final_mean,final_sd,aulc_mean,aulc_sd\n";
  for (const SweepCell& c : table.cells)
    csv << fmt17(c.e0) << "," << fmt17(c.te) << "," << fmt17(c.final_mean) << ","
        << fmt17(c.final_sd) << "," << fmt17(c.aulc_mean) << "," << fmt17(c.aulc_sd) << "\n";

  std::ofstream md(dir + "/report.md");
  if (!md) throw std::runtime_error("cannot write " + dir + "/report.md");
  md << "# Discretization ablation\n\n";
  md << "Mean ± sd over " << (table.cells.empty() ? 0 : table.cells.front().runs.size())
     << " seeds. Best cell by mean AULC in bold.\n\n";
  md << "| E0 | TE | final | AULC |\n|---:|---:|---:|---:|\n";
  for (std::size_t i = 0; i < table.cells.size(); i++) {
    const SweepCell& c = table.cells[i];
    const bool best = i == table.best_index;
    md << "| " << c.e0 << " | " << c.te << " | " << fmt_cell(c.final_mean, c.final_sd, best)
       << " | " << fmt_cell(c.aulc_mean, c.aulc_sd, best) << " |\n";
  }

  if (write_runs) {
    for (const SweepCell& c : table.cells)
      for (const RunRecord& r : c.runs) {
        char name[128];
        std::snprintf(name, sizeof name, "%s/run_e0%g_te%g_seed%llu.csv", dir.c_str(), c.e0,
                      c.te, (unsigned long long)r.seed);
        emit_csv(r, name);
      }
  }
}

}  // namespace susacer
