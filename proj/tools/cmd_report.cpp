#include <cmath>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "adaptens/pipeline.hpp"
#include "commands.hpp"
#include "helpers.hpp"
#include "manifest.hpp"

namespace adaptens::cli {

namespace {

std::vector<CampaignRow> parse_raw_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path.string() + "'");
  std::string line;
  if (!std::getline(in, line)) throw DataError("'" + path.string() + "' is empty");
  std::vector<CampaignRow> rows;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto cells = split_csv(line);
    if (cells.size() != 11)
      throw DataError("raw.csv line " + std::to_string(lineno) +
                      ": expected 11 cells, got " + std::to_string(cells.size()));
    CampaignRow row;
    row.value = std::stod(cells[0]);
    row.seed = static_cast<std::uint64_t>(std::stoull(cells[1]));
    row.method = parse_method(cells[2]);
    row.failed = cells[9] == "1";
    if (!row.failed) {
      row.report.mae = std::stod(cells[3]);
      row.report.rmse = std::stod(cells[4]);
      row.report.mape_percent = std::stod(cells[5]);
      row.report.cvar05 = std::stod(cells[6]);
      row.report.cvar15 = std::stod(cells[7]);
      row.report.n_cases = std::stoll(cells[8]);
    }
    row.error = cells[10];
    rows.push_back(row);
  }
  return rows;
}

bool close(double a, double b) {
  return std::abs(a - b) <= 1e-9 * std::max({1.0, std::abs(a), std::abs(b)});
}

// Minimal line chart: one polyline per method over the campaign axis.
std::string svg_chart(const std::vector<CampaignAggregate>& aggregates,
                      Metric metric) {
  static const char* kColors[] = {"#4363d8", "#e6194b", "#3cb44b",
                                  "#f58231", "#911eb4", "#000000"};
  std::map<int, std::vector<std::pair<double, double>>> series;
  double x_min = 1e300, x_max = -1e300, y_min = 1e300, y_max = -1e300;
  for (const auto& a : aggregates) {
    const double y = metric_value(a.mean, metric);
    series[static_cast<int>(a.method)].push_back({a.value, y});
    x_min = std::min(x_min, a.value);
    x_max = std::max(x_max, a.value);
    y_min = std::min(y_min, y);
    y_max = std::max(y_max, y);
  }
  if (x_max <= x_min) x_max = x_min + 1.0;
  if (y_max <= y_min) y_max = y_min + 1.0;
  const double left = 70, right = 560, top = 20, bottom = 300;
  auto sx = [&](double v) { return left + (v - x_min) / (x_max - x_min) * (right - left); };
  auto sy = [&](double v) { return bottom - (v - y_min) / (y_max - y_min) * (bottom - top); };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"700\" height=\"340\">\n";
  svg << "<rect width=\"700\" height=\"340\" fill=\"white\"/>\n";
  svg << "<line x1=\"" << left << "\" y1=\"" << bottom << "\" x2=\"" << right
      << "\" y2=\"" << bottom << "\" stroke=\"black\"/>\n";
  svg << "<line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left
      << "\" y2=\"" << bottom << "\" stroke=\"black\"/>\n";
  svg << "<text x=\"" << left << "\" y=\"315\" font-size=\"11\">" << fmt(x_min)
      << "</text>\n";
  svg << "<text x=\"" << right - 20 << "\" y=\"315\" font-size=\"11\">"
      << fmt(x_max) << "</text>\n";
  svg << "<text x=\"5\" y=\"" << bottom << "\" font-size=\"11\">" << fmt(y_min)
      << "</text>\n";
  svg << "<text x=\"5\" y=\"" << top + 10 << "\" font-size=\"11\">" << fmt(y_max)
      << "</text>\n";
  svg << "<text x=\"300\" y=\"334\" font-size=\"12\">" << name(metric)
      << " vs campaign value</text>\n";
  double legend_y = top;
  for (const auto& [method_id, points] : series) {
    const char* color = kColors[method_id % 6];
    svg << "<polyline fill=\"none\" stroke=\"" << color << "\" points=\"";
    for (const auto& [x, y] : points) svg << sx(x) << "," << sy(y) << " ";
    svg << "\"/>\n";
    svg << "<text x=\"575\" y=\"" << legend_y + 10 << "\" font-size=\"11\" fill=\""
        << color << "\">" << name(static_cast<Method>(method_id)) << "</text>\n";
    legend_y += 14;
  }
  svg << "</svg>\n";
  return svg.str();
}

}  // namespace

int cmd_report(const ReportCommand& cmd) {
  std::filesystem::path raw_path(cmd.input);
  std::filesystem::path results_path;
  if (std::filesystem::is_directory(raw_path)) {
    results_path = raw_path / "results.csv";
    raw_path /= "raw.csv";
  }
  const std::vector<CampaignRow> rows = parse_raw_csv(raw_path);
  const auto aggregates = aggregate_campaign(rows);

  CampaignResult shell;
  shell.raw = rows;
  shell.aggregates = aggregates;
  const std::string report_csv = shell.results_csv();

  // Aggregates must equal a recomputation from the raw rows.
  if (!results_path.empty() && std::filesystem::exists(results_path)) {
    std::ifstream in(results_path);
    std::string expected((std::istreambuf_iterator<char>(in)),
                         std::istreambuf_iterator<char>());
    std::istringstream got(report_csv), want(expected);
    std::string a, b;
    std::getline(got, a);
    std::getline(want, b);
    std::size_t lineno = 1;
    while (std::getline(got, a) && std::getline(want, b)) {
      ++lineno;
      const auto ca = split_csv(a), cb = split_csv(b);
      bool line_ok = ca.size() == cb.size();
      for (std::size_t i = 3; line_ok && i < ca.size(); ++i)
        line_ok = close(std::stod(ca[i]), std::stod(cb[i]));
      if (!line_ok || ca[0] != cb[0] || ca[1] != cb[1]) {
        std::cerr << "results.csv line " << lineno
                  << " disagrees with the recomputed aggregate\n";
        return kData;
      }
    }
  }

  const auto dir = ensure_out_dir(cmd.out);
  write_file(dir / "report.csv", report_csv);
  std::vector<std::string> outputs = {"report.csv"};
  if (cmd.svg) {
    for (Metric metric : {Metric::mae, Metric::rmse, Metric::mape,
                          Metric::cvar05, Metric::cvar15}) {
      const std::string file = std::string("plot_") + name(metric) + ".svg";
      write_file(dir / file, svg_chart(aggregates, metric));
      outputs.push_back(file);
    }
  }

  RunManifest manifest;
  manifest.command = "report";
  manifest.version = ADAPTENS_VERSION;
  manifest.input_digests[raw_path.string()] = file_digest(raw_path);
  manifest.config = {{"input", cmd.input}, {"svg", cmd.svg ? "true" : "false"}};
  manifest.outputs = outputs;
  manifest.write(dir);

  std::cout << report_csv;
  return kOk;
}

}  // namespace adaptens::cli
