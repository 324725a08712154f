#include "svg_plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace timewarp::cli {

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string escape(const std::string& s) {
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

}  // namespace

std::string render_panels(const std::vector<Panel>& panels, int width, int panel_height) {
  const double margin_l = 60, margin_r = 20, margin_t = 24, margin_b = 20;
  const int height = panel_height * static_cast<int>(panels.size());
  std::string svg = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(width) +
         "\" height=\"" + std::to_string(height) + "\" viewBox=\"0 0 " + std::to_string(width) +
         " " + std::to_string(height) + "\">\n";
  svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

  for (std::size_t p = 0; p < panels.size(); ++p) {
    const Panel& panel = panels[p];
    const double top = static_cast<double>(p) * panel_height;
    const double x0 = margin_l, x1 = width - margin_r;
    const double y0 = top + margin_t, y1 = top + panel_height - margin_b;

    double xmin = panel.x.size() ? panel.x.minCoeff() : 0.0;
    double xmax = panel.x.size() ? panel.x.maxCoeff() : 1.0;
    double ymin = 0.0, ymax = 0.0;
    bool any = false;
    for (Eigen::Index i = 0; i < panel.y.size(); ++i) {
      if (!std::isfinite(panel.y(i))) continue;
      ymin = any ? std::min(ymin, panel.y(i)) : panel.y(i);
      ymax = any ? std::max(ymax, panel.y(i)) : panel.y(i);
      any = true;
    }
    if (xmax <= xmin) xmax = xmin + 1.0;
    if (ymax - ymin < 1e-12) {
      ymin -= 0.5;
      ymax += 0.5;
    }
    auto sx = [&](double v) { return x0 + (v - xmin) / (xmax - xmin) * (x1 - x0); };
    auto sy = [&](double v) { return y1 - (v - ymin) / (ymax - ymin) * (y1 - y0); };

    svg += "<g>\n";
    svg += "<text x=\"" + num(x0) + "\" y=\"" + num(top + 16) +
           "\" font-family=\"sans-serif\" font-size=\"13\">" + escape(panel.title) + "</text>\n";
    svg += "<rect x=\"" + num(x0) + "\" y=\"" + num(y0) + "\" width=\"" + num(x1 - x0) +
           "\" height=\"" + num(y1 - y0) + "\" fill=\"none\" stroke=\"#999\"/>\n";
    if (ymin < 0.0 && ymax > 0.0) {
      svg += "<line x1=\"" + num(x0) + "\" y1=\"" + num(sy(0.0)) + "\" x2=\"" + num(x1) +
             "\" y2=\"" + num(sy(0.0)) + "\" stroke=\"#ccc\"/>\n";
    }
    svg += "<text x=\"" + num(x0 - 4) + "\" y=\"" + num(y0 + 10) +
           "\" font-family=\"sans-serif\" font-size=\"10\" text-anchor=\"end\">" +
           num(ymax) + "</text>\n";
    svg += "<text x=\"" + num(x0 - 4) + "\" y=\"" + num(y1) +
           "\" font-family=\"sans-serif\" font-size=\"10\" text-anchor=\"end\">" +
           num(ymin) + "</text>\n";

    std::string d;
    auto point = [&](double px, double py) {
      d += (d.empty() ? "M" : " L") + num(sx(px)) + "," + num(sy(py));
    };
    if (panel.steps) {
      for (Eigen::Index i = 0; i < panel.y.size() && i + 1 < panel.x.size(); ++i) {
        if (!std::isfinite(panel.y(i))) continue;
        point(panel.x(i), panel.y(i));
        point(panel.x(i + 1), panel.y(i));
      }
    } else {
      for (Eigen::Index i = 0; i < std::min(panel.x.size(), panel.y.size()); ++i) {
        if (std::isfinite(panel.y(i))) point(panel.x(i), panel.y(i));
      }
    }
    if (!d.empty()) {
      svg += "<path d=\"" + d + "\" fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"1.5\"/>\n";
    }
    svg += "</g>\n";
  }
  svg += "</svg>\n";
  return svg;
}

std::string render_warp(const Eigen::VectorXd& t, const Eigen::VectorXd& tau) {
  const Eigen::Index n = t.size();
  Eigen::VectorXd rate = (tau.tail(n - 1) - tau.head(n - 1)).cwiseQuotient(t.tail(n - 1) - t.head(n - 1));
  rate.array() -= 1.0;
  return render_panels({{"phi(t)", t, tau, false},
                        {"phi(t) - t", t, tau - t, false},
                        {"phi'(t) - 1", t, rate, true}});
}

}  // namespace timewarp::cli
