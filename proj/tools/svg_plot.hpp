#pragma once

#include <Eigen/Core>

#include <string>
#include <vector>

namespace timewarp::cli {

struct Panel {
  std::string title;
  Eigen::VectorXd x;
  Eigen::VectorXd y;
  /// Draw the step-style series (one value per interval) instead of a polyline.
  bool steps = false;
};

/// Stacked line plots as a standalone SVG document.
std::string render_panels(const std::vector<Panel>& panels, int width = 640, int panel_height = 200);

/// The three warp panels: phi(t), phi(t) - t, phi'(t) - 1.
std::string render_warp(const Eigen::VectorXd& t, const Eigen::VectorXd& tau);

}  // namespace timewarp::cli
