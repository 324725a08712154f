#pragma once

#include "config.hpp"

#include <iosfwd>

namespace timewarp::cli {

enum ExitCode : int { ok = 0, bad_input = 1, infeasible = 2 };

/// Run one job. Writes its outputs under job.output_dir and returns an exit code;
/// errors are reported on `err`.
int run_job(const JobConfig& job, std::ostream& out, std::ostream& err);

int cmd_warp(const JobConfig& job, std::ostream& out);
int cmd_distance(const JobConfig& job, std::ostream& out);
int cmd_validate(const JobConfig& job, std::ostream& out);
int cmd_grid_search(const JobConfig& job, std::ostream& out);
int cmd_align(const JobConfig& job, std::ostream& out);
int cmd_cluster(const JobConfig& job, std::ostream& out);

}  // namespace timewarp::cli
