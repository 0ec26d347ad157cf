#pragma once

#include <string>
#include <vector>

#include "faprune/experiment_log.hpp"

namespace faprune {

// Writes the report set derived from one or more experiment logs:
//   accuracy_vs_pruned.csv      accuracy against cumulative pruned filters
//   profile.csv                 per-layer pruned-filter profile per run
//   attenuation_histogram.csv   surviving filters by attenuation count
//   scores.csv                  per-round raw/normalized criterion scores
//   filter_states.csv           per-round filter lifecycle table
//   summary.json                final accounting incl. param/MAC reduction
// Regenerating from a stored log yields byte-identical files.
void emit_reports(const std::vector<ExperimentLog>& logs, const std::string& out_dir);

// Label used in report rows to tell runs apart: method-criterion-s<seed>.
std::string run_label(const LogHeader& header);

} // namespace faprune
