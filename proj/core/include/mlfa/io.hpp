#pragma once

#include <iosfwd>
#include <string>
#include <string_view>

#include "mlfa/harness.hpp"

namespace mlfa {

/// Snapshots CSV: header y0_re,y0_im,...,y{N-1}_im; one row per snapshot;
/// 17 significant digits.
void write_snapshots_csv(std::ostream& out, const SnapshotMatrix& snapshots);

/// Parses the snapshots CSV; errors carry the 1-based line number.
SnapshotMatrix read_snapshots_csv(std::istream& in);
SnapshotMatrix read_snapshots_file(const std::string& path);

/// JSON experiment config. Angles are in degrees, complex matrices are
/// nested arrays of [re, im] pairs; absent fields keep their defaults.
ExperimentSpec parse_experiment_spec(std::string_view json_text);
ExperimentSpec load_experiment_spec(const std::string& path);

void write_estimate_json(std::ostream& out, const EstimateReport& report);

}  // namespace mlfa
