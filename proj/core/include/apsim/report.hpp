#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "apsim/mapper.hpp"
#include "apsim/simulator.hpp"

namespace apsim {

/// Bumped whenever a column is added, removed or renamed.
inline constexpr int kReportSchemaVersion = 1;

/// Formats with 6 significant digits (shortest of fixed/scientific).
std::string format_sig(double v);

// Cost reports. The CSV starts with a header line; every row repeats the
// schema version in its first column.
std::string csv_header();
std::string csv_row(const CostReport& r);
void write_csv(std::ostream& os, const std::vector<CostReport>& reports);
/// Per-layer rows of one report.
void write_layers_csv(std::ostream& os, const CostReport& r);

std::string to_json(const CostReport& r, bool with_layers = false);
void write_json(std::ostream& os, const std::vector<CostReport>& reports, bool with_layers = false);

// Other tables the CLI emits.
void write_csv(std::ostream& os, const std::vector<PeakMetrics>& peaks);
void write_json(std::ostream& os, const std::vector<PeakMetrics>& peaks);
void write_csv(std::ostream& os, const std::vector<MixedPrecisionRow>& rows);
void write_json(std::ostream& os, const std::vector<MixedPrecisionRow>& rows);
void write_csv(std::ostream& os, const CalibrationResult& cal);
void write_json(std::ostream& os, const CalibrationResult& cal);

std::string to_json(const ExecutionPlan& plan);

}  // namespace apsim
