#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "apsim/event_trace.hpp"

namespace apsim {

enum class CellKind { sram, reram };

std::string_view to_string(CellKind k);

/// Supply-voltage operating point: write energy and bit error probability.
struct OperatingPoint {
  double v_dd = 1.0;
  double e_write_cell = 0.0;
  double p_bit_error = 0.0;
};

/// Per-cell technology parameters. All values in SI units except cell_area
/// (mm^2). Immutable by convention: derive variants with apply_voltage().
struct TechProfile {
  std::string name;
  CellKind cell_kind = CellKind::sram;
  double e_write_cell = 0.0;    // J per cell written
  double e_compare_cell = 0.0;  // J per active cell compared (reads too)
  unsigned write_cycle_multiplier = 1;
  double cell_area = 0.0;        // mm^2 per cell
  double area_overhead = 0.0;    // peripheral fraction on top of the cells
  double r_lrs = 0.0;            // Ohm
  double r_hrs = 0.0;
  double r_on = 0.0;
  double r_off = 0.0;
  double c_sense = 0.0;          // F
  double v_dd = 1.0;             // V
  double p_bit_error = 0.0;
  std::vector<OperatingPoint> operating_points;
};

/// Mesh between a MAP and its CAPs.
struct InterconnectProfile {
  double e_per_bit_per_mm = 0.1e-12;  // J
  double avg_hops = 3.815;
  double hop_length = 0.18;  // mm
  double bits_per_transfer = 1024;
  double frequency = 500e6;  // Hz

  [[nodiscard]] double transfer_latency(double bits) const {
    return bits / (bits_per_transfer * frequency);
  }
  [[nodiscard]] double transfer_energy(double bits) const {
    return bits * avg_hops * hop_length * e_per_bit_per_mm;
  }
};

struct ClockProfile {
  double ap_frequency = 1e9;  // Hz
};

/// Compare energy per active cell shipped with the built-in profiles. It was
/// fitted once (log-space least squares) against the VGG16 ReRAM/SRAM energy
/// ratios; `apsim calibrate` reproduces the fit.
inline constexpr double kDefaultCompareEnergy = 1.6924e-14;

/// Cell area that makes the default limited-resources machine
/// (64 clusters x 65 APs x 4800 x 16 cells) total 137.45 mm^2.
inline constexpr double kSramCellArea = 137.45 / (64.0 * 65.0 * 4800.0 * 16.0);
inline constexpr double kReramAreaSaving = 4.4;

TechProfile sram16nm();
TechProfile reram16nm();

/// Built-in by name: "sram16nm", "reram16nm", "sram16nm@0.5V".
TechProfile builtin_profile(std::string_view name);
std::vector<std::string> builtin_profile_names();

/// `key = value unit` lines, '#' comments. Units are mandatory where the
/// quantity has one (J, F, Ohm, V, mm2). Operating points are given as
///   point = <volts> V <write energy> J <error probability>
TechProfile parse_profile(std::string_view text);
TechProfile load_profile(const std::string& path);
std::string to_text(const TechProfile& p);

/// Either a built-in name or a path to a profile file.
TechProfile resolve_profile(const std::string& name_or_path);

/// Returns the profile at supply voltage `v`. Only compare energy is left
/// untouched. Throws ConfigError for a voltage without an operating point.
TechProfile apply_voltage(const TechProfile& p, double v);

/// Array energy of a trace: written cells at e_write plus compared and read
/// cells at e_compare. Throws AccountingError when stages were issued without
/// the matching cell counts.
double energy_of(const EventTrace& t, const TechProfile& p);

/// Array energy plus mesh energy for `mesh_bits` moved over `net`.
double energy_of(const EventTrace& t, const TechProfile& p, double mesh_bits,
                 const InterconnectProfile& net);

/// Stage cycles (writes stretched by the technology) over the AP clock.
double latency_of(const EventTrace& t, const TechProfile& p, const ClockProfile& clock);

/// Area of `cells` cells including the peripheral overhead fraction.
double area_of(double cells, const TechProfile& p);

}  // namespace apsim
