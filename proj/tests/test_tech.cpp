#include <gtest/gtest.h>

#include "apsim/errors.hpp"
#include "apsim/tech.hpp"

using namespace apsim;

TEST(Profiles, BuiltinValues) {
  const auto s = sram16nm();
  EXPECT_EQ(s.cell_kind, CellKind::sram);
  EXPECT_DOUBLE_EQ(s.e_write_cell, 0.24e-15);
  EXPECT_EQ(s.write_cycle_multiplier, 1u);
  const auto r = reram16nm();
  EXPECT_EQ(r.cell_kind, CellKind::reram);
  EXPECT_DOUBLE_EQ(r.e_write_cell, 21.7e-12);
  EXPECT_EQ(r.write_cycle_multiplier, 2u);
  EXPECT_NEAR(s.cell_area / r.cell_area, 4.4, 1e-12);
  EXPECT_DOUBLE_EQ(s.e_compare_cell, r.e_compare_cell);
}

TEST(Profiles, LookupByName) {
  for (const auto& n : builtin_profile_names()) EXPECT_EQ(builtin_profile(n).name, n);
  EXPECT_THROW(builtin_profile("dram"), ConfigError);
  EXPECT_THROW(resolve_profile("/no/such/profile.tech"), ConfigError);
}

TEST(Profiles, TextRoundTrip) {
  for (const auto& n : builtin_profile_names()) {
    const auto p = builtin_profile(n);
    const auto q = parse_profile(to_text(p));
    EXPECT_EQ(q.name, p.name);
    EXPECT_EQ(q.cell_kind, p.cell_kind);
    EXPECT_NEAR(q.e_write_cell, p.e_write_cell, p.e_write_cell * 1e-5);
    EXPECT_NEAR(q.e_compare_cell, p.e_compare_cell, p.e_compare_cell * 1e-5);
    EXPECT_NEAR(q.cell_area, p.cell_area, p.cell_area * 1e-9);
    EXPECT_EQ(q.write_cycle_multiplier, p.write_cycle_multiplier);
    EXPECT_EQ(q.operating_points.size(), p.operating_points.size());
  }
}

TEST(Profiles, UnitsAreChecked) {
  const std::string base = "cell_kind = sram\ne_compare_cell = 1e-15 J\n";
  EXPECT_NO_THROW(parse_profile(base + "e_write_cell = 1e-15 J\n"));
  EXPECT_THROW(parse_profile(base + "e_write_cell = 1e-15\n"), ConfigError);
  EXPECT_THROW(parse_profile(base + "e_write_cell = 1e-15 fJ\n"), ConfigError);
  EXPECT_THROW(parse_profile(base + "e_write_cell = 1e-15 J\nr_on = 5 V\n"), ConfigError);
  EXPECT_NO_THROW(parse_profile(base + "e_write_cell = 1e-15 J\nr_on = 5 ohm\ncell_area = 1e-7 mm^2\n"));
  EXPECT_THROW(parse_profile(base + "e_write_cell = 1e-15 J\nspeed = 3\n"), ConfigError);
  EXPECT_THROW(parse_profile("e_write_cell = 1e-15 J\ne_compare_cell = 1e-15 J\n"), ConfigError);
  EXPECT_THROW(parse_profile(base + "e_write_cell = 1e-15 J\nwrite_cycle_multiplier = 1.5\n"), ConfigError);
}

TEST(Voltage, HalfVoltSram) {
  const auto p = apply_voltage(sram16nm(), 0.5);
  EXPECT_DOUBLE_EQ(p.e_write_cell, 0.06e-15);
  EXPECT_DOUBLE_EQ(p.p_bit_error, 0.021);
  EXPECT_DOUBLE_EQ(p.e_compare_cell, sram16nm().e_compare_cell);
  EXPECT_DOUBLE_EQ(apply_voltage(sram16nm(), 1.0).p_bit_error, 0.0);
  EXPECT_THROW(apply_voltage(sram16nm(), 0.7), ConfigError);
  EXPECT_THROW(apply_voltage(reram16nm(), 0.5), ConfigError);
}

TEST(Energy, CellCountsTimesPerCellEnergies) {
  EventTrace t;
  t.n_compare = 2;
  t.n_write = 1;
  t.n_read = 1;
  t.active_cells_compared = 100;
  t.cells_written = 10;
  t.cells_read = 4;
  auto p = sram16nm();
  p.e_write_cell = 1.0;
  p.e_compare_cell = 0.5;
  EXPECT_DOUBLE_EQ(energy_of(t, p), 10 * 1.0 + 104 * 0.5);
  InterconnectProfile net;
  EXPECT_DOUBLE_EQ(energy_of(t, p, 1000, net), energy_of(t, p) + 1000 * 3.815 * 0.18 * 0.1e-12);
}

TEST(Energy, MissingCellCountsAreAnAccountingError) {
  EventTrace t;
  t.n_compare = 1;
  EXPECT_THROW(energy_of(t, sram16nm()), AccountingError);
  EventTrace r;
  r.n_read = 3;
  EXPECT_THROW(energy_of(r, sram16nm()), AccountingError);
  EXPECT_DOUBLE_EQ(energy_of(EventTrace{}, sram16nm()), 0.0);
}

TEST(Latency, WritesStretchOnReram) {
  EventTrace t;
  t.n_compare = 10;
  t.n_write = 10;
  t.n_read = 2;
  ClockProfile clk;
  EXPECT_DOUBLE_EQ(latency_of(t, sram16nm(), clk), 22e-9);
  EXPECT_DOUBLE_EQ(latency_of(t, reram16nm(), clk), 32e-9);
}

TEST(Interconnect, TransferLatencyAndEnergy) {
  InterconnectProfile net;
  EXPECT_DOUBLE_EQ(net.transfer_latency(1024), 2e-9);
  EXPECT_DOUBLE_EQ(net.transfer_latency(0), 0.0);
  EXPECT_NEAR(net.transfer_energy(1), 3.815 * 0.18 * 0.1e-12, 1e-30);
}

TEST(Area, DefaultMachineFootprint) {
  const double cells = 64.0 * 65.0 * 4800.0 * 16.0;
  EXPECT_NEAR(area_of(cells, sram16nm()), 137.45, 1e-9);
  EXPECT_NEAR(area_of(cells, reram16nm()), 137.45 / 4.4, 1e-9);
  auto p = sram16nm();
  p.area_overhead = 0.5;
  EXPECT_NEAR(area_of(cells, p), 1.5 * 137.45, 1e-9);
}
