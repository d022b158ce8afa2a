#include "apsim/tech.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>

#include "apsim/errors.hpp"

namespace apsim {

std::string_view to_string(CellKind k) { return k == CellKind::sram ? "sram" : "reram"; }

TechProfile sram16nm() {
  TechProfile p;
  p.name = "sram16nm";
  p.cell_kind = CellKind::sram;
  p.e_write_cell = 0.24e-15;
  p.e_compare_cell = kDefaultCompareEnergy;
  p.write_cycle_multiplier = 1;
  p.cell_area = kSramCellArea;
  p.v_dd = 1.0;
  p.c_sense = 50e-15;
  p.operating_points = {{1.0, 0.24e-15, 0.0}, {0.5, 0.06e-15, 0.021}};
  return p;
}

TechProfile reram16nm() {
  TechProfile p;
  p.name = "reram16nm";
  p.cell_kind = CellKind::reram;
  p.e_write_cell = 21.7e-12;
  p.e_compare_cell = kDefaultCompareEnergy;
  p.write_cycle_multiplier = 2;
  p.cell_area = kSramCellArea / kReramAreaSaving;
  p.r_lrs = 5e3;
  p.r_hrs = 2.5e6;
  p.r_on = 15e3;
  p.r_off = 24.25e6;
  p.c_sense = 50e-15;
  p.v_dd = 1.0;
  p.operating_points = {{1.0, 21.7e-12, 0.0}};
  return p;
}

std::vector<std::string> builtin_profile_names() { return {"sram16nm", "reram16nm", "sram16nm@0.5V"}; }

TechProfile builtin_profile(std::string_view name) {
  if (name == "sram16nm") return sram16nm();
  if (name == "reram16nm") return reram16nm();
  if (name == "sram16nm@0.5V") {
    auto p = apply_voltage(sram16nm(), 0.5);
    p.name = "sram16nm@0.5V";
    return p;
  }
  throw ConfigError("unknown technology profile '" + std::string(name) + "'");
}

namespace {

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_number(const std::string& tok, const std::string& key) {
  std::size_t used = 0;
  double v = 0;
  try {
    v = std::stod(tok, &used);
  } catch (const std::exception&) {
    throw ConfigError("bad number '" + tok + "' for " + key);
  }
  if (used != tok.size() || !std::isfinite(v)) throw ConfigError("bad number '" + tok + "' for " + key);
  return v;
}

// Reads "<number> <unit>" and checks the unit.
double quantity(std::istringstream& in, const std::string& key, const std::string& unit) {
  std::string num;
  std::string u;
  if (!(in >> num)) throw ConfigError("missing value for " + key);
  const double v = parse_number(num, key);
  if (unit.empty()) {
    if (in >> u) throw ConfigError(key + " takes no unit, got '" + u + "'");
    return v;
  }
  if (!(in >> u)) throw ConfigError(key + " needs unit " + unit);
  const bool ohm_alias = unit == "Ohm" && (u == "ohm" || u == "\xCE\xA9");
  const bool area_alias = unit == "mm2" && u == "mm^2";
  if (u != unit && !ohm_alias && !area_alias) {
    throw ConfigError(key + " expects unit " + unit + ", got '" + u + "'");
  }
  return v;
}

}  // namespace

TechProfile parse_profile(std::string_view text) {
  TechProfile p;
  p.operating_points.clear();
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  bool have_kind = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    std::istringstream val(trim(line.substr(eq + 1)));
    if (key == "name") {
      val >> p.name;
    } else if (key == "cell_kind") {
      std::string k;
      val >> k;
      if (k == "sram") p.cell_kind = CellKind::sram;
      else if (k == "reram") p.cell_kind = CellKind::reram;
      else throw ConfigError("cell_kind must be sram or reram");
      have_kind = true;
    } else if (key == "e_write_cell") {
      p.e_write_cell = quantity(val, key, "J");
    } else if (key == "e_compare_cell") {
      p.e_compare_cell = quantity(val, key, "J");
    } else if (key == "write_cycle_multiplier") {
      const double m = quantity(val, key, "");
      if (m < 1 || m != std::floor(m)) throw ConfigError("write_cycle_multiplier must be a positive integer");
      p.write_cycle_multiplier = static_cast<unsigned>(m);
    } else if (key == "cell_area") {
      p.cell_area = quantity(val, key, "mm2");
    } else if (key == "area_overhead") {
      p.area_overhead = quantity(val, key, "");
    } else if (key == "r_lrs") {
      p.r_lrs = quantity(val, key, "Ohm");
    } else if (key == "r_hrs") {
      p.r_hrs = quantity(val, key, "Ohm");
    } else if (key == "r_on") {
      p.r_on = quantity(val, key, "Ohm");
    } else if (key == "r_off") {
      p.r_off = quantity(val, key, "Ohm");
    } else if (key == "c_sense") {
      p.c_sense = quantity(val, key, "F");
    } else if (key == "v_dd") {
      p.v_dd = quantity(val, key, "V");
    } else if (key == "p_bit_error") {
      p.p_bit_error = quantity(val, key, "");
    } else if (key == "point") {
      OperatingPoint op;
      std::string num, u;
      if (!(val >> num >> u) || u != "V") throw ConfigError("point needs '<v> V <e> J <p>'");
      op.v_dd = parse_number(num, key);
      if (!(val >> num >> u) || u != "J") throw ConfigError("point needs '<v> V <e> J <p>'");
      op.e_write_cell = parse_number(num, key);
      if (!(val >> num)) throw ConfigError("point needs an error probability");
      op.p_bit_error = parse_number(num, key);
      p.operating_points.push_back(op);
    } else {
      throw ConfigError("line " + std::to_string(lineno) + ": unknown key '" + key + "'");
    }
  }
  if (!have_kind) throw ConfigError("profile needs cell_kind");
  if (p.e_write_cell <= 0 || p.e_compare_cell <= 0) throw ConfigError("profile energies must be positive");
  if (p.operating_points.empty()) p.operating_points.push_back({p.v_dd, p.e_write_cell, p.p_bit_error});
  return p;
}

TechProfile load_profile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open profile '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_profile(ss.str());
}

std::string to_text(const TechProfile& p) {
  std::ostringstream os;
  os << std::setprecision(6);
  os << "name = " << p.name << '\n'
     << "cell_kind = " << to_string(p.cell_kind) << '\n'
     << "e_write_cell = " << p.e_write_cell << " J\n"
     << "e_compare_cell = " << p.e_compare_cell << " J\n"
     << "write_cycle_multiplier = " << p.write_cycle_multiplier << '\n'
     << "cell_area = " << std::setprecision(10) << p.cell_area << std::setprecision(6) << " mm2\n"
     << "area_overhead = " << p.area_overhead << '\n'
     << "r_lrs = " << p.r_lrs << " Ohm\n"
     << "r_hrs = " << p.r_hrs << " Ohm\n"
     << "r_on = " << p.r_on << " Ohm\n"
     << "r_off = " << p.r_off << " Ohm\n"
     << "c_sense = " << p.c_sense << " F\n"
     << "v_dd = " << p.v_dd << " V\n"
     << "p_bit_error = " << p.p_bit_error << '\n';
  for (const auto& op : p.operating_points) {
    os << "point = " << op.v_dd << " V " << op.e_write_cell << " J " << op.p_bit_error << '\n';
  }
  return os.str();
}

TechProfile resolve_profile(const std::string& name_or_path) {
  for (const auto& n : builtin_profile_names()) {
    if (n == name_or_path) return builtin_profile(n);
  }
  return load_profile(name_or_path);
}

TechProfile apply_voltage(const TechProfile& p, double v) {
  for (const auto& op : p.operating_points) {
    if (std::abs(op.v_dd - v) < 1e-9) {
      TechProfile out = p;
      out.v_dd = op.v_dd;
      out.e_write_cell = op.e_write_cell;
      out.p_bit_error = op.p_bit_error;
      return out;
    }
  }
  std::ostringstream os;
  os << "profile " << p.name << " has no operating point at " << v << " V";
  throw ConfigError(os.str());
}

double energy_of(const EventTrace& t, const TechProfile& p) {
  if (t.n_compare > 0 && t.active_cells_compared == 0) {
    throw AccountingError("compare stages recorded without active cell counts");
  }
  if (t.n_read > 0 && t.cells_read == 0) {
    throw AccountingError("read stages recorded without read cell counts");
  }
  return static_cast<double>(t.cells_written) * p.e_write_cell +
         static_cast<double>(t.active_cells_compared + t.cells_read) * p.e_compare_cell;
}

double energy_of(const EventTrace& t, const TechProfile& p, double mesh_bits,
                 const InterconnectProfile& net) {
  return energy_of(t, p) + net.transfer_energy(mesh_bits);
}

double latency_of(const EventTrace& t, const TechProfile& p, const ClockProfile& clock) {
  return static_cast<double>(t.cycles(p.write_cycle_multiplier)) / clock.ap_frequency;
}

double area_of(double cells, const TechProfile& p) { return cells * p.cell_area * (1.0 + p.area_overhead); }

}  // namespace apsim
