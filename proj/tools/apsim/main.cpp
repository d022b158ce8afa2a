#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "apsim/errors.hpp"
#include "apsim/report.hpp"
#include "apsim/simulator.hpp"
#include "emulate.hpp"

namespace {

using namespace apsim;

enum class Format { text, csv, json };

// Owns the output file when --out is given, otherwise writes to stdout.
class Output {
 public:
  explicit Output(const std::string& path) {
    if (path.empty() || path == "-") return;
    file_ = std::make_unique<std::ofstream>(path);
    if (!*file_) throw ConfigError("cannot open '" + path + "' for writing");
  }
  std::ostream& stream() { return file_ ? *file_ : std::cout; }

 private:
  std::unique_ptr<std::ofstream> file_;
};

void add_format(CLI::App* cmd, Format& fmt, bool with_text) {
  std::map<std::string, Format> names{{"csv", Format::csv}, {"json", Format::json}};
  if (with_text) names.emplace("text", Format::text);
  cmd->add_option("--format", fmt, "Output format")->transform(CLI::CheckedTransformer(names, CLI::ignore_case));
}

void print_summary(std::ostream& os, const CostReport& r) {
  os << "model         " << r.model << "\n"
     << "precision     " << r.precision << " (average " << format_sig(r.average_bits) << " bits)\n"
     << "tech          " << r.tech << " @ " << format_sig(r.voltage) << " V\n"
     << "hardware      " << r.hw << "\n"
     << "MACs          " << r.macs << "\n"
     << "AP steps      " << r.steps << " (GEMM utilization " << format_sig(r.utilization) << ")\n"
     << "energy        " << format_sig(r.energy_J) << " J\n"
     << "latency       " << format_sig(r.latency_s) << " s\n"
     << "area          " << format_sig(r.area_mm2) << " mm2\n"
     << "GOPS          " << format_sig(r.gops) << "\n"
     << "GOPS/W        " << format_sig(r.gops_per_w) << "\n"
     << "GOPS/W/mm2    " << format_sig(r.gops_per_w_per_mm2) << "\n"
     << "EDP           " << format_sig(r.edp_Js) << " J*s\n"
     << "breakdown     category        energy   latency\n";
  for (std::size_t i = 0; i < kCostCategories; ++i) {
    const auto c = static_cast<CostCategory>(i);
    os << "              " << std::left << std::setw(15) << to_string(c) << std::right << std::setw(7)
       << std::fixed << std::setprecision(2) << 100 * r.energy_share(c) << "%" << std::setw(9)
       << 100 * r.latency_share(c) << "%\n"
       << std::defaultfloat;
  }
}

struct RunArgs {
  std::string model = "vgg16";
  std::string precision = "fixed:8";
  std::string hw = "lr";
  std::string tech = "sram16nm";
  double voltage = 1.0;
  std::string variant = "2d";
  Format format = Format::text;
  bool layers = false;
  bool plan_only = false;
  std::string out;
};

int cmd_run(const RunArgs& a) {
  Output out(a.out);
  auto& os = out.stream();
  SimConfig cfg;
  cfg.hw.mode = parse_hw_mode(a.hw);
  cfg.hw.variant = parse_variant(a.variant);
  cfg.tech = apply_voltage(resolve_profile(a.tech), a.voltage);
  const auto model = resolve_model(a.model);
  const auto precision = resolve_precision(a.precision);

  if (a.plan_only) {
    const auto p = plan(model, precision, cfg.hw);
    if (a.format == Format::json) os << to_json(p) << '\n';
    else os << to_text(p);
    return 0;
  }
  const auto r = simulate(model, precision, cfg);
  switch (a.format) {
    case Format::text:
      print_summary(os, r);
      if (a.layers) write_layers_csv(os, r);
      break;
    case Format::csv:
      if (a.layers) write_layers_csv(os, r);
      else write_csv(os, std::vector<CostReport>{r});
      break;
    case Format::json:
      write_json(os, std::vector<CostReport>{r}, a.layers);
      break;
  }
  return 0;
}

struct SweepArgs {
  std::vector<std::string> axes;
  unsigned threads = 0;
  std::string variant = "2d";
  Format format = Format::csv;
  std::string out;
};

int cmd_sweep(const SweepArgs& a) {
  SweepSpec spec;
  for (const auto& ax : a.axes) apply_axis(spec, ax);
  spec.threads = a.threads;
  spec.variant = parse_variant(a.variant);
  Output out(a.out);
  auto& os = out.stream();
  if (a.format == Format::json) {
    write_json(os, sweep(spec));
    return 0;
  }
  // CSV rows stream out as soon as each point (in order) is done.
  os << csv_header() << '\n';
  sweep(spec, [&](const CostReport& r) { os << csv_row(r) << '\n' << std::flush; });
  return 0;
}

struct PeakArgs {
  std::vector<unsigned> bits{1, 8, 16};
  std::string tech = "sram16nm";
  Format format = Format::csv;
  std::string out;
};

int cmd_peak(const PeakArgs& a) {
  SimConfig cfg;
  cfg.tech = resolve_profile(a.tech);
  std::vector<PeakMetrics> rows;
  for (unsigned b : a.bits) rows.push_back(peak_metrics(b, cfg));
  Output out(a.out);
  if (a.format == Format::json) write_json(out.stream(), rows);
  else write_csv(out.stream(), rows);
  return 0;
}

struct MixedArgs {
  std::string model = "resnet18";
  std::vector<std::string> configs{"resnet18-int4", "resnet18-low", "resnet18-medium", "resnet18-high",
                                   "resnet18-int8"};
  std::string baseline = "fixed:8";
  std::string tech = "sram16nm";
  Format format = Format::csv;
  std::string out;
};

int cmd_mixed(const MixedArgs& a) {
  SimConfig cfg;
  cfg.tech = resolve_profile(a.tech);
  std::vector<PrecisionConfig> configs;
  for (const auto& c : a.configs) configs.push_back(resolve_precision(c));
  const auto rows = evaluate_mixed_precision(resolve_model(a.model), configs, cfg, resolve_precision(a.baseline));
  Output out(a.out);
  if (a.format == Format::json) write_json(out.stream(), rows);
  else write_csv(out.stream(), rows);
  return 0;
}

struct CalibrateArgs {
  std::string model = "vgg16";
  std::vector<unsigned> bits{2, 3, 4, 5, 6, 7, 8};
  std::vector<double> targets = default_ratio_targets();
  std::string sram = "sram16nm";
  std::string reram = "reram16nm";
  Format format = Format::csv;
  std::string out;
};

int cmd_calibrate(const CalibrateArgs& a) {
  SimConfig cfg;
  cfg.tech = resolve_profile(a.sram);
  const auto cal = calibrate_compare_energy(resolve_model(a.model), a.bits, a.targets, cfg, resolve_profile(a.reram));
  Output out(a.out);
  if (a.format == Format::json) write_json(out.stream(), cal);
  else write_csv(out.stream(), cal);
  std::cerr << "e_compare_cell = " << format_sig(cal.e_compare_cell) << " J (rms log error "
            << format_sig(cal.rms_log_error) << ")\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"apsim: associative-processor CNN accelerator simulator"};
  app.require_subcommand(1);
  std::string data;
  app.add_option("--data-dir", data, "Directory with models/, precisions/ and tech/")->envname("APSIM_DATA_DIR");

  RunArgs run;
  auto* c_run = app.add_subcommand("run", "Estimate one inference");
  c_run->add_option("--model", run.model, "Bundled model name or model file")->capture_default_str();
  c_run->add_option("--precision", run.precision, "fixed:N, bundled config name or precision file")
      ->capture_default_str();
  c_run->add_option("--hw", run.hw, "ir or lr")->capture_default_str();
  c_run->add_option("--tech", run.tech, "Bundled profile name or .tech file")->capture_default_str();
  c_run->add_option("--voltage", run.voltage, "Supply voltage (an operating point of the profile)")
      ->capture_default_str();
  c_run->add_option("--variant", run.variant, "AP variant: 1d, 2d or 2dseg")->capture_default_str();
  c_run->add_flag("--layers", run.layers, "Include per-layer costs");
  c_run->add_flag("--plan", run.plan_only, "Print the execution plan instead of costs");
  c_run->add_option("--out", run.out, "Output file (default stdout)");
  add_format(c_run, run.format, true);

  SweepArgs sw;
  auto* c_sweep = app.add_subcommand("sweep", "Design-space sweep over the Cartesian product of axes");
  c_sweep->add_option("--axis", sw.axes, "name=v1,v2,... for model, precision, tech, voltage, hw")
      ->take_all();
  c_sweep->add_option("--threads", sw.threads, "Worker threads (0 = all cores)");
  c_sweep->add_option("--variant", sw.variant, "AP variant: 1d, 2d or 2dseg")->capture_default_str();
  c_sweep->add_option("--out", sw.out, "Output file (default stdout)");
  add_format(c_sweep, sw.format, false);

  PeakArgs pk;
  auto* c_peak = app.add_subcommand("peak", "Convolution-only peak throughput and efficiency");
  c_peak->add_option("--bits", pk.bits, "Precisions to report")->take_all()->check(CLI::Range(1u, kMaxPeakBits));
  c_peak->add_option("--tech", pk.tech, "Bundled profile name or .tech file")->capture_default_str();
  c_peak->add_option("--out", pk.out, "Output file (default stdout)");
  add_format(c_peak, pk.format, false);

  cli::EmulateOptions em;
  std::string em_op = "add";
  std::string em_variant = "2d";
  auto* c_em = app.add_subcommand("emulate", "Run one AP op on the emulated array and check it");
  c_em->add_option("--op", em_op, "add, multiply, reduce, matmat, relu, maxpool or avgpool")->required();
  c_em->add_option("--m", em.m, "Operand precision in bits")->required();
  c_em->add_option("--l", em.l, "Words in the array")->capture_default_str();
  c_em->add_option("--s", em.s, "Pooling window size")->capture_default_str();
  c_em->add_option("--k", em.k, "Pooling windows")->capture_default_str();
  c_em->add_option("--i", em.i, "Matmat rows of K")->capture_default_str();
  c_em->add_option("--j", em.j, "Matmat inner dimension")->capture_default_str();
  c_em->add_option("--u", em.u, "Matmat columns of P")->capture_default_str();
  c_em->add_option("--variant", em_variant, "1d, 2d or 2dseg")->capture_default_str();
  c_em->add_option("--seed", em.seed, "Random seed")->capture_default_str();
  c_em->add_option("--trials", em.trials, "Random instances to run")->capture_default_str();
  c_em->add_flag("--verbose", em.verbose, "Print every instance");

  MixedArgs mx;
  auto* c_mixed = app.add_subcommand("mixed", "Mixed-precision table normalised to a baseline");
  c_mixed->add_option("--model", mx.model, "Bundled model name or model file")->capture_default_str();
  c_mixed->add_option("--configs", mx.configs, "Precision configs (names or files)")->take_all();
  c_mixed->add_option("--baseline", mx.baseline, "Normalisation config")->capture_default_str();
  c_mixed->add_option("--tech", mx.tech, "Bundled profile name or .tech file")->capture_default_str();
  c_mixed->add_option("--out", mx.out, "Output file (default stdout)");
  add_format(c_mixed, mx.format, false);

  CalibrateArgs cal;
  auto* c_cal = app.add_subcommand("calibrate", "Fit the compare energy per cell to ReRAM/SRAM energy ratios");
  c_cal->add_option("--model", cal.model, "Bundled model name or model file")->capture_default_str();
  c_cal->add_option("--bits", cal.bits, "Fixed precisions of the target points")->take_all();
  c_cal->add_option("--targets", cal.targets, "ReRAM/SRAM energy ratios, one per precision")->take_all();
  c_cal->add_option("--sram", cal.sram, "Reference profile")->capture_default_str();
  c_cal->add_option("--reram", cal.reram, "Resistive profile")->capture_default_str();
  c_cal->add_option("--out", cal.out, "Output file (default stdout)");
  add_format(c_cal, cal.format, false);

  CLI11_PARSE(app, argc, argv);

  try {
    if (!data.empty()) setenv("APSIM_DATA_DIR", data.c_str(), 1);
    if (c_run->parsed()) return cmd_run(run);
    if (c_sweep->parsed()) return cmd_sweep(sw);
    if (c_peak->parsed()) return cmd_peak(pk);
    if (c_mixed->parsed()) return cmd_mixed(mx);
    if (c_cal->parsed()) return cmd_calibrate(cal);
    if (c_em->parsed()) {
      em.op = parse_op(em_op);
      em.variant = parse_variant(em_variant);
      return cli::run_emulate(em, std::cout) == 0 ? 0 : 3;
    }
  } catch (const apsim::Error& e) {
    std::cerr << "apsim: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
