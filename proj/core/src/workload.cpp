#include "apsim/workload.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "apsim/errors.hpp"

#ifndef APSIM_DEFAULT_DATA_DIR
#define APSIM_DEFAULT_DATA_DIR "data"
#endif

namespace apsim {

std::string_view to_string(LayerKind k) {
  switch (k) {
    case LayerKind::conv: return "conv";
    case LayerKind::fc: return "fc";
    case LayerKind::maxpool: return "maxpool";
    case LayerKind::avgpool: return "avgpool";
    case LayerKind::relu: return "relu";
    case LayerKind::residual_add: return "residual_add";
  }
  return "?";
}

LayerKind parse_layer_kind(std::string_view s) {
  for (auto k : {LayerKind::conv, LayerKind::fc, LayerKind::maxpool, LayerKind::avgpool,
                 LayerKind::relu, LayerKind::residual_add}) {
    if (s == to_string(k)) return k;
  }
  throw ConfigError("unknown layer kind '" + std::string(s) + "'");
}

namespace {

// Floor convention of common frameworks; the window has to fit at least once.
std::uint64_t out_dim(std::uint64_t in, std::uint64_t k, std::uint64_t pad, std::uint64_t stride,
                      const std::string& layer) {
  if (stride == 0) throw ShapeError(layer + ": stride must be positive");
  if (in + 2 * pad < k) throw ShapeError(layer + ": window larger than padded input");
  return (in + 2 * pad - k) / stride + 1;
}

}  // namespace

Shape3 LayerSpec::output() const {
  switch (kind) {
    case LayerKind::conv:
      if (input.c % groups != 0 || ck % groups != 0) {
        throw ShapeError(name + ": channels not divisible by groups");
      }
      return {out_dim(input.h, kh, pad, stride, name), out_dim(input.w, kw, pad, stride, name), ck};
    case LayerKind::fc:
      if (fc_in != input.elements()) {
        throw ShapeError(name + ": fc input " + std::to_string(fc_in) + " does not match " +
                         std::to_string(input.elements()) + " incoming elements");
      }
      return {1, 1, fc_out};
    case LayerKind::maxpool:
    case LayerKind::avgpool:
      return {out_dim(input.h, z, pad, stride, name), out_dim(input.w, z, pad, stride, name), input.c};
    case LayerKind::relu:
    case LayerKind::residual_add:
      return input;
  }
  return input;
}

const LayerSpec& ModelSpec::layer(std::string_view n) const {
  for (const auto& l : layers)
    if (l.name == n) return l;
  throw UsageError("model " + name + " has no layer '" + std::string(n) + "'");
}

std::uint64_t ModelSpec::weight_count() const {
  std::uint64_t w = 0;
  for (const auto& l : layers) {
    if (l.kind == LayerKind::conv) w += l.kh * l.kw * (l.input.c / l.groups) * l.ck;
    if (l.kind == LayerKind::fc) w += l.fc_in * l.fc_out;
  }
  return w;
}

std::size_t ModelSpec::quantized_layer_count() const {
  std::size_t n = 0;
  for (const auto& l : layers)
    if (l.is_gemm() && !l.pinned) ++n;
  return n;
}

namespace {

std::uint64_t parse_uint(const std::string& s, const std::string& what) {
  if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos) {
    throw ConfigError("bad integer '" + s + "' for " + what);
  }
  return std::stoull(s);
}

std::vector<std::uint64_t> parse_dims(const std::string& s, const std::string& what) {
  std::vector<std::uint64_t> out;
  std::size_t start = 0;
  while (true) {
    const auto x = s.find('x', start);
    out.push_back(parse_uint(s.substr(start, x - start), what));
    if (x == std::string::npos) break;
    start = x + 1;
  }
  return out;
}

Shape3 parse_shape(const std::string& s, const std::string& what) {
  const auto d = parse_dims(s, what);
  if (d.size() == 3) return {d[0], d[1], d[2]};
  if (d.size() == 1) return {1, 1, d[0]};
  throw ConfigError(what + " must be HxWxC or a flat count");
}

std::string read_file(const std::string& path, const char* what) {
  std::ifstream in(path);
  if (!in) throw ConfigError(std::string("cannot open ") + what + " '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

ModelSpec parse_model(std::string_view text) {
  ModelSpec m;
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::string head;
    if (!(ls >> head)) continue;
    const std::string where = "line " + std::to_string(lineno);
    if (head == "model") {
      ls >> m.name;
      continue;
    }
    LayerSpec l;
    l.kind = parse_layer_kind(head);
    bool have_in = false;
    std::string kv;
    while (ls >> kv) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) throw ConfigError(where + ": expected key=value, got '" + kv + "'");
      const std::string key = kv.substr(0, eq);
      const std::string val = kv.substr(eq + 1);
      if (key == "name") {
        l.name = val;
      } else if (key == "in") {
        l.input = parse_shape(val, where + " in");
        have_in = true;
      } else if (key == "k") {
        const auto d = parse_dims(val, where + " k");
        if (d.size() != 3) throw ConfigError(where + ": k must be HKxWKxCK");
        l.kh = d[0];
        l.kw = d[1];
        l.ck = d[2];
      } else if (key == "out") {
        l.fc_out = parse_uint(val, where + " out");
      } else if (key == "stride") {
        l.stride = parse_uint(val, where + " stride");
      } else if (key == "pad") {
        l.pad = parse_uint(val, where + " pad");
      } else if (key == "groups") {
        l.groups = parse_uint(val, where + " groups");
        if (l.groups == 0) throw ConfigError(where + ": groups must be positive");
      } else if (key == "z") {
        l.z = parse_uint(val, where + " z");
      } else if (key == "src") {
        l.src = val;
      } else if (key == "skip") {
        l.skip = val;
      } else if (key == "pin") {
        l.pinned = static_cast<unsigned>(parse_uint(val, where + " pin"));
      } else {
        throw ConfigError(where + ": unknown key '" + key + "'");
      }
    }
    if (!have_in) throw ConfigError(where + ": layer needs in=");
    if (l.name.empty()) l.name = std::string(to_string(l.kind)) + std::to_string(m.layers.size());
    if (l.kind == LayerKind::fc) {
      l.fc_in = l.input.elements();
      if (l.fc_out == 0) throw ConfigError(where + ": fc needs out=");
    }
    if (l.kind == LayerKind::residual_add && l.skip.empty()) {
      throw ConfigError(where + ": residual_add needs skip=");
    }
    m.layers.push_back(std::move(l));
  }
  return m;
}

ModelSpec load_model(const std::string& path) { return parse_model(read_file(path, "model")); }

std::string to_text(const ModelSpec& m) {
  std::ostringstream os;
  os << "model " << m.name << '\n';
  for (const auto& l : m.layers) {
    os << to_string(l.kind) << " name=" << l.name << " in=" << l.input.h << 'x' << l.input.w << 'x'
       << l.input.c;
    if (l.kind == LayerKind::conv) os << " k=" << l.kh << 'x' << l.kw << 'x' << l.ck;
    if (l.groups != 1) os << " groups=" << l.groups;
    if (l.kind == LayerKind::fc) os << " out=" << l.fc_out;
    if (l.kind == LayerKind::maxpool || l.kind == LayerKind::avgpool) os << " z=" << l.z;
    if (l.kind == LayerKind::conv || l.kind == LayerKind::maxpool || l.kind == LayerKind::avgpool) {
      os << " stride=" << l.stride << " pad=" << l.pad;
    }
    if (!l.src.empty()) os << " src=" << l.src;
    if (!l.skip.empty()) os << " skip=" << l.skip;
    if (l.pinned) os << " pin=" << *l.pinned;
    os << '\n';
  }
  return os.str();
}

void validate_chain(const ModelSpec& m) {
  std::map<std::string, Shape3> produced;
  const LayerSpec* prev = nullptr;
  for (const auto& l : m.layers) {
    if (produced.count(l.name)) throw ShapeError("duplicate layer name '" + l.name + "'");
    if (!l.src.empty() || prev != nullptr) {
      Shape3 feed;
      std::string from;
      if (!l.src.empty()) {
        auto it = produced.find(l.src);
        if (it == produced.end()) throw ShapeError(l.name + ": unknown src '" + l.src + "'");
        feed = it->second;
        from = l.src;
      } else {
        feed = prev->output();
        from = prev->name;
      }
      const bool flat_ok = l.kind == LayerKind::fc && feed.elements() == l.input.elements();
      if (!(feed == l.input) && !flat_ok) {
        throw ShapeError(l.name + ": input " + std::to_string(l.input.h) + "x" +
                         std::to_string(l.input.w) + "x" + std::to_string(l.input.c) +
                         " does not match output of " + from);
      }
    }
    if (l.kind == LayerKind::residual_add) {
      auto it = produced.find(l.skip);
      if (it == produced.end()) throw ShapeError(l.name + ": unknown skip '" + l.skip + "'");
      if (!(it->second == l.input)) throw ShapeError(l.name + ": skip operand shape mismatch");
    }
    produced[l.name] = l.output();
    prev = &l;
  }
}

Im2colDims im2col_dims(const LayerSpec& l) {
  if (l.kind == LayerKind::fc) {
    return {{l.fc_in, 1}, {l.fc_out, l.fc_in}, {l.fc_out, 1}};
  }
  if (l.kind != LayerKind::conv) throw UsageError(l.name + ": im2col applies to conv and fc layers");
  const Shape3 o = l.output();
  const std::uint64_t patch = l.kh * l.kw * (l.input.c / l.groups);
  const std::uint64_t pixels = o.h * o.w;
  return {{patch, pixels}, {l.ck, patch}, {l.ck, pixels}};
}

std::uint64_t macs_of(const LayerSpec& l) {
  if (!l.is_gemm()) return 0;
  const auto d = im2col_dims(l);
  return d.k.rows * d.k.cols * d.p.cols;
}

std::uint64_t total_macs(const ModelSpec& m) {
  std::uint64_t total = 0;
  for (const auto& l : m.layers) total += macs_of(l);
  return total;
}

PrecisionConfig fixed_precision(unsigned bits) {
  if (bits < 1 || bits > 16) throw ConfigError("fixed precision must be in 1..16");
  PrecisionConfig c;
  c.name = "fixed:" + std::to_string(bits);
  c.fixed = bits;
  return c;
}

PrecisionConfig parse_precision(std::string_view text) {
  PrecisionConfig c;
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::string first;
    if (!(ls >> first)) continue;
    if (first == "name") {
      std::string eq;
      ls >> eq >> c.name;
      continue;
    }
    if (first == "accuracy") {
      std::string eq;
      double a = 0;
      if (!(ls >> eq >> a) || eq != "=") throw ConfigError("line " + std::to_string(lineno) + ": expected accuracy = <percent>");
      c.top1_accuracy = a;
      continue;
    }
    if (first.rfind("fixed:", 0) == 0) {
      const auto name = c.name;
      const auto acc = c.top1_accuracy;
      c = fixed_precision(static_cast<unsigned>(std::stoul(first.substr(6))));
      if (!name.empty()) c.name = name;
      c.top1_accuracy = acc;
      continue;
    }
    auto bits = [&](const std::string& s) {
      if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos) {
        throw ConfigError("line " + std::to_string(lineno) + ": bad bitwidth '" + s + "'");
      }
      const auto b = std::stoul(s);
      if (b < 1 || b > 16) throw ConfigError("line " + std::to_string(lineno) + ": bitwidth outside 1..16");
      return static_cast<unsigned>(b);
    };
    LayerPrecision lp;
    lp.weight_bits = bits(first);
    std::string second;
    lp.activation_bits = (ls >> second) ? bits(second) : lp.weight_bits;
    c.layers.push_back(lp);
  }
  if (c.fixed && !c.layers.empty()) throw ConfigError("precision config mixes fixed:N with a layer list");
  if (!c.fixed && c.layers.empty()) throw ConfigError("precision config is empty");
  return c;
}

PrecisionConfig load_precision(const std::string& path) {
  auto c = parse_precision(read_file(path, "precision config"));
  if (c.name.empty()) c.name = std::filesystem::path(path).stem().string();
  return c;
}

double average_precision(const PrecisionConfig& cfg) {
  if (cfg.fixed) return *cfg.fixed;
  if (cfg.layers.empty()) throw ConfigError("average of an empty precision config");
  double sum = 0;
  for (const auto& l : cfg.layers) sum += std::max(l.weight_bits, l.activation_bits);
  return sum / static_cast<double>(cfg.layers.size());
}

std::vector<unsigned> layer_bitwidths(const ModelSpec& m, const PrecisionConfig& cfg) {
  if (!cfg.fixed && cfg.layers.size() != m.quantized_layer_count()) {
    throw ConfigError("precision config has " + std::to_string(cfg.layers.size()) +
                      " entries but model " + m.name + " has " +
                      std::to_string(m.quantized_layer_count()) + " quantized layers");
  }
  std::vector<unsigned> out;
  std::map<std::string, unsigned> act;  // activation precision leaving each layer
  std::size_t next = 0;
  unsigned prev_act = cfg.fixed ? *cfg.fixed : 8;
  for (const auto& l : m.layers) {
    const unsigned incoming = l.src.empty() ? prev_act : act.at(l.src);
    unsigned bits = incoming;
    unsigned leaving = incoming;
    if (l.is_gemm()) {
      LayerPrecision lp;
      if (l.pinned) lp = {*l.pinned, *l.pinned};
      else if (cfg.fixed) lp = {*cfg.fixed, *cfg.fixed};
      else lp = cfg.layers[next++];
      bits = std::max(lp.weight_bits, lp.activation_bits);
      leaving = lp.activation_bits;
    } else if (l.kind == LayerKind::residual_add) {
      bits = std::max(incoming, act.at(l.skip));
      leaving = bits;
    }
    out.push_back(bits);
    act[l.name] = leaving;
    prev_act = leaving;
  }
  return out;
}

std::string data_dir() {
  if (const char* env = std::getenv("APSIM_DATA_DIR"); env != nullptr && *env != '\0') return env;
  return APSIM_DEFAULT_DATA_DIR;
}

ModelSpec resolve_model(const std::string& name_or_path) {
  const auto bundled = std::filesystem::path(data_dir()) / "models" / (name_or_path + ".model");
  ModelSpec m = std::filesystem::exists(bundled) ? load_model(bundled.string()) : load_model(name_or_path);
  validate_chain(m);
  return m;
}

PrecisionConfig resolve_precision(const std::string& spec) {
  if (spec.rfind("fixed:", 0) == 0) return parse_precision(spec);
  const auto bundled = std::filesystem::path(data_dir()) / "precisions" / (spec + ".prec");
  if (std::filesystem::exists(bundled)) return load_precision(bundled.string());
  return load_precision(spec);
}

}  // namespace apsim
