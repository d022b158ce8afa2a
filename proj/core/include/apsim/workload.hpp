#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace apsim {

enum class LayerKind { conv, fc, maxpool, avgpool, relu, residual_add };

std::string_view to_string(LayerKind k);
LayerKind parse_layer_kind(std::string_view s);

struct Shape3 {
  std::uint64_t h = 1;
  std::uint64_t w = 1;
  std::uint64_t c = 1;

  [[nodiscard]] std::uint64_t elements() const { return h * w * c; }
  friend bool operator==(const Shape3&, const Shape3&) = default;
};

/// One layer. Convolutions use kh/kw/ck (C_I comes from the input shape);
/// fully connected layers use fc_in/fc_out; pooling uses the z x z window.
struct LayerSpec {
  std::string name;
  LayerKind kind = LayerKind::conv;
  Shape3 input;
  std::uint64_t kh = 1;
  std::uint64_t kw = 1;
  std::uint64_t ck = 1;
  std::uint64_t fc_in = 0;
  std::uint64_t fc_out = 0;
  std::uint64_t stride = 1;
  std::uint64_t pad = 0;
  std::uint64_t groups = 1;  // grouped convolution: each kernel sees C_I/groups channels
  std::uint64_t z = 1;
  std::string src;                // producer of the input when not the previous layer
  std::string skip;               // residual_add: producer of the second operand
  std::optional<unsigned> pinned; // fixed precision, outside any precision list

  [[nodiscard]] bool is_gemm() const { return kind == LayerKind::conv || kind == LayerKind::fc; }
  /// Output shape (floor convention); throws ShapeError when the window does
  /// not fit the padded input at least once.
  [[nodiscard]] Shape3 output() const;
};

struct ModelSpec {
  std::string name;
  std::vector<LayerSpec> layers;

  [[nodiscard]] const LayerSpec& layer(std::string_view name) const;
  [[nodiscard]] std::uint64_t weight_count() const;
  /// GEMM layers that take their precision from a PrecisionConfig.
  [[nodiscard]] std::size_t quantized_layer_count() const;
};

/// Text model format: one layer per line, `kind key=value ...`, e.g.
///   model vgg16
///   conv name=conv1_1 in=224x224x3 k=3x3x64 stride=1 pad=1
///   relu name=relu1_1 in=224x224x64
///   maxpool name=pool1 in=224x224x64 z=2 stride=2
///   fc name=fc6 in=7x7x512 out=4096
///   residual_add name=add1 in=56x56x256 skip=pool1
/// `src=` names the producing layer for branches, `pin=8` fixes precision,
/// `groups=2` splits a convolution into channel groups.
ModelSpec parse_model(std::string_view text);
ModelSpec load_model(const std::string& path);
std::string to_text(const ModelSpec& m);

/// Checks that every layer's input equals its producer's output.
void validate_chain(const ModelSpec& m);

struct Gemm {
  std::uint64_t rows = 0;
  std::uint64_t cols = 0;
};
struct Im2colDims {
  Gemm p;  // (H_K*W_K*C_I) x (H_O*W_O)
  Gemm k;  // C_K x (H_K*W_K*C_I)
  Gemm o;  // C_K x (H_O*W_O)
};

Im2colDims im2col_dims(const LayerSpec& layer);
std::uint64_t macs_of(const LayerSpec& layer);
std::uint64_t total_macs(const ModelSpec& m);

struct LayerPrecision {
  unsigned weight_bits = 8;
  unsigned activation_bits = 8;
  friend bool operator==(const LayerPrecision&, const LayerPrecision&) = default;
};

/// Either `fixed:N` or an explicit per-layer list over the quantized layers.
struct PrecisionConfig {
  std::string name;
  std::optional<unsigned> fixed;
  std::vector<LayerPrecision> layers;
  std::optional<double> top1_accuracy;  // metadata only, copied into reports
};

/// Lines of `w a` pairs (or a single number for w = a), or one `fixed:N` line.
/// Optional `name = ...` and `accuracy = <top-1 %>` lines add metadata.
PrecisionConfig parse_precision(std::string_view text);
PrecisionConfig load_precision(const std::string& path);
PrecisionConfig fixed_precision(unsigned bits);

/// Unweighted mean of max(w, a) over the listed layers (or N for fixed:N).
double average_precision(const PrecisionConfig& cfg);

/// Bitwidth M every layer of `m` runs at: GEMM layers use max(w, a) of their
/// entry (pinned layers keep their pin); other layers inherit the activation
/// precision of the layer feeding them.
std::vector<unsigned> layer_bitwidths(const ModelSpec& m, const PrecisionConfig& cfg);

/// Directory with the bundled data files (models/, precisions/, tech/).
std::string data_dir();
/// Built-in model name or a path to a model file.
ModelSpec resolve_model(const std::string& name_or_path);
/// `fixed:N`, a bundled config name ("resnet18-high"), or a path.
PrecisionConfig resolve_precision(const std::string& spec);

}  // namespace apsim
