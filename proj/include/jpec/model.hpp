#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "jpec/graph.hpp"
#include "jpec/linalg.hpp"

namespace jpec {

enum class NormMode { row, symmetric };
enum class Activation { relu, tanh, identity };

std::string to_string(NormMode mode);
std::string to_string(Activation act);
NormMode parse_norm_mode(const std::string& text);
Activation parse_activation(const std::string& text);

struct JpecConfig {
  // Layer widths from attribute dimension d to embedding width k. The decoder
  // mirrors them in reverse.
  std::vector<std::size_t> encoder_dims;
  // One per layer; empty means relu on hidden layers and identity on the last.
  std::vector<Activation> encoder_activations;
  std::vector<Activation> decoder_activations;
  double margin = 10.0;
  double beta = 1.0;
  double lambda = 1e-4;
  double learning_rate = 0.01;
  // Global gradient-norm clip; 0 disables.
  double grad_clip = 5.0;
  std::size_t epochs = 200;
  std::uint64_t seed = 0;
  NormMode norm_mode = NormMode::row;
  double negative_ratio = 1.0;

  std::size_t layers() const { return encoder_dims.empty() ? 0 : encoder_dims.size() - 1; }
  std::size_t embedding_dim() const { return encoder_dims.back(); }
  std::size_t attribute_dim() const { return encoder_dims.front(); }
  std::vector<std::size_t> decoder_dims() const;
  Activation encoder_activation(std::size_t layer) const;
  Activation decoder_activation(std::size_t layer) const;
};

// d → 256 → 64 with the documented defaults.
JpecConfig default_config(std::size_t attribute_dim);
void validate_config(const JpecConfig& cfg);

struct JpecModel {
  std::vector<DenseMatrix> encoder_weights;
  std::vector<DenseMatrix> decoder_weights;
  JpecConfig config;

  // Uniform ±sqrt(6/(fan_in+fan_out)) from a generator seeded by config.seed.
  static JpecModel initialize(const JpecConfig& cfg);
  double weight_norm_sq() const;
};

// Encoder: row mode gives D̃⁻¹Ã; symmetric mode symmetrizes (A ∨ Aᵀ) first and
// gives D̃^{-1/2}ÃD̃^{-1/2}.
SparseMatrix build_encoder_operator(const SparseMatrix& adj, NormMode mode);
// Laplacian sharpening 2I − P for the encoder operator P.
SparseMatrix build_decoder_operator(const SparseMatrix& adj, NormMode mode);

// Per-layer state kept for backprop: propagated input P·H and pre-activation.
struct LayerTrace {
  std::vector<DenseMatrix> propagated;
  std::vector<DenseMatrix> pre_activation;
};

struct PassResult {
  DenseMatrix output;
  LayerTrace trace;
};

PassResult encode(const JpecModel& model, const SparseMatrix& p_enc, const DenseMatrix& x);
PassResult decode(const JpecModel& model, const SparseMatrix& p_dec, const DenseMatrix& y);

// Σ over unordered pairs of 2·w·‖y_i − y_j‖².
double loss_pos(const DenseMatrix& y, const std::vector<LabeledPair>& pos);
// Same with weights −w for the −1 pairs.
double loss_neg(const DenseMatrix& y, const std::vector<LabeledPair>& neg);
double hinge_first_order(double l_pos, double l_neg, double margin);
double loss_first_order(const DenseMatrix& y, const std::vector<LabeledPair>& pos,
                        const std::vector<LabeledPair>& neg, double margin);
double loss_second_order(const DenseMatrix& x, const DenseMatrix& x_hat);

// L⁺ from +1 pairs and L⁻ from the flipped −1 pairs.
SparseMatrix positive_laplacian(const std::vector<LabeledPair>& pos, std::size_t n);
SparseMatrix negative_laplacian(const std::vector<LabeledPair>& neg, std::size_t n);

struct LossBreakdown {
  double pos = 0.0;
  double neg = 0.0;
  double first_order = 0.0;
  double second_order = 0.0;
  double regularizer = 0.0;  // sum of squared weight entries, before λ
  double total = 0.0;
};

// Everything the objective needs besides the weights.
struct Problem {
  SparseMatrix encoder_op;
  SparseMatrix encoder_op_t;
  SparseMatrix decoder_op;
  SparseMatrix decoder_op_t;
  DenseMatrix x;
  std::vector<LabeledPair> pos;
  std::vector<LabeledPair> neg;
  SparseMatrix lap_pos;
  SparseMatrix lap_neg;
};

Problem make_problem(const SparseMatrix& adj, DenseMatrix x, std::vector<LabeledPair> pos,
                     std::vector<LabeledPair> neg, NormMode mode);
Problem make_problem(const CompanyGraph& g, const std::vector<LabeledPair>& negatives, NormMode mode);

struct ForwardState {
  PassResult encoded;
  PassResult decoded;
};

ForwardState forward(const JpecModel& model, const Problem& problem);
LossBreakdown total_loss(const JpecModel& model, const Problem& problem, const ForwardState& state);
LossBreakdown total_loss(const JpecModel& model, const Problem& problem);

struct Gradients {
  std::vector<DenseMatrix> encoder;
  std::vector<DenseMatrix> decoder;

  double norm_sq() const;
};

// Exact gradient of total_loss with respect to every weight matrix.
Gradients backward(const JpecModel& model, const Problem& problem, const ForwardState& state,
                   const LossBreakdown& loss);

struct EpochRecord {
  std::size_t epoch = 0;
  LossBreakdown loss;
  double seconds = 0.0;
};

struct TrainReport {
  std::vector<EpochRecord> epochs;  // loss measured before each update
  std::optional<LossBreakdown> final_loss;  // after the last update
};

struct TrainResult {
  JpecModel model;
  TrainReport report;
};

// Full-batch gradient descent from the seeded initialization.
TrainResult train(const CompanyGraph& g, const std::vector<LabeledPair>& negatives, const JpecConfig& cfg);

// Encoder forward pass over the graph's supply operator.
DenseMatrix embed(const JpecModel& model, const CompanyGraph& g);

struct GradCheckResult {
  double max_relative_error = 0.0;
  std::size_t parameters = 0;
};

// Denominator floor for the gradient check, so entries that are exactly zero
// analytically are not judged on finite-difference rounding noise alone.
inline constexpr double kGradCheckFloor = 1e-6;

// Compares backward() against central differences on every weight entry.
// Relative error is |a − f| / max(kGradCheckFloor, |a|, |f|).
GradCheckResult gradient_check(const JpecModel& model, const Problem& problem, double eps = 1e-5);

}  // namespace jpec
