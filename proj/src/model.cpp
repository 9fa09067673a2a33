#include "jpec/model.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <random>

#include "jpec/error.hpp"

namespace jpec {
namespace {

double activate(Activation act, double v) {
  switch (act) {
    case Activation::relu:
      return v > 0.0 ? v : 0.0;
    case Activation::tanh:
      return std::tanh(v);
    case Activation::identity:
      return v;
  }
  return v;
}

// Derivative expressed through the pre-activation value.
double activate_grad(Activation act, double pre) {
  switch (act) {
    case Activation::relu:
      return pre > 0.0 ? 1.0 : 0.0;
    case Activation::tanh: {
      const double t = std::tanh(pre);
      return 1.0 - t * t;
    }
    case Activation::identity:
      return 1.0;
  }
  return 1.0;
}

DenseMatrix apply_activation(Activation act, const DenseMatrix& pre) {
  DenseMatrix out = pre;
  if (act == Activation::identity) return out;
  for (double& v : out.values()) v = activate(act, v);
  return out;
}

// Shared forward body for encoder and decoder stacks.
PassResult run_stack(const std::vector<DenseMatrix>& weights, const SparseMatrix& op, const DenseMatrix& input,
                     const std::function<Activation(std::size_t)>& activation_of, const char* name) {
  if (op.rows() != op.cols() || op.cols() != input.rows()) {
    throw Error(std::string(name) + ": operator " + op.shape() + " incompatible with input " + input.shape());
  }
  if (!weights.empty() && input.cols() != weights.front().rows()) {
    throw Error(std::string(name) + ": input width " + std::to_string(input.cols()) +
                " does not match first weight " + weights.front().shape());
  }
  PassResult result;
  DenseMatrix h = input;
  for (std::size_t l = 0; l < weights.size(); ++l) {
    DenseMatrix propagated = spmm(op, h);
    DenseMatrix pre = matmul(propagated, weights[l]);
    h = apply_activation(activation_of(l), pre);
    if (!h.all_finite()) {
      throw Error(std::string(name) + ": non-finite activation output at layer " + std::to_string(l));
    }
    result.trace.propagated.push_back(std::move(propagated));
    result.trace.pre_activation.push_back(std::move(pre));
  }
  result.output = std::move(h);
  return result;
}

// Backprop through a stack given dL/d(output); returns dL/d(input) and fills
// weight gradients.
DenseMatrix backprop_stack(const std::vector<DenseMatrix>& weights, const SparseMatrix& op_t,
                           const LayerTrace& trace, DenseMatrix grad_out,
                           const std::function<Activation(std::size_t)>& activation_of,
                           std::vector<DenseMatrix>& weight_grads) {
  if (trace.propagated.size() != weights.size() || trace.pre_activation.size() != weights.size()) {
    throw Error("backward: missing forward cache");
  }
  weight_grads.assign(weights.size(), DenseMatrix());
  for (std::size_t l = weights.size(); l-- > 0;) {
    const Activation act = activation_of(l);
    if (act != Activation::identity) {
      const auto pre = trace.pre_activation[l].values();
      auto g = grad_out.values();
      for (std::size_t k = 0; k < g.size(); ++k) g[k] *= activate_grad(act, pre[k]);
    }
    weight_grads[l] = matmul_tn(trace.propagated[l], grad_out);
    const DenseMatrix grad_propagated = matmul_nt(grad_out, weights[l]);
    grad_out = spmm(op_t, grad_propagated);
  }
  return grad_out;
}

double pair_sum(const DenseMatrix& y, const std::vector<LabeledPair>& pairs, int expected_sign,
                const char* name) {
  double total = 0.0;
  for (const auto& p : pairs) {
    if (p.i >= y.rows() || p.j >= y.rows()) {
      throw Error(std::string(name) + ": pair (" + std::to_string(p.i) + "," + std::to_string(p.j) +
                  ") out of range for " + std::to_string(y.rows()) + " rows");
    }
    if (p.w * expected_sign <= 0) {
      throw Error(std::string(name) + ": pair (" + std::to_string(p.i) + "," + std::to_string(p.j) +
                  ") has weight " + std::to_string(p.w));
    }
    const auto a = y.row(p.i);
    const auto b = y.row(p.j);
    double dist = 0.0;
    for (std::size_t c = 0; c < a.size(); ++c) {
      const double d = a[c] - b[c];
      dist += d * d;
    }
    total += 2.0 * static_cast<double>(p.w * expected_sign) * dist;
  }
  return total;
}

SparseMatrix laplacian_of(const std::vector<LabeledPair>& pairs, std::size_t n, int sign) {
  std::vector<WeightedPair> weighted;
  weighted.reserve(pairs.size());
  for (const auto& p : pairs) weighted.push_back({p.i, p.j, static_cast<double>(sign * p.w)});
  return laplacian_from_pairs(weighted, n);
}

}  // namespace

std::string to_string(NormMode mode) { return mode == NormMode::row ? "row" : "symmetric"; }

std::string to_string(Activation act) {
  switch (act) {
    case Activation::relu:
      return "relu";
    case Activation::tanh:
      return "tanh";
    case Activation::identity:
      return "identity";
  }
  return "identity";
}

NormMode parse_norm_mode(const std::string& text) {
  if (text == "row") return NormMode::row;
  if (text == "symmetric") return NormMode::symmetric;
  throw Error("unknown norm mode '" + text + "' (expected row or symmetric)");
}

Activation parse_activation(const std::string& text) {
  if (text == "relu") return Activation::relu;
  if (text == "tanh") return Activation::tanh;
  if (text == "identity") return Activation::identity;
  throw Error("unknown activation '" + text + "' (expected relu, tanh or identity)");
}

std::vector<std::size_t> JpecConfig::decoder_dims() const {
  return {encoder_dims.rbegin(), encoder_dims.rend()};
}

Activation JpecConfig::encoder_activation(std::size_t layer) const {
  if (!encoder_activations.empty()) return encoder_activations.at(layer);
  return layer + 1 == layers() ? Activation::identity : Activation::relu;
}

Activation JpecConfig::decoder_activation(std::size_t layer) const {
  if (!decoder_activations.empty()) return decoder_activations.at(layer);
  return layer + 1 == layers() ? Activation::identity : Activation::relu;
}

JpecConfig default_config(std::size_t attribute_dim) {
  JpecConfig cfg;
  cfg.encoder_dims = {attribute_dim, 256, 64};
  return cfg;
}

void validate_config(const JpecConfig& cfg) {
  if (cfg.encoder_dims.size() < 2) throw Error("config: encoder_dims needs at least two widths");
  for (std::size_t w : cfg.encoder_dims) {
    if (w == 0) throw Error("config: layer widths must be >= 1");
  }
  const std::size_t layers = cfg.layers();
  if (!cfg.encoder_activations.empty() && cfg.encoder_activations.size() != layers) {
    throw Error("config: encoder_activations has " + std::to_string(cfg.encoder_activations.size()) +
                " entries for " + std::to_string(layers) + " layers");
  }
  if (!cfg.decoder_activations.empty() && cfg.decoder_activations.size() != layers) {
    throw Error("config: decoder_activations has " + std::to_string(cfg.decoder_activations.size()) +
                " entries for " + std::to_string(layers) + " layers");
  }
  if (!(cfg.margin >= 0.0)) throw Error("config: margin must be >= 0");
  if (!(cfg.beta >= 0.0)) throw Error("config: beta must be >= 0");
  if (!(cfg.lambda >= 0.0)) throw Error("config: lambda must be >= 0");
  if (!(cfg.learning_rate > 0.0)) throw Error("config: learning_rate must be > 0");
  if (!(cfg.grad_clip >= 0.0)) throw Error("config: grad_clip must be >= 0");
  if (!(cfg.negative_ratio > 0.0)) throw Error("config: negative_ratio must be > 0");
}

JpecModel JpecModel::initialize(const JpecConfig& cfg) {
  validate_config(cfg);
  JpecModel model;
  model.config = cfg;
  std::mt19937_64 rng(cfg.seed);
  const auto make_layer = [&rng](std::size_t fan_in, std::size_t fan_out) {
    const double bound = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
    std::uniform_real_distribution<double> dist(-bound, bound);
    DenseMatrix w(fan_in, fan_out);
    for (double& v : w.values()) v = dist(rng);
    return w;
  };
  const auto& enc = cfg.encoder_dims;
  for (std::size_t l = 0; l + 1 < enc.size(); ++l) model.encoder_weights.push_back(make_layer(enc[l], enc[l + 1]));
  const auto dec = cfg.decoder_dims();
  for (std::size_t l = 0; l + 1 < dec.size(); ++l) model.decoder_weights.push_back(make_layer(dec[l], dec[l + 1]));
  return model;
}

double JpecModel::weight_norm_sq() const {
  double sum = 0.0;
  for (const auto& w : encoder_weights) sum += frobenius_sq(w);
  for (const auto& w : decoder_weights) sum += frobenius_sq(w);
  return sum;
}

SparseMatrix build_encoder_operator(const SparseMatrix& adj, NormMode mode) {
  if (!adj.square()) throw Error("build_encoder_operator: adjacency must be square, got " + adj.shape());
  if (mode == NormMode::row) return row_normalize(add_self_loops(adj));
  const SparseMatrix undirected = binarize(add(binarize(adj), binarize(adj.transpose())));
  return sym_normalize(add_self_loops(undirected));
}

SparseMatrix build_decoder_operator(const SparseMatrix& adj, NormMode mode) {
  const SparseMatrix p = build_encoder_operator(adj, mode);
  return add(scale(SparseMatrix::identity(p.rows()), 2.0), scale(p, -1.0));
}

PassResult encode(const JpecModel& model, const SparseMatrix& p_enc, const DenseMatrix& x) {
  if (model.encoder_weights.empty()) throw Error("encode: model has no encoder layers");
  return run_stack(model.encoder_weights, p_enc, x,
                   [&](std::size_t l) { return model.config.encoder_activation(l); }, "encode");
}

PassResult decode(const JpecModel& model, const SparseMatrix& p_dec, const DenseMatrix& y) {
  if (model.decoder_weights.empty()) throw Error("decode: model has no decoder layers");
  return run_stack(model.decoder_weights, p_dec, y,
                   [&](std::size_t l) { return model.config.decoder_activation(l); }, "decode");
}

double loss_pos(const DenseMatrix& y, const std::vector<LabeledPair>& pos) {
  return pair_sum(y, pos, +1, "loss_pos");
}

double loss_neg(const DenseMatrix& y, const std::vector<LabeledPair>& neg) {
  return pair_sum(y, neg, -1, "loss_neg");
}

double hinge_first_order(double l_pos, double l_neg, double margin) {
  return l_pos + std::max(0.0, margin - l_neg);
}

double loss_first_order(const DenseMatrix& y, const std::vector<LabeledPair>& pos,
                        const std::vector<LabeledPair>& neg, double margin) {
  if (!(margin >= 0.0)) throw Error("loss_first_order: margin must be >= 0");
  return hinge_first_order(loss_pos(y, pos), loss_neg(y, neg), margin);
}

double loss_second_order(const DenseMatrix& x, const DenseMatrix& x_hat) {
  if (x.rows() != x_hat.rows() || x.cols() != x_hat.cols()) {
    throw Error("loss_second_order: shape mismatch " + x.shape() + " vs " + x_hat.shape());
  }
  double sum = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double d = x.values()[k] - x_hat.values()[k];
    sum += d * d;
  }
  return sum;
}

SparseMatrix positive_laplacian(const std::vector<LabeledPair>& pos, std::size_t n) {
  return laplacian_of(pos, n, +1);
}

SparseMatrix negative_laplacian(const std::vector<LabeledPair>& neg, std::size_t n) {
  return laplacian_of(neg, n, -1);
}

Problem make_problem(const SparseMatrix& adj, DenseMatrix x, std::vector<LabeledPair> pos,
                     std::vector<LabeledPair> neg, NormMode mode) {
  if (adj.rows() != x.rows()) {
    throw Error("make_problem: adjacency " + adj.shape() + " does not match attributes " + x.shape());
  }
  Problem p;
  p.encoder_op = build_encoder_operator(adj, mode);
  p.encoder_op_t = p.encoder_op.transpose();
  p.decoder_op = build_decoder_operator(adj, mode);
  p.decoder_op_t = p.decoder_op.transpose();
  p.lap_pos = positive_laplacian(pos, x.rows());
  p.lap_neg = negative_laplacian(neg, x.rows());
  p.x = std::move(x);
  p.pos = std::move(pos);
  p.neg = std::move(neg);
  return p;
}

Problem make_problem(const CompanyGraph& g, const std::vector<LabeledPair>& negatives, NormMode mode) {
  PairSets pairs = competitor_pair_sets(g, negatives);
  return make_problem(supply_adjacency(g), g.attributes, std::move(pairs.pos), std::move(pairs.neg), mode);
}

ForwardState forward(const JpecModel& model, const Problem& problem) {
  ForwardState state;
  state.encoded = encode(model, problem.encoder_op, problem.x);
  state.decoded = decode(model, problem.decoder_op, state.encoded.output);
  return state;
}

LossBreakdown total_loss(const JpecModel& model, const Problem& problem, const ForwardState& state) {
  const JpecConfig& cfg = model.config;
  LossBreakdown out;
  out.pos = loss_pos(state.encoded.output, problem.pos);
  out.neg = loss_neg(state.encoded.output, problem.neg);
  out.first_order = hinge_first_order(out.pos, out.neg, cfg.margin);
  out.second_order = loss_second_order(problem.x, state.decoded.output);
  out.regularizer = model.weight_norm_sq();
  out.total = out.first_order + cfg.beta * out.second_order + cfg.lambda * out.regularizer;
  return out;
}

LossBreakdown total_loss(const JpecModel& model, const Problem& problem) {
  return total_loss(model, problem, forward(model, problem));
}

double Gradients::norm_sq() const {
  double sum = 0.0;
  for (const auto& g : encoder) sum += frobenius_sq(g);
  for (const auto& g : decoder) sum += frobenius_sq(g);
  return sum;
}

Gradients backward(const JpecModel& model, const Problem& problem, const ForwardState& state,
                   const LossBreakdown& loss) {
  const JpecConfig& cfg = model.config;
  const DenseMatrix& y = state.encoded.output;
  const DenseMatrix& x_hat = state.decoded.output;
  if (x_hat.rows() != problem.x.rows() || x_hat.cols() != problem.x.cols()) {
    throw Error("backward: missing or mismatched decoder cache");
  }

  // dL/dX̂ = 2β(X̂ − X)
  DenseMatrix grad_x_hat(x_hat.rows(), x_hat.cols());
  for (std::size_t k = 0; k < x_hat.size(); ++k) {
    grad_x_hat.values()[k] = 2.0 * cfg.beta * (x_hat.values()[k] - problem.x.values()[k]);
  }

  Gradients grads;
  DenseMatrix grad_y = backprop_stack(model.decoder_weights, problem.decoder_op_t, state.decoded.trace,
                                      std::move(grad_x_hat),
                                      [&](std::size_t l) { return cfg.decoder_activation(l); }, grads.decoder);

  // Eigenmap terms: ∂L_pos/∂Y = 4L⁺Y; the active hinge adds −4L⁻Y. At the
  // kink (L_neg == m) the hinge contributes nothing.
  const DenseMatrix pull = spmm(problem.lap_pos, y);
  const bool hinge_active = cfg.margin - loss.neg > 0.0;
  const DenseMatrix push = hinge_active ? spmm(problem.lap_neg, y) : DenseMatrix();
  for (std::size_t k = 0; k < y.size(); ++k) {
    double g = 4.0 * pull.values()[k];
    if (hinge_active) g -= 4.0 * push.values()[k];
    grad_y.values()[k] += g;
  }

  backprop_stack(model.encoder_weights, problem.encoder_op_t, state.encoded.trace, std::move(grad_y),
                 [&](std::size_t l) { return cfg.encoder_activation(l); }, grads.encoder);

  const auto add_reg = [&](std::vector<DenseMatrix>& g, const std::vector<DenseMatrix>& w) {
    for (std::size_t l = 0; l < g.size(); ++l) {
      for (std::size_t k = 0; k < g[l].size(); ++k) g[l].values()[k] += 2.0 * cfg.lambda * w[l].values()[k];
    }
  };
  add_reg(grads.encoder, model.encoder_weights);
  add_reg(grads.decoder, model.decoder_weights);
  return grads;
}

TrainResult train(const CompanyGraph& g, const std::vector<LabeledPair>& negatives, const JpecConfig& cfg) {
  require_valid(g);
  validate_config(cfg);
  if (cfg.attribute_dim() != g.attributes.cols()) {
    throw Error("train: encoder input width " + std::to_string(cfg.attribute_dim()) +
                " does not match attribute dimension " + std::to_string(g.attributes.cols()));
  }
  const Problem problem = make_problem(g, negatives, cfg.norm_mode);
  TrainResult result{JpecModel::initialize(cfg), {}};
  JpecModel& model = result.model;

  const auto check_finite = [](const LossBreakdown& loss, std::size_t epoch) {
    if (!std::isfinite(loss.total)) {
      throw Error("train: non-finite loss at epoch " + std::to_string(epoch));
    }
  };

  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    const auto start = std::chrono::steady_clock::now();
    ForwardState state;
    try {
      state = forward(model, problem);
    } catch (const Error& e) {
      throw Error("train: diverged at epoch " + std::to_string(epoch) + ": " + e.what());
    }
    const LossBreakdown loss = total_loss(model, problem, state);
    check_finite(loss, epoch);
    Gradients grads = backward(model, problem, state, loss);

    double step = cfg.learning_rate;
    if (cfg.grad_clip > 0.0) {
      const double norm = std::sqrt(grads.norm_sq());
      if (norm > cfg.grad_clip) step *= cfg.grad_clip / norm;
    }
    const auto apply = [step](std::vector<DenseMatrix>& weights, const std::vector<DenseMatrix>& g) {
      for (std::size_t l = 0; l < weights.size(); ++l) {
        for (std::size_t k = 0; k < weights[l].size(); ++k) weights[l].values()[k] -= step * g[l].values()[k];
      }
    };
    apply(model.encoder_weights, grads.encoder);
    apply(model.decoder_weights, grads.decoder);

    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    result.report.epochs.push_back({epoch, loss, seconds});
  }

  if (cfg.epochs > 0) {
    try {
      const LossBreakdown final_loss = total_loss(model, problem);
      check_finite(final_loss, cfg.epochs);
      result.report.final_loss = final_loss;
    } catch (const Error& e) {
      throw Error("train: diverged at epoch " + std::to_string(cfg.epochs) + ": " + e.what());
    }
  }
  return result;
}

DenseMatrix embed(const JpecModel& model, const CompanyGraph& g) {
  require_valid(g);
  const SparseMatrix op = build_encoder_operator(supply_adjacency(g), model.config.norm_mode);
  return encode(model, op, g.attributes).output;
}

GradCheckResult gradient_check(const JpecModel& model, const Problem& problem, double eps) {
  const ForwardState state = forward(model, problem);
  const LossBreakdown loss = total_loss(model, problem, state);
  const Gradients analytic = backward(model, problem, state, loss);

  GradCheckResult result;
  const auto check_stack = [&](bool encoder_side) {
    const auto& weights = encoder_side ? model.encoder_weights : model.decoder_weights;
    const auto& grads = encoder_side ? analytic.encoder : analytic.decoder;
    for (std::size_t l = 0; l < weights.size(); ++l) {
      JpecModel probe = model;
      const auto objective = [&](const DenseMatrix& w) {
        (encoder_side ? probe.encoder_weights : probe.decoder_weights)[l] = w;
        return total_loss(probe, problem).total;
      };
      const DenseMatrix numeric = finite_diff_gradient(objective, weights[l], eps);
      for (std::size_t k = 0; k < numeric.size(); ++k) {
        const double a = grads[l].values()[k];
        const double f = numeric.values()[k];
        const double rel = std::abs(a - f) / std::max({kGradCheckFloor, std::abs(a), std::abs(f)});
        result.max_relative_error = std::max(result.max_relative_error, rel);
        ++result.parameters;
      }
    }
  };
  check_stack(true);
  check_stack(false);
  return result;
}

}  // namespace jpec
