#ifndef LYRICA_BLSTM_HPP
#define LYRICA_BLSTM_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <utility>
#include <vector>

#include "lyrica/embeddings.hpp"

namespace lyrica {

// One direction's parameters. W_* act on the previous hidden state, U_* on
// the current input, b_* are the gate biases.
struct LstmParams {
    Eigen::MatrixXd w_f, w_i, w_c, w_o;  // H x H
    Eigen::MatrixXd u_f, u_i, u_c, u_o;  // H x d
    Eigen::VectorXd b_f, b_i, b_c, b_o;  // H
};

// All trainable parameters: two LSTM directions plus the softmax head over
// the concatenated final states (width 2H).
struct BlstmParams {
    LstmParams forward_cell;
    LstmParams backward_cell;
    Eigen::MatrixXd output_weights;  // C x 2H
    Eigen::VectorXd output_bias;     // C
};

struct BlstmModel {
    BlstmParams params;
    int hidden_size = 0;
    int input_dim = 0;
    int num_classes = 0;
};

struct TrainConfig {
    int epochs = 4;
    int batch_size = 32;
    double learning_rate = 0.001;  // Adam alpha
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
    double clip_norm = 5.0;  // global gradient norm clip
    std::uint64_t seed = 0;
    int threads = 1;
};

struct AdamState {
    BlstmParams first_moment;
    BlstmParams second_moment;
    std::uint64_t step = 0;
};

struct EpochStats {
    double mean_loss = 0.0;
    double validation_macro_f1 = 0.0;
};

// Contiguous views over every parameter matrix in a fixed order, used by the
// optimizer, gradient clipping, serialization and the finite-difference
// tests.
std::vector<Eigen::Map<Eigen::ArrayXd>> param_views(BlstmParams& params);
std::vector<Eigen::Map<const Eigen::ArrayXd>> param_views(
    const BlstmParams& params);

BlstmParams zeros_like(const BlstmParams& params);

// Glorot-uniform weights, zero biases except the forget-gate bias at 1.
BlstmModel init_blstm(int hidden_size, int input_dim, int num_classes,
                      std::uint64_t seed);

// One cell update:
//   f = sigmoid(W_f h + U_f x + b_f)      i = sigmoid(W_i h + U_i x + b_i)
//   c_bar = tanh(W_c h + U_c x + b_c)     c' = f*c + i*c_bar
//   o = sigmoid(W_o h + U_o x + b_o)      h' = o*tanh(c')
// (all products elementwise). Returns (h', c').
std::pair<Eigen::VectorXd, Eigen::VectorXd> lstm_step(
    const LstmParams& params, const Eigen::VectorXd& x,
    const Eigen::VectorXd& h_prev, const Eigen::VectorXd& c_prev);

// Runs both directions from zero states over rows [0, length), concatenates
// the two final hidden states and applies the softmax head. Rows beyond
// `length` are never read.
Eigen::VectorXd blstm_forward(const BlstmModel& model,
                              const SequenceMatrix& sequence);

// Cross-entropy -log(p_gold + 1e-12).
double cross_entropy(const Eigen::VectorXd& probabilities, int gold);

// Analytic gradients of cross_entropy(blstm_forward(...), gold) with respect
// to every parameter, accumulated over all time steps of both directions.
// loss_out, when given, receives the example's loss.
BlstmParams blstm_backward(const BlstmModel& model,
                           const SequenceMatrix& sequence, int gold,
                           double* loss_out = nullptr);

// Sum of per-example gradients, accumulated in example order regardless of
// thread count; threads <= 1 runs the serial reference loop. loss_sum is
// increased by the summed example losses.
BlstmParams batch_gradients(const BlstmModel& model,
                            const std::vector<SequenceMatrix>& sequences,
                            const std::vector<int>& labels,
                            const std::vector<std::size_t>& batch, int threads,
                            double& loss_sum);

// Clips the gradient at config.clip_norm (global norm), then applies one
// bias-corrected Adam step. Throws NumericalError on non-finite gradients.
void adam_update(AdamState& state, BlstmParams& params,
                 const BlstmParams& gradients, const TrainConfig& config);

// Seeded shuffling per epoch, mini-batches of config.batch_size, gradients
// summed over each batch then clipped. Returns exactly config.epochs entries.
// Identical (model, data, config) produce identical trained parameters at any
// thread count.
std::vector<EpochStats> train_blstm(
    BlstmModel& model, const std::vector<SequenceMatrix>& train_sequences,
    const std::vector<int>& train_labels,
    const std::vector<SequenceMatrix>& validation_sequences,
    const std::vector<int>& validation_labels, const TrainConfig& config);

// argmax of forward probabilities; ties go to the lowest class index.
int blstm_predict(const BlstmModel& model, const SequenceMatrix& sequence);

std::vector<int> blstm_predict(const BlstmModel& model,
                               const std::vector<SequenceMatrix>& sequences,
                               int threads = 1);

}  // namespace lyrica

#endif
