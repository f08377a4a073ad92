#include "lyrica/blstm.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "lyrica/errors.hpp"
#include "lyrica/eval.hpp"
#include "lyrica/parallel.hpp"
#include "lyrica/rng.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace lyrica {

namespace {

inline Eigen::ArrayXd sigmoid(const Eigen::ArrayXd& z) {
    return 1.0 / (1.0 + (-z).exp());
}

void resize_cell(LstmParams& p, int hidden, int input) {
    p.w_f.setZero(hidden, hidden);
    p.w_i.setZero(hidden, hidden);
    p.w_c.setZero(hidden, hidden);
    p.w_o.setZero(hidden, hidden);
    p.u_f.setZero(hidden, input);
    p.u_i.setZero(hidden, input);
    p.u_c.setZero(hidden, input);
    p.u_o.setZero(hidden, input);
    p.b_f.setZero(hidden);
    p.b_i.setZero(hidden);
    p.b_c.setZero(hidden);
    p.b_o.setZero(hidden);
}

template <typename Params, typename View>
std::vector<View> collect_views(Params& p) {
    std::vector<View> views;
    views.reserve(26);
    auto add = [&](auto& mat) {
        views.emplace_back(mat.data(), mat.size());
    };
    for (auto* cell : {&p.forward_cell, &p.backward_cell}) {
        add(cell->w_f);
        add(cell->w_i);
        add(cell->w_c);
        add(cell->w_o);
        add(cell->u_f);
        add(cell->u_i);
        add(cell->u_c);
        add(cell->u_o);
        add(cell->b_f);
        add(cell->b_i);
        add(cell->b_c);
        add(cell->b_o);
    }
    add(p.output_weights);
    add(p.output_bias);
    return views;
}

}  // namespace

std::vector<Eigen::Map<Eigen::ArrayXd>> param_views(BlstmParams& params) {
    return collect_views<BlstmParams, Eigen::Map<Eigen::ArrayXd>>(params);
}

std::vector<Eigen::Map<const Eigen::ArrayXd>> param_views(
    const BlstmParams& params) {
    return collect_views<const BlstmParams, Eigen::Map<const Eigen::ArrayXd>>(
        params);
}

BlstmParams zeros_like(const BlstmParams& params) {
    BlstmParams out = params;
    for (auto view : param_views(out)) view.setZero();
    return out;
}

BlstmModel init_blstm(int hidden_size, int input_dim, int num_classes,
                      std::uint64_t seed) {
    if (hidden_size < 1 || input_dim < 1 || num_classes < 2)
        throw InvalidSpec("hidden size and input dim must be >= 1, classes >= 2");

    BlstmModel model;
    model.hidden_size = hidden_size;
    model.input_dim = input_dim;
    model.num_classes = num_classes;
    resize_cell(model.params.forward_cell, hidden_size, input_dim);
    resize_cell(model.params.backward_cell, hidden_size, input_dim);
    model.params.output_weights.setZero(num_classes, 2 * hidden_size);
    model.params.output_bias.setZero(num_classes);

    Rng rng(derive_seed(seed, 0x424C53544DULL));
    auto glorot = [&](Eigen::MatrixXd& mat) {
        const double limit = std::sqrt(
            6.0 / static_cast<double>(mat.rows() + mat.cols()));
        // column-major fill order, fixed for reproducibility
        for (Eigen::Index k = 0; k < mat.size(); ++k)
            mat.data()[k] = rng.next_double(-limit, limit);
    };
    for (LstmParams* cell :
         {&model.params.forward_cell, &model.params.backward_cell}) {
        glorot(cell->w_f);
        glorot(cell->w_i);
        glorot(cell->w_c);
        glorot(cell->w_o);
        glorot(cell->u_f);
        glorot(cell->u_i);
        glorot(cell->u_c);
        glorot(cell->u_o);
        cell->b_f.setOnes();  // standard forget-gate bias init
    }
    glorot(model.params.output_weights);
    return model;
}

std::pair<Eigen::VectorXd, Eigen::VectorXd> lstm_step(
    const LstmParams& params, const Eigen::VectorXd& x,
    const Eigen::VectorXd& h_prev, const Eigen::VectorXd& c_prev) {
    const Eigen::Index hidden = params.b_f.size();
    if (h_prev.size() != hidden || c_prev.size() != hidden ||
        x.size() != params.u_f.cols())
        throw DimensionMismatch("lstm_step input shapes do not match parameters");

    const Eigen::ArrayXd f =
        sigmoid((params.w_f * h_prev + params.u_f * x + params.b_f).array());
    const Eigen::ArrayXd i =
        sigmoid((params.w_i * h_prev + params.u_i * x + params.b_i).array());
    const Eigen::ArrayXd c_bar =
        (params.w_c * h_prev + params.u_c * x + params.b_c).array().tanh();
    const Eigen::ArrayXd c = f * c_prev.array() + i * c_bar;
    const Eigen::ArrayXd o =
        sigmoid((params.w_o * h_prev + params.u_o * x + params.b_o).array());
    const Eigen::ArrayXd h = o * c.tanh();
    return {h.matrix(), c.matrix()};
}

namespace {

// Per-timestep activations of one direction, columns indexed by the
// direction's own step order.
struct DirectionTrace {
    Eigen::MatrixXd f, i, c_bar, c, o, tanh_c, h;  // H x T

    void resize(Eigen::Index hidden, Eigen::Index steps) {
        f.resize(hidden, steps);
        i.resize(hidden, steps);
        c_bar.resize(hidden, steps);
        c.resize(hidden, steps);
        o.resize(hidden, steps);
        tanh_c.resize(hidden, steps);
        h.resize(hidden, steps);
    }
};

// Runs one direction over the sequence. reversed=false reads rows 0..T-1,
// reversed=true reads T-1..0; step k of the trace corresponds to input row
// (reversed ? T-1-k : k).
void run_direction(const LstmParams& params, const SequenceMatrix& seq,
                   bool reversed, DirectionTrace& trace) {
    const Eigen::Index hidden = params.b_f.size();
    const auto steps = static_cast<Eigen::Index>(seq.length);
    trace.resize(hidden, steps);

    Eigen::VectorXd h = Eigen::VectorXd::Zero(hidden);
    Eigen::VectorXd c = Eigen::VectorXd::Zero(hidden);
    Eigen::VectorXd x(seq.rows.cols());
    for (Eigen::Index k = 0; k < steps; ++k) {
        const Eigen::Index row = reversed ? steps - 1 - k : k;
        x = seq.rows.row(row).transpose();

        const Eigen::ArrayXd f =
            sigmoid((params.w_f * h + params.u_f * x + params.b_f).array());
        const Eigen::ArrayXd i =
            sigmoid((params.w_i * h + params.u_i * x + params.b_i).array());
        const Eigen::ArrayXd c_bar =
            (params.w_c * h + params.u_c * x + params.b_c).array().tanh();
        const Eigen::ArrayXd c_new = f * c.array() + i * c_bar;
        const Eigen::ArrayXd o =
            sigmoid((params.w_o * h + params.u_o * x + params.b_o).array());
        const Eigen::ArrayXd tanh_c = c_new.tanh();

        trace.f.col(k) = f;
        trace.i.col(k) = i;
        trace.c_bar.col(k) = c_bar;
        trace.c.col(k) = c_new;
        trace.o.col(k) = o;
        trace.tanh_c.col(k) = tanh_c;
        c = c_new;
        h = (o * tanh_c).matrix();
        trace.h.col(k) = h;
    }
}

void check_sequence(const BlstmModel& model, const SequenceMatrix& seq) {
    if (seq.length < 1)
        throw EmptySequence("sequence has no rows");
    if (static_cast<Eigen::Index>(seq.length) > seq.rows.rows())
        throw Error("sequence length exceeds stored rows");
    if (seq.rows.cols() != model.input_dim)
        throw DimensionMismatch(
            "sequence dimension " + std::to_string(seq.rows.cols()) +
            " does not match model input dimension " +
            std::to_string(model.input_dim));
}

Eigen::VectorXd softmax(const Eigen::VectorXd& logits) {
    const double max_logit = logits.maxCoeff();
    Eigen::VectorXd p = (logits.array() - max_logit).exp();
    p /= p.sum();
    return p;
}

constexpr double kLogClamp = 1e-12;

// Backpropagates one direction, adding parameter gradients into grads.
// dh_final is the loss gradient at the direction's final hidden state.
void backprop_direction(const LstmParams& params, const SequenceMatrix& seq,
                        bool reversed, const DirectionTrace& trace,
                        const Eigen::VectorXd& dh_final, LstmParams& grads) {
    const Eigen::Index hidden = params.b_f.size();
    const auto steps = static_cast<Eigen::Index>(seq.length);

    Eigen::ArrayXd dh = dh_final.array();
    Eigen::ArrayXd dc_carry = Eigen::ArrayXd::Zero(hidden);
    Eigen::VectorXd x(seq.rows.cols());
    for (Eigen::Index k = steps - 1; k >= 0; --k) {
        const Eigen::Index row = reversed ? steps - 1 - k : k;
        x = seq.rows.row(row).transpose();

        const Eigen::ArrayXd f = trace.f.col(k).array();
        const Eigen::ArrayXd i = trace.i.col(k).array();
        const Eigen::ArrayXd c_bar = trace.c_bar.col(k).array();
        const Eigen::ArrayXd o = trace.o.col(k).array();
        const Eigen::ArrayXd tanh_c = trace.tanh_c.col(k).array();
        const Eigen::ArrayXd c_prev =
            k == 0 ? Eigen::ArrayXd::Zero(hidden).eval()
                   : trace.c.col(k - 1).array().eval();
        const Eigen::VectorXd h_prev =
            k == 0 ? Eigen::VectorXd::Zero(hidden).eval()
                   : trace.h.col(k - 1).eval();

        const Eigen::ArrayXd d_o = dh * tanh_c;
        const Eigen::ArrayXd dpre_o = d_o * o * (1.0 - o);
        const Eigen::ArrayXd dc = dc_carry + dh * o * (1.0 - tanh_c.square());
        const Eigen::ArrayXd dpre_f = dc * c_prev * f * (1.0 - f);
        const Eigen::ArrayXd dpre_i = dc * c_bar * i * (1.0 - i);
        const Eigen::ArrayXd dpre_c = dc * i * (1.0 - c_bar.square());

        grads.w_f.noalias() += dpre_f.matrix() * h_prev.transpose();
        grads.w_i.noalias() += dpre_i.matrix() * h_prev.transpose();
        grads.w_c.noalias() += dpre_c.matrix() * h_prev.transpose();
        grads.w_o.noalias() += dpre_o.matrix() * h_prev.transpose();
        grads.u_f.noalias() += dpre_f.matrix() * x.transpose();
        grads.u_i.noalias() += dpre_i.matrix() * x.transpose();
        grads.u_c.noalias() += dpre_c.matrix() * x.transpose();
        grads.u_o.noalias() += dpre_o.matrix() * x.transpose();
        grads.b_f += dpre_f.matrix();
        grads.b_i += dpre_i.matrix();
        grads.b_c += dpre_c.matrix();
        grads.b_o += dpre_o.matrix();

        if (k > 0) {
            dh = (params.w_f.transpose() * dpre_f.matrix() +
                  params.w_i.transpose() * dpre_i.matrix() +
                  params.w_c.transpose() * dpre_c.matrix() +
                  params.w_o.transpose() * dpre_o.matrix())
                     .array();
            dc_carry = dc * f;
        }
    }
}

void add_params(BlstmParams& acc, const BlstmParams& delta) {
    auto a = param_views(acc);
    auto d = param_views(delta);
    for (std::size_t k = 0; k < a.size(); ++k) a[k] += d[k];
}

}  // namespace

Eigen::VectorXd blstm_forward(const BlstmModel& model,
                              const SequenceMatrix& sequence) {
    check_sequence(model, sequence);
    DirectionTrace fwd, bwd;
    run_direction(model.params.forward_cell, sequence, false, fwd);
    run_direction(model.params.backward_cell, sequence, true, bwd);

    const auto last = static_cast<Eigen::Index>(sequence.length) - 1;
    Eigen::VectorXd concat(2 * model.hidden_size);
    concat.head(model.hidden_size) = fwd.h.col(last);
    concat.tail(model.hidden_size) = bwd.h.col(last);
    return softmax(model.params.output_weights * concat +
                   model.params.output_bias);
}

double cross_entropy(const Eigen::VectorXd& probabilities, int gold) {
    if (gold < 0 || gold >= probabilities.size())
        throw Error("gold class index out of range");
    // never negative: the epsilon guard can push p past 1
    return std::max(0.0, -std::log(probabilities[gold] + kLogClamp));
}

BlstmParams blstm_backward(const BlstmModel& model,
                           const SequenceMatrix& sequence, int gold,
                           double* loss_out) {
    check_sequence(model, sequence);
    if (gold < 0 || gold >= model.num_classes)
        throw Error("gold class index out of range");

    DirectionTrace fwd, bwd;
    run_direction(model.params.forward_cell, sequence, false, fwd);
    run_direction(model.params.backward_cell, sequence, true, bwd);

    const auto last = static_cast<Eigen::Index>(sequence.length) - 1;
    Eigen::VectorXd concat(2 * model.hidden_size);
    concat.head(model.hidden_size) = fwd.h.col(last);
    concat.tail(model.hidden_size) = bwd.h.col(last);
    const Eigen::VectorXd probs = softmax(
        model.params.output_weights * concat + model.params.output_bias);
    if (loss_out) *loss_out = cross_entropy(probs, gold);

    // d(-log(p_g + eps))/dz = (p_g/(p_g+eps)) * (p - onehot_g)
    const double scale = probs[gold] / (probs[gold] + kLogClamp);
    Eigen::VectorXd dlogits = probs * scale;
    dlogits[gold] -= scale;

    BlstmParams grads = zeros_like(model.params);
    grads.output_weights.noalias() = dlogits * concat.transpose();
    grads.output_bias = dlogits;

    const Eigen::VectorXd dconcat =
        model.params.output_weights.transpose() * dlogits;
    backprop_direction(model.params.forward_cell, sequence, false, fwd,
                       dconcat.head(model.hidden_size), grads.forward_cell);
    backprop_direction(model.params.backward_cell, sequence, true, bwd,
                       dconcat.tail(model.hidden_size), grads.backward_cell);
    return grads;
}

BlstmParams batch_gradients(const BlstmModel& model,
                            const std::vector<SequenceMatrix>& sequences,
                            const std::vector<int>& labels,
                            const std::vector<std::size_t>& batch, int threads,
                            double& loss_sum) {
    BlstmParams acc = zeros_like(model.params);
#ifdef _OPENMP
    if (threads > 1 && batch.size() > 1) {
        const auto count = static_cast<long long>(batch.size());
        // Per-item gradients are computed in parallel but folded into the
        // accumulator in item order, so any thread count reproduces the
        // serial sum bit for bit.
#pragma omp parallel for ordered schedule(static, 1) num_threads(threads)
        for (long long k = 0; k < count; ++k) {
            const std::size_t idx = batch[static_cast<std::size_t>(k)];
            double item_loss = 0.0;
            BlstmParams g =
                blstm_backward(model, sequences[idx], labels[idx], &item_loss);
#pragma omp ordered
            {
                add_params(acc, g);
                loss_sum += item_loss;
            }
        }
        return acc;
    }
#endif
    (void)threads;
    for (std::size_t idx : batch) {
        double item_loss = 0.0;
        BlstmParams g =
            blstm_backward(model, sequences[idx], labels[idx], &item_loss);
        add_params(acc, g);
        loss_sum += item_loss;
    }
    return acc;
}

void adam_update(AdamState& state, BlstmParams& params,
                 const BlstmParams& gradients, const TrainConfig& config) {
    auto grad_views = param_views(gradients);

    double squared_norm = 0.0;
    for (const auto& g : grad_views) squared_norm += g.square().sum();
    if (!std::isfinite(squared_norm))
        throw NumericalError("non-finite gradient encountered");
    const double norm = std::sqrt(squared_norm);
    const double clip_scale =
        (config.clip_norm > 0.0 && norm > config.clip_norm)
            ? config.clip_norm / norm
            : 1.0;

    state.step += 1;
    const double t = static_cast<double>(state.step);
    const double correction1 = 1.0 - std::pow(config.beta1, t);
    const double correction2 = 1.0 - std::pow(config.beta2, t);

    auto p = param_views(params);
    auto m = param_views(state.first_moment);
    auto v = param_views(state.second_moment);
    for (std::size_t k = 0; k < p.size(); ++k) {
        const Eigen::ArrayXd g = grad_views[k] * clip_scale;
        m[k] = config.beta1 * m[k] + (1.0 - config.beta1) * g;
        v[k] = config.beta2 * v[k] + (1.0 - config.beta2) * g.square();
        p[k] -= config.learning_rate * (m[k] / correction1) /
                ((v[k] / correction2).sqrt() + config.epsilon);
    }
}

std::vector<EpochStats> train_blstm(
    BlstmModel& model, const std::vector<SequenceMatrix>& train_sequences,
    const std::vector<int>& train_labels,
    const std::vector<SequenceMatrix>& validation_sequences,
    const std::vector<int>& validation_labels, const TrainConfig& config) {
    if (config.epochs < 1) throw InvalidSpec("epochs must be at least 1");
    if (config.batch_size < 1) throw InvalidSpec("batch size must be at least 1");
    if (train_sequences.empty()) throw EmptyTrainingSet("no training sequences");
    if (train_sequences.size() != train_labels.size())
        throw Error("sequence and label counts differ");
    if (validation_sequences.size() != validation_labels.size())
        throw Error("validation sequence and label counts differ");
    // validate everything up front; later work runs inside parallel regions
    for (const SequenceMatrix& s : train_sequences) check_sequence(model, s);
    for (const SequenceMatrix& s : validation_sequences)
        check_sequence(model, s);
    for (int label : train_labels)
        if (label < 0 || label >= model.num_classes)
            throw Error("training label out of range");
    for (int label : validation_labels)
        if (label < 0 || label >= model.num_classes)
            throw Error("validation label out of range");

    AdamState state;
    state.first_moment = zeros_like(model.params);
    state.second_moment = zeros_like(model.params);

    const std::size_t n = train_sequences.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);

    std::vector<EpochStats> history;
    history.reserve(static_cast<std::size_t>(config.epochs));
    for (int epoch = 0; epoch < config.epochs; ++epoch) {
        Rng rng(derive_seed(config.seed,
                            0x45504F43ULL + static_cast<std::uint64_t>(epoch)));
        shuffle(order, rng);

        double loss_sum = 0.0;
        for (std::size_t start = 0; start < n;
             start += static_cast<std::size_t>(config.batch_size)) {
            const std::size_t stop = std::min(
                n, start + static_cast<std::size_t>(config.batch_size));
            std::vector<std::size_t> batch(order.begin() +
                                               static_cast<std::ptrdiff_t>(start),
                                           order.begin() +
                                               static_cast<std::ptrdiff_t>(stop));
            BlstmParams grads =
                batch_gradients(model, train_sequences, train_labels, batch,
                                config.threads, loss_sum);
            try {
                adam_update(state, model.params, grads, config);
            } catch (const NumericalError& e) {
                throw NumericalError(
                    std::string(e.what()) + " at epoch " +
                    std::to_string(epoch + 1) + ", batch starting at item " +
                    std::to_string(start));
            }
        }

        EpochStats stats;
        stats.mean_loss = loss_sum / static_cast<double>(n);
        if (!validation_sequences.empty()) {
            const std::vector<int> predicted =
                blstm_predict(model, validation_sequences, config.threads);
            const ConfusionMatrix matrix =
                confusion(validation_labels, predicted,
                          static_cast<std::size_t>(model.num_classes));
            stats.validation_macro_f1 = metrics(matrix).macro_f1;
        }
        history.push_back(stats);
    }
    return history;
}

int blstm_predict(const BlstmModel& model, const SequenceMatrix& sequence) {
    const Eigen::VectorXd probs = blstm_forward(model, sequence);
    Eigen::Index best = 0;
    for (Eigen::Index c = 1; c < probs.size(); ++c)
        if (probs[c] > probs[best]) best = c;
    return static_cast<int>(best);
}

std::vector<int> blstm_predict(const BlstmModel& model,
                               const std::vector<SequenceMatrix>& sequences,
                               int threads) {
    std::vector<int> out(sequences.size());
    parallel_for(sequences.size(), threads, [&](std::size_t i) {
        out[i] = blstm_predict(model, sequences[i]);
    });
    return out;
}

}  // namespace lyrica
