#ifndef LYRICA_SVM_HPP
#define LYRICA_SVM_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "lyrica/embeddings.hpp"

namespace lyrica {

struct SvmParams {
    double c_reg = 1.0;   // inverse regularization strength
    int epochs = 20;
    std::uint64_t seed = 0;
};

// One-vs-rest linear SVM. Row c of weights scores class c.
struct LinearSvmModel {
    Eigen::MatrixXd weights;  // C x d
    Eigen::VectorXd biases;   // C
    SvmParams params;

    int num_classes() const { return static_cast<int>(weights.rows()); }
    Eigen::Index dimension() const { return weights.cols(); }

    // Per-class regularized hinge objective after each epoch; entry 0 is the
    // value before any update.
    std::vector<std::vector<double>> objective_history;
};

// Trains one binary hinge-loss + L2 subgradient-descent problem per class.
// Each class derives its generator from (seed, class index), so the binary
// problems can run in parallel and still match the serial result exactly.
LinearSvmModel train_svm(const std::vector<FeatureVector>& features,
                         const std::vector<int>& labels, int num_classes,
                         const SvmParams& params, int threads = 1);

// argmax over class scores w_c . x + b_c; ties go to the lowest class index.
int predict_svm(const LinearSvmModel& model, const FeatureVector& feature);

std::vector<int> predict_svm(const LinearSvmModel& model,
                             const std::vector<FeatureVector>& features,
                             int threads = 1);

}  // namespace lyrica

#endif
