// Times the OpenMP kernels against their serial reference paths on synthetic
// data and checks that both produce bit-identical results.

#include <chrono>
#include <cstdio>
#include <string>
#include <vector>

#include "lyrica/blstm.hpp"
#include "lyrica/forest.hpp"
#include "lyrica/parallel.hpp"
#include "lyrica/rng.hpp"
#include "lyrica/svm.hpp"

using namespace lyrica;

namespace {

double now_ms() {
    using clock = std::chrono::steady_clock;
    return std::chrono::duration<double, std::milli>(
               clock::now().time_since_epoch())
        .count();
}

std::vector<FeatureVector> random_features(std::size_t n, Eigen::Index dim,
                                           Rng& rng) {
    std::vector<FeatureVector> features(n);
    for (auto& f : features) {
        f.values.resize(dim);
        for (Eigen::Index k = 0; k < dim; ++k)
            f.values[k] = rng.next_double(-1.0, 1.0);
        f.known_count = 1;
    }
    return features;
}

std::vector<int> random_labels(std::size_t n, int classes, Rng& rng) {
    std::vector<int> labels(n);
    for (auto& l : labels)
        l = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(classes)));
    return labels;
}

std::vector<SequenceMatrix> random_sequences(std::size_t n, Eigen::Index dim,
                                             std::size_t len, Rng& rng) {
    std::vector<SequenceMatrix> sequences(n);
    for (auto& s : sequences) {
        s.length = len;
        s.padded_length = len;
        s.rows.resize(static_cast<Eigen::Index>(len), dim);
        for (Eigen::Index k = 0; k < s.rows.size(); ++k)
            s.rows.data()[k] = rng.next_double(-1.0, 1.0);
    }
    return sequences;
}

bool params_equal(const BlstmParams& a, const BlstmParams& b) {
    auto va = param_views(a);
    auto vb = param_views(b);
    for (std::size_t k = 0; k < va.size(); ++k)
        if ((va[k] != vb[k]).any()) return false;
    return true;
}

bool forests_equal(const RandomForestModel& a, const RandomForestModel& b) {
    if (a.trees.size() != b.trees.size()) return false;
    for (std::size_t t = 0; t < a.trees.size(); ++t) {
        const auto& na = a.trees[t].nodes;
        const auto& nb = b.trees[t].nodes;
        if (na.size() != nb.size()) return false;
        for (std::size_t k = 0; k < na.size(); ++k) {
            if (na[k].is_leaf != nb[k].is_leaf ||
                na[k].feature != nb[k].feature ||
                na[k].threshold != nb[k].threshold ||
                na[k].histogram != nb[k].histogram)
                return false;
        }
    }
    return true;
}

void print_row(const char* name, double serial_ms, double parallel_ms,
               bool identical) {
    std::printf("%-28s %10.1f %12.1f %8.2fx  %s\n", name, serial_ms,
                parallel_ms, serial_ms / parallel_ms,
                identical ? "identical" : "MISMATCH");
}

}  // namespace

int main(int argc, char** argv) {
    int threads = hardware_threads();
    std::size_t songs = 400;
    for (int k = 1; k + 1 < argc; k += 2) {
        const std::string flag = argv[k];
        const std::string value = argv[k + 1];
        if (flag == "--threads") threads = std::stoi(value);
        if (flag == "--songs") songs = static_cast<std::size_t>(std::stoul(value));
    }
    const int classes = 5;
    const Eigen::Index dim = 32;

    std::printf("threads: %d, songs: %zu\n\n", threads, songs);
    std::printf("%-28s %10s %12s %9s\n", "kernel", "serial_ms", "parallel_ms",
                "speedup");

    Rng rng(42);
    {
        auto sequences = random_sequences(songs / 4, dim, 60, rng);
        auto labels = random_labels(sequences.size(), classes, rng);
        BlstmModel model = init_blstm(48, static_cast<int>(dim), classes, 7);
        std::vector<std::size_t> batch(sequences.size());
        for (std::size_t i = 0; i < batch.size(); ++i) batch[i] = i;

        double loss_a = 0.0, loss_b = 0.0;
        double t0 = now_ms();
        BlstmParams serial =
            batch_gradients(model, sequences, labels, batch, 1, loss_a);
        double t1 = now_ms();
        BlstmParams parallel =
            batch_gradients(model, sequences, labels, batch, threads, loss_b);
        double t2 = now_ms();
        print_row("blstm batch gradients", t1 - t0, t2 - t1,
                  params_equal(serial, parallel) && loss_a == loss_b);
    }
    {
        auto sequences = random_sequences(songs, dim, 60, rng);
        BlstmModel model = init_blstm(48, static_cast<int>(dim), classes, 7);

        double t0 = now_ms();
        auto serial = blstm_predict(model, sequences, 1);
        double t1 = now_ms();
        auto parallel = blstm_predict(model, sequences, threads);
        double t2 = now_ms();
        print_row("blstm prediction", t1 - t0, t2 - t1, serial == parallel);
    }
    {
        auto features = random_features(songs, dim, rng);
        auto labels = random_labels(songs, classes, rng);
        ForestParams params;
        params.trees = 60;
        params.seed = 11;

        double t0 = now_ms();
        auto serial = train_forest(features, labels, classes, params, 1);
        double t1 = now_ms();
        auto parallel = train_forest(features, labels, classes, params, threads);
        double t2 = now_ms();
        print_row("forest training", t1 - t0, t2 - t1,
                  forests_equal(serial, parallel));
    }
    {
        auto features = random_features(songs * 4, dim, rng);
        auto labels = random_labels(songs * 4, classes, rng);
        SvmParams params;
        params.epochs = 20;
        params.seed = 11;

        double t0 = now_ms();
        auto serial = train_svm(features, labels, classes, params, 1);
        double t1 = now_ms();
        auto parallel = train_svm(features, labels, classes, params, threads);
        double t2 = now_ms();
        print_row("svm training", t1 - t0, t2 - t1,
                  serial.weights == parallel.weights &&
                      serial.biases == parallel.biases);
    }
    return 0;
}
