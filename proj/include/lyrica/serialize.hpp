#ifndef LYRICA_SERIALIZE_HPP
#define LYRICA_SERIALIZE_HPP

#include <optional>
#include <string>
#include <vector>

#include "lyrica/blstm.hpp"
#include "lyrica/forest.hpp"
#include "lyrica/svm.hpp"

namespace lyrica {

enum class ModelKind { svm, forest, blstm };

std::string to_string(ModelKind kind);
ModelKind model_kind_from_string(const std::string& name);

// A trained model plus everything prediction needs: the label names in class
// index order, the expected embedding dimension, the training-set majority
// class (the all-out-of-vocabulary fallback) and, for blstm, the sequence
// truncation length used at featurization time.
struct ModelBundle {
    ModelKind kind = ModelKind::svm;
    std::vector<std::string> labels;
    std::size_t embedding_dim = 0;
    int majority_class = 0;
    std::size_t max_sequence_length = 0;

    std::optional<LinearSvmModel> svm;
    std::optional<RandomForestModel> forest;
    std::optional<BlstmModel> blstm;
};

// Versioned binary container: magic "LYRICA-MODEL", format version, kind tag,
// hyperparameters, then parameters. Numeric payloads are little-endian
// IEEE-754, so a round trip restores every value bit for bit.
void save_model(const ModelBundle& bundle, const std::string& path);
ModelBundle load_model(const std::string& path);

}  // namespace lyrica

#endif
