#ifndef LYRICA_PIPELINE_HPP
#define LYRICA_PIPELINE_HPP

#include <string>
#include <vector>

#include "lyrica/corpus.hpp"
#include "lyrica/embeddings.hpp"
#include "lyrica/eval.hpp"
#include "lyrica/serialize.hpp"

namespace lyrica {

// Featurized view of a list of corpus records. Songs whose tokens are all
// out of vocabulary cannot be represented and are counted in skipped.
struct MeanPoolDataset {
    std::vector<FeatureVector> features;
    std::vector<int> labels;
    std::vector<std::string> ids;
    std::size_t skipped = 0;
};

struct SequenceDataset {
    std::vector<SequenceMatrix> sequences;
    std::vector<int> labels;
    std::vector<std::string> ids;
    std::size_t skipped = 0;
};

TokenSequence song_tokens(const SongRecord& record);

MeanPoolDataset featurize_mean(const Corpus& corpus,
                               const std::vector<std::string>& ids,
                               const EmbeddingTable& table, int threads = 1);

SequenceDataset featurize_sequences(const Corpus& corpus,
                                    const std::vector<std::string>& ids,
                                    const EmbeddingTable& table,
                                    std::size_t max_length, int threads = 1);

// Most frequent label; ties go to the lowest class index.
int majority_class(const std::vector<int>& labels, int num_classes);

struct TrainOptions {
    ModelKind kind = ModelKind::blstm;
    SvmParams svm;
    ForestParams forest;
    TrainConfig blstm;
    int hidden_size = 256;
    std::size_t max_sequence_length = kDefaultMaxSequenceLength;
    int threads = 1;
};

struct TrainOutcome {
    ModelBundle bundle;
    std::vector<EpochStats> history;  // blstm only
    std::size_t skipped_train = 0;
    std::size_t skipped_validation = 0;
};

// Featurizes the split's train/validation parts and trains the requested
// model kind. All-out-of-vocabulary songs are skipped and counted.
TrainOutcome train_bundle(const Corpus& corpus, const EmbeddingTable& table,
                          const DataSplit& split, const TrainOptions& options);

struct EvaluationOutcome {
    ConfusionMatrix matrix;
    ClassMetrics scores;
    std::size_t fallback_count = 0;  // all-OOV songs sent to majority class
};

// Predicts every listed record (majority-class fallback for all-OOV songs)
// and scores against the gold labels.
EvaluationOutcome evaluate_bundle(const ModelBundle& bundle,
                                  const Corpus& corpus,
                                  const EmbeddingTable& table,
                                  const std::vector<std::string>& ids,
                                  int threads = 1);

struct Prediction {
    int class_index = 0;
    bool fallback = false;               // all tokens were out of vocabulary
    std::vector<double> probabilities;   // blstm only
};

Prediction predict_song(const ModelBundle& bundle, const EmbeddingTable& table,
                        const std::string& title, const std::string& lyrics);

}  // namespace lyrica

#endif
