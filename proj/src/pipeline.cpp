#include "lyrica/pipeline.hpp"

#include <optional>

#include "lyrica/blstm.hpp"
#include "lyrica/errors.hpp"
#include "lyrica/parallel.hpp"
#include "lyrica/textprep.hpp"

namespace lyrica {

TokenSequence song_tokens(const SongRecord& record) {
    return tokenize(normalize(record.title, record.lyrics));
}

namespace {

// Unknown ids must surface as a clean error before any parallel region; an
// exception thrown inside one would terminate the process.
void check_ids(const Corpus& corpus, const std::vector<std::string>& ids) {
    for (const std::string& id : ids)
        if (!corpus.has_id(id))
            throw Error("split references unknown record id '" + id + "'");
}

}  // namespace

MeanPoolDataset featurize_mean(const Corpus& corpus,
                               const std::vector<std::string>& ids,
                               const EmbeddingTable& table, int threads) {
    check_ids(corpus, ids);
    std::vector<std::optional<FeatureVector>> slots(ids.size());
    parallel_for(ids.size(), threads, [&](std::size_t i) {
        const SongRecord& record = corpus.record_by_id(ids[i]);
        try {
            slots[i] = mean_pool(table, song_tokens(record));
        } catch (const AllOutOfVocabulary&) {
            slots[i] = std::nullopt;
        }
    });

    MeanPoolDataset out;
    for (std::size_t i = 0; i < ids.size(); ++i) {
        if (!slots[i]) {
            ++out.skipped;
            continue;
        }
        const SongRecord& record = corpus.record_by_id(ids[i]);
        out.features.push_back(std::move(*slots[i]));
        out.labels.push_back(corpus.label_index(record.genre));
        out.ids.push_back(ids[i]);
    }
    return out;
}

SequenceDataset featurize_sequences(const Corpus& corpus,
                                    const std::vector<std::string>& ids,
                                    const EmbeddingTable& table,
                                    std::size_t max_length, int threads) {
    check_ids(corpus, ids);
    std::vector<std::optional<SequenceMatrix>> slots(ids.size());
    parallel_for(ids.size(), threads, [&](std::size_t i) {
        const SongRecord& record = corpus.record_by_id(ids[i]);
        try {
            slots[i] = to_sequence(table, song_tokens(record), max_length);
        } catch (const AllOutOfVocabulary&) {
            slots[i] = std::nullopt;
        }
    });

    SequenceDataset out;
    for (std::size_t i = 0; i < ids.size(); ++i) {
        if (!slots[i]) {
            ++out.skipped;
            continue;
        }
        const SongRecord& record = corpus.record_by_id(ids[i]);
        out.sequences.push_back(std::move(*slots[i]));
        out.labels.push_back(corpus.label_index(record.genre));
        out.ids.push_back(ids[i]);
    }
    return out;
}

int majority_class(const std::vector<int>& labels, int num_classes) {
    std::vector<std::size_t> counts(static_cast<std::size_t>(num_classes), 0);
    for (int label : labels) counts[static_cast<std::size_t>(label)] += 1;
    std::size_t best = 0;
    for (std::size_t c = 1; c < counts.size(); ++c)
        if (counts[c] > counts[best]) best = c;
    return static_cast<int>(best);
}

TrainOutcome train_bundle(const Corpus& corpus, const EmbeddingTable& table,
                          const DataSplit& split,
                          const TrainOptions& options) {
    TrainOutcome outcome;
    outcome.bundle.kind = options.kind;
    outcome.bundle.labels = corpus.labels();
    outcome.bundle.embedding_dim = table.dimension();
    const int num_classes = static_cast<int>(corpus.labels().size());

    if (options.kind == ModelKind::blstm) {
        SequenceDataset train = featurize_sequences(
            corpus, split.train, table, options.max_sequence_length,
            options.threads);
        SequenceDataset validation = featurize_sequences(
            corpus, split.validation, table, options.max_sequence_length,
            options.threads);
        outcome.skipped_train = train.skipped;
        outcome.skipped_validation = validation.skipped;
        if (train.sequences.empty())
            throw EmptyTrainingSet("no featurizable training songs");

        outcome.bundle.majority_class =
            majority_class(train.labels, num_classes);
        outcome.bundle.max_sequence_length = options.max_sequence_length;

        BlstmModel model = init_blstm(options.hidden_size,
                                      static_cast<int>(table.dimension()),
                                      num_classes, options.blstm.seed);
        TrainConfig config = options.blstm;
        config.threads = options.threads;
        outcome.history =
            train_blstm(model, train.sequences, train.labels,
                        validation.sequences, validation.labels, config);
        outcome.bundle.blstm = std::move(model);
        return outcome;
    }

    MeanPoolDataset train =
        featurize_mean(corpus, split.train, table, options.threads);
    outcome.skipped_train = train.skipped;
    if (train.features.empty())
        throw EmptyTrainingSet("no featurizable training songs");
    outcome.bundle.majority_class = majority_class(train.labels, num_classes);

    if (options.kind == ModelKind::svm) {
        outcome.bundle.svm = train_svm(train.features, train.labels,
                                       num_classes, options.svm,
                                       options.threads);
    } else {
        outcome.bundle.forest = train_forest(train.features, train.labels,
                                             num_classes, options.forest,
                                             options.threads);
    }
    return outcome;
}

namespace {

int predict_feature(const ModelBundle& bundle, const FeatureVector& feature) {
    if (bundle.kind == ModelKind::svm) return predict_svm(*bundle.svm, feature);
    return predict_forest(*bundle.forest, feature);
}

}  // namespace

EvaluationOutcome evaluate_bundle(const ModelBundle& bundle,
                                  const Corpus& corpus,
                                  const EmbeddingTable& table,
                                  const std::vector<std::string>& ids,
                                  int threads) {
    if (table.dimension() != bundle.embedding_dim)
        throw DimensionMismatch(
            "embedding dimension " + std::to_string(table.dimension()) +
            " does not match the model's expected dimension " +
            std::to_string(bundle.embedding_dim));

    check_ids(corpus, ids);
    const std::size_t n = ids.size();
    std::vector<int> gold(n), predicted(n);
    std::vector<std::uint8_t> fallback(n, 0);

    if (bundle.kind == ModelKind::blstm) {
        parallel_for(n, threads, [&](std::size_t i) {
            const SongRecord& record = corpus.record_by_id(ids[i]);
            gold[i] = corpus.label_index(record.genre);
            try {
                const SequenceMatrix seq = to_sequence(
                    table, song_tokens(record), bundle.max_sequence_length);
                predicted[i] = blstm_predict(*bundle.blstm, seq);
            } catch (const AllOutOfVocabulary&) {
                predicted[i] = bundle.majority_class;
                fallback[i] = 1;
            }
        });
    } else {
        parallel_for(n, threads, [&](std::size_t i) {
            const SongRecord& record = corpus.record_by_id(ids[i]);
            gold[i] = corpus.label_index(record.genre);
            try {
                const FeatureVector feature =
                    mean_pool(table, song_tokens(record));
                predicted[i] = predict_feature(bundle, feature);
            } catch (const AllOutOfVocabulary&) {
                predicted[i] = bundle.majority_class;
                fallback[i] = 1;
            }
        });
    }

    EvaluationOutcome outcome{confusion(gold, predicted,
                                        bundle.labels.size()),
                              {}, 0};
    outcome.scores = metrics(outcome.matrix);
    for (std::uint8_t f : fallback) outcome.fallback_count += f;
    return outcome;
}

Prediction predict_song(const ModelBundle& bundle, const EmbeddingTable& table,
                        const std::string& title, const std::string& lyrics) {
    if (table.dimension() != bundle.embedding_dim)
        throw DimensionMismatch(
            "embedding dimension " + std::to_string(table.dimension()) +
            " does not match the model's expected dimension " +
            std::to_string(bundle.embedding_dim));

    const TokenSequence tokens = tokenize(normalize(title, lyrics));
    Prediction prediction;
    try {
        if (bundle.kind == ModelKind::blstm) {
            const SequenceMatrix seq =
                to_sequence(table, tokens, bundle.max_sequence_length);
            const Eigen::VectorXd probs = blstm_forward(*bundle.blstm, seq);
            prediction.probabilities.assign(probs.data(),
                                            probs.data() + probs.size());
            Eigen::Index best = 0;
            for (Eigen::Index c = 1; c < probs.size(); ++c)
                if (probs[c] > probs[best]) best = c;
            prediction.class_index = static_cast<int>(best);
        } else {
            const FeatureVector feature = mean_pool(table, tokens);
            prediction.class_index = predict_feature(bundle, feature);
        }
    } catch (const AllOutOfVocabulary&) {
        prediction.class_index = bundle.majority_class;
        prediction.fallback = true;
    }
    return prediction;
}

}  // namespace lyrica
