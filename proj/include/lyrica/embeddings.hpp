#ifndef LYRICA_EMBEDDINGS_HPP
#define LYRICA_EMBEDDINGS_HPP

#include <Eigen/Dense>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "lyrica/textprep.hpp"

namespace lyrica {

// Pre-trained word vectors. Rows are stored single precision; immutable after
// load, so concurrent lookups are safe.
class EmbeddingTable {
public:
    EmbeddingTable(std::size_t dimension) : dimension_(dimension) {}

    std::size_t dimension() const { return dimension_; }
    std::size_t vocabulary_size() const { return index_.size(); }

    // Exact-match lookup; input text is expected to be lowercased already.
    std::optional<std::span<const float>> lookup(const std::string& token) const;

    void add(const std::string& token, std::span<const float> vector);

private:
    std::size_t dimension_;
    std::unordered_map<std::string, std::size_t> index_;
    std::vector<float> matrix_;  // row-major |V| x dimension
};

struct FeatureVector {
    Eigen::VectorXd values;
    std::size_t known_count = 0;  // in-vocabulary token occurrences pooled
};

struct SequenceMatrix {
    Eigen::MatrixXd rows;         // length x dimension, no padding stored
    std::size_t length = 0;       // row count before padding
    std::size_t padded_length = 0;
};

inline constexpr std::size_t kDefaultMaxSequenceLength = 250;

// Plain-text vectors file: header "<count> <dimension>", then one
// "<token> <v1> ... <vdim>" line per word. When restrict_vocab is given, only
// tokens in that set are kept (the memory-saving path for large models).
EmbeddingTable load_embeddings(
    const std::string& path, std::size_t expected_dimension,
    const std::unordered_set<std::string>* restrict_vocab = nullptr);

// Arithmetic mean of the vectors of in-vocabulary token occurrences,
// accumulated in double precision. Out-of-vocabulary tokens are skipped;
// throws AllOutOfVocabulary when nothing is pooled.
FeatureVector mean_pool(const EmbeddingTable& table,
                        const TokenSequence& tokens);

// Vectors of in-vocabulary tokens in order, truncated to the first
// max_length. Throws AllOutOfVocabulary when no token is known.
SequenceMatrix to_sequence(const EmbeddingTable& table,
                           const TokenSequence& tokens,
                           std::size_t max_length = kDefaultMaxSequenceLength);

}  // namespace lyrica

#endif
