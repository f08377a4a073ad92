#ifndef LYRICA_TESTS_HELPERS_HPP
#define LYRICA_TESTS_HELPERS_HPP

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <unistd.h>
#include <utility>
#include <vector>

#include "lyrica/blstm.hpp"
#include "lyrica/corpus.hpp"
#include "lyrica/embeddings.hpp"
#include "lyrica/rng.hpp"

namespace testutil {

class TempDir {
public:
    TempDir() {
        static std::atomic<unsigned> counter{0};
        const auto base = std::filesystem::temp_directory_path();
        path_ = base / ("lyrica-test-" + std::to_string(::getpid()) + "-" +
                        std::to_string(counter++));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    const std::filesystem::path& path() const { return path_; }
    std::string file(const std::string& name) const {
        return (path_ / name).string();
    }

private:
    std::filesystem::path path_;
};

inline void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    out << content;
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

inline std::string json_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\r': out += "\\r"; break;
            case '\t': out += "\\t"; break;
            default: out += c;
        }
    }
    return out;
}

inline std::string record_line(const std::string& id, const std::string& title,
                               const std::string& artist,
                               const std::string& genre,
                               const std::string& lyrics) {
    return "{\"id\":\"" + json_escape(id) + "\",\"title\":\"" +
           json_escape(title) + "\",\"artist\":\"" + json_escape(artist) +
           "\",\"genre\":\"" + json_escape(genre) + "\",\"lyrics\":\"" +
           json_escape(lyrics) + "\"}";
}

// Builds an embedding table in memory.
inline lyrica::EmbeddingTable make_table(
    std::size_t dim,
    const std::vector<std::pair<std::string, std::vector<float>>>& rows) {
    lyrica::EmbeddingTable table(dim);
    for (const auto& [token, vec] : rows) table.add(token, vec);
    return table;
}

// Writes the plain-text vectors format for the given rows.
inline std::string embeddings_text(
    std::size_t dim,
    const std::vector<std::pair<std::string, std::vector<float>>>& rows) {
    std::ostringstream out;
    out << rows.size() << ' ' << dim << '\n';
    for (const auto& [token, vec] : rows) {
        out << token;
        for (float v : vec) out << ' ' << v;
        out << '\n';
    }
    return out.str();
}

// ---------------------------------------------------------------------------
// Synthetic three-genre corpus with disjoint keyword vocabularies and a toy
// embedding table. Class keyword vectors cluster around orthogonal centers,
// so mean-pooled features are linearly separable by construction.
// ---------------------------------------------------------------------------

struct SynthData {
    lyrica::Corpus corpus;
    lyrica::EmbeddingTable table{10};
    std::vector<std::string> train_ids;
    std::vector<std::string> heldout_ids;
    std::vector<std::pair<std::string, std::vector<float>>> vector_rows;
};

inline SynthData make_synthetic(std::size_t train_per_class = 20,
                                std::size_t heldout_per_class = 10,
                                std::uint64_t seed = 2024) {
    const std::size_t dim = 10;
    const std::vector<std::string> genres = {"funk", "gospel", "sertanejo"};
    const std::vector<std::vector<std::string>> keywords = {
        {"bonde", "baile", "chão", "pancadão", "grave", "fluxo", "mandela",
         "favela"},
        {"deus", "senhor", "jesus", "glória", "fé", "altar", "céu", "graça"},
        {"amor", "coração", "saudade", "estrada", "viola", "rodeio",
         "paixão", "interior"},
    };
    const std::vector<std::string> fillers = {"a", "o", "de", "que", "no",
                                              "me"};

    lyrica::Rng rng(seed);
    auto noise_vec = [&](double scale) {
        std::vector<float> v(dim);
        for (auto& x : v)
            x = static_cast<float>(rng.next_double(-scale, scale));
        return v;
    };

    SynthData data;
    for (std::size_t c = 0; c < genres.size(); ++c) {
        for (const std::string& word : keywords[c]) {
            std::vector<float> v = noise_vec(0.3);
            v[c] += 1.0f;  // orthogonal class centers in the first 3 axes
            data.vector_rows.emplace_back(word, std::move(v));
        }
    }
    for (const std::string& word : fillers)
        data.vector_rows.emplace_back(word, noise_vec(0.2));

    lyrica::EmbeddingTable table(dim);
    for (const auto& [token, vec] : data.vector_rows) table.add(token, vec);
    data.table = std::move(table);

    std::vector<lyrica::SongRecord> records;
    std::size_t next_id = 0;
    auto make_song = [&](std::size_t c) {
        const auto& words = keywords[c];
        std::ostringstream lyrics;
        const std::size_t len = 12 + rng.next_below(8);
        for (std::size_t k = 0; k < len; ++k) {
            if (k > 0) lyrics << ' ';
            if (rng.next_below(10) < 7)
                lyrics << words[rng.next_below(words.size())];
            else
                lyrics << fillers[rng.next_below(fillers.size())];
        }
        lyrica::SongRecord rec;
        rec.id = "s" + std::to_string(next_id++);
        rec.title = words[rng.next_below(words.size())];
        rec.artist = "artist-" + std::to_string(rng.next_below(9));
        rec.genre = genres[c];
        rec.lyrics = lyrics.str();
        return rec;
    };

    for (std::size_t c = 0; c < genres.size(); ++c)
        for (std::size_t k = 0; k < train_per_class; ++k) {
            records.push_back(make_song(c));
            data.train_ids.push_back(records.back().id);
        }
    for (std::size_t c = 0; c < genres.size(); ++c)
        for (std::size_t k = 0; k < heldout_per_class; ++k) {
            records.push_back(make_song(c));
            data.heldout_ids.push_back(records.back().id);
        }
    data.corpus = lyrica::Corpus(std::move(records));
    return data;
}

inline std::string corpus_text(const lyrica::Corpus& corpus) {
    std::ostringstream out;
    for (const auto& r : corpus.records())
        out << record_line(r.id, r.title, r.artist, r.genre, r.lyrics) << '\n';
    return out.str();
}

// ---------------------------------------------------------------------------
// Finite-difference gradient oracle for the BLSTM. Independent of the
// analytic backward pass: it only calls the forward path.
// ---------------------------------------------------------------------------

inline lyrica::BlstmParams numeric_gradients(lyrica::BlstmModel& model,
                                             const lyrica::SequenceMatrix& seq,
                                             int gold, double step = 1e-5) {
    lyrica::BlstmParams numeric = lyrica::zeros_like(model.params);
    auto params = lyrica::param_views(model.params);
    auto out = lyrica::param_views(numeric);
    for (std::size_t k = 0; k < params.size(); ++k) {
        for (Eigen::Index j = 0; j < params[k].size(); ++j) {
            const double original = params[k][j];
            params[k][j] = original + step;
            const double up =
                lyrica::cross_entropy(lyrica::blstm_forward(model, seq), gold);
            params[k][j] = original - step;
            const double down =
                lyrica::cross_entropy(lyrica::blstm_forward(model, seq), gold);
            params[k][j] = original;
            out[k][j] = (up - down) / (2.0 * step);
        }
    }
    return numeric;
}

inline double relative_error(double a, double b) {
    const double denom = std::max({std::abs(a), std::abs(b), 1e-6});
    return std::abs(a - b) / denom;
}

inline double max_gradient_error(const lyrica::BlstmParams& analytic,
                                 const lyrica::BlstmParams& numeric) {
    auto va = lyrica::param_views(analytic);
    auto vn = lyrica::param_views(numeric);
    double worst = 0.0;
    for (std::size_t k = 0; k < va.size(); ++k)
        for (Eigen::Index j = 0; j < va[k].size(); ++j)
            worst = std::max(worst, relative_error(va[k][j], vn[k][j]));
    return worst;
}

// Random small model/sequence pair for gradient checks.
inline lyrica::BlstmModel random_model(int hidden, int input_dim, int classes,
                                       std::uint64_t seed) {
    lyrica::BlstmModel model =
        lyrica::init_blstm(hidden, input_dim, classes, seed);
    lyrica::Rng rng(lyrica::derive_seed(seed, 99));
    for (auto view : lyrica::param_views(model.params))
        for (Eigen::Index j = 0; j < view.size(); ++j)
            view[j] += rng.next_double(-0.1, 0.1);
    return model;
}

inline lyrica::SequenceMatrix random_sequence(Eigen::Index steps,
                                              Eigen::Index dim,
                                              std::uint64_t seed) {
    lyrica::SequenceMatrix seq;
    seq.length = static_cast<std::size_t>(steps);
    seq.padded_length = static_cast<std::size_t>(steps);
    seq.rows.resize(steps, dim);
    lyrica::Rng rng(seed);
    for (Eigen::Index j = 0; j < seq.rows.size(); ++j)
        seq.rows.data()[j] = rng.next_double(-1.0, 1.0);
    return seq;
}

}  // namespace testutil

#endif
