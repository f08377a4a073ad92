#ifndef LYRICA_CORPUS_HPP
#define LYRICA_CORPUS_HPP

#include <cstdint>
#include <map>
#include <string>
#include <unordered_map>
#include <vector>

namespace lyrica {

struct SongRecord {
    std::string id;
    std::string title;
    std::string artist;
    std::string genre;
    std::string lyrics;
};

// Immutable after construction; safe to share across threads.
class Corpus {
public:
    Corpus() = default;
    explicit Corpus(std::vector<SongRecord> records);

    const std::vector<SongRecord>& records() const { return records_; }
    std::size_t size() const { return records_.size(); }

    // Distinct genre labels in lexicographic order; index 0..C-1.
    const std::vector<std::string>& labels() const { return labels_; }
    int label_index(const std::string& label) const;

    const SongRecord& record_by_id(const std::string& id) const;
    bool has_id(const std::string& id) const;

private:
    std::vector<SongRecord> records_;
    std::vector<std::string> labels_;
    std::unordered_map<std::string, int> label_index_;
    std::unordered_map<std::string, std::size_t> id_index_;
};

struct SplitSpec {
    double train_fraction = 0.70;
    double validation_fraction = 0.20;
    double test_fraction = 0.10;
    std::uint64_t seed = 0;
};

struct DataSplit {
    std::vector<std::string> train;
    std::vector<std::string> validation;
    std::vector<std::string> test;
};

// Reads a corpus file: UTF-8, one record per line, each line a flat JSON
// object with fields id/title/artist/genre/lyrics (unknown keys ignored).
// Throws IoError or FormatError with the offending line number.
Corpus load_corpus(const std::string& path);

// Removes records whose (artist, title) pair already appeared on an earlier
// line. Returns the surviving corpus and the number removed.
Corpus dedupe_corpus(const Corpus& corpus, std::size_t* removed = nullptr);

// Per class: records shuffled by a generator seeded from (spec.seed, class
// index), then floor(n*train) to train, floor(n*validation) to validation,
// remainder to test. Identical (corpus, spec) always give identical output.
DataSplit stratified_split(const Corpus& corpus, const SplitSpec& spec);

struct GenreStats {
    std::size_t songs = 0;
    std::size_t artists = 0;
};

// Song count and distinct-artist count per genre label.
std::map<std::string, GenreStats> class_distribution(const Corpus& corpus);

// Split file: "[train]" / "[validation]" / "[test]" section headers, one
// record id per line.
void save_split(const DataSplit& split, const std::string& path);
DataSplit load_split(const std::string& path);

}  // namespace lyrica

#endif
