#include <CLI11.hpp>
#include <charconv>
#include <fstream>
#include <iostream>
#include <sstream>
#include <unordered_set>

#include "lyrica/corpus.hpp"
#include "lyrica/embeddings.hpp"
#include "lyrica/errors.hpp"
#include "lyrica/eval.hpp"
#include "lyrica/pipeline.hpp"
#include "lyrica/serialize.hpp"
#include "lyrica/textprep.hpp"

namespace {

std::string format_double(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

lyrica::EmbeddingTable load_table(const std::string& path, std::size_t dim,
                                  bool restrict_vocab,
                                  const lyrica::Corpus* corpus) {
    if (!restrict_vocab || !corpus)
        return lyrica::load_embeddings(path, dim);
    std::unordered_set<std::string> vocab;
    for (const lyrica::SongRecord& record : corpus->records())
        for (std::string& token : lyrica::song_tokens(record))
            vocab.insert(std::move(token));
    return lyrica::load_embeddings(path, dim, &vocab);
}

struct SplitArgs {
    std::string corpus_path, out_path;
    lyrica::SplitSpec spec;
    bool dedupe = false;
};

int run_split(const SplitArgs& args) {
    lyrica::Corpus corpus = lyrica::load_corpus(args.corpus_path);
    if (args.dedupe) {
        std::size_t removed = 0;
        corpus = lyrica::dedupe_corpus(corpus, &removed);
        if (removed > 0)
            std::cerr << "dropped " << removed
                      << " duplicate (artist, title) records\n";
    }
    const lyrica::DataSplit split = lyrica::stratified_split(corpus, args.spec);
    lyrica::save_split(split, args.out_path);
    std::cout << "train " << split.train.size() << "\nvalidation "
              << split.validation.size() << "\ntest " << split.test.size()
              << '\n';
    return 0;
}

struct TrainArgs {
    std::string corpus_path, embeddings_path, split_path, model_path;
    std::string classifier = "blstm";
    std::string history_path;
    std::size_t embedding_dim = 300;
    bool restrict_vocab = false;
    bool dedupe = false;
    std::uint64_t seed = 0;
    lyrica::TrainOptions options;
};

int run_train(TrainArgs& args) {
    args.options.kind = lyrica::model_kind_from_string(args.classifier);
    args.options.svm.seed = args.seed;
    args.options.forest.seed = args.seed;
    args.options.blstm.seed = args.seed;

    lyrica::Corpus corpus = lyrica::load_corpus(args.corpus_path);
    if (args.dedupe) corpus = lyrica::dedupe_corpus(corpus);
    const lyrica::DataSplit split = lyrica::load_split(args.split_path);
    const lyrica::EmbeddingTable table =
        load_table(args.embeddings_path, args.embedding_dim,
                   args.restrict_vocab, &corpus);

    lyrica::TrainOutcome outcome =
        lyrica::train_bundle(corpus, table, split, args.options);
    if (outcome.skipped_train > 0)
        std::cerr << "skipped " << outcome.skipped_train
                  << " all-out-of-vocabulary training songs\n";
    if (outcome.skipped_validation > 0)
        std::cerr << "skipped " << outcome.skipped_validation
                  << " all-out-of-vocabulary validation songs\n";

    if (!outcome.history.empty()) {
        std::ostringstream report;
        report << "epoch\tmean_loss\tvalidation_macro_f1\n";
        for (std::size_t e = 0; e < outcome.history.size(); ++e)
            report << (e + 1) << '\t'
                   << format_double(outcome.history[e].mean_loss) << '\t'
                   << format_double(outcome.history[e].validation_macro_f1)
                   << '\n';
        std::cout << report.str();
        if (!args.history_path.empty()) {
            std::ofstream out(args.history_path, std::ios::binary);
            if (!out)
                throw lyrica::IoError("cannot write history file '" +
                                      args.history_path + "'");
            out << report.str();
        }
    }

    lyrica::save_model(outcome.bundle, args.model_path);
    std::cout << "wrote " << args.model_path << '\n';
    return 0;
}

struct EvaluateArgs {
    std::string corpus_path, embeddings_path, split_path, model_path, out_dir;
    std::string partition = "test";
    bool restrict_vocab = false;
    int threads = 1;
};

int run_evaluate(const EvaluateArgs& args) {
    const lyrica::ModelBundle bundle = lyrica::load_model(args.model_path);
    lyrica::Corpus corpus = lyrica::load_corpus(args.corpus_path);
    const lyrica::DataSplit split = lyrica::load_split(args.split_path);
    const lyrica::EmbeddingTable table =
        load_table(args.embeddings_path, bundle.embedding_dim,
                   args.restrict_vocab, &corpus);

    const std::vector<std::string>* ids = &split.test;
    if (args.partition == "train")
        ids = &split.train;
    else if (args.partition == "validation")
        ids = &split.validation;
    else if (args.partition != "test")
        throw lyrica::Error("unknown partition '" + args.partition + "'");

    const lyrica::EvaluationOutcome outcome =
        lyrica::evaluate_bundle(bundle, corpus, table, *ids, args.threads);
    if (outcome.fallback_count > 0)
        std::cerr << outcome.fallback_count
                  << " all-out-of-vocabulary songs fell back to the majority "
                     "class\n";
    lyrica::report(outcome.scores, outcome.matrix, bundle.labels,
                   args.out_dir);
    std::cout << "macro_precision " << format_double(outcome.scores.macro_precision)
              << "\nmacro_recall " << format_double(outcome.scores.macro_recall)
              << "\nmacro_f1 " << format_double(outcome.scores.macro_f1) << '\n'
              << "wrote " << args.out_dir << "/metrics.tsv, confusion.tsv, "
                 "confusion_normalized.tsv\n";
    return 0;
}

struct PredictArgs {
    std::string model_path, embeddings_path, title, lyrics, lyrics_file;
};

int run_predict(const PredictArgs& args) {
    const lyrica::ModelBundle bundle = lyrica::load_model(args.model_path);
    const lyrica::EmbeddingTable table =
        lyrica::load_embeddings(args.embeddings_path, bundle.embedding_dim);

    std::string lyrics = args.lyrics;
    if (!args.lyrics_file.empty()) {
        std::ifstream in(args.lyrics_file, std::ios::binary);
        if (!in)
            throw lyrica::IoError("cannot open lyrics file '" +
                                  args.lyrics_file + "'");
        std::ostringstream buffer;
        buffer << in.rdbuf();
        lyrics = buffer.str();
    } else if (lyrics.empty()) {
        std::ostringstream buffer;
        buffer << std::cin.rdbuf();
        lyrics = buffer.str();
    }

    const lyrica::Prediction prediction =
        lyrica::predict_song(bundle, table, args.title, lyrics);
    if (prediction.fallback)
        std::cerr << "warning: no token in vocabulary; falling back to the "
                     "majority class\n";
    std::cout << bundle.labels[static_cast<std::size_t>(
                     prediction.class_index)]
              << '\n';
    for (std::size_t c = 0; c < prediction.probabilities.size(); ++c)
        std::cout << bundle.labels[c] << '\t'
                  << format_double(prediction.probabilities[c]) << '\n';
    return 0;
}

struct StatsArgs {
    std::string corpus_path, out_path;
};

int run_stats(const StatsArgs& args) {
    const lyrica::Corpus corpus = lyrica::load_corpus(args.corpus_path);
    const auto stats = lyrica::class_distribution(corpus);

    std::vector<std::pair<std::string, lyrica::GenreStats>> rows(stats.begin(),
                                                                 stats.end());
    std::sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) {
        if (a.second.songs != b.second.songs)
            return a.second.songs > b.second.songs;
        return a.first < b.first;
    });

    std::ostringstream table;
    table << "genre\tsongs\tartists\n";
    for (const auto& [genre, s] : rows)
        table << genre << '\t' << s.songs << '\t' << s.artists << '\n';

    if (args.out_path.empty()) {
        std::cout << table.str();
    } else {
        std::ofstream out(args.out_path, std::ios::binary);
        if (!out)
            throw lyrica::IoError("cannot write stats file '" + args.out_path +
                                  "'");
        out << table.str();
        std::cout << "wrote " << args.out_path << '\n';
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Lyrics-based music genre classification"};
    app.require_subcommand(1);
    app.set_config("--config", "",
                   "Read options from an INI file ([subcommand] sections); "
                   "flags override file values");

    SplitArgs split_args;
    CLI::App* split = app.add_subcommand(
        "split", "Write a stratified train/validation/test split");
    split->configurable();
    split->add_option("--corpus", split_args.corpus_path, "Corpus file")
        ->required();
    split->add_option("--out", split_args.out_path, "Output split file")
        ->required();
    split->add_option("--train-fraction", split_args.spec.train_fraction);
    split->add_option("--validation-fraction",
                      split_args.spec.validation_fraction);
    split->add_option("--test-fraction", split_args.spec.test_fraction);
    split->add_option("--seed", split_args.spec.seed, "Split shuffle seed");
    split->add_flag("--dedupe", split_args.dedupe,
                    "Drop later duplicate (artist, title) records");

    TrainArgs train_args;
    CLI::App* train = app.add_subcommand("train", "Train a classifier");
    train->configurable();
    train->add_option("--corpus", train_args.corpus_path)->required();
    train->add_option("--embeddings", train_args.embeddings_path)->required();
    train->add_option("--split", train_args.split_path)->required();
    train->add_option("--model", train_args.model_path, "Output model file")
        ->required();
    train
        ->add_option("--classifier", train_args.classifier,
                     "svm | forest | blstm")
        ->check(CLI::IsMember({"svm", "forest", "blstm"}));
    train->add_option("--seed", train_args.seed, "Master seed");
    train->add_option("--threads", train_args.options.threads);
    train->add_option("--dim", train_args.embedding_dim,
                      "Expected embedding dimension");
    train->add_flag("--restrict-vocab", train_args.restrict_vocab,
                    "Load only vectors for tokens present in the corpus");
    train->add_flag("--dedupe", train_args.dedupe);
    train->add_option("--history", train_args.history_path,
                      "Write the blstm per-epoch report here");
    train->add_option("--svm-c-reg", train_args.options.svm.c_reg);
    train->add_option("--svm-epochs", train_args.options.svm.epochs);
    train->add_option("--trees", train_args.options.forest.trees);
    train->add_option("--features-per-split",
                      train_args.options.forest.features_per_split,
                      "0 selects floor(sqrt(d))");
    bool no_bootstrap = false;
    train->add_flag("--no-bootstrap", no_bootstrap,
                    "Train every tree on the full sample");
    train->add_option("--epochs", train_args.options.blstm.epochs);
    train->add_option("--batch-size", train_args.options.blstm.batch_size);
    train->add_option("--hidden", train_args.options.hidden_size);
    train->add_option("--learning-rate",
                      train_args.options.blstm.learning_rate);
    train->add_option("--adam-beta1", train_args.options.blstm.beta1);
    train->add_option("--adam-beta2", train_args.options.blstm.beta2);
    train->add_option("--adam-epsilon", train_args.options.blstm.epsilon);
    train->add_option("--clip-norm", train_args.options.blstm.clip_norm);
    train->add_option("--max-length",
                      train_args.options.max_sequence_length,
                      "Sequence truncation length for blstm");

    EvaluateArgs eval_args;
    CLI::App* evaluate = app.add_subcommand(
        "evaluate", "Score a trained model and write report files");
    evaluate->configurable();
    evaluate->add_option("--corpus", eval_args.corpus_path)->required();
    evaluate->add_option("--embeddings", eval_args.embeddings_path)->required();
    evaluate->add_option("--split", eval_args.split_path)->required();
    evaluate->add_option("--model", eval_args.model_path)->required();
    evaluate->add_option("--out", eval_args.out_dir, "Report directory")
        ->required();
    evaluate->add_option("--partition", eval_args.partition,
                         "train | validation | test");
    evaluate->add_option("--threads", eval_args.threads);
    evaluate->add_flag("--restrict-vocab", eval_args.restrict_vocab);

    PredictArgs predict_args;
    CLI::App* predict = app.add_subcommand(
        "predict", "Classify one song (lyrics from flag, file, or stdin)");
    predict->configurable();
    predict->add_option("--model", predict_args.model_path)->required();
    predict->add_option("--embeddings", predict_args.embeddings_path)
        ->required();
    predict->add_option("--title", predict_args.title);
    predict->add_option("--lyrics", predict_args.lyrics);
    predict->add_option("--lyrics-file", predict_args.lyrics_file);

    StatsArgs stats_args;
    CLI::App* stats = app.add_subcommand(
        "stats", "Per-genre song and artist counts");
    stats->configurable();
    stats->add_option("--corpus", stats_args.corpus_path)->required();
    stats->add_option("--out", stats_args.out_path,
                      "Write the table here instead of stdout");

    try {
        app.parse(argc, argv);
        if (split->parsed()) return run_split(split_args);
        if (train->parsed()) {
            if (no_bootstrap) train_args.options.forest.bootstrap = false;
            return run_train(train_args);
        }
        if (evaluate->parsed()) return run_evaluate(eval_args);
        if (predict->parsed()) return run_predict(predict_args);
        if (stats->parsed()) return run_stats(stats_args);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const lyrica::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "unexpected error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
