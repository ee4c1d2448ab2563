#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cloze/assembler.hpp"
#include "cloze/embeddings.hpp"

namespace cloze {

struct RunConfig {
    int batch_size = 16;
    int max_seq_len = 128;
    double learning_rate = 2e-5;
    int epochs = 50;
    double dropout = 0.1;
    int kfold = 10;
    double weight_decay = 0.01;
    std::uint64_t seed = 1;
    bool matrix_w = false;  // score with (W h_b) . E_i instead of w (h_b . E_i)

    void validate() const;  // throws ConfigError
};

// Anything that maps a masked stem to a context vector h_b. Implementations
// must be deterministic and keep a fixed output dimension.
class ContextualEncoder {
public:
    virtual ~ContextualEncoder() = default;
    virtual int dim() const = 0;
    virtual Vec encode(const Question& q) const = 0;
    virtual std::string name() const = 0;
};

// Mean of the context token vectors within +-max_seq_len/2 tokens of the
// blank, excluding the blank span itself. A stand-in for heavier sentence
// encoders; exact and fast.
class ReferenceEncoder : public ContextualEncoder {
public:
    explicit ReferenceEncoder(const EmbeddingTable& table, int max_seq_len = 128);

    int dim() const override { return table_->dim(); }
    Vec encode(const Question& q) const override { return encode_stem(q.stem); }
    std::string name() const override { return "reference"; }

    // *all_oov is set when no context token was found in the table (the
    // result is then a zero vector).
    Vec encode_stem(const Stem& stem, bool* all_oov = nullptr) const;

private:
    const EmbeddingTable* table_;
    int max_seq_len_;
};

// Context vectors computed elsewhere, keyed by qid. Lets external sentence
// encoders plug in through a file instead of a runtime dependency.
// File format: JSONL records {"qid": ..., "h_b": [floats]}.
class PrecomputedEncoder : public ContextualEncoder {
public:
    static PrecomputedEncoder load(const std::filesystem::path& path);

    void insert(std::string qid, Vec h);
    int dim() const override { return dim_; }
    Vec encode(const Question& q) const override;  // throws DataError on unknown qid
    std::string name() const override { return "precomputed"; }

private:
    int dim_ = 0;
    std::map<std::string, Vec> by_qid_;
};

// A question with its context vector resolved; what the trainer operates on.
struct EncodedQuestion {
    std::string qid;
    Vec h;
    std::array<PhraseId, 4> candidates{};
    int answer = 0;
    SetType set_type = SetType::R3;
    PoolKind pool = PoolKind::Combined;
    std::string split;
    std::uint64_t group = 0;
};

std::vector<EncodedQuestion> encode_questions(const std::vector<Question>& questions,
                                              const ContextualEncoder& encoder);

// Candidate scorer: logit_i = w (h_b . E_i) + b, or (W h_b) . E_i + b in
// matrix mode. E_i is the frozen static part plus the trainable part; only
// w, b, W and the trainable parts ever receive updates.
struct ScoringHead {
    bool matrix_mode = false;
    int d_h = 0;
    int d_e = 0;
    double w = 1.0;
    double b = 0.0;
    std::vector<double> W;             // d_e x d_h, row-major; matrix mode only
    std::map<PhraseId, Vec> frozen;
    std::map<PhraseId, Vec> trainable;

    Vec candidate_vector(PhraseId id) const;
};

// Which static representation each phrase kind uses.
struct RepChoice {
    std::optional<RepMode> idiom_mode;
    std::optional<RepMode> fixed_mode;

    void validate() const;  // literal modes are rejected for idioms
    std::string idiom_label() const;
    std::string fixed_label() const;
};

// Builds a head covering every phrase that appears as a candidate in
// `questions`.
ScoringHead make_scoring_head(const std::vector<EncodedQuestion>& questions, const Lexicon& lexicon,
                              const EmbeddingTable& table, const RepChoice& reps,
                              std::uint64_t seed, bool matrix_mode = false);

std::array<double, 4> softmax4(const std::array<double, 4>& logits);

// Probabilities over the four candidates. Throws DataError on dimension
// mismatch.
std::array<double, 4> score_candidates(std::span<const double> h_b,
                                       const std::array<std::span<const double>, 4>& candidates,
                                       const ScoringHead& head);

std::array<double, 4> question_scores(const EncodedQuestion& q, const ScoringHead& head);
int predict(const EncodedQuestion& q, const ScoringHead& head);  // argmax, lowest index wins ties

struct Gradients {
    double w = 0.0;
    double b = 0.0;
    std::vector<double> W;
    std::map<PhraseId, Vec> trainable;
};

// Mean cross-entropy over the batch. When `out` is given, fills analytic
// gradients for every trainable parameter. `h_override` substitutes the
// stored context vectors (used for dropout during training).
double batch_loss(const std::vector<const EncodedQuestion*>& batch, const ScoringHead& head,
                  Gradients* out = nullptr, const std::vector<Vec>* h_override = nullptr);

struct EpochStats {
    double train_loss = 0.0;
    double train_accuracy = 0.0;
    double valid_accuracy = 0.0;
};

struct TrainResult {
    ScoringHead best;
    int best_epoch = -1;
    std::vector<EpochStats> history;
};

// AdamW + cross-entropy loop over shuffled mini-batches; keeps the
// checkpoint with the best validation accuracy. Frozen representation parts
// are never touched.
TrainResult train(const std::vector<EncodedQuestion>& train_set,
                  const std::vector<EncodedQuestion>& valid_set, ScoringHead head,
                  const RunConfig& cfg);

struct AccuracyCell {
    long total = 0;
    long correct = 0;
    double accuracy() const { return total == 0 ? 0.0 : static_cast<double>(correct) / static_cast<double>(total); }
};

using AccuracyGrid = std::map<std::pair<PoolKind, SetType>, AccuracyCell>;

AccuracyGrid evaluate(const std::vector<EncodedQuestion>& questions, const ScoringHead& head);
double overall_accuracy(const std::vector<EncodedQuestion>& questions, const ScoringHead& head);

// One experiment cell: a pool plus the reps used for each phrase kind.
struct GridCombo {
    PoolKind pool = PoolKind::Combined;
    RepChoice reps;
};

// The built-in experiment grid: per-kind single-pool runs plus the six
// mixed-pool representation pairings.
std::vector<GridCombo> standard_grid();

enum class EvalScheme { KFold, Holdout };

// Runs every (combo, set type) cell and writes the report CSV:
//   kfold   — one row per fold, trained on the others, scored on the fold
//   holdout — uses the stored split labels, one row per split
// Header: pool,set_type,idiom_rep,fixed_rep,encoder,fold,split,accuracy
void run_experiment_grid(const std::vector<Question>& questions, const Lexicon& lexicon,
                         const EmbeddingTable& table, const ContextualEncoder& encoder,
                         const RunConfig& cfg, const std::vector<GridCombo>& combos,
                         EvalScheme scheme, std::uint64_t seed, std::ostream& csv);

}  // namespace cloze
