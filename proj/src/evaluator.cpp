#include "cloze/evaluator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>
#include <unordered_map>

#include <nlohmann/json.hpp>

#include "cloze/error.hpp"
#include "cloze/hashing.hpp"
#include "cloze/text.hpp"

namespace cloze {

void RunConfig::validate() const {
    if (batch_size < 1) throw ConfigError("batch_size must be >= 1");
    if (max_seq_len < 2) throw ConfigError("max_seq_len must be >= 2");
    if (epochs < 0) throw ConfigError("epochs must be >= 0");
    if (!(learning_rate >= 0.0)) throw ConfigError("learning_rate must be >= 0");
    if (!(dropout >= 0.0 && dropout < 1.0)) throw ConfigError("dropout must be in [0, 1)");
    if (kfold < 2) throw ConfigError("kfold must be >= 2");
    if (!(weight_decay >= 0.0)) throw ConfigError("weight_decay must be >= 0");
}

ReferenceEncoder::ReferenceEncoder(const EmbeddingTable& table, int max_seq_len)
    : table_(&table), max_seq_len_(max_seq_len) {
    if (max_seq_len < 2) throw ConfigError("max_seq_len must be >= 2");
}

Vec ReferenceEncoder::encode_stem(const Stem& stem, bool* all_oov) const {
    const long half = max_seq_len_ / 2;
    const long n = static_cast<long>(stem.tokens.size());
    const long lo = std::max<long>(0, stem.blank_start - half);
    const long hi = std::min<long>(n, stem.blank_start + stem.blank_len + half);

    Vec out(static_cast<std::size_t>(table_->dim()), 0.0);
    long used = 0;
    for (long i = lo; i < hi; ++i) {
        if (i >= stem.blank_start && i < stem.blank_start + stem.blank_len) continue;
        const Vec* v = table_->find(to_lower(stem.tokens[static_cast<std::size_t>(i)]));
        if (v == nullptr) continue;
        for (std::size_t j = 0; j < out.size(); ++j) out[j] += (*v)[j];
        ++used;
    }
    if (all_oov != nullptr) *all_oov = (used == 0);
    if (used > 0) {
        for (double& x : out) x /= static_cast<double>(used);
    }
    return out;
}

PrecomputedEncoder PrecomputedEncoder::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open context vector file: " + path.string());
    PrecomputedEncoder enc;
    std::string line;
    long lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (rtrim(line).empty()) continue;
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception&) {
            throw DataError(path.string() + ":" + std::to_string(lineno) + ": malformed context vector record");
        }
        if (lineno == 1 && j.contains("_meta")) continue;
        if (!j.is_object() || !j.contains("qid") || !j.contains("h_b") || !j["h_b"].is_array()) {
            throw DataError(path.string() + ":" + std::to_string(lineno) + ": malformed context vector record");
        }
        Vec h;
        h.reserve(j["h_b"].size());
        for (const auto& x : j["h_b"]) {
            if (!x.is_number()) {
                throw DataError(path.string() + ":" + std::to_string(lineno) + ": non-numeric vector entry");
            }
            h.push_back(x.get<double>());
        }
        enc.insert(j["qid"].get<std::string>(), std::move(h));
    }
    return enc;
}

void PrecomputedEncoder::insert(std::string qid, Vec h) {
    if (h.empty()) throw DataError("empty context vector for qid " + qid);
    if (dim_ == 0) {
        dim_ = static_cast<int>(h.size());
    } else if (static_cast<int>(h.size()) != dim_) {
        throw DataError("context vector dimension mismatch for qid " + qid);
    }
    if (!by_qid_.emplace(std::move(qid), std::move(h)).second) {
        throw DataError("duplicate context vector for a qid");
    }
}

Vec PrecomputedEncoder::encode(const Question& q) const {
    auto it = by_qid_.find(q.qid);
    if (it == by_qid_.end()) throw DataError("no precomputed context vector for qid " + q.qid);
    return it->second;
}

std::vector<EncodedQuestion> encode_questions(const std::vector<Question>& questions,
                                              const ContextualEncoder& encoder) {
    std::vector<EncodedQuestion> out;
    out.reserve(questions.size());
    for (const Question& q : questions) {
        EncodedQuestion e;
        e.qid = q.qid;
        e.h = encoder.encode(q);
        if (static_cast<int>(e.h.size()) != encoder.dim()) {
            throw DataError("encoder returned wrong dimension for qid " + q.qid);
        }
        e.candidates = q.candidates;
        e.answer = q.answer_index;
        e.set_type = q.set_type;
        e.pool = q.pool;
        e.split = q.split;
        e.group = stem_group_key(q);
        out.push_back(std::move(e));
    }
    return out;
}

Vec ScoringHead::candidate_vector(PhraseId id) const {
    Vec out(static_cast<std::size_t>(d_e), 0.0);
    if (auto it = frozen.find(id); it != frozen.end()) {
        for (std::size_t j = 0; j < out.size(); ++j) out[j] += it->second[j];
    }
    if (auto it = trainable.find(id); it != trainable.end()) {
        for (std::size_t j = 0; j < out.size(); ++j) out[j] += it->second[j];
    }
    return out;
}

void RepChoice::validate() const {
    if (idiom_mode && (*idiom_mode == RepMode::Lit || *idiom_mode == RepMode::LitPlusRandom)) {
        throw ConfigError("literal representations are not defined for idioms");
    }
}

std::string RepChoice::idiom_label() const {
    return idiom_mode ? std::string(rep_mode_name(*idiom_mode)) : std::string("-");
}
std::string RepChoice::fixed_label() const {
    return fixed_mode ? std::string(rep_mode_name(*fixed_mode)) : std::string("-");
}

ScoringHead make_scoring_head(const std::vector<EncodedQuestion>& questions, const Lexicon& lexicon,
                              const EmbeddingTable& table, const RepChoice& reps,
                              std::uint64_t seed, bool matrix_mode) {
    reps.validate();
    if (questions.empty()) throw DataError("no questions to build a scoring head for");

    ScoringHead head;
    head.matrix_mode = matrix_mode;
    head.d_h = static_cast<int>(questions.front().h.size());
    head.d_e = table.dim();

    std::vector<PhraseId> ids;
    for (const EncodedQuestion& q : questions) {
        if (static_cast<int>(q.h.size()) != head.d_h) {
            throw DataError("context vector dimension mismatch for qid " + q.qid);
        }
        for (PhraseId id : q.candidates) ids.push_back(id);
    }
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());

    for (PhraseId id : ids) {
        const Phrase& p = lexicon.at(id);
        std::optional<RepMode> mode = p.kind == PhraseKind::Idiom ? reps.idiom_mode : reps.fixed_mode;
        if (!mode) {
            throw ConfigError("no representation mode configured for " + std::string(kind_name(p.kind)) +
                              " phrases (needed by \"" + p.surface + "\")");
        }
        StaticRepConfig rc;
        rc.mode = *mode;
        rc.seed = seed;
        RepParts parts = build_static_rep_parts(p, rc, table);
        if (!parts.frozen.empty()) head.frozen.emplace(id, std::move(parts.frozen));
        if (!parts.trainable_init.empty()) head.trainable.emplace(id, std::move(parts.trainable_init));
    }

    if (matrix_mode) {
        head.W.assign(static_cast<std::size_t>(head.d_e) * static_cast<std::size_t>(head.d_h), 0.0);
        if (head.d_e == head.d_h) {
            for (int i = 0; i < head.d_e; ++i) {
                head.W[static_cast<std::size_t>(i) * static_cast<std::size_t>(head.d_h) + static_cast<std::size_t>(i)] = 1.0;
            }
        } else {
            Rng rng(mix_seed(seed, 0x3a7f));
            for (double& x : head.W) x = rng.gaussian(0.0, 0.02);
        }
    }
    return head;
}

std::array<double, 4> softmax4(const std::array<double, 4>& logits) {
    double m = logits[0];
    for (int i = 1; i < 4; ++i) m = std::max(m, logits[i]);
    std::array<double, 4> out{};
    double sum = 0.0;
    for (int i = 0; i < 4; ++i) {
        out[static_cast<std::size_t>(i)] = std::exp(logits[static_cast<std::size_t>(i)] - m);
        sum += out[static_cast<std::size_t>(i)];
    }
    for (double& x : out) x /= sum;
    return out;
}

namespace {

std::array<double, 4> logits_for(std::span<const double> h,
                                 const std::array<std::span<const double>, 4>& cands,
                                 const ScoringHead& head, Vec* u_out = nullptr) {
    std::array<double, 4> z{};
    if (head.matrix_mode) {
        if (static_cast<int>(h.size()) != head.d_h) throw DataError("context vector dimension mismatch");
        Vec u(static_cast<std::size_t>(head.d_e), 0.0);
        for (int e = 0; e < head.d_e; ++e) {
            const double* row = head.W.data() + static_cast<std::size_t>(e) * static_cast<std::size_t>(head.d_h);
            double acc = 0.0;
            for (int j = 0; j < head.d_h; ++j) acc += row[j] * h[static_cast<std::size_t>(j)];
            u[static_cast<std::size_t>(e)] = acc;
        }
        for (int i = 0; i < 4; ++i) {
            if (static_cast<int>(cands[static_cast<std::size_t>(i)].size()) != head.d_e) {
                throw DataError("candidate dimension mismatch");
            }
            z[static_cast<std::size_t>(i)] = dot(u, cands[static_cast<std::size_t>(i)]) + head.b;
        }
        if (u_out != nullptr) *u_out = std::move(u);
    } else {
        for (int i = 0; i < 4; ++i) {
            if (cands[static_cast<std::size_t>(i)].size() != h.size()) {
                throw DataError("candidate dimension mismatch");
            }
            z[static_cast<std::size_t>(i)] = head.w * dot(h, cands[static_cast<std::size_t>(i)]) + head.b;
        }
    }
    return z;
}

}  // namespace

std::array<double, 4> score_candidates(std::span<const double> h_b,
                                       const std::array<std::span<const double>, 4>& candidates,
                                       const ScoringHead& head) {
    return softmax4(logits_for(h_b, candidates, head));
}

std::array<double, 4> question_scores(const EncodedQuestion& q, const ScoringHead& head) {
    std::array<Vec, 4> store;
    std::array<std::span<const double>, 4> spans;
    for (int i = 0; i < 4; ++i) {
        store[static_cast<std::size_t>(i)] = head.candidate_vector(q.candidates[static_cast<std::size_t>(i)]);
        spans[static_cast<std::size_t>(i)] = store[static_cast<std::size_t>(i)];
    }
    return score_candidates(q.h, spans, head);
}

int predict(const EncodedQuestion& q, const ScoringHead& head) {
    std::array<double, 4> p = question_scores(q, head);
    int best = 0;
    for (int i = 1; i < 4; ++i) {
        if (p[static_cast<std::size_t>(i)] > p[static_cast<std::size_t>(best)]) best = i;
    }
    return best;
}

double batch_loss(const std::vector<const EncodedQuestion*>& batch, const ScoringHead& head,
                  Gradients* out, const std::vector<Vec>* h_override) {
    if (batch.empty()) throw DataError("empty batch");
    if (h_override != nullptr && h_override->size() != batch.size()) {
        throw DataError("context override size mismatch");
    }
    if (out != nullptr) {
        out->w = 0.0;
        out->b = 0.0;
        out->W.assign(head.matrix_mode ? head.W.size() : 0, 0.0);
        out->trainable.clear();
    }

    const double inv = 1.0 / static_cast<double>(batch.size());
    double total = 0.0;

    for (std::size_t bi = 0; bi < batch.size(); ++bi) {
        const EncodedQuestion& ex = *batch[bi];
        const Vec& h = h_override != nullptr ? (*h_override)[bi] : ex.h;

        std::array<Vec, 4> cand;
        std::array<std::span<const double>, 4> spans;
        for (int i = 0; i < 4; ++i) {
            cand[static_cast<std::size_t>(i)] = head.candidate_vector(ex.candidates[static_cast<std::size_t>(i)]);
            spans[static_cast<std::size_t>(i)] = cand[static_cast<std::size_t>(i)];
        }

        Vec u;
        std::array<double, 4> z = logits_for(h, spans, head, head.matrix_mode ? &u : nullptr);

        double m = z[0];
        for (int i = 1; i < 4; ++i) m = std::max(m, z[static_cast<std::size_t>(i)]);
        double sum = 0.0;
        for (double zi : z) sum += std::exp(zi - m);
        const double lse = m + std::log(sum);
        total += lse - z[static_cast<std::size_t>(ex.answer)];

        if (out == nullptr) continue;

        std::array<double, 4> alpha = softmax4(z);
        Vec du;
        if (head.matrix_mode) du.assign(static_cast<std::size_t>(head.d_e), 0.0);

        for (int i = 0; i < 4; ++i) {
            const double dz = alpha[static_cast<std::size_t>(i)] - (i == ex.answer ? 1.0 : 0.0);
            out->b += dz * inv;
            if (head.matrix_mode) {
                for (int e = 0; e < head.d_e; ++e) {
                    du[static_cast<std::size_t>(e)] += dz * cand[static_cast<std::size_t>(i)][static_cast<std::size_t>(e)];
                }
            } else {
                out->w += dz * dot(h, cand[static_cast<std::size_t>(i)]) * inv;
            }
            const PhraseId pid = ex.candidates[static_cast<std::size_t>(i)];
            if (head.trainable.count(pid) != 0) {
                Vec& g = out->trainable.try_emplace(pid, Vec(static_cast<std::size_t>(head.d_e), 0.0)).first->second;
                if (head.matrix_mode) {
                    for (int e = 0; e < head.d_e; ++e) {
                        g[static_cast<std::size_t>(e)] += dz * u[static_cast<std::size_t>(e)] * inv;
                    }
                } else {
                    for (int j = 0; j < head.d_e; ++j) {
                        g[static_cast<std::size_t>(j)] += dz * head.w * h[static_cast<std::size_t>(j)] * inv;
                    }
                }
            }
        }
        if (head.matrix_mode) {
            for (int e = 0; e < head.d_e; ++e) {
                double* row = out->W.data() + static_cast<std::size_t>(e) * static_cast<std::size_t>(head.d_h);
                for (int j = 0; j < head.d_h; ++j) {
                    row[j] += du[static_cast<std::size_t>(e)] * h[static_cast<std::size_t>(j)] * inv;
                }
            }
        }
    }
    return total * inv;
}

namespace {

struct AdamState {
    Vec m;
    Vec v;
    long t = 0;
};

// decoupled weight decay; decay is skipped when wd == 0 (used for the bias)
void adamw_step(double* theta, const double* grad, std::size_t n, AdamState& st, double lr, double wd) {
    constexpr double b1 = 0.9;
    constexpr double b2 = 0.999;
    constexpr double eps = 1e-8;
    if (st.m.size() != n) {
        st.m.assign(n, 0.0);
        st.v.assign(n, 0.0);
    }
    st.t += 1;
    const double c1 = 1.0 - std::pow(b1, static_cast<double>(st.t));
    const double c2 = 1.0 - std::pow(b2, static_cast<double>(st.t));
    for (std::size_t i = 0; i < n; ++i) {
        st.m[i] = b1 * st.m[i] + (1.0 - b1) * grad[i];
        st.v[i] = b2 * st.v[i] + (1.0 - b2) * grad[i] * grad[i];
        const double mhat = st.m[i] / c1;
        const double vhat = st.v[i] / c2;
        theta[i] -= lr * (mhat / (std::sqrt(vhat) + eps) + wd * theta[i]);
    }
}

}  // namespace

TrainResult train(const std::vector<EncodedQuestion>& train_set,
                  const std::vector<EncodedQuestion>& valid_set, ScoringHead head,
                  const RunConfig& cfg) {
    cfg.validate();
    if (train_set.empty()) throw DataError("training split is empty");
    for (const EncodedQuestion& q : train_set) {
        if (static_cast<int>(q.h.size()) != head.d_h) {
            throw DataError("context vector dimension mismatch for qid " + q.qid);
        }
    }

    AdamState st_w;
    AdamState st_b;
    AdamState st_W;
    std::map<PhraseId, AdamState> st_emb;

    Rng shuffle_rng(mix_seed(cfg.seed, 0x7e41));
    Rng drop_rng(mix_seed(cfg.seed, 0xd20b));

    std::vector<std::size_t> order(train_set.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

    TrainResult res;
    double best_valid = -1.0;

    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        shuffle_rng.shuffle(order);
        double loss_sum = 0.0;

        for (std::size_t start = 0; start < order.size(); start += static_cast<std::size_t>(cfg.batch_size)) {
            const std::size_t stop = std::min(order.size(), start + static_cast<std::size_t>(cfg.batch_size));
            std::vector<const EncodedQuestion*> batch;
            batch.reserve(stop - start);
            for (std::size_t i = start; i < stop; ++i) batch.push_back(&train_set[order[i]]);

            std::vector<Vec> dropped;
            const std::vector<Vec>* hov = nullptr;
            if (cfg.dropout > 0.0) {
                dropped.reserve(batch.size());
                const double keep = 1.0 - cfg.dropout;
                for (const EncodedQuestion* ex : batch) {
                    Vec h = ex->h;
                    for (double& x : h) {
                        if (drop_rng.uniform01() < cfg.dropout) {
                            x = 0.0;
                        } else {
                            x /= keep;
                        }
                    }
                    dropped.push_back(std::move(h));
                }
                hov = &dropped;
            }

            Gradients g;
            const double loss = batch_loss(batch, head, &g, hov);
            if (!std::isfinite(loss)) {
                throw DataError("non-finite loss at epoch " + std::to_string(epoch) + ", batch " +
                                std::to_string(start / static_cast<std::size_t>(cfg.batch_size)));
            }
            loss_sum += loss * static_cast<double>(batch.size());

            if (head.matrix_mode) {
                adamw_step(head.W.data(), g.W.data(), head.W.size(), st_W, cfg.learning_rate, cfg.weight_decay);
            } else {
                adamw_step(&head.w, &g.w, 1, st_w, cfg.learning_rate, cfg.weight_decay);
            }
            adamw_step(&head.b, &g.b, 1, st_b, cfg.learning_rate, 0.0);
            for (auto& [pid, grad] : g.trainable) {
                Vec& param = head.trainable.at(pid);
                adamw_step(param.data(), grad.data(), param.size(), st_emb[pid], cfg.learning_rate,
                           cfg.weight_decay);
            }
        }

        EpochStats stats;
        stats.train_loss = loss_sum / static_cast<double>(train_set.size());
        stats.train_accuracy = overall_accuracy(train_set, head);
        stats.valid_accuracy = valid_set.empty() ? stats.train_accuracy : overall_accuracy(valid_set, head);
        res.history.push_back(stats);

        if (stats.valid_accuracy > best_valid) {
            best_valid = stats.valid_accuracy;
            res.best = head;
            res.best_epoch = epoch;
        }
    }

    if (res.best_epoch < 0) res.best = std::move(head);  // epochs == 0
    return res;
}

AccuracyGrid evaluate(const std::vector<EncodedQuestion>& questions, const ScoringHead& head) {
    AccuracyGrid grid;
    for (const EncodedQuestion& q : questions) {
        AccuracyCell& cell = grid[{q.pool, q.set_type}];
        cell.total += 1;
        if (predict(q, head) == q.answer) cell.correct += 1;
    }
    return grid;
}

double overall_accuracy(const std::vector<EncodedQuestion>& questions, const ScoringHead& head) {
    if (questions.empty()) return 0.0;
    long correct = 0;
    for (const EncodedQuestion& q : questions) {
        if (predict(q, head) == q.answer) ++correct;
    }
    return static_cast<double>(correct) / static_cast<double>(questions.size());
}

std::vector<GridCombo> standard_grid() {
    std::vector<GridCombo> grid;
    auto add = [&grid](PoolKind pool, std::optional<RepMode> idiom, std::optional<RepMode> fixed) {
        GridCombo c;
        c.pool = pool;
        c.reps.idiom_mode = idiom;
        c.reps.fixed_mode = fixed;
        grid.push_back(c);
    };
    add(PoolKind::Idioms, RepMode::Random, std::nullopt);
    add(PoolKind::Idioms, RepMode::Def, std::nullopt);
    add(PoolKind::Fixed, std::nullopt, RepMode::Random);
    add(PoolKind::Fixed, std::nullopt, RepMode::Def);
    add(PoolKind::Fixed, std::nullopt, RepMode::Lit);
    add(PoolKind::Combined, RepMode::Random, RepMode::Random);
    add(PoolKind::Combined, RepMode::Def, RepMode::Lit);
    add(PoolKind::Combined, RepMode::Def, RepMode::Random);
    add(PoolKind::Combined, RepMode::DefPlusRandom, RepMode::Lit);
    add(PoolKind::Combined, RepMode::DefPlusRandom, RepMode::LitPlusRandom);
    add(PoolKind::Combined, RepMode::DefPlusRandom, RepMode::Random);
    return grid;
}

namespace {

// round-robin over shuffled stem groups, same contract as question k-folding
std::vector<int> fold_labels(const std::vector<const EncodedQuestion*>& subset, int k,
                             std::uint64_t seed) {
    std::vector<std::uint64_t> group_order;
    std::unordered_map<std::uint64_t, std::size_t> group_pos;
    for (const EncodedQuestion* q : subset) {
        if (group_pos.emplace(q->group, group_order.size()).second) group_order.push_back(q->group);
    }
    if (static_cast<std::size_t>(k) > group_order.size()) {
        throw DataError("kfold: k exceeds the number of stem groups (" + std::to_string(k) + " > " +
                        std::to_string(group_order.size()) + ")");
    }
    Rng rng(seed);
    rng.shuffle(group_order);
    std::unordered_map<std::uint64_t, int> fold_of;
    for (std::size_t i = 0; i < group_order.size(); ++i) {
        fold_of.emplace(group_order[i], static_cast<int>(i % static_cast<std::size_t>(k)));
    }
    std::vector<int> labels(subset.size());
    for (std::size_t i = 0; i < subset.size(); ++i) labels[i] = fold_of.at(subset[i]->group);
    return labels;
}

std::string format_accuracy(double a) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4f", a);
    return buf;
}

void write_row(std::ostream& csv, const GridCombo& combo, SetType st, const std::string& encoder,
               const std::string& fold, const std::string& split, double accuracy) {
    csv << pool_name(combo.pool) << ',' << set_type_name(st) << ',' << combo.reps.idiom_label() << ','
        << combo.reps.fixed_label() << ',' << encoder << ',' << fold << ',' << split << ','
        << format_accuracy(accuracy) << '\n';
}

}  // namespace

void run_experiment_grid(const std::vector<Question>& questions, const Lexicon& lexicon,
                         const EmbeddingTable& table, const ContextualEncoder& encoder,
                         const RunConfig& cfg, const std::vector<GridCombo>& combos,
                         EvalScheme scheme, std::uint64_t seed, std::ostream& csv) {
    cfg.validate();
    if (combos.empty()) throw ConfigError("experiment grid is empty");

    std::vector<EncodedQuestion> enc = encode_questions(questions, encoder);

    csv << "pool,set_type,idiom_rep,fixed_rep,encoder,fold,split,accuracy\n";

    for (std::size_t ci = 0; ci < combos.size(); ++ci) {
        const GridCombo& combo = combos[ci];
        combo.reps.validate();

        for (std::size_t si = 0; si < kAllSetTypes.size(); ++si) {
            const SetType st = kAllSetTypes[si];
            std::vector<const EncodedQuestion*> subset;
            for (const EncodedQuestion& q : enc) {
                if (q.pool == combo.pool && q.set_type == st) subset.push_back(&q);
            }
            if (subset.empty()) continue;

            const std::uint64_t cell_seed = mix_seed(mix_seed(seed, ci), si);

            if (scheme == EvalScheme::KFold) {
                std::vector<int> labels = fold_labels(subset, cfg.kfold, mix_seed(cell_seed, 0x4f1d));
                for (int f = 0; f < cfg.kfold; ++f) {
                    std::vector<EncodedQuestion> train_part;
                    std::vector<EncodedQuestion> test_part;
                    for (std::size_t i = 0; i < subset.size(); ++i) {
                        (labels[i] == f ? test_part : train_part).push_back(*subset[i]);
                    }
                    const std::uint64_t fold_seed = mix_seed(cell_seed, static_cast<std::uint64_t>(f));
                    // build over the whole subset: the held-out fold may contain
                    // candidates the train folds never saw
                    std::vector<EncodedQuestion> all;
                    all.reserve(subset.size());
                    for (const EncodedQuestion* q : subset) all.push_back(*q);
                    ScoringHead head = make_scoring_head(all, lexicon, table, combo.reps, fold_seed, cfg.matrix_w);
                    RunConfig rc = cfg;
                    rc.seed = fold_seed;
                    TrainResult res = train(train_part, {}, std::move(head), rc);
                    write_row(csv, combo, st, encoder.name(), std::to_string(f), "test",
                              overall_accuracy(test_part, res.best));
                }
            } else {
                std::vector<EncodedQuestion> train_part;
                std::vector<EncodedQuestion> valid_part;
                std::vector<EncodedQuestion> test_part;
                std::vector<EncodedQuestion> all;
                for (const EncodedQuestion* q : subset) {
                    all.push_back(*q);
                    if (q->split == "train") {
                        train_part.push_back(*q);
                    } else if (q->split == "valid") {
                        valid_part.push_back(*q);
                    } else if (q->split == "test") {
                        test_part.push_back(*q);
                    } else {
                        throw DataError("question " + q->qid + " has no split label; run the splitter first");
                    }
                }
                ScoringHead head = make_scoring_head(all, lexicon, table, combo.reps, cell_seed, cfg.matrix_w);
                RunConfig rc = cfg;
                rc.seed = cell_seed;
                TrainResult res = train(train_part, valid_part, std::move(head), rc);
                write_row(csv, combo, st, encoder.name(), "-", "train", overall_accuracy(train_part, res.best));
                write_row(csv, combo, st, encoder.name(), "-", "valid", overall_accuracy(valid_part, res.best));
                write_row(csv, combo, st, encoder.name(), "-", "test", overall_accuracy(test_part, res.best));
            }
        }
    }
}

}  // namespace cloze
