#include "cloze/skipgram.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <istream>
#include <map>
#include <thread>

#include "cloze/error.hpp"
#include "cloze/hashing.hpp"
#include "cloze/text.hpp"

namespace cloze {

namespace {

constexpr double kMaxExp = 6.0;

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

struct Vocab {
    std::vector<std::string> words;   // sorted by (count desc, word asc)
    std::vector<long> counts;
    std::map<std::string, int> ids;
    long total = 0;
};

Vocab build_vocab(const std::vector<std::vector<std::string>>& sentences, int min_count) {
    std::map<std::string, long> freq;
    for (const auto& sent : sentences)
        for (const auto& tok : sent) ++freq[tok];

    std::vector<std::pair<std::string, long>> items(freq.begin(), freq.end());
    std::sort(items.begin(), items.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });

    Vocab v;
    for (auto& [word, count] : items) {
        if (count < min_count) continue;
        v.ids.emplace(word, static_cast<int>(v.words.size()));
        v.words.push_back(word);
        v.counts.push_back(count);
        v.total += count;
    }
    return v;
}

// Frequency^0.75 sampling table for negatives.
std::vector<int> build_unigram_table(const Vocab& vocab, std::size_t size = 1 << 20) {
    std::vector<int> table(size);
    double total_pow = 0.0;
    for (long c : vocab.counts) total_pow += std::pow(static_cast<double>(c), 0.75);
    std::size_t i = 0;
    double cumulative = std::pow(static_cast<double>(vocab.counts[0]), 0.75) / total_pow;
    for (std::size_t a = 0; a < size; ++a) {
        table[a] = static_cast<int>(i);
        if (static_cast<double>(a) / static_cast<double>(size) > cumulative &&
            i + 1 < vocab.words.size()) {
            ++i;
            cumulative += std::pow(static_cast<double>(vocab.counts[i]), 0.75) / total_pow;
        }
    }
    return table;
}

struct TrainerState {
    const SkipgramParams* params;
    const Vocab* vocab;
    const std::vector<int>* unigram;
    std::vector<std::vector<int>> corpus;  // sentences as vocab ids
    std::vector<double> syn0, syn1;
    long long total_words = 0;             // per epoch
    std::atomic<long long> processed{0};
};

void train_range(TrainerState& st, std::size_t begin, std::size_t end, std::uint64_t rng_seed) {
    const SkipgramParams& p = *st.params;
    const std::size_t dim = static_cast<std::size_t>(p.dim);
    Rng rng(rng_seed);
    std::vector<double> grad_in(dim);

    const long long budget = st.total_words * p.epochs;
    long long local_since_update = 0;
    double alpha = p.learning_rate;

    for (int epoch = 0; epoch < p.epochs; ++epoch) {
        for (std::size_t s = begin; s < end; ++s) {
            const auto& sent = st.corpus[s];
            local_since_update += static_cast<long long>(sent.size());
            if (local_since_update >= 1000) {
                st.processed += local_since_update;
                local_since_update = 0;
                const double done = static_cast<double>(st.processed.load()) /
                                    static_cast<double>(budget + 1);
                alpha = p.learning_rate * std::max(1.0 - done, 0.0001);
            }
            for (std::size_t pos = 0; pos < sent.size(); ++pos) {
                const int center = sent[pos];
                if (p.sample > 0.0) {
                    const double cnt = static_cast<double>(st.vocab->counts[static_cast<std::size_t>(center)]);
                    const double threshold = p.sample * static_cast<double>(st.vocab->total);
                    const double keep = (std::sqrt(cnt / threshold) + 1.0) * threshold / cnt;
                    if (keep < rng.uniform01()) continue;
                }
                const int shrink = static_cast<int>(rng.uniform_below(static_cast<std::uint64_t>(p.window)));
                for (int off = shrink - p.window; off <= p.window - shrink; ++off) {
                    if (off == 0) continue;
                    const long ctx_pos = static_cast<long>(pos) + off;
                    if (ctx_pos < 0 || ctx_pos >= static_cast<long>(sent.size())) continue;
                    const std::size_t in_row = static_cast<std::size_t>(sent[static_cast<std::size_t>(ctx_pos)]) * dim;

                    std::fill(grad_in.begin(), grad_in.end(), 0.0);
                    for (int d = 0; d <= p.negatives; ++d) {
                        int target;
                        double label;
                        if (d == 0) {
                            target = center;
                            label = 1.0;
                        } else {
                            target = (*st.unigram)[static_cast<std::size_t>(
                                rng.uniform_below(st.unigram->size()))];
                            if (target == center) continue;
                            label = 0.0;
                        }
                        const std::size_t out_row = static_cast<std::size_t>(target) * dim;
                        double f = 0.0;
                        for (std::size_t k = 0; k < dim; ++k)
                            f += st.syn0[in_row + k] * st.syn1[out_row + k];
                        double g;
                        if (f > kMaxExp) g = (label - 1.0) * alpha;
                        else if (f < -kMaxExp) g = label * alpha;
                        else g = (label - sigmoid(f)) * alpha;
                        for (std::size_t k = 0; k < dim; ++k) {
                            grad_in[k] += g * st.syn1[out_row + k];
                            st.syn1[out_row + k] += g * st.syn0[in_row + k];
                        }
                    }
                    for (std::size_t k = 0; k < dim; ++k) st.syn0[in_row + k] += grad_in[k];
                }
            }
        }
    }
}

}  // namespace

EmbeddingTable train_skipgram(const std::vector<std::vector<std::string>>& sentences,
                              const SkipgramParams& params) {
    if (params.dim < 2) throw ConfigError("skip-gram dimension must be >= 2");
    if (params.window < 1 || params.negatives < 0 || params.epochs < 1 || params.min_count < 1)
        throw ConfigError("invalid skip-gram parameters");

    Vocab vocab = build_vocab(sentences, params.min_count);
    if (vocab.words.empty()) throw DataError("skip-gram training corpus is empty");

    TrainerState st;
    st.params = &params;
    st.vocab = &vocab;
    auto unigram = build_unigram_table(vocab);
    st.unigram = &unigram;

    for (const auto& sent : sentences) {
        std::vector<int> ids;
        ids.reserve(sent.size());
        for (const auto& tok : sent) {
            auto it = vocab.ids.find(tok);
            if (it != vocab.ids.end()) ids.push_back(it->second);
        }
        if (!ids.empty()) {
            st.total_words += static_cast<long long>(ids.size());
            st.corpus.push_back(std::move(ids));
        }
    }

    const std::size_t dim = static_cast<std::size_t>(params.dim);
    st.syn0.resize(vocab.words.size() * dim);
    st.syn1.assign(vocab.words.size() * dim, 0.0);
    Rng init_rng(mix_seed(params.seed, 0x51a9));
    for (double& x : st.syn0) x = (init_rng.uniform01() - 0.5) / static_cast<double>(params.dim);

    const int jobs = std::max(1, params.jobs);
    if (jobs == 1 || st.corpus.size() < 2) {
        train_range(st, 0, st.corpus.size(), mix_seed(params.seed, 0x7000));
    } else {
        std::vector<std::thread> workers;
        const std::size_t chunk = (st.corpus.size() + static_cast<std::size_t>(jobs) - 1) /
                                  static_cast<std::size_t>(jobs);
        for (int t = 0; t < jobs; ++t) {
            const std::size_t begin = static_cast<std::size_t>(t) * chunk;
            const std::size_t end = std::min(st.corpus.size(), begin + chunk);
            if (begin >= end) break;
            workers.emplace_back(train_range, std::ref(st), begin, end,
                                 mix_seed(params.seed, 0x7000 + static_cast<std::uint64_t>(t)));
        }
        for (auto& w : workers) w.join();
    }

    EmbeddingTable table(params.dim);
    for (std::size_t i = 0; i < vocab.words.size(); ++i) {
        Vec v(st.syn0.begin() + static_cast<long>(i * dim),
              st.syn0.begin() + static_cast<long>((i + 1) * dim));
        table.insert(vocab.words[i], std::move(v));
    }
    return table;
}

EmbeddingTable train_skipgram_text(std::istream& corpus, const SkipgramParams& params) {
    std::vector<std::vector<std::string>> sentences;
    std::string line;
    while (std::getline(corpus, line)) {
        if (!utf8_valid(line)) continue;
        std::vector<std::string> toks;
        for (auto& t : tokenize(line)) toks.push_back(to_lower(t));
        if (!toks.empty()) sentences.push_back(std::move(toks));
    }
    return train_skipgram(sentences, params);
}

}  // namespace cloze
