#include "cloze/distractors.hpp"

#include <algorithm>
#include <cstdio>
#include <ostream>

#include "cloze/error.hpp"
#include "cloze/hashing.hpp"

namespace cloze {

std::string_view set_type_name(SetType t) {
    switch (t) {
        case SetType::R3: return "3RD";
        case SetType::H3: return "3HD";
        case SetType::S3: return "3SD";
        case SetType::H1S2: return "1H2S";
        case SetType::S1H2: return "1S2H";
    }
    return "3RD";
}

SetType parse_set_type(std::string_view s) {
    if (s == "3RD") return SetType::R3;
    if (s == "3HD") return SetType::H3;
    if (s == "3SD") return SetType::S3;
    if (s == "1H2S") return SetType::H1S2;
    if (s == "1S2H") return SetType::S1H2;
    throw ConfigError("unknown candidate-set type \"" + std::string(s) + "\"");
}

std::string_view pool_name(PoolKind p) {
    switch (p) {
        case PoolKind::Idioms: return "idioms";
        case PoolKind::Fixed: return "fixed";
        case PoolKind::Combined: return "combined";
    }
    return "combined";
}

PoolKind parse_pool(std::string_view s) {
    if (s == "idioms") return PoolKind::Idioms;
    if (s == "fixed") return PoolKind::Fixed;
    if (s == "combined") return PoolKind::Combined;
    throw ConfigError("unknown pool \"" + std::string(s) + "\"");
}

int levenshtein(std::string_view a, std::string_view b) {
    const std::size_t n = b.size();
    std::vector<int> prev(n + 1), curr(n + 1);
    for (std::size_t j = 0; j <= n; ++j) prev[j] = static_cast<int>(j);
    for (std::size_t i = 0; i < a.size(); ++i) {
        curr[0] = static_cast<int>(i) + 1;
        for (std::size_t j = 0; j < n; ++j) {
            const int subst = prev[j] + (a[i] == b[j] ? 0 : 1);
            curr[j + 1] = std::min({prev[j + 1] + 1, curr[j] + 1, subst});
        }
        std::swap(prev, curr);
    }
    return prev[n];
}

RepMap phrase_reps(const std::vector<Phrase>& pool, const EmbeddingTable& table, bool phrase_token) {
    RepMap reps;
    for (const auto& p : pool) {
        if (phrase_token) {
            std::string token = p.surface;
            std::replace(token.begin(), token.end(), ' ', '_');
            if (const Vec* v = table.find(token)) reps.emplace(p.id, *v);
        } else {
            long misses = 0;
            try {
                reps.emplace(p.id, mean_of_words(p.words, table, &misses));
            } catch (const DataError&) {
                // no covered word: phrase has no representation
            }
        }
    }
    return reps;
}

std::vector<PhraseId> ranked_by_distance(const Phrase& key, const std::vector<Phrase>& pool) {
    std::vector<std::pair<int, const Phrase*>> scored;
    scored.reserve(pool.size());
    for (const auto& p : pool) {
        if (p.id == key.id) continue;
        scored.emplace_back(levenshtein(key.surface, p.surface), &p);
    }
    std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first < b.first;
        return a.second->surface < b.second->surface;
    });
    std::vector<PhraseId> out;
    out.reserve(scored.size());
    for (const auto& [_, p] : scored) out.push_back(p->id);
    return out;
}

std::vector<PhraseId> ranked_by_similarity(const Phrase& key, const std::vector<Phrase>& pool,
                                           const RepMap& reps, long* skipped) {
    auto key_it = reps.find(key.id);
    if (key_it == reps.end())
        throw DataError("no representation vector for key \"" + key.surface + "\"");
    if (norm(key_it->second) == 0.0)
        throw DataError("zero representation vector for key \"" + key.surface + "\"");

    long dropped = 0;
    std::vector<std::pair<double, const Phrase*>> scored;
    scored.reserve(pool.size());
    for (const auto& p : pool) {
        if (p.id == key.id) continue;
        auto it = reps.find(p.id);
        if (it == reps.end() || norm(it->second) == 0.0) {
            ++dropped;
            continue;
        }
        scored.emplace_back(cosine(key_it->second, it->second), &p);
    }
    if (skipped) *skipped = dropped;
    std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first > b.first;
        return a.second->surface < b.second->surface;
    });
    std::vector<PhraseId> out;
    out.reserve(scored.size());
    for (const auto& [_, p] : scored) out.push_back(p->id);
    return out;
}

namespace {

void require_pool(const Phrase& key, const std::vector<Phrase>& pool, int k, std::size_t available) {
    if (available < static_cast<std::size_t>(k))
        throw DataError("pool too small for key \"" + key.surface + "\": need " + std::to_string(k) +
                        " distractors, have " + std::to_string(available));
    (void)pool;
}

}  // namespace

std::vector<PhraseId> homonymy_distractors(const Phrase& key, const std::vector<Phrase>& pool, int k) {
    auto ranked = ranked_by_distance(key, pool);
    require_pool(key, pool, k, ranked.size());
    ranked.resize(static_cast<std::size_t>(k));
    return ranked;
}

std::vector<PhraseId> semantic_distractors(const Phrase& key, const std::vector<Phrase>& pool,
                                           const RepMap& reps, int k, long* skipped) {
    auto ranked = ranked_by_similarity(key, pool, reps, skipped);
    require_pool(key, pool, k, ranked.size());
    ranked.resize(static_cast<std::size_t>(k));
    return ranked;
}

std::vector<PhraseId> random_distractors(const Phrase& key, const std::vector<Phrase>& pool, int k,
                                         std::uint64_t seed) {
    std::vector<PhraseId> others;
    others.reserve(pool.size());
    for (const auto& p : pool)
        if (p.id != key.id) others.push_back(p.id);
    require_pool(key, pool, k, others.size());

    Rng rng(mix_seed(seed, 0xd157 + static_cast<std::uint64_t>(key.id)));
    // Partial Fisher-Yates: first k slots are the sample.
    for (int i = 0; i < k; ++i) {
        const std::size_t j = static_cast<std::size_t>(i) +
                              rng.uniform_below(others.size() - static_cast<std::size_t>(i));
        std::swap(others[static_cast<std::size_t>(i)], others[j]);
    }
    others.resize(static_cast<std::size_t>(k));
    return others;
}

namespace {

// Appends `take` ids from `ranked`, skipping anything already chosen.
void take_from(const std::vector<PhraseId>& ranked, int take, std::vector<PhraseId>& chosen,
               const Phrase& key) {
    std::size_t idx = 0;
    while (take > 0) {
        if (idx >= ranked.size())
            throw DataError("pool exhausted while composing candidates for \"" + key.surface + "\"");
        const PhraseId cand = ranked[idx++];
        if (std::find(chosen.begin(), chosen.end(), cand) != chosen.end()) continue;
        chosen.push_back(cand);
        --take;
    }
}

}  // namespace

CandidateSet compose_candidate_set(const Phrase& key, SetType set_type,
                                   const std::vector<Phrase>& pool, PoolKind pool_tag,
                                   const RepMap& reps, std::uint64_t seed) {
    std::vector<PhraseId> chosen;
    chosen.reserve(3);
    switch (set_type) {
        case SetType::R3:
            chosen = random_distractors(key, pool, 3, seed);
            break;
        case SetType::H3:
            chosen = homonymy_distractors(key, pool, 3);
            break;
        case SetType::S3:
            chosen = semantic_distractors(key, pool, reps, 3);
            break;
        case SetType::H1S2: {
            take_from(ranked_by_distance(key, pool), 1, chosen, key);
            take_from(ranked_by_similarity(key, pool, reps), 2, chosen, key);
            break;
        }
        case SetType::S1H2: {
            take_from(ranked_by_similarity(key, pool, reps), 1, chosen, key);
            take_from(ranked_by_distance(key, pool), 2, chosen, key);
            break;
        }
    }
    if (chosen.size() != 3)
        throw DataError("could not assemble 3 distractors for \"" + key.surface + "\"");
    CandidateSet set;
    set.key_id = key.id;
    set.distractor_ids = {chosen[0], chosen[1], chosen[2]};
    set.set_type = set_type;
    set.pool = pool_tag;
    return set;
}

void dump_distance_matrix(const std::vector<Phrase>& pool, std::ostream& out) {
    out << "surface";
    for (const auto& p : pool) out << ',' << p.surface;
    out << '\n';
    for (const auto& a : pool) {
        out << a.surface;
        for (const auto& b : pool) out << ',' << levenshtein(a.surface, b.surface);
        out << '\n';
    }
}

void dump_similarity_matrix(const std::vector<Phrase>& pool, const RepMap& reps, std::ostream& out) {
    out << "surface";
    for (const auto& p : pool) out << ',' << p.surface;
    out << '\n';
    char buf[32];
    for (const auto& a : pool) {
        out << a.surface;
        auto ia = reps.find(a.id);
        for (const auto& b : pool) {
            auto ib = reps.find(b.id);
            out << ',';
            if (ia == reps.end() || ib == reps.end() || norm(ia->second) == 0.0 ||
                norm(ib->second) == 0.0) {
                out << "nan";
            } else {
                std::snprintf(buf, sizeof(buf), "%.6f", cosine(ia->second, ib->second));
                out << buf;
            }
        }
        out << '\n';
    }
}

}  // namespace cloze
