#include "cloze/assembler.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include <json.hpp>

#include "cloze/error.hpp"
#include "cloze/hashing.hpp"
#include "cloze/text.hpp"

namespace cloze {

std::string make_qid(PhraseId phrase_id, long source_line, int blank_start, SetType set_type,
                     PoolKind pool) {
    std::string canon = std::to_string(phrase_id) + '|' + std::to_string(source_line) + '|' +
                        std::to_string(blank_start) + '|' + std::string(set_type_name(set_type)) +
                        '|' + std::string(pool_name(pool));
    return to_hex16(fnv1a64(canon));
}

std::uint64_t stem_group_key(const Question& q) {
    std::string canon;
    for (const auto& t : q.stem.tokens) {
        canon += t;
        canon += '\x1f';
    }
    canon += std::to_string(q.stem.blank_start) + '|' + std::to_string(q.stem.blank_len);
    return fnv1a64(canon);
}

std::vector<Question> assemble(const std::vector<Stem>& stems, const CandidateSetIndex& sets,
                               const Lexicon& lexicon, PoolKind pool,
                               const std::vector<SetType>& set_types, std::uint64_t seed) {
    std::vector<Question> questions;
    questions.reserve(stems.size() * set_types.size());
    for (const SetType st : set_types) {
        for (const auto& stem : stems) {
            auto it = sets.find({stem.phrase_id, st});
            if (it == sets.end()) {
                throw DataError("no candidate set for phrase \"" + lexicon.at(stem.phrase_id).surface +
                                "\", set type " + std::string(set_type_name(st)) + ", pool " +
                                std::string(pool_name(pool)));
            }
            const CandidateSet& cs = it->second;

            Question q;
            q.qid = make_qid(stem.phrase_id, stem.source_line, stem.blank_start, st, pool);
            q.stem = stem;
            q.set_type = st;
            q.pool = pool;
            q.candidates = {stem.phrase_id, cs.distractor_ids[0], cs.distractor_ids[1],
                            cs.distractor_ids[2]};
            Rng rng(mix_seed(seed, fnv1a64(q.qid)));
            for (std::size_t i = 4; i > 1; --i) {
                const std::size_t j = rng.uniform_below(i);
                std::swap(q.candidates[i - 1], q.candidates[j]);
            }
            for (int i = 0; i < 4; ++i)
                if (q.candidates[static_cast<std::size_t>(i)] == stem.phrase_id) q.answer_index = i;
            questions.push_back(std::move(q));
        }
    }
    return questions;
}

void SplitSpec::validate() const {
    if (train_frac < 0 || valid_frac < 0 || test_frac < 0)
        throw ConfigError("split fractions must be non-negative");
    const double sum = train_frac + valid_frac + test_frac;
    if (std::abs(sum - 1.0) > 1e-9)
        throw ConfigError("split fractions must sum to 1, got " + std::to_string(sum));
}

SplitSizes SplitSpec::sizes_for(long n) const {
    SplitSizes s;
    s.valid = static_cast<long>(std::floor(valid_frac * static_cast<double>(n) + 1e-9));
    s.test = static_cast<long>(std::floor(test_frac * static_cast<double>(n) + 1e-9));
    s.train = n - s.valid - s.test;
    return s;
}

namespace {

// Stem groups in first-appearance order, then a seeded shuffle.
struct Groups {
    std::vector<std::uint64_t> order;
    std::unordered_map<std::uint64_t, long> sizes;
};

Groups collect_groups(const std::vector<Question>& questions, std::uint64_t seed) {
    Groups g;
    for (const auto& q : questions) {
        const std::uint64_t key = stem_group_key(q);
        auto [it, inserted] = g.sizes.emplace(key, 0);
        if (inserted) g.order.push_back(key);
        ++it->second;
    }
    Rng rng(mix_seed(seed, 0x5b117));
    rng.shuffle(g.order);
    return g;
}

}  // namespace

SplitSizes split_assign(std::vector<Question>& questions, const SplitSpec& spec) {
    spec.validate();
    Groups groups = collect_groups(questions, spec.seed);
    const SplitSizes target = spec.sizes_for(static_cast<long>(questions.size()));

    std::unordered_map<std::uint64_t, const char*> assignment;
    SplitSizes actual;
    for (const std::uint64_t key : groups.order) {
        const long size = groups.sizes.at(key);
        if (actual.test + size <= target.test) {
            assignment[key] = "test";
            actual.test += size;
        } else if (actual.valid + size <= target.valid) {
            assignment[key] = "valid";
            actual.valid += size;
        } else {
            assignment[key] = "train";
            actual.train += size;
        }
    }
    for (auto& q : questions) q.split = assignment.at(stem_group_key(q));
    return actual;
}

std::vector<std::vector<Question>> kfold(const std::vector<Question>& questions, int k,
                                         std::uint64_t seed) {
    if (k < 2) throw ConfigError("k-fold requires k >= 2");
    Groups groups = collect_groups(questions, seed);
    if (static_cast<std::size_t>(k) > groups.order.size())
        throw DataError("k-fold with k=" + std::to_string(k) + " but only " +
                        std::to_string(groups.order.size()) + " stem groups");

    std::unordered_map<std::uint64_t, int> fold_of;
    for (std::size_t i = 0; i < groups.order.size(); ++i)
        fold_of[groups.order[i]] = static_cast<int>(i % static_cast<std::size_t>(k));

    std::vector<std::vector<Question>> folds(static_cast<std::size_t>(k));
    for (const auto& q : questions)
        folds[static_cast<std::size_t>(fold_of.at(stem_group_key(q)))].push_back(q);
    return folds;
}

std::string question_to_json(const Question& q, const Lexicon& lexicon) {
    nlohmann::json rec;
    rec["qid"] = q.qid;
    rec["tokens"] = q.stem.tokens;
    rec["blank_start"] = q.stem.blank_start;
    rec["blank_len"] = q.stem.blank_len;
    nlohmann::json cands = nlohmann::json::array();
    for (const PhraseId id : q.candidates) cands.push_back(lexicon.at(id).surface);
    rec["candidates"] = std::move(cands);
    rec["answer_index"] = q.answer_index;
    rec["set_type"] = std::string(set_type_name(q.set_type));
    rec["pool"] = std::string(pool_name(q.pool));
    rec["split"] = q.split;
    return rec.dump();
}

Question question_from_json(const std::string& line, const Lexicon& lexicon,
                            const std::string& where) {
    nlohmann::json rec = nlohmann::json::parse(line, nullptr, false);
    if (rec.is_discarded() || !rec.is_object())
        throw DataError(where + ": malformed question record");
    try {
        Question q;
        q.qid = rec.at("qid").get<std::string>();
        q.stem.tokens = rec.at("tokens").get<std::vector<std::string>>();
        q.stem.blank_start = rec.at("blank_start").get<int>();
        q.stem.blank_len = rec.at("blank_len").get<int>();
        q.answer_index = rec.at("answer_index").get<int>();
        q.set_type = parse_set_type(rec.at("set_type").get<std::string>());
        q.pool = parse_pool(rec.at("pool").get<std::string>());
        q.split = rec.value("split", std::string{});

        const auto surfaces = rec.at("candidates").get<std::vector<std::string>>();
        if (surfaces.size() != 4 || q.answer_index < 0 || q.answer_index > 3)
            throw DataError(where + ": question must have 4 candidates and answer_index in 0..3");
        for (std::size_t i = 0; i < 4; ++i) {
            const Phrase* p = lexicon.find(surfaces[i]);
            if (!p) throw DataError(where + ": candidate \"" + surfaces[i] + "\" not in lexicon");
            q.candidates[i] = p->id;
        }
        q.stem.phrase_id = q.candidates[static_cast<std::size_t>(q.answer_index)];
        if (q.stem.blank_start < 0 || q.stem.blank_len < 1 ||
            static_cast<std::size_t>(q.stem.blank_start + q.stem.blank_len) > q.stem.tokens.size())
            throw DataError(where + ": blank span out of range");
        return q;
    } catch (const nlohmann::json::exception& e) {
        throw DataError(where + ": bad question record: " + e.what());
    }
}

std::string render_stem_text(const Stem& stem) {
    std::vector<std::string> parts;
    parts.reserve(stem.tokens.size());
    for (std::size_t i = 0; i < stem.tokens.size(); ++i) {
        if (static_cast<int>(i) == stem.blank_start) {
            parts.emplace_back("____");
            i += static_cast<std::size_t>(stem.blank_len) - 1;
            continue;
        }
        parts.push_back(stem.tokens[i]);
    }
    return join(parts, " ");
}

}  // namespace cloze
