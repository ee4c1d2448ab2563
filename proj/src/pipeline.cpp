#include "cloze/pipeline.hpp"

#include <algorithm>
#include <array>
#include <cstdio>
#include <fstream>
#include <map>
#include <memory>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "cloze/distractors.hpp"
#include "cloze/error.hpp"
#include "cloze/hashing.hpp"
#include "cloze/text.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace cloze {

namespace {

void check_keys(const json& obj, std::initializer_list<const char*> allowed, const std::string& where) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        bool ok = false;
        for (const char* key : allowed) {
            if (it.key() == key) {
                ok = true;
                break;
            }
        }
        if (!ok) throw ConfigError(where + ": unknown key \"" + it.key() + "\"");
    }
}

template <typename T>
T fetch(const json& obj, const char* key, T fallback, const std::string& where) {
    if (!obj.contains(key)) return fallback;
    try {
        return obj.at(key).get<T>();
    } catch (const json::exception&) {
        throw ConfigError(where + ": key \"" + std::string(key) + "\" has the wrong type");
    }
}

fs::path resolve(const std::string& raw, const fs::path& base_dir) {
    fs::path p(raw);
    if (p.is_absolute() || base_dir.empty()) return p;
    return base_dir / p;
}

json meta_record(const PipelineConfig& cfg, const char* stage) {
    json m;
    m["_meta"] = {{"config_hash", cfg.config_hash()}, {"seed", cfg.seed}, {"stage", stage}};
    return m;
}

std::string csv_meta(const PipelineConfig& cfg) {
    return "# config_hash=" + cfg.config_hash() + " seed=" + std::to_string(cfg.seed);
}

std::ofstream open_out(const fs::path& path) {
    fs::create_directories(path.parent_path().empty() ? fs::path(".") : path.parent_path());
    std::ofstream out(path, std::ios::binary);  // '\n' endings on every platform
    if (!out) throw DataError("cannot write " + path.string());
    return out;
}

bool is_meta_line(const std::string& line) {
    const auto pos = line.find_first_not_of(" \t");
    return pos != std::string::npos && line.compare(pos, 9, "{\"_meta\":") == 0;
}

GridCombo combo_from_json(const json& j, const std::string& where) {
    check_keys(j, {"pool", "idiom_rep", "fixed_rep"}, where);
    GridCombo c;
    c.pool = parse_pool(fetch<std::string>(j, "pool", "combined", where));
    if (j.contains("idiom_rep") && !j.at("idiom_rep").is_null()) {
        c.reps.idiom_mode = parse_rep_mode(fetch<std::string>(j, "idiom_rep", "", where));
    }
    if (j.contains("fixed_rep") && !j.at("fixed_rep").is_null()) {
        c.reps.fixed_mode = parse_rep_mode(fetch<std::string>(j, "fixed_rep", "", where));
    }
    c.reps.validate();
    return c;
}

}  // namespace

fs::path PipelineConfig::questions_file(PoolKind pool, SetType st) const {
    return workdir / ("questions_" + std::string(pool_name(pool)) + "_" + std::string(set_type_name(st)) +
                      ".jsonl");
}

PipelineConfig PipelineConfig::load(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    return parse(buf.str(), path.parent_path(), path.string());
}

PipelineConfig PipelineConfig::parse(const std::string& text, const fs::path& base_dir,
                                     const std::string& source_name) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ConfigError(source_name + ": invalid JSON: " + e.what());
    }
    if (!j.is_object()) throw ConfigError(source_name + ": config must be a JSON object");
    check_keys(j, {"lexicon", "corpus", "workdir", "seed", "jobs", "mine", "embed", "generate", "evaluate"},
               source_name);

    PipelineConfig cfg;
    if (!j.contains("lexicon")) throw ConfigError(source_name + ": missing required key \"lexicon\"");
    cfg.lexicon_path = resolve(fetch<std::string>(j, "lexicon", "", source_name), base_dir);
    if (j.contains("corpus")) cfg.corpus_path = resolve(fetch<std::string>(j, "corpus", "", source_name), base_dir);
    cfg.workdir = resolve(fetch<std::string>(j, "workdir", "work", source_name), base_dir);
    cfg.seed = fetch<std::uint64_t>(j, "seed", 1, source_name);
    cfg.jobs = fetch<int>(j, "jobs", 1, source_name);
    if (cfg.jobs < 1) throw ConfigError(source_name + ": jobs must be >= 1");

    if (j.contains("mine")) {
        const json& m = j.at("mine");
        const std::string where = source_name + ": mine";
        check_keys(m, {"min_words", "max_separators", "band", "balance"}, where);
        cfg.filter.min_words = fetch<int>(m, "min_words", cfg.filter.min_words, where);
        cfg.filter.max_separators = fetch<int>(m, "max_separators", cfg.filter.max_separators, where);
        if (m.contains("band")) {
            auto band = fetch<std::vector<int>>(m, "band", {}, where);
            if (band.size() != 2) throw ConfigError(where + ": band must be [lo, hi]");
            cfg.band_lo = band[0];
            cfg.band_hi = band[1];
        }
        cfg.balance = fetch<bool>(m, "balance", cfg.balance, where);
        if (cfg.balance && cfg.band_lo > cfg.band_hi) throw ConfigError(where + ": band lo exceeds hi");
    }

    if (j.contains("embed")) {
        const json& e = j.at("embed");
        const std::string where = source_name + ": embed";
        check_keys(e, {"dim", "window", "negatives", "epochs", "min_count", "learning_rate", "sample"}, where);
        cfg.embed.dim = fetch<int>(e, "dim", cfg.embed.dim, where);
        cfg.embed.window = fetch<int>(e, "window", cfg.embed.window, where);
        cfg.embed.negatives = fetch<int>(e, "negatives", cfg.embed.negatives, where);
        cfg.embed.epochs = fetch<int>(e, "epochs", cfg.embed.epochs, where);
        cfg.embed.min_count = fetch<int>(e, "min_count", cfg.embed.min_count, where);
        cfg.embed.learning_rate = fetch<double>(e, "learning_rate", cfg.embed.learning_rate, where);
        cfg.embed.sample = fetch<double>(e, "sample", cfg.embed.sample, where);
    }

    if (j.contains("generate")) {
        const json& g = j.at("generate");
        const std::string where = source_name + ": generate";
        check_keys(g, {"pools", "set_types", "split", "phrase_token_reps", "readable"}, where);
        if (g.contains("pools")) {
            cfg.pools.clear();
            for (const std::string& name : fetch<std::vector<std::string>>(g, "pools", {}, where)) {
                cfg.pools.push_back(parse_pool(name));
            }
            if (cfg.pools.empty()) throw ConfigError(where + ": pools must not be empty");
        }
        if (g.contains("set_types")) {
            cfg.set_types.clear();
            for (const std::string& name : fetch<std::vector<std::string>>(g, "set_types", {}, where)) {
                cfg.set_types.push_back(parse_set_type(name));
            }
            if (cfg.set_types.empty()) throw ConfigError(where + ": set_types must not be empty");
        }
        if (g.contains("split")) {
            auto split = fetch<std::vector<double>>(g, "split", {}, where);
            if (split.size() != 3) throw ConfigError(where + ": split must be [train, valid, test]");
            cfg.train_frac = split[0];
            cfg.valid_frac = split[1];
            cfg.test_frac = split[2];
        }
        cfg.phrase_token_reps = fetch<bool>(g, "phrase_token_reps", cfg.phrase_token_reps, where);
        cfg.readable_export = fetch<bool>(g, "readable", cfg.readable_export, where);
    }

    if (j.contains("evaluate")) {
        const json& e = j.at("evaluate");
        const std::string where = source_name + ": evaluate";
        check_keys(e,
                   {"scheme", "kfold", "batch_size", "epochs", "learning_rate", "dropout", "weight_decay",
                    "max_seq_len", "matrix_w", "encoder", "context_vectors", "grid"},
                   where);
        const std::string scheme = fetch<std::string>(e, "scheme", "kfold", where);
        if (scheme == "kfold") {
            cfg.scheme = EvalScheme::KFold;
        } else if (scheme == "holdout") {
            cfg.scheme = EvalScheme::Holdout;
        } else {
            throw ConfigError(where + ": scheme must be \"kfold\" or \"holdout\"");
        }
        cfg.run.kfold = fetch<int>(e, "kfold", cfg.run.kfold, where);
        cfg.run.batch_size = fetch<int>(e, "batch_size", cfg.run.batch_size, where);
        cfg.run.epochs = fetch<int>(e, "epochs", cfg.run.epochs, where);
        cfg.run.learning_rate = fetch<double>(e, "learning_rate", cfg.run.learning_rate, where);
        cfg.run.dropout = fetch<double>(e, "dropout", cfg.run.dropout, where);
        cfg.run.weight_decay = fetch<double>(e, "weight_decay", cfg.run.weight_decay, where);
        cfg.run.max_seq_len = fetch<int>(e, "max_seq_len", cfg.run.max_seq_len, where);
        cfg.run.matrix_w = fetch<bool>(e, "matrix_w", cfg.run.matrix_w, where);
        cfg.encoder = fetch<std::string>(e, "encoder", cfg.encoder, where);
        if (cfg.encoder != "reference" && cfg.encoder != "precomputed") {
            throw ConfigError(where + ": encoder must be \"reference\" or \"precomputed\"");
        }
        if (e.contains("context_vectors")) {
            cfg.context_vectors_path = resolve(fetch<std::string>(e, "context_vectors", "", where), base_dir);
        }
        if (cfg.encoder == "precomputed" && cfg.context_vectors_path.empty()) {
            throw ConfigError(where + ": encoder \"precomputed\" needs \"context_vectors\"");
        }
        if (e.contains("grid")) {
            const json& g = e.at("grid");
            if (g.is_string()) {
                if (g.get<std::string>() != "standard") {
                    throw ConfigError(where + ": grid must be \"standard\" or a list of combos");
                }
            } else if (g.is_array()) {
                for (const json& c : g) cfg.combos.push_back(combo_from_json(c, where + ": grid"));
                if (cfg.combos.empty()) throw ConfigError(where + ": grid list must not be empty");
            } else {
                throw ConfigError(where + ": grid must be \"standard\" or a list of combos");
            }
        }
    }

    SplitSpec probe{cfg.train_frac, cfg.valid_frac, cfg.test_frac, 0};
    probe.validate();
    cfg.run.validate();
    return cfg;
}

std::string PipelineConfig::canonical() const {
    json j;
    j["lexicon"] = lexicon_path.generic_string();
    j["corpus"] = corpus_path.generic_string();
    j["seed"] = seed;
    j["mine"] = {{"min_words", filter.min_words},
                 {"max_separators", filter.max_separators},
                 {"band", {band_lo, band_hi}},
                 {"balance", balance}};
    j["embed"] = {{"dim", embed.dim},         {"window", embed.window},
                  {"negatives", embed.negatives}, {"epochs", embed.epochs},
                  {"min_count", embed.min_count}, {"learning_rate", embed.learning_rate},
                  {"sample", embed.sample}};
    json pools_j = json::array();
    for (PoolKind p : pools) pools_j.push_back(std::string(pool_name(p)));
    json sets_j = json::array();
    for (SetType t : set_types) sets_j.push_back(std::string(set_type_name(t)));
    j["generate"] = {{"pools", pools_j},
                     {"set_types", sets_j},
                     {"split", {train_frac, valid_frac, test_frac}},
                     {"phrase_token_reps", phrase_token_reps},
                     {"readable", readable_export}};
    json grid_j = json::array();
    for (const GridCombo& c : combos) {
        grid_j.push_back({{"pool", std::string(pool_name(c.pool))},
                          {"idiom_rep", c.reps.idiom_label()},
                          {"fixed_rep", c.reps.fixed_label()}});
    }
    j["evaluate"] = {{"scheme", scheme == EvalScheme::KFold ? "kfold" : "holdout"},
                     {"kfold", run.kfold},
                     {"batch_size", run.batch_size},
                     {"epochs", run.epochs},
                     {"learning_rate", run.learning_rate},
                     {"dropout", run.dropout},
                     {"weight_decay", run.weight_decay},
                     {"max_seq_len", run.max_seq_len},
                     {"matrix_w", run.matrix_w},
                     {"encoder", encoder},
                     {"context_vectors", context_vectors_path.generic_string()},
                     {"grid", grid_j}};
    return j.dump();
}

std::string PipelineConfig::config_hash() const { return to_hex16(fnv1a64(canonical())); }

void PipelineConfig::require_lexicon() const {
    if (lexicon_path.empty() || !fs::exists(lexicon_path)) {
        throw ConfigError("lexicon file not found: " + lexicon_path.string());
    }
}

void PipelineConfig::require_corpus() const {
    if (corpus_path.empty() || !fs::exists(corpus_path)) {
        throw ConfigError("corpus file not found: " + corpus_path.string());
    }
}

PipelineConfig load_config(const fs::path& path, const CliOverrides& overrides) {
    PipelineConfig cfg = PipelineConfig::load(path);
    if (overrides.seed) cfg.seed = *overrides.seed;
    if (overrides.workdir) cfg.workdir = *overrides.workdir;
    if (overrides.jobs) {
        if (*overrides.jobs < 1) throw ConfigError("jobs must be >= 1");
        cfg.jobs = *overrides.jobs;
    }
    return cfg;
}

std::string stem_to_json(const Stem& s) {
    json j;
    j["phrase_id"] = s.phrase_id;
    j["tokens"] = s.tokens;
    j["blank_start"] = s.blank_start;
    j["blank_len"] = s.blank_len;
    j["source_line"] = s.source_line;
    return j.dump();
}

Stem stem_from_json(const std::string& line, const std::string& where) {
    json j;
    try {
        j = json::parse(line);
    } catch (const json::exception&) {
        throw DataError(where + ": malformed stem record");
    }
    if (!j.is_object()) throw DataError(where + ": malformed stem record");
    for (const char* key : {"phrase_id", "tokens", "blank_start", "blank_len", "source_line"}) {
        if (!j.contains(key)) throw DataError(where + ": stem record is missing \"" + std::string(key) + "\"");
    }
    Stem s;
    try {
        s.phrase_id = j.at("phrase_id").get<PhraseId>();
        s.tokens = j.at("tokens").get<std::vector<std::string>>();
        s.blank_start = j.at("blank_start").get<int>();
        s.blank_len = j.at("blank_len").get<int>();
        s.source_line = j.at("source_line").get<long>();
    } catch (const json::exception&) {
        throw DataError(where + ": stem record has a wrong-typed field");
    }
    if (s.blank_len < 1 || s.blank_start < 0 ||
        static_cast<std::size_t>(s.blank_start) + static_cast<std::size_t>(s.blank_len) > s.tokens.size()) {
        throw DataError(where + ": blank span out of range");
    }
    return s;
}

std::vector<Stem> load_stems(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("stems file not found: " + path.string() + " (run mine first)");
    std::vector<Stem> stems;
    std::string line;
    long lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (std::string(rtrim(line)).empty()) continue;
        if (lineno == 1 && is_meta_line(line)) continue;
        stems.push_back(stem_from_json(line, path.string() + ":" + std::to_string(lineno)));
    }
    return stems;
}

void run_mine(const PipelineConfig& cfg, std::ostream& log) {
    cfg.require_lexicon();
    cfg.require_corpus();

    const Lexicon lexicon = Lexicon::load(cfg.lexicon_path);
    std::ifstream corpus(cfg.corpus_path);
    if (!corpus) throw DataError("cannot read corpus: " + cfg.corpus_path.string());

    MineResult mined = mine_stems(corpus, lexicon, cfg.filter);
    std::vector<Stem> stems = std::move(mined.stems);
    std::size_t matched = stems.size();
    if (cfg.balance) {
        BalanceResult balanced = balance_by_frequency(stems, cfg.band_lo, cfg.band_hi);
        stems = std::move(balanced.stems);
    }

    std::set<PhraseId> phrases;
    for (const Stem& s : stems) phrases.insert(s.phrase_id);

    {
        std::ofstream out = open_out(cfg.stems_file());
        out << meta_record(cfg, "mine").dump() << '\n';
        for (const Stem& s : stems) out << stem_to_json(s) << '\n';
    }
    {
        std::ofstream out = open_out(cfg.rejections_file());
        out << csv_meta(cfg) << '\n';
        out << "source_line,reason\n";
        for (const auto& [line_no, reason] : mined.rejections) {
            out << line_no << ',' << reject_reason_name(reason) << '\n';
        }
    }

    log << "mine: " << mined.lines_read << " lines, " << matched << " accepted stems, " << stems.size()
        << " kept after balancing (" << phrases.size() << " phrases), " << mined.rejections.size()
        << " rejections, " << mined.skipped_lines << " undecodable lines\n";
}

void run_embed(const PipelineConfig& cfg, std::ostream& log) {
    cfg.require_corpus();
    std::ifstream corpus(cfg.corpus_path);
    if (!corpus) throw DataError("cannot read corpus: " + cfg.corpus_path.string());

    SkipgramParams params = cfg.embed;
    params.seed = mix_seed(cfg.seed, 0xe3bed);
    params.jobs = cfg.jobs;
    const EmbeddingTable table = train_skipgram_text(corpus, params);

    fs::create_directories(cfg.workdir);
    save_embeddings(table, cfg.embeddings_file());
    // the vector file format is fixed by convention, so its metadata lives
    // in a sidecar instead of a header record
    {
        std::ofstream out = open_out(cfg.embeddings_meta_file());
        json meta = meta_record(cfg, "embed");
        meta["vocab"] = table.size();
        meta["dim"] = table.dim();
        out << meta.dump(2) << '\n';
    }
    log << "embed: " << table.size() << " vectors of dim " << table.dim() << '\n';
}

namespace {

bool pool_admits(PoolKind pool, PhraseKind kind) {
    switch (pool) {
        case PoolKind::Idioms: return kind == PhraseKind::Idiom;
        case PoolKind::Fixed: return kind == PhraseKind::FixedExpression;
        case PoolKind::Combined: return true;
    }
    return false;
}

bool needs_reps(const std::vector<SetType>& set_types) {
    for (SetType t : set_types) {
        if (t != SetType::R3) return true;
    }
    return false;
}

}  // namespace

void run_generate(const PipelineConfig& cfg, std::ostream& log) {
    cfg.require_lexicon();
    const Lexicon lexicon = Lexicon::load(cfg.lexicon_path);
    const std::vector<Stem> stems = load_stems(cfg.stems_file());
    if (stems.empty()) throw DataError("no stems in " + cfg.stems_file().string());

    EmbeddingTable table;
    if (needs_reps(cfg.set_types)) table = load_embeddings(cfg.embeddings_file());

    std::set<PhraseId> with_stems;
    for (const Stem& s : stems) with_stems.insert(s.phrase_id);

    json manifest_pools = json::object();

    for (PoolKind pool : cfg.pools) {
        std::vector<Phrase> pool_phrases;
        for (const Phrase& p : lexicon.phrases()) {
            if (with_stems.count(p.id) != 0 && pool_admits(pool, p.kind)) pool_phrases.push_back(p);
        }
        if (pool_phrases.empty()) {
            throw DataError("pool \"" + std::string(pool_name(pool)) + "\" has no phrases with stems");
        }

        RepMap reps;
        if (needs_reps(cfg.set_types)) reps = phrase_reps(pool_phrases, table, cfg.phrase_token_reps);

        CandidateSetIndex sets;
        for (const Phrase& key : pool_phrases) {
            for (SetType st : cfg.set_types) {
                sets.emplace(std::make_pair(key.id, st),
                             compose_candidate_set(key, st, pool_phrases, pool, reps, cfg.seed));
            }
        }

        std::vector<Stem> pool_stems;
        for (const Stem& s : stems) {
            if (pool_admits(pool, lexicon.at(s.phrase_id).kind)) pool_stems.push_back(s);
        }

        std::vector<Question> questions = assemble(pool_stems, sets, lexicon, pool, cfg.set_types, cfg.seed);

        SplitSpec split{cfg.train_frac, cfg.valid_frac, cfg.test_frac,
                        mix_seed(cfg.seed, fnv1a64(pool_name(pool)))};
        split_assign(questions, split);

        std::sort(questions.begin(), questions.end(),
                  [](const Question& a, const Question& b) { return a.qid < b.qid; });

        json per_set = json::object();
        json splits = json::object();
        std::map<std::string, long> split_counts;
        for (SetType st : cfg.set_types) {
            std::ofstream out = open_out(cfg.questions_file(pool, st));
            out << meta_record(cfg, "generate").dump() << '\n';
            long n = 0;
            for (const Question& q : questions) {
                if (q.set_type != st) continue;
                out << question_to_json(q, lexicon) << '\n';
                ++n;
            }
            per_set[std::string(set_type_name(st))] = n;
        }
        for (const Question& q : questions) split_counts[q.split] += 1;
        for (const auto& [name, n] : split_counts) splits[name] = n;

        if (cfg.readable_export) {
            std::ofstream out = open_out(cfg.workdir / ("questions_" + std::string(pool_name(pool)) + ".txt"));
            for (const Question& q : questions) {
                out << q.qid << " [" << set_type_name(q.set_type) << "] " << render_stem_text(q.stem) << '\n';
                static const char labels[4] = {'a', 'b', 'c', 'd'};
                for (int i = 0; i < 4; ++i) {
                    out << "  (" << labels[i] << ") " << lexicon.at(q.candidates[static_cast<std::size_t>(i)]).surface
                        << (i == q.answer_index ? "  *" : "") << '\n';
                }
            }
        }

        manifest_pools[std::string(pool_name(pool))] = {{"phrases", pool_phrases.size()},
                                                        {"stems", pool_stems.size()},
                                                        {"questions", questions.size()},
                                                        {"per_set_type", per_set},
                                                        {"splits", splits}};
        log << "generate: pool " << pool_name(pool) << ": " << pool_stems.size() << " stems -> "
            << questions.size() << " questions\n";
    }

    json manifest = meta_record(cfg, "generate");
    manifest["pools"] = manifest_pools;
    std::ofstream out = open_out(cfg.manifest_file());
    out << manifest.dump(2) << '\n';
}

void run_evaluate(const PipelineConfig& cfg, std::ostream& log) {
    cfg.require_lexicon();
    const Lexicon lexicon = Lexicon::load(cfg.lexicon_path);
    const EmbeddingTable table = load_embeddings(cfg.embeddings_file());

    std::vector<Question> questions;
    for (PoolKind pool : cfg.pools) {
        for (SetType st : cfg.set_types) {
            const fs::path path = cfg.questions_file(pool, st);
            std::ifstream in(path);
            if (!in) throw DataError("questions file not found: " + path.string() + " (run generate first)");
            std::string line;
            long lineno = 0;
            while (std::getline(in, line)) {
                ++lineno;
                if (std::string(rtrim(line)).empty()) continue;
                if (lineno == 1 && is_meta_line(line)) continue;
                questions.push_back(
                    question_from_json(line, lexicon, path.string() + ":" + std::to_string(lineno)));
            }
        }
    }
    if (questions.empty()) throw DataError("no questions to evaluate");

    std::unique_ptr<ContextualEncoder> encoder;
    if (cfg.encoder == "precomputed") {
        encoder = std::make_unique<PrecomputedEncoder>(PrecomputedEncoder::load(cfg.context_vectors_path));
    } else {
        encoder = std::make_unique<ReferenceEncoder>(table, cfg.run.max_seq_len);
    }

    const std::vector<GridCombo> combos = cfg.combos.empty() ? standard_grid() : cfg.combos;

    std::ofstream out = open_out(cfg.report_file());
    out << csv_meta(cfg) << '\n';
    run_experiment_grid(questions, lexicon, table, *encoder, cfg.run, combos, cfg.scheme, cfg.seed, out);

    log << "evaluate: " << questions.size() << " questions, " << combos.size() << " grid configs -> "
        << cfg.report_file().string() << '\n';
}

void run_report(const PipelineConfig& cfg, std::ostream& out) {
    std::ifstream in(cfg.report_file());
    if (!in) throw DataError("report file not found: " + cfg.report_file().string() + " (run evaluate first)");

    std::string line;
    bool saw_header = false;
    // key: pool,set_type,idiom_rep,fixed_rep,encoder,split
    std::map<std::array<std::string, 6>, std::pair<long, double>> cells;
    long lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string trimmed(rtrim(line));
        if (trimmed.empty() || trimmed[0] == '#') continue;
        if (!saw_header) {
            if (trimmed != "pool,set_type,idiom_rep,fixed_rep,encoder,fold,split,accuracy") {
                throw DataError(cfg.report_file().string() + ": unexpected header: " + trimmed);
            }
            saw_header = true;
            continue;
        }
        std::vector<std::string> fields;
        std::stringstream ss(trimmed);
        std::string field;
        while (std::getline(ss, field, ',')) fields.push_back(field);
        if (fields.size() != 8) {
            throw DataError(cfg.report_file().string() + ":" + std::to_string(lineno) + ": malformed row");
        }
        double acc = 0.0;
        try {
            acc = std::stod(fields[7]);
        } catch (const std::exception&) {
            throw DataError(cfg.report_file().string() + ":" + std::to_string(lineno) + ": bad accuracy value");
        }
        auto& cell = cells[{fields[0], fields[1], fields[2], fields[3], fields[4], fields[6]}];
        cell.first += 1;
        cell.second += acc;
    }
    if (!saw_header) throw DataError(cfg.report_file().string() + ": missing header row");

    out << "pool,set_type,idiom_rep,fixed_rep,encoder,split,rows,mean_accuracy\n";
    char buf[32];
    for (const auto& [key, cell] : cells) {
        std::snprintf(buf, sizeof(buf), "%.4f", cell.second / static_cast<double>(cell.first));
        out << key[0] << ',' << key[1] << ',' << key[2] << ',' << key[3] << ',' << key[4] << ',' << key[5]
            << ',' << cell.first << ',' << buf << '\n';
    }
}

}  // namespace cloze
