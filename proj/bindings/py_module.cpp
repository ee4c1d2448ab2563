#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstdint>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "cloze/distractors.hpp"
#include "cloze/error.hpp"
#include "cloze/evaluator.hpp"
#include "cloze/pipeline.hpp"
#include "cloze/skipgram.hpp"
#include "cloze/text.hpp"

namespace py = pybind11;

namespace {

using namespace cloze;

py::dict phrase_to_dict(const Phrase& p) {
    py::dict d;
    d["id"] = p.id;
    d["surface"] = p.surface;
    d["words"] = p.words;
    d["kind"] = std::string(kind_name(p.kind));
    d["definition_words"] = p.definition_words;
    return d;
}

PipelineConfig config_with(const std::string& path, std::optional<std::uint64_t> seed,
                           std::optional<std::string> workdir, std::optional<int> jobs) {
    CliOverrides overrides;
    overrides.seed = seed;
    if (workdir) overrides.workdir = std::filesystem::path(*workdir);
    overrides.jobs = jobs;
    return load_config(path, overrides);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "cloze test dataset toolkit (C++ core)";

    py::register_exception<ConfigError>(m, "ConfigError");
    py::register_exception<DataError>(m, "DataError");

    m.def("tokenize", [](const std::string& text) { return tokenize(text); }, py::arg("text"));
    m.def(
        "levenshtein",
        [](const std::string& a, const std::string& b) { return levenshtein(a, b); },
        py::arg("a"), py::arg("b"));
    m.def(
        "filter_sentence",
        [](const std::string& text) {
            const auto tokens = tokenize(text);
            const FilterVerdict v = filter_sentence(tokens, text);
            return py::make_tuple(v.accepted, std::string(reject_reason_name(v.reason)));
        },
        py::arg("text"), "Returns (accepted, reason) for one raw sentence.");

    py::class_<Lexicon>(m, "Lexicon")
        .def_static(
            "load", [](const std::string& path) { return Lexicon::load(path); }, py::arg("path"))
        .def_static("from_entries", &Lexicon::from_entries, py::arg("entries"),
                    "entries: list of (surface, kind, definition) triples")
        .def("__len__", &Lexicon::size)
        .def(
            "find",
            [](const Lexicon& lex, const std::string& surface) -> py::object {
                const Phrase* p = lex.find(surface);
                if (p == nullptr) return py::none();
                return phrase_to_dict(*p);
            },
            py::arg("surface"))
        .def("phrases", [](const Lexicon& lex) {
            py::list out;
            for (const Phrase& p : lex.phrases()) out.append(phrase_to_dict(p));
            return out;
        });

    py::class_<EmbeddingTable>(m, "EmbeddingTable")
        .def(py::init<int>(), py::arg("dim"))
        .def_property_readonly("dim", &EmbeddingTable::dim)
        .def("__len__", &EmbeddingTable::size)
        .def("insert", &EmbeddingTable::insert, py::arg("token"), py::arg("vector"))
        .def(
            "vector",
            [](const EmbeddingTable& t, const std::string& token) -> py::object {
                const Vec* v = t.find(token);
                if (v == nullptr) return py::none();
                return py::cast(*v);
            },
            py::arg("token"))
        .def("tokens", [](const EmbeddingTable& t) {
            std::vector<std::string> out;
            out.reserve(t.size());
            for (const auto& [token, vec] : t.entries()) out.push_back(token);
            return out;
        });

    m.def(
        "load_embeddings", [](const std::string& path) { return load_embeddings(path); }, py::arg("path"));
    m.def(
        "save_embeddings",
        [](const EmbeddingTable& t, const std::string& path) { save_embeddings(t, path); },
        py::arg("table"), py::arg("path"));
    m.def(
        "mean_of_words",
        [](const std::vector<std::string>& words, const EmbeddingTable& t) { return mean_of_words(words, t); },
        py::arg("words"), py::arg("table"));

    m.def(
        "train_skipgram",
        [](const std::vector<std::vector<std::string>>& sentences, int dim, int window, int negatives,
           int epochs, int min_count, double learning_rate, double sample, std::uint64_t seed, int jobs) {
            SkipgramParams p;
            p.dim = dim;
            p.window = window;
            p.negatives = negatives;
            p.epochs = epochs;
            p.min_count = min_count;
            p.learning_rate = learning_rate;
            p.sample = sample;
            p.seed = seed;
            p.jobs = jobs;
            return train_skipgram(sentences, p);
        },
        py::arg("sentences"), py::arg("dim") = 100, py::arg("window") = 5, py::arg("negatives") = 5,
        py::arg("epochs") = 5, py::arg("min_count") = 1, py::arg("learning_rate") = 0.025,
        py::arg("sample") = 0.0, py::arg("seed") = 1, py::arg("jobs") = 1);

    m.def(
        "candidate_set",
        [](const Lexicon& lex, const std::string& key_surface, const std::string& set_type,
           const std::string& pool, const EmbeddingTable& table, std::uint64_t seed) {
            const Phrase* key = lex.find(key_surface);
            if (key == nullptr) throw DataError("unknown phrase: " + key_surface);
            const PoolKind pk = parse_pool(pool);
            std::vector<Phrase> pool_phrases;
            for (const Phrase& p : lex.phrases()) {
                const bool admit = pk == PoolKind::Combined ||
                                   (pk == PoolKind::Idioms && p.kind == PhraseKind::Idiom) ||
                                   (pk == PoolKind::Fixed && p.kind == PhraseKind::FixedExpression);
                if (admit) pool_phrases.push_back(p);
            }
            const RepMap reps = phrase_reps(pool_phrases, table);
            const CandidateSet cs =
                compose_candidate_set(*key, parse_set_type(set_type), pool_phrases, pk, reps, seed);
            std::vector<std::string> out;
            for (PhraseId id : cs.distractor_ids) out.push_back(lex.at(id).surface);
            return out;
        },
        py::arg("lexicon"), py::arg("key"), py::arg("set_type"), py::arg("pool"), py::arg("table"),
        py::arg("seed") = 1, "Returns the three distractor surfaces for a key.");

    m.def(
        "score_candidates",
        [](const Vec& h_b, const std::vector<Vec>& candidates, double w, double b) {
            if (candidates.size() != 4) throw DataError("need exactly 4 candidate vectors");
            ScoringHead head;
            head.d_h = static_cast<int>(h_b.size());
            head.d_e = static_cast<int>(candidates[0].size());
            head.w = w;
            head.b = b;
            std::array<std::span<const double>, 4> spans{candidates[0], candidates[1], candidates[2],
                                                         candidates[3]};
            const std::array<double, 4> a = score_candidates(h_b, spans, head);
            return std::vector<double>(a.begin(), a.end());
        },
        py::arg("h_b"), py::arg("candidates"), py::arg("w") = 1.0, py::arg("b") = 0.0);

    const auto stage_args = [](auto&& fn) {
        return [fn](const std::string& config, std::optional<std::uint64_t> seed,
                    std::optional<std::string> workdir, std::optional<int> jobs) {
            const PipelineConfig cfg = config_with(config, seed, workdir, jobs);
            std::ostringstream log;
            fn(cfg, log);
            return log.str();
        };
    };
    m.def("run_mine", stage_args([](const PipelineConfig& c, std::ostream& o) { run_mine(c, o); }),
          py::arg("config"), py::arg("seed") = py::none(), py::arg("workdir") = py::none(),
          py::arg("jobs") = py::none(), "Runs the mine stage; returns its log line.");
    m.def("run_embed", stage_args([](const PipelineConfig& c, std::ostream& o) { run_embed(c, o); }),
          py::arg("config"), py::arg("seed") = py::none(), py::arg("workdir") = py::none(),
          py::arg("jobs") = py::none(), "Runs the embed stage; returns its log line.");
    m.def("run_generate", stage_args([](const PipelineConfig& c, std::ostream& o) { run_generate(c, o); }),
          py::arg("config"), py::arg("seed") = py::none(), py::arg("workdir") = py::none(),
          py::arg("jobs") = py::none(), "Runs the generate stage; returns its log lines.");
    m.def("run_evaluate", stage_args([](const PipelineConfig& c, std::ostream& o) { run_evaluate(c, o); }),
          py::arg("config"), py::arg("seed") = py::none(), py::arg("workdir") = py::none(),
          py::arg("jobs") = py::none(), "Runs the evaluate stage; returns its log line.");
    m.def("report", stage_args([](const PipelineConfig& c, std::ostream& o) { run_report(c, o); }),
          py::arg("config"), py::arg("seed") = py::none(), py::arg("workdir") = py::none(),
          py::arg("jobs") = py::none(), "Returns the aggregated report CSV as text.");
}
