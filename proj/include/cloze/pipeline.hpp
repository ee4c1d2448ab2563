#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "cloze/assembler.hpp"
#include "cloze/evaluator.hpp"
#include "cloze/skipgram.hpp"
#include "cloze/stem_miner.hpp"

namespace cloze {

// Everything the staged commands need, read from one JSON file. Relative
// paths inside the file resolve against the file's own directory.
struct PipelineConfig {
    std::filesystem::path lexicon_path;
    std::filesystem::path corpus_path;
    std::filesystem::path workdir = "work";

    // mine
    FilterOptions filter;
    int band_lo = 20;
    int band_hi = 40;
    bool balance = true;

    // embed
    SkipgramParams embed;

    // generate
    std::vector<PoolKind> pools{PoolKind::Idioms, PoolKind::Fixed, PoolKind::Combined};
    std::vector<SetType> set_types{kAllSetTypes.begin(), kAllSetTypes.end()};
    double train_frac = 0.70;
    double valid_frac = 0.20;
    double test_frac = 0.10;
    bool phrase_token_reps = false;
    bool readable_export = false;

    // evaluate
    EvalScheme scheme = EvalScheme::KFold;
    RunConfig run;
    std::vector<GridCombo> combos;  // empty selects the built-in grid
    std::string encoder = "reference";
    std::filesystem::path context_vectors_path;

    std::uint64_t seed = 1;
    int jobs = 1;

    static PipelineConfig load(const std::filesystem::path& path);
    static PipelineConfig parse(const std::string& text, const std::filesystem::path& base_dir,
                                const std::string& source_name);

    // Stable serialization of every output-affecting setting; its hash is
    // stamped into artifact metadata.
    std::string canonical() const;
    std::string config_hash() const;

    // Path checks shared by all commands that read the inputs.
    void require_lexicon() const;
    void require_corpus() const;

    std::filesystem::path stems_file() const { return workdir / "stems.jsonl"; }
    std::filesystem::path rejections_file() const { return workdir / "rejections.csv"; }
    std::filesystem::path embeddings_file() const { return workdir / "embeddings.txt"; }
    std::filesystem::path embeddings_meta_file() const { return workdir / "embeddings.meta.json"; }
    std::filesystem::path manifest_file() const { return workdir / "manifest.json"; }
    std::filesystem::path report_file() const { return workdir / "report.csv"; }
    std::filesystem::path questions_file(PoolKind pool, SetType st) const;
};

// Flag-level overrides applied on top of the config file.
struct CliOverrides {
    std::optional<std::uint64_t> seed;
    std::optional<std::filesystem::path> workdir;
    std::optional<int> jobs;
};

PipelineConfig load_config(const std::filesystem::path& path, const CliOverrides& overrides);

// Stage entry points; each reads its inputs from disk and writes its
// artifacts under the workdir. `log` receives one-line progress notes.
void run_mine(const PipelineConfig& cfg, std::ostream& log);
void run_embed(const PipelineConfig& cfg, std::ostream& log);
void run_generate(const PipelineConfig& cfg, std::ostream& log);
void run_evaluate(const PipelineConfig& cfg, std::ostream& log);

// Aggregates the per-fold report rows into mean accuracy per configuration
// and writes the summary CSV to `out`.
void run_report(const PipelineConfig& cfg, std::ostream& out);

// Stem (de)serialization shared by the miner output and generate input.
std::string stem_to_json(const Stem& s);
Stem stem_from_json(const std::string& line, const std::string& where);
std::vector<Stem> load_stems(const std::filesystem::path& path);

}  // namespace cloze
