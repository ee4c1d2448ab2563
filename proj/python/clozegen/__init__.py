"""Cloze test dataset toolkit: stems, distractors, questions, scoring."""

from ._core import (
    ConfigError,
    DataError,
    EmbeddingTable,
    Lexicon,
    candidate_set,
    filter_sentence,
    levenshtein,
    load_embeddings,
    mean_of_words,
    report,
    run_embed,
    run_evaluate,
    run_generate,
    run_mine,
    save_embeddings,
    score_candidates,
    tokenize,
    train_skipgram,
)

__all__ = [
    "ConfigError",
    "DataError",
    "EmbeddingTable",
    "Lexicon",
    "candidate_set",
    "filter_sentence",
    "levenshtein",
    "load_embeddings",
    "mean_of_words",
    "report",
    "run_embed",
    "run_evaluate",
    "run_generate",
    "run_mine",
    "save_embeddings",
    "score_candidates",
    "tokenize",
    "train_skipgram",
]
