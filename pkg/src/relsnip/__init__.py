"""relsnip: conversation-driven retrieval of relevant snippets from a document repository.

The library models both the repository (as smoothed n-gram language models
compiled to weighted finite-state transducers) and the live conversation
window (as a zero-weight token chain).  Composing the two and walking the
cheapest paths yields the terms that tie the conversation to the repository;
those terms then score and rank multi-sentence snippets for display.
"""

from relsnip.fst import (SymbolTable, Wfst, Path, linear_chain, compose,
                         n_shortest_paths, path_weight, shortest_cost)
from relsnip.textproc import (Document, Exchange, SourceStream, tokenize,
                              normalize, latest_window, load_stoplist,
                              split_sentences, stem_match_offsets)
from relsnip.stem import stem, porter_stem
from relsnip.ngram import (NGramCounts, NGramModel, ModelGrid, count_ngrams,
                           estimate, to_wfst, sequence_logprob, perplexity,
                           build_grid, select_model, grid_perplexities,
                           save_grid, load_grid)
from relsnip.extraction import (RelevantTerm, Snippet, ExtractionConfig,
                                extract_relevant_terms, segment_snippets,
                                score_snippet, select_snippets)
from relsnip.tone import (ToneProfile, ToneClientConfig, SnippetCount,
                          analyze_tone, snippet_count_policy,
                          LexiconToneScorer, ReplayToneClient)
from relsnip.evaluation import (levenshtein, kruskal_wallis, ReferenceSet,
                                EvalReport, evaluate_extraction)
from relsnip.session import (Engine, Session, WindowResult, export_session,
                             import_session)

__version__ = "0.1.0"
