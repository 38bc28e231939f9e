import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from relsnip.stem import porter_stem, stem
from relsnip.textproc import (Document, Exchange, SourceStream, latest_window,
                              load_stoplist, normalize, split_sentences,
                              stem_match_offsets, tokenize)


# Known pairs from the published vocabulary of the original algorithm.
PORTER_PAIRS = [
    ("caresses", "caress"),
    ("ponies", "poni"),
    ("ties", "ti"),
    ("caress", "caress"),
    ("cats", "cat"),
    ("feed", "feed"),
    ("plastered", "plaster"),
    ("bled", "bled"),
    ("motoring", "motor"),
    ("sing", "sing"),
    ("conflated", "conflat"),
    ("troubled", "troubl"),
    ("sized", "size"),
    ("hopping", "hop"),
    ("tanned", "tan"),
    ("falling", "fall"),
    ("hissing", "hiss"),
    ("failing", "fail"),
    ("filing", "file"),
    ("happy", "happi"),
    ("sky", "sky"),
    ("relational", "relat"),
    ("conditional", "condit"),
    ("rational", "ration"),
    ("valenci", "valenc"),
    ("hesitanci", "hesit"),
    ("digitizer", "digit"),
    ("radicalli", "radic"),
    ("differentli", "differ"),
    ("vileli", "vile"),
    ("analogousli", "analog"),
    ("vietnamization", "vietnam"),
    ("predication", "predic"),
    ("operator", "oper"),
    ("feudalism", "feudal"),
    ("decisiveness", "decis"),
    ("hopefulness", "hope"),
    ("callousness", "callous"),
    ("formaliti", "formal"),
    ("sensitiviti", "sensit"),
    ("sensibiliti", "sensibl"),
    ("triplicate", "triplic"),
    ("formative", "form"),
    ("formalize", "formal"),
    ("electriciti", "electr"),
    ("electrical", "electr"),
    ("hopeful", "hope"),
    ("goodness", "good"),
    ("revival", "reviv"),
    ("adjustable", "adjust"),
    ("defensible", "defens"),
    ("irritant", "irrit"),
    ("replacement", "replac"),
    ("adjustment", "adjust"),
    ("dependent", "depend"),
    ("adoption", "adopt"),
    ("communism", "commun"),
    ("activate", "activ"),
    ("angulariti", "angular"),
    ("homologous", "homolog"),
    ("effective", "effect"),
    ("bowdlerize", "bowdler"),
    ("probate", "probat"),
    ("rate", "rate"),
    ("cease", "ceas"),
    ("controll", "control"),
    ("roll", "roll"),
    ("oscillators", "oscil"),
    ("disputes", "disput"),
    ("concurrent", "concurr"),
    ("users", "user"),
    ("disseminate", "dissemin"),
]


@pytest.mark.parametrize("word,expected", PORTER_PAIRS)
def test_porter_known_pairs(word, expected):
    assert porter_stem(word) == expected


@given(st.text(alphabet="abcdefghijklmnopqrstuvwxyz", min_size=0, max_size=14))
@settings(max_examples=300)
def test_stem_is_idempotent(word):
    assert stem(stem(word)) == stem(word)


def test_tokenize_requirement_sentence():
    got = tokenize("The Disputes system shall support 350 concurrent users")
    assert got == ["the", "disputes", "system", "shall", "support", "350",
                   "concurrent", "users"]


def test_tokenize_empty():
    assert tokenize("") == []
    assert tokenize("   \t\n") == []


def test_tokenize_punctuation_rules():
    assert tokenize("Page—display!") == ["page", "display"]
    assert tokenize("end-to-end, tests.") == ["end", "to", "end", "tests"]


@pytest.fixture(scope="module")
def stoplist():
    return load_stoplist()


def test_normalize_requirement_sentence(stoplist):
    tokens = ["the", "disputes", "system", "shall", "support", "350",
              "concurrent", "users"]
    assert normalize(tokens, stoplist) == ["disput", "system", "support",
                                           "concurr", "user"]


def test_normalize_all_stopwords(stoplist):
    assert normalize(["the", "of", "shall", "and"], stoplist) == []


def test_normalize_numeric_removed(stoplist):
    assert normalize(["350", "42", "users"], stoplist) == ["user"]


def test_normalize_already_stemmed_is_fixpoint(stoplist):
    once = normalize(["disput", "system"], stoplist)
    assert once == ["disput", "system"]


@given(st.lists(st.text(alphabet="abcdefghijklmnopqrstuvwxyz0123456789",
                        min_size=1, max_size=10), max_size=12))
@settings(max_examples=200)
def test_normalize_idempotent_property(tokens):
    stoplist = load_stoplist()
    once = normalize(tokens, stoplist)
    assert normalize(once, stoplist) == once


@given(st.text(alphabet="abcdefghijklmnopqrstuvwxyz0123456789 .,!?", max_size=80))
@settings(max_examples=200)
def test_pipeline_never_emits_stopword_or_number(text):
    stoplist = load_stoplist()
    for tok in normalize(tokenize(text), stoplist):
        assert tok not in stoplist
        assert not tok.isdigit()


def test_split_sentences():
    text = "First one. Second one? Third!  Fourth has no end"
    assert split_sentences(text) == ["First one.", "Second one?", "Third!",
                                     "Fourth has no end"]


def test_document_from_text(stoplist):
    doc = Document.from_text("d1", "Tickets are routed. Queues hold tickets.", stoplist)
    assert doc.raw_sentences == ["Tickets are routed.", "Queues hold tickets."]
    assert doc.sentences == [["ticket", "rout"], ["queue", "hold", "ticket"]]


def test_document_all_stopword_text_keeps_sentence_slots(stoplist):
    doc = Document.from_text("d1", "And so it was.", stoplist)
    assert len(doc.sentences) == 1


def _exchange(i, text, stoplist, speaker="stakeholder"):
    return Exchange(index=i, speaker=speaker, text=text,
                    tokens=tuple(normalize(tokenize(text), stoplist)), timestamp=float(i))


def test_exchange_rejects_unknown_speaker(stoplist):
    with pytest.raises(ValueError):
        _exchange(0, "hello", stoplist, speaker="moderator")


def test_stream_requires_increasing_indices(stoplist):
    s = SourceStream()
    s.append(_exchange(0, "tickets", stoplist))
    with pytest.raises(ValueError):
        s.append(_exchange(0, "queues", stoplist))


def test_latest_window_under_capacity(stoplist):
    s = SourceStream(window_size_tokens=60)
    s.append(_exchange(0, "tickets routed through queues quickly", stoplist))
    w = latest_window(s)
    assert w == ["ticket", "rout", "queue", "quickli"]


def test_latest_window_truncates_from_left(stoplist):
    s = SourceStream(window_size_tokens=60)
    words = [f"tok{i}" for i in range(100)]
    s.append(_exchange(0, " ".join(words[:50]), stoplist))
    s.append(_exchange(1, " ".join(words[50:]), stoplist))
    w = latest_window(s)
    assert len(w) == 60
    assert w == words[40:]


def test_latest_window_replay_suffix_property(stoplist):
    # Appending only changes the window suffix: the new window must end with
    # the new tokens and the part before them must be a suffix of the old one.
    s = SourceStream(window_size_tokens=10)
    previous = None
    for i, text in enumerate(["alpha beta gamma", "delta epsilon",
                              "zeta eta theta iota", "kappa"]):
        ex = _exchange(i, text, stoplist)
        s.append(ex)
        window = latest_window(s)
        assert len(window) <= 10
        if previous is not None:
            fresh = list(ex.tokens)[-10:]
            assert window[len(window) - len(fresh):] == fresh
            head = window[: len(window) - len(fresh)]
            assert previous[len(previous) - len(head):] == head
        previous = window


def test_latest_window_empty_stream_errors():
    with pytest.raises(ValueError, match="no conversation yet"):
        latest_window(SourceStream())


def test_stem_match_offsets_inflected_surface():
    text = "Disputed tickets: the dispute was routed."
    spans = stem_match_offsets(text, "disput")
    assert [text[a:b] for a, b in spans] == ["Disputed", "dispute"]


def test_stem_match_offsets_bigram():
    text = "Offices in North America and south america handle routing."
    spans = stem_match_offsets(text, "north america")
    assert [text[a:b] for a, b in spans] == ["North America"]
