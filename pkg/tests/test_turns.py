import datetime as dt
import io
import re

from sempolar.ingest import extract_turns, merge_cue_texts, read_turns, write_turns
from sempolar.ingest.srt import SrtCue
from sempolar.keywords import DEFAULT_KEYWORDS, KeywordMatcher

MATCHER = KeywordMatcher()
DATE = dt.date(2016, 3, 4)


def _cues(*texts, gap=False):
    cues = []
    t = 0
    for i, text in enumerate(texts, 1):
        start = t + (9000 if gap else 1000)
        end = start + 2000
        t = end
        cues.append(SrtCue(i, start, end, text))
    return cues


def test_single_keyword_turn():
    turns = extract_turns(_cues("racism is discussed"), "cnn", DATE, MATCHER)
    assert len(turns) == 1
    assert turns[0].keywords == {1}
    assert turns[0].word_count == 3


def test_no_keyword_no_turn():
    assert extract_turns(_cues("the weather today"), "cnn", DATE, MATCHER) == []


def test_speaker_marker_merge():
    cues = _cues(">> A talks about police", "and immigration", ">> B replies")
    texts = merge_cue_texts(cues)
    assert texts == ["A talks about police and immigration", "B replies"]
    turns = extract_turns(cues, "cnn", DATE, MATCHER)
    # only the keyword-bearing first turn is admitted
    assert len(turns) == 1
    assert turns[0].keywords == {4, 5}


def test_gap_starts_new_turn():
    cues = [
        SrtCue(1, 0, 1000, "police reform on the"),
        SrtCue(2, 1500, 2500, "agenda tonight"),
        SrtCue(3, 9000, 10000, "now health care news"),
    ]
    texts = merge_cue_texts(cues)
    assert texts == ["police reform on the agenda tonight", "now health care news"]
    turns = extract_turns(cues, "cnn", DATE, MATCHER)
    assert [sorted(t.keywords) for t in turns] == [[4], [9]]


def test_multiword_and_hashtag_forms():
    turns = extract_turns(
        _cues(">> Global warming and #BlackLivesMatter trend", ">> black lives matter marches"),
        "cnn",
        DATE,
        MATCHER,
    )
    assert len(turns) == 2
    assert turns[0].keywords == {3, 8}
    assert turns[1].keywords == {3}


def test_word_boundary_matching():
    # "policeman" must not match "police"
    assert extract_turns(_cues("the policeman waved"), "cnn", DATE, MATCHER) == []


def test_every_turn_contains_surface_form():
    cues = _cues(
        ">> we saw police and immigrants downtown",
        ">> nothing relevant here",
        ">> RACIST remarks condemned",
    )
    turns = extract_turns(cues, "foxnews", DATE, MATCHER)
    forms = [f for spec in DEFAULT_KEYWORDS for f in spec.surface_forms]
    for turn in turns:
        assert any(
            re.search(rf"\b{re.escape(form)}\b", turn.text.lower()) for form in forms
        )


def test_extraction_deterministic_and_serializable():
    cues = _cues(">> police story one", ">> immigration story two")
    a = extract_turns(cues, "cnn", DATE, MATCHER, turn_id_prefix="cnn:f1:")
    b = extract_turns(cues, "cnn", DATE, MATCHER, turn_id_prefix="cnn:f1:")
    assert a == b
    buf1, buf2 = io.StringIO(), io.StringIO()
    write_turns(a, buf1)
    write_turns(b, buf2)
    assert buf1.getvalue() == buf2.getvalue()


def test_turn_store_round_trip(tmp_path):
    cues = _cues(">> police story", ">> global warming report")
    turns = extract_turns(cues, "cnn", DATE, MATCHER, turn_id_prefix="cnn:x:")
    path = tmp_path / "turns.ndjson"
    write_turns(turns, path)
    assert list(read_turns(path)) == turns
