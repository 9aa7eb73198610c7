from sempolar.ingest.srt import SrtCue, SrtDocument, parse_srt, serialize_srt
from sempolar.ingest.commercials import count_cue_texts, remove_commercials
from sempolar.ingest.turns import (
    SpeakerTurn,
    extract_turns,
    merge_cue_texts,
    read_turns,
    turn_sort_key,
    write_turns,
)
from sempolar.ingest.tweets import TweetIngestResult, ingest_tweets

__all__ = [
    "SrtCue",
    "SrtDocument",
    "parse_srt",
    "serialize_srt",
    "count_cue_texts",
    "remove_commercials",
    "SpeakerTurn",
    "merge_cue_texts",
    "extract_turns",
    "read_turns",
    "write_turns",
    "turn_sort_key",
    "TweetIngestResult",
    "ingest_tweets",
]
