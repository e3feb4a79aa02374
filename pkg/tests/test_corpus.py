import gzip
import io
import json
from collections import Counter

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from dialign import corpus
from dialign.corpus import RedditRecord, TextUnit
from dialign.errors import FormatError, UndefinedInputError

from conftest import FIXTURES, make_unit, record_line


def comment(i, body="hello there", author="a", **kw):
    return RedditRecord(f"c{i}", author, "nz", 1_300_000_000 + i, "comment", body=body, **kw)


class TestIngest:
    def test_three_valid_lines(self):
        lines = "\n".join(record_line(id=f"c{i}", body="kia ora") for i in range(3))
        records, skipped = corpus.ingest(io.StringIO(lines))
        assert len(records) == 3 and skipped == 0
        assert [r.id for r in records] == ["c0", "c1", "c2"]

    def test_malformed_line_skipped(self):
        lines = "\n".join([record_line(id="c0", body="a"), "{not json", record_line(id="c1", body="b")])
        records, skipped = corpus.ingest(io.StringIO(lines))
        assert len(records) == 2 and skipped == 1

    def test_mostly_malformed_is_format_error(self):
        lines = "\n".join([record_line(id="c0", body="a"), "{", "["])
        with pytest.raises(FormatError):
            corpus.ingest(io.StringIO(lines))

    def test_unknown_fields_ignored(self):
        records, _ = corpus.ingest(io.StringIO(record_line(id="c0", body="a", gilded=3, edited=False)))
        assert records[0].body == "a"

    def test_schema_map(self):
        line = json.dumps({"id": "c0", "user": "bob", "subreddit": "nz", "created_utc": 5, "body": "hi"})
        records, _ = corpus.ingest(io.StringIO(line), schema={"author": "user"})
        assert records[0].author == "bob"

    def test_fixture_counts_per_kind(self):
        # frozen from a raw line scan of the fixture file: 67 comments, 33 submissions of which 12 selfposts
        records, skipped = corpus.ingest(FIXTURES / "dump_100.ndjson")
        assert skipped == 0
        kinds = Counter(r.kind for r in records)
        assert kinds == {"comment": 67, "submission": 33}
        types = Counter(u.text_type for u in corpus.units_from_records(records))
        assert types == {"rcomm": 67, "rpost": 21, "rstitle": 12, "rstext": 12}

    def test_gzip_input(self, tmp_path):
        path = tmp_path / "dump.ndjson.gz"
        with gzip.open(path, "wt", encoding="utf-8") as fh:
            fh.write(record_line(id="c0", body="a") + "\n")
        records, _ = corpus.ingest(path)
        assert len(records) == 1

    def test_unreadable_stream(self, tmp_path):
        with pytest.raises(OSError):
            corpus.ingest(tmp_path / "missing.ndjson")

    def test_zstd_without_module(self, tmp_path, monkeypatch):
        import builtins
        real_import = builtins.__import__

        def fake(name, *args, **kw):
            if name == "zstandard":
                raise ImportError(name)
            return real_import(name, *args, **kw)

        monkeypatch.setattr(builtins, "__import__", fake)
        path = tmp_path / "dump.zst"
        path.write_bytes(b"\x28\xb5\x2f\xfd")
        with pytest.raises((OSError, ImportError)):
            corpus.ingest(path)


class TestClean:
    def test_unchanged_without_sentinels(self):
        recs = [comment(i) for i in range(4)]
        assert corpus.clean(recs) == recs

    def test_duplicate_ids_keep_first(self):
        a, b = comment(1, body="first"), comment(1, body="second")
        assert corpus.clean([a, b]) == [a]

    def test_sentinels_dropped(self):
        recs = [comment(1, author="[deleted]"), comment(2, body="[removed]"), comment(3)]
        assert [r.id for r in corpus.clean(recs)] == ["c3"]

    def test_removal_ratio(self):
        # 1000 input rows of which 92 (9.2%) are deleted, removed or duplicated
        recs = []
        for i in range(908):
            recs.append(comment(i))
        recs += [comment(1000 + i, author="[deleted]") for i in range(40)]
        recs += [comment(2000 + i, body="[removed]") for i in range(26)]
        recs += [comment(i) for i in range(26)]
        assert len(recs) == 1000
        assert len(corpus.clean(recs)) == round(1000 * 0.908)

    @given(st.lists(st.tuples(st.integers(0, 8), st.sampled_from(["x", "[deleted]", "[removed]"])), max_size=30))
    def test_idempotent(self, spec):
        recs = [comment(i, body=b) for i, b in spec]
        once = corpus.clean(recs)
        assert corpus.clean(once) == once


class TestDeriveTextUnits:
    def test_comment(self):
        assert [u.text_type for u in corpus.derive_text_units(comment(1))] == ["rcomm"]

    def test_link_post(self):
        rec = RedditRecord("s1", "a", "nz", 10, "submission", title="look", url="https://x.org")
        assert [u.text_type for u in corpus.derive_text_units(rec)] == ["rpost"]

    def test_selfpost(self):
        rec = RedditRecord("s1", "a", "nz", 10, "submission", title="question", selftext="body text")
        units = corpus.derive_text_units(rec)
        assert [u.text_type for u in units] == ["rstitle", "rstext"]
        assert {u.text for u in units} == {"question", "body text"}

    def test_title_only_without_url(self):
        rec = RedditRecord("s1", "a", "nz", 10, "submission", title="just a title")
        assert [u.text_type for u in corpus.derive_text_units(rec)] == ["rpost"]


class TestTTR:
    def test_examples(self):
        assert corpus.ttr(list("abc")) == 1.0
        assert corpus.ttr(list("aaaa")) == 0.25

    def test_empty(self):
        with pytest.raises(UndefinedInputError):
            corpus.ttr([])

    def test_thousand_tokens_oracle(self):
        rng = np.random.default_rng(0)
        toks = [f"w{x}" for x in rng.integers(0, 400, 1000)]
        assert corpus.ttr(toks) == len(set(toks)) / 1000

    @given(st.lists(st.text(min_size=1, max_size=3), min_size=1, max_size=40))
    def test_one_iff_distinct(self, toks):
        assert (corpus.ttr(toks) == 1.0) == (len(set(toks)) == len(toks))

    @given(st.lists(st.text(min_size=1, max_size=3), min_size=1, max_size=40), st.integers(0, 39))
    def test_repetition_never_increases(self, toks, i):
        assert corpus.ttr(toks + [toks[i % len(toks)]]) <= corpus.ttr(toks)


class TestHourly:
    def test_noon_utc_is_local_midnight(self):
        units = [make_unit("x", ts=1_300_000_000 - 1_300_000_000 % 86400 + 12 * 3600 + i) for i in range(5)]
        prof = corpus.hourly_profile(units, 12)
        assert prof[0] == 1.0

    def test_offset_zero_is_utc_histogram(self):
        ts = [3600 * h + 1 for h in (0, 0, 5, 23)]
        prof = corpus.hourly_profile([make_unit("x", ts=t) for t in ts], 0)
        assert prof[0] == 0.5 and prof[5] == 0.25 and prof[23] == 0.25

    def test_uniform(self):
        rng = np.random.default_rng(1)
        units = [make_unit("x", ts=int(t)) for t in rng.integers(1, 10**9, 100_000)]
        prof = corpus.hourly_profile(units)
        assert np.all(np.abs(prof - 1 / 24) <= 0.01)

    @given(st.lists(st.integers(1, 10**9), min_size=1, max_size=50), st.integers(-24, 24))
    @settings(max_examples=50)
    def test_sums_to_one_and_rotates(self, ts, k):
        units = [make_unit("x", ts=t) for t in ts]
        base = corpus.hourly_profile(units, 0)
        assert abs(base.sum() - 1.0) <= 1e-9
        assert np.array_equal(corpus.hourly_profile(units, k), np.roll(base, k))

    def test_empty(self):
        with pytest.raises(UndefinedInputError):
            corpus.hourly_profile([])


class TestFilters:
    def test_author_substrings(self):
        units = [make_unit("x", author=a) for a in ("spambot99", "Robotham", "kiwi")]
        assert [u.author for u in corpus.filter_authors(units, ["spam", "bot"])] == ["kiwi"]

    def test_empty_patterns_identity(self):
        units = [make_unit("x", author=a) for a in ("spambot99", "kiwi")]
        assert corpus.filter_authors(units, []) == units

    def test_moderator_dropped(self):
        units = [make_unit("x", author="m", distinguished="moderator"), make_unit("y", author="k")]
        assert [u.author for u in corpus.filter_authors(units, [])] == ["k"]

    def test_local_hours(self):
        units = [make_unit("x", ts=3600 * h + 60 + 86400 * d) for d in range(2) for h in range(24)]
        assert len(corpus.filter_local_hours(units, 6, 24)) == 36
        assert corpus.filter_local_hours(units, 0, 24) == units

    def test_three_am_dropped(self):
        u = make_unit("x", ts=15 * 3600)  # 03:00 at +12
        assert corpus.filter_local_hours([u], 6, 24, utc_offset=12) == []

    def test_bad_window(self):
        with pytest.raises(ValueError):
            corpus.filter_local_hours([], 10, 5)


class TestStats:
    def test_hand_counts(self, tmp_path):
        units = [make_unit("a b c", community="nz"), make_unit("a a", community="nz"),
                 make_unit("one", community="nz", text_type="rpost")]
        stats = corpus.corpus_stats(units)
        comm = [s for s in stats if s.text_type == "rcomm"][0]
        assert (comm.n, comm.words, comm.mean, comm.max) == (2, 5, 2.5, 3)
        assert comm.ttr == pytest.approx(3 / 5)
        path = tmp_path / "s.csv"
        corpus.write_stats_csv(stats, path)
        assert path.read_text().splitlines()[0] == "community,text_type,n,words,mean,max,ttr"

    def test_jsonl_roundtrip(self, tmp_path):
        units = [make_unit("kia ora", score=3, distinguished="moderator")]
        corpus.write_units_jsonl(units, tmp_path / "u.jsonl")
        assert corpus.read_units_jsonl(tmp_path / "u.jsonl") == units
