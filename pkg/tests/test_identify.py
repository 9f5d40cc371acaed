import json
import threading

import numpy as np
import pytest

from voicecrypt.audio import Signal, write_wav
from voicecrypt.cipher import mse
from voicecrypt.errors import (
    DuplicateTemplate,
    EmptyDatabase,
    EmptyDataset,
    IntegrityError,
    LabelMissing,
    LengthMismatch,
    MethodMismatch,
)
from voicecrypt.features import METHODS, FeatureVector
from voicecrypt.identify import MANIFEST, TemplateDB, accuracy_bench, accuracy_on_signals, euclidean
from voicecrypt.synth import synthetic_voice


class TestEuclidean:
    def test_identical(self):
        a = FeatureVector("zcr", [0.1, 0.2])
        assert euclidean(a, a) == 0

    def test_three_four_five(self):
        assert euclidean(FeatureVector("zcr", [0, 0]), FeatureVector("zcr", [3, 4])) == 5

    def test_symmetric(self, rng):
        for _ in range(20):
            a = FeatureVector("stats", rng.standard_normal(6))
            b = FeatureVector("stats", rng.standard_normal(6))
            std = rng.uniform(0.5, 2, 6)
            assert euclidean(a, b, std=std) == euclidean(b, a, std=std)

    def test_zero_variance_dimension_skipped(self):
        a, b = FeatureVector("zcr", [1.0, 5.0]), FeatureVector("zcr", [3.0, 9.0])
        assert euclidean(a, b, std=np.array([2.0, 0.0])) == 1.0

    def test_errors(self):
        with pytest.raises(MethodMismatch):
            euclidean(FeatureVector("zcr", [0, 0]), FeatureVector("pitch", np.zeros(5)))
        with pytest.raises(LengthMismatch):
            euclidean(FeatureVector("zcr", [0, 0]), FeatureVector("zcr", [0, 0, 0]))


@pytest.fixture(scope="module")
def corpus_db(tmp_path_factory, corpus, keys):
    db = TemplateDB(tmp_path_factory.mktemp("db"))
    for name, (enroll, _) in corpus.items():
        for x in enroll:
            db.enroll(name, x, keys)
    return db


class TestEnroll:
    def test_bookkeeping(self, tmp_path, keys):
        db = TemplateDB(tmp_path)
        for seed in range(3):
            db.enroll("alice", synthetic_voice(120.0, 0.5, seed=seed), keys)
        assert len(db) == 3 and db.speakers == ["alice"]
        doc = json.loads((tmp_path / MANIFEST).read_text(encoding="utf-8"))
        assert doc["format_version"] == 1
        assert set(doc["normalization"]) == set(METHODS)
        assert [e["template"] for e in doc["entries"]] == ["t00000.vcr", "t00001.vcr", "t00002.vcr"]
        for e in doc["entries"]:
            assert {m: len(v) for m, v in e["features"].items()} == {"pitch": 5, "stats": 6, "lpc": 12, "zcr": 2, "fft": 64}

    def test_template_round_trip(self, tmp_path, keys, voice):
        db = TemplateDB(tmp_path)
        entry = db.enroll("bob", voice, keys)
        back = db.decrypt_template(entry.template_id, keys)
        assert mse(back.samples, voice.samples) < 1e-12

    @pytest.mark.parametrize("name", ["", "   "])
    def test_empty_speaker(self, tmp_path, keys, voice, name):
        with pytest.raises(ValueError):
            TemplateDB(tmp_path).enroll(name, voice, keys)

    def test_duplicate(self, tmp_path, keys, voice):
        db = TemplateDB(tmp_path)
        db.enroll("bob", voice, keys)
        with pytest.raises(DuplicateTemplate):
            db.enroll("bob", voice, keys)
        db.enroll("carol", voice, keys)

    def test_no_plaintext_in_store(self, tmp_path, keys, voice):
        db = TemplateDB(tmp_path)
        db.enroll("bob", voice, keys)
        prefixes = [
            voice.samples[:8].astype("<f8").tobytes(),
            np.rint(voice.samples[:8] * 32768).astype("<i2").tobytes(),
            voice.samples[:8].astype("<f4").tobytes(),
        ]
        for path in tmp_path.iterdir():
            blob = path.read_bytes()
            assert not any(p in blob for p in prefixes), path.name
        assert sorted(p.suffix for p in tmp_path.iterdir() if p.suffix not in ("", ".lock")) == [".json", ".vcr"]

    def test_normalization_recomputed(self, tmp_path, keys):
        db = TemplateDB(tmp_path)
        db.enroll("a", synthetic_voice(100.0, 0.5, seed=1), keys)
        first = db.normalization["pitch"]["mean"].copy()
        db.enroll("b", synthetic_voice(200.0, 0.5, seed=2), keys)
        assert not np.allclose(first, db.normalization["pitch"]["mean"])

    def test_concurrent_writers(self, tmp_path, keys):
        signals = [synthetic_voice(100.0 + 10 * i, 0.4, seed=i) for i in range(6)]
        errors = []

        def worker(i):
            try:
                TemplateDB(tmp_path).enroll(f"s{i}", signals[i], keys)
            except Exception as exc:  # pragma: no cover - reported below
                errors.append(exc)

        threads = [threading.Thread(target=worker, args=(i,)) for i in range(6)]
        for t in threads:
            t.start()
        for t in threads:
            t.join()
        assert not errors
        db = TemplateDB.open(tmp_path)
        assert sorted(e.speaker_id for e in db.entries) == [f"s{i}" for i in range(6)]
        assert len({e.template_id for e in db.entries}) == 6


class TestIdentify:
    def test_self_identification_every_method(self, corpus_db, corpus):
        for name, (enroll, _) in corpus.items():
            for x in enroll:
                for method in METHODS:
                    result = corpus_db.identify(x, method)
                    assert result.decision == name
                    assert result.ranking[0][2] == pytest.approx(0.0, abs=1e-9)

    def test_held_out_pitch(self, corpus_db, corpus):
        labeled = [(name, x) for name, (_, test) in corpus.items() for x in test]
        table = dict(accuracy_on_signals(corpus_db, labeled, ["pitch", "zcr"]))
        assert table["pitch"] == 100.0
        assert table["pitch"] >= table["zcr"]

    def test_ranking_total_order(self, corpus_db, corpus):
        result = corpus_db.identify(corpus["spk_c"][1][0], "pitch")
        keys = [(d, s, t) for s, t, d in result.ranking]
        assert keys == sorted(keys)
        assert len(result.ranking) == 15
        speakers = result.speakers()
        assert [s for s, _ in speakers][0] == "spk_c" and len(speakers) == 5

    def test_ties_broken_by_speaker_then_template(self, tmp_path, keys, voice):
        db = TemplateDB(tmp_path)
        db.enroll("zed", voice, keys)
        db.enroll("amy", voice, keys)
        ranking = db.identify(voice, "stats").ranking
        assert [(s, t) for s, t, _ in ranking] == [("amy", "t00001"), ("zed", "t00000")]

    def test_scale_invariant_order(self, corpus_db, corpus, tmp_path):
        query = FeatureVector("fft", np.zeros(64))
        from voicecrypt.features import extract

        query = extract(corpus["spk_b"][1][2], "fft")
        base = [(s, t) for s, t, _ in corpus_db.rank(query).ranking]
        scaled = TemplateDB(tmp_path)
        scaled.entries = [type(e)(e.speaker_id, e.template_id, e.template, e.digest, e.enrolled_at,
                                  {m: 7.5 * v for m, v in e.features.items()}) for e in corpus_db.entries]
        scaled._update_normalization()
        moved = scaled.rank(FeatureVector("fft", 7.5 * query.values)).ranking
        assert [(s, t) for s, t, _ in moved] == base

    def test_single_speaker_closed_set(self, tmp_path, keys, voice):
        db = TemplateDB(tmp_path)
        db.enroll("only", voice, keys)
        other = synthetic_voice(210.0, 1.0, seed=99)
        for method in METHODS:
            assert db.identify(other, method).decision == "only"

    def test_empty_database(self, tmp_path, voice):
        with pytest.raises(EmptyDatabase):
            TemplateDB(tmp_path).identify(voice)
        with pytest.raises(EmptyDatabase):
            TemplateDB.open(tmp_path / "missing")

    def test_unknown_method(self, corpus_db, voice):
        with pytest.raises(MethodMismatch):
            corpus_db.identify(voice, "mfcc")

    def test_raw_mode(self, corpus_db, corpus):
        x = corpus["spk_a"][1][0]
        assert corpus_db.identify(x, "pitch", normalize=False).decision == "spk_a"

    def test_reopened_db_agrees(self, corpus_db, corpus):
        x = corpus["spk_d"][1][1]
        again = TemplateDB.open(corpus_db.root)
        assert again.identify(x, "lpc").ranking == corpus_db.identify(x, "lpc").ranking


class TestVerify:
    def test_correct_password(self, corpus_db, keys):
        corpus_db.verify_template("t00004", keys, "pitch")

    def test_wrong_password(self, corpus_db, other_keys):
        with pytest.raises(IntegrityError):
            corpus_db.verify_template("t00004", other_keys, "pitch")

    def test_tampered_template(self, tmp_path, keys, voice):
        db = TemplateDB(tmp_path)
        e = db.enroll("bob", voice, keys)
        path = tmp_path / e.template
        blob = bytearray(path.read_bytes())
        blob[24 + 8 * 500 : 24 + 8 * 900] = np.full(400, 3.0).astype("<f8").tobytes()
        path.write_bytes(bytes(blob))
        with pytest.raises(IntegrityError):
            db.verify_template(e.template_id, keys, "stats")


def write_tree(root, layout):
    for speaker, signals in layout.items():
        (root / speaker).mkdir(parents=True, exist_ok=True)
        for i, x in enumerate(signals):
            write_wav(x, root / speaker / f"u{i}.wav")


class TestAccuracyBench:
    def test_labeled_directories(self, tmp_path, corpus, keys):
        write_tree(tmp_path / "enroll", {k: v[0] for k, v in corpus.items()})
        write_tree(tmp_path / "test", {k: v[1] for k, v in corpus.items()})
        table = accuracy_bench(tmp_path / "enroll", tmp_path / "test", keys=keys)
        accs = [a for _, a in table]
        assert accs == sorted(accs, reverse=True)
        d = dict(table)
        assert set(d) == set(METHODS)
        assert d["pitch"] == 100.0 and d["pitch"] >= d["zcr"]

    def test_existing_db(self, tmp_path, corpus_db, corpus):
        write_tree(tmp_path / "test", {k: v[1] for k, v in corpus.items()})
        assert dict(accuracy_bench(corpus_db.root, tmp_path / "test", ["pitch"]))["pitch"] == 100.0

    def test_single_speaker(self, tmp_path, keys):
        write_tree(tmp_path / "e", {"solo": [synthetic_voice(150.0, 0.5, seed=1)]})
        write_tree(tmp_path / "t", {"solo": [synthetic_voice(150.0, 0.5, seed=2)]})
        assert all(a == 100.0 for _, a in accuracy_bench(tmp_path / "e", tmp_path / "t", keys=keys))

    def test_empty_test_dir(self, tmp_path, corpus_db):
        (tmp_path / "t").mkdir()
        with pytest.raises(EmptyDataset):
            accuracy_bench(corpus_db.root, tmp_path / "t")

    def test_unlabeled_file(self, tmp_path, corpus_db, voice):
        (tmp_path / "t").mkdir()
        write_wav(voice, tmp_path / "t" / "loose.wav")
        with pytest.raises(LabelMissing):
            accuracy_bench(corpus_db.root, tmp_path / "t")

    def test_keys_needed_for_labeled_enrollment(self, tmp_path, corpus):
        write_tree(tmp_path / "e", {"a": corpus["spk_a"][0]})
        write_tree(tmp_path / "t", {"a": corpus["spk_a"][1]})
        with pytest.raises(ValueError):
            accuracy_bench(tmp_path / "e", tmp_path / "t")


def test_signal_sample_rate_respected(tmp_path, keys):
    db = TemplateDB(tmp_path)
    x = synthetic_voice(160.0, 1.0, fs=16_000, seed=5)
    db.enroll("hi", x, keys)
    assert db.identify(x, "pitch").ranking[0][2] == pytest.approx(0.0, abs=1e-9)
    assert isinstance(x, Signal)
