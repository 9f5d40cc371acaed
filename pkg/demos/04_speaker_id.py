"""Enroll five toy speakers into an encrypted store and identify new utterances.

The store keeps one ciphertext per template plus feature vectors computed
at enrollment time. Identification never decrypts anything. The password
is only needed to pull a template back out, for example to check that a
stored file still matches its cached features.

    python3 demos/04_speaker_id.py
"""

import tempfile
from pathlib import Path

from voicecrypt import METHODS, TemplateDB, derive_keys
from voicecrypt.errors import IntegrityError
from voicecrypt.identify import accuracy_on_signals
from voicecrypt.synth import SPEAKERS, speaker_corpus

keys = derive_keys("Djyot!24")
corpus = speaker_corpus(n_enroll=3, n_test=3, seed=0)

with tempfile.TemporaryDirectory() as root:
    db = TemplateDB(Path(root) / "store")
    for name, (enroll, _) in corpus.items():
        for x in enroll:
            db.enroll(name, x, keys)
    print(f"store holds {len(db)} templates for {len(db.speakers)} speakers:")
    print("  " + " ".join(sorted(p.name for p in db.root.iterdir() if not p.name.startswith("."))[:6]) + " ...")

    probe = corpus["spk_c"][1][0]
    result = db.identify(probe, "pitch")
    print(f"\nutterance from spk_c (f0 around {SPEAKERS['spk_c'][0]:.0f} Hz), top 4 templates:")
    for speaker, template, dist in result.ranking[:4]:
        print(f"  {speaker}  {template}  {dist:.3f}")
    print(f"decision: {result.decision}")

    labeled = [(name, x) for name, (_, test) in corpus.items() for x in test]
    print("\nheld-out accuracy per feature method:")
    for method, acc in accuracy_on_signals(db, labeled, METHODS):
        print(f"  {method:6s} {acc:6.1f}%")

    top = result.ranking[0][1]
    db.verify_template(top, keys)
    print(f"\n{top} decrypts and matches its cached features")
    try:
        db.verify_template(top, derive_keys("Djyot!25"))
    except IntegrityError as exc:
        print(f"wrong password: {exc}")
