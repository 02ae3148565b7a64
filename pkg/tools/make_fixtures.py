#!/usr/bin/env python3
"""Regenerate the frozen test fixtures under tests/fixtures/.

Metric expectations are computed with the independent oracle
implementations in tests/oracles.py and frozen into JSON; the library
under test never touches this script. Deterministic: same seed, same
files.
"""

from __future__ import annotations

import json
import random
import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(ROOT / "tests"))

from oracles import oracle_bleu, oracle_chrf_pp, oracle_wer  # noqa: E402

FIXTURES = ROOT / "tests" / "fixtures"

EN_WORDS = [
    "the", "a", "dog", "with", "wide", "nose", "is", "running", "on", "lawn",
    "he", "wearing", "glasses", "as", "well", "woman", "holding", "food",
    "plate", "inside", "shop", "child", "has", "her", "leg", "in", "air",
    "attempting", "to", "break", "board", "behind", "them", "are", "small",
    "vehicles", "they", "use", "cold", "places", "men", "roof", "of", "house",
    "one", "grey", "shirt", "and", "blue", "trousers", "wants", "reach", "top",
    "mountain", "metal", "carrying", "climbers", "maybe", "someone", "made",
    "him", "upset", "people", "area", "large", "rocks", "helmets", "shoes",
    "being", "taken", "off", "by", "instructor", "sliding", "play", "ice",
    "walking", "road", "shoulders",
]
EN_DECOR = [".", ",", "!", "?", ";", '"', "(", ")", "'s", "3.14", "5-6", "1,000", "e-mail"]

# Bemba-flavored source sentences with their English references, used for
# the pipeline fixture and the mock adapter tables.
PIPELINE_PAIRS = [
    ("nafwala na amakalashi ku menso", "He is wearing glasses."),
    ("imbwa iyafonka pamoona ilebutuka palunkoto", "A dog with a wide nose is running on the lawn."),
    ("akamwanakashi nakemya ukuulu mumuulu", "A child has lifted one leg in the air."),
    ("kunuma yabo kuli notu ma motoka", "Behind them are vehicles they use in cold places."),
    ("abaume bali pa mutenge yanganda", "Men are on the roof of the house."),
    ("ifi bafwele kunsapato fyakutelelela", "These shoes they are wearing are for sliding."),
    ("namayo ale enda mumusebo nomwana", "A woman is walking in the road with a child."),
    ("namayo naikata ifyakulya pa mbale", "A woman is holding food on a plate."),
    ("nangu limbi kuli bamo abamufulwishe", "Or maybe someone has upset her."),
    ("abantu bane bali umuli ifimabwe ifikulu", "Four people are in a place full of rocks."),
    ("akamwana kambi balekafuula amasapato", "One of the pupils is being removed the shoes."),
    ("afwile alefwaya afike pampela ya lumpili", "Obviously he wants to reach the top of the mountain."),
    ("umwana aleangala na bhola mucibansa", "A child is playing with a ball on the field."),
    ("abalumendo babili baleikala pa cipuna", "Two boys are sitting on a bench."),
    ("umukashana aleipika ifyakulya mu nganda", "A girl is cooking food in the house."),
    ("ba shitata baleenda na makasa mu mushili", "The man is walking barefoot in the mud."),
    ("inkoko shileingila mu cisanza", "The chickens are entering the shelter."),
    ("umusepela aleelwa ukwensha icitenge", "The young man is learning to drive."),
    ("banamayo baletamba amenshi pa mulonga", "The women are fetching water at the river."),
    ("abaice baleangala pa musebo wa mushi", "The children are playing on the village road."),
]


def english_sentence(rng: random.Random, lo: int = 4, hi: int = 16) -> str:
    tokens = [rng.choice(EN_WORDS) for _ in range(rng.randint(lo, hi))]
    for _ in range(rng.randint(0, 2)):
        tokens.insert(rng.randrange(len(tokens)), rng.choice(EN_DECOR))
    sentence = " ".join(tokens)
    sentence = sentence[0].upper() + sentence[1:]
    if rng.random() < 0.8:
        sentence += rng.choice([".", "!", "?"])
    return sentence


def perturb(rng: random.Random, sentence: str, noise: float) -> str:
    out = []
    for token in sentence.split():
        r = rng.random()
        if r < noise * 0.5:
            out.append(rng.choice(EN_WORDS))
        elif r < noise * 0.8:
            continue
        else:
            out.append(token)
        if rng.random() < noise * 0.3:
            out.append(rng.choice(EN_WORDS))
    return " ".join(out) if out else rng.choice(EN_WORDS)


def metric_fixture(name: str, refs: list[str], hyps: list[str]) -> None:
    payload = {
        "refs": refs,
        "hyps": hyps,
        "expected": {
            "bleu": oracle_bleu(refs, hyps),
            "chrf_pp": oracle_chrf_pp(refs, hyps),
            "wer": oracle_wer(refs, hyps),
        },
    }
    path = FIXTURES / f"metric_corpus_{name}.json"
    path.write_text(json.dumps(payload, ensure_ascii=False, indent=2) + "\n", encoding="utf-8")
    print(f"wrote {path} ({len(refs)} pairs)")


def make_metric_fixtures() -> None:
    rng = random.Random(101)
    refs = [english_sentence(rng) for _ in range(12)]
    hyps = [perturb(rng, r, noise=0.15) for r in refs]
    metric_fixture("close", refs, hyps)

    rng = random.Random(202)
    refs = [english_sentence(rng) for _ in range(40)]
    hyps = [
        perturb(rng, r, noise=0.5) if rng.random() < 0.85 else english_sentence(rng)
        for r in refs
    ]
    metric_fixture("noisy", refs, hyps)

    rng = random.Random(303)
    refs = [english_sentence(rng, lo=2, hi=28) for _ in range(100)]
    hyps = [perturb(rng, r, noise=0.3) for r in refs]
    metric_fixture("long", refs, hyps)


def make_pipeline_fixtures() -> None:
    rng = random.Random(404)
    utterances = []
    transcribe = {}
    translate_bem_eng = {}
    translate_audio = {}
    for i, (bem, eng) in enumerate(PIPELINE_PAIRS, start=1):
        uid = f"u{i}"
        audio = f"audio/{uid}.wav"
        utterances.append(
            {
                "id": uid,
                "audio": audio,
                "transcript": bem,
                "translation": eng,
                "origin": "authentic",
            }
        )
        # ASR mock: drop roughly every third transcript's last word
        hyp_transcript = bem if i % 3 else " ".join(bem.split()[:-1])
        transcribe[audio] = hyp_transcript
        # MT mock keyed by what the ASR mock will produce
        hyp_translation = eng if i % 4 else perturb(rng, eng, noise=0.35)
        translate_bem_eng[hyp_transcript] = {
            "text": hyp_translation,
            "avg_log_prob": round(-0.02 * i, 6),
        }
        # also cover the gold transcript so mt_only runs over this corpus
        if bem not in translate_bem_eng:
            translate_bem_eng[bem] = {
                "text": eng if i % 2 else perturb(rng, eng, noise=0.2),
                "avg_log_prob": round(-0.015 * i, 6),
            }
        # direct audio translation differs slightly from the cascade output
        translate_audio[audio] = eng if i % 5 else perturb(rng, eng, noise=0.35)

    corpus_path = FIXTURES / "pipeline_20.jsonl"
    corpus_path.write_text(
        "".join(json.dumps(u, ensure_ascii=False) + "\n" for u in utterances),
        encoding="utf-8",
    )
    print(f"wrote {corpus_path} ({len(utterances)} utterances)")

    # monolingual English corpus + eng-bem tables for back-translation
    rng = random.Random(505)
    mono = []
    translate_eng_bem = {}
    bem_words = [w for bem, _ in PIPELINE_PAIRS for w in bem.split()]
    for i in range(12):
        text = english_sentence(rng, lo=3, hi=10)
        mono.append({"id": f"t{i + 1}", "transcript": text, "origin": "authentic"})
        back = " ".join(rng.choice(bem_words) for _ in range(rng.randint(3, 9)))
        # scores straddle the 0.77 default threshold
        avg_log_prob = round(rng.uniform(-0.9, -0.01), 6)
        translate_eng_bem[text] = {"text": back, "avg_log_prob": avg_log_prob}
    mono_path = FIXTURES / "tatoeba_mini.jsonl"
    mono_path.write_text(
        "".join(json.dumps(u, ensure_ascii=False) + "\n" for u in mono),
        encoding="utf-8",
    )
    print(f"wrote {mono_path} ({len(mono)} utterances)")

    mock = {
        "backend": "mock",
        "language_pairs": ["bem-eng", "eng-bem"],
        "metadata": {"vad": "default", "compute_type": "float16", "deterministic": True},
        "transcribe": {
            **transcribe,
            "audio/empty.wav": "",
        },
        "translate": {
            "bem-eng": {
                **translate_bem_eng,
                "he is wearing glasses as well": {
                    "text": "He is wearing glasses.",
                    "avg_log_prob": -0.05,
                },
            },
            "eng-bem": translate_eng_bem,
        },
        "translate_audio": {"bem-eng": translate_audio},
        "failures": {
            "transcribe": {"audio/broken.wav": "audio decode failure"},
            "translate": {"eng-bem": {"This one always fails.": "backend out of memory"}},
        },
    }
    mock_path = FIXTURES / "mock_adapter.json"
    mock_path.write_text(json.dumps(mock, ensure_ascii=False, indent=2) + "\n", encoding="utf-8")
    print(f"wrote {mock_path}")


def make_replay_fixtures() -> None:
    """Canned near-reference and near-random hypothesis files."""
    rng = random.Random(606)
    refs = [eng for _, eng in PIPELINE_PAIRS]
    finetuned = [r if i % 3 else perturb(rng, r, noise=0.2) for i, r in enumerate(refs)]
    baseline = [english_sentence(rng, lo=2, hi=8) for _ in refs]
    (FIXTURES / "replay_refs.txt").write_text("\n".join(refs) + "\n", encoding="utf-8")
    (FIXTURES / "replay_hyps_finetuned.txt").write_text("\n".join(finetuned) + "\n", encoding="utf-8")
    (FIXTURES / "replay_hyps_baseline.txt").write_text("\n".join(baseline) + "\n", encoding="utf-8")
    print("wrote replay_refs.txt / replay_hyps_finetuned.txt / replay_hyps_baseline.txt")


def main() -> None:
    FIXTURES.mkdir(parents=True, exist_ok=True)
    make_metric_fixtures()
    make_pipeline_fixtures()
    make_replay_fixtures()


if __name__ == "__main__":
    main()
