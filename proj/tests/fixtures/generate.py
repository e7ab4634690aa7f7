#!/usr/bin/env python3
# Copyright 2026 The memeanno Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Regenerates the committed test fixtures.

distribution/  manifest + coarse layer + fine layer with the reference
               per-split label counts (fine totals disagree with coarse
               totals on train and dev by design).
agreement/     synthetic rater files; expected kappas from scikit-learn
               (Cohen) and statsmodels (Fleiss).
evaluation/    gold/prediction files; expected scores from scikit-learn.

Run from this directory: python3 generate.py
"""

import json
import random
from collections import Counter
from pathlib import Path

HERE = Path(__file__).resolve().parent

HATEFUL = ["dehumanizing", "inferiority", "inciting_violence", "mocking",
           "contempt", "slurs", "exclusion", "other_hateful"]
NOT_HATEFUL = ["humor", "sarcasm", "other_not_hateful"]


def family(fine):
    return "hateful" if fine in HATEFUL else "not_hateful"


def write_jsonl(path, rows):
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as f:
        for r in rows:
            f.write(json.dumps(r, ensure_ascii=False, separators=(",", ":")) + "\n")


def label_row(meme_id, coarse, fine, source):
    row = {"id": meme_id, "coarse": coarse}
    if fine is not None:
        row["fine"] = fine
    row["source"] = source
    return row


def expand(counts):
    out = []
    for token, n in counts:
        out.extend([token] * n)
    return out


# ---------------------------------------------------------------- distribution

SPLITS = {
    # split: (hateful, not_hateful, propagandistic, propagandistic_hateful)
    "train": (212, 1931, 600, 60),
    "dev": (32, 280, 90, 10),
    "test": (154, 452, 171, 56),
}

HATEFUL_FINE = {
    "train": [("contempt", 38), ("dehumanizing", 12), ("mocking", 133), ("inferiority", 5),
              ("exclusion", 6), ("inciting_violence", 13), ("slurs", 6), ("other_hateful", 10)],
    "dev": [("contempt", 7), ("dehumanizing", 3), ("mocking", 19), ("inferiority", 1),
            ("exclusion", 7), ("inciting_violence", 2), ("slurs", 1), ("other_hateful", 1)],
    "test": [("contempt", 25), ("dehumanizing", 2), ("mocking", 49), ("inferiority", 14),
             ("exclusion", 3), ("inciting_violence", 12), ("slurs", 29), ("other_hateful", 20)],
}
NOT_HATEFUL_FINE = {
    "train": [("sarcasm", 105), ("humor", 1815)],
    "dev": [("sarcasm", 19), ("humor", 260)],
    "test": [("sarcasm", 118), ("humor", 334)],
}


def distribution():
    manifest, coarse_rows, fine_rows = [], [], []
    for split, (n_h, n_n, n_prop, n_prop_h) in SPLITS.items():
        ids_h = [f"{split}-h{i:04d}" for i in range(n_h)]
        ids_n = [f"{split}-n{i:04d}" for i in range(n_n)]
        prop = set(ids_h[:n_prop_h]) | set(ids_n[:n_prop - n_prop_h])
        for meme_id in ids_h + ids_n:
            manifest.append({"id": meme_id, "image_path": f"images/{meme_id}.jpg",
                             "text": f"caption {meme_id}",
                             "propaganda": "propagandistic" if meme_id in prop else "not_propagandistic",
                             "split": split})
        for meme_id in ids_h:
            coarse_rows.append(label_row(meme_id, "hateful", None, "consolidated"))
        for meme_id in ids_n:
            coarse_rows.append(label_row(meme_id, "not_hateful", None, "consolidated"))

        hate_fines = expand(HATEFUL_FINE[split])
        not_fines = expand(NOT_HATEFUL_FINE[split])
        # Every hateful record gets one hateful fine label; the surplus goes to
        # not-hateful records (train) or is repeated on hateful records (dev).
        targets = list(ids_h)
        surplus = len(hate_fines) - n_h
        n_short = n_n - len(not_fines)
        targets += ids_n[:n_short]
        targets += ids_h[:surplus - n_short]
        assert len(targets) == len(hate_fines), split
        for meme_id, fine in zip(targets, hate_fines):
            fine_rows.append(label_row(meme_id, "hateful", fine, "consolidated"))
        for meme_id, fine in zip(ids_n[n_short:], not_fines):
            fine_rows.append(label_row(meme_id, "not_hateful", fine, "consolidated"))

    out = HERE / "distribution"
    write_jsonl(out / "manifest.jsonl", manifest)
    write_jsonl(out / "labels.coarse.jsonl", coarse_rows)
    write_jsonl(out / "labels.fine.jsonl", fine_rows)


# ------------------------------------------------------------------- agreement

def noisy(rng, truth, rate, pool):
    return [rng.choice(pool) if rng.random() < rate else t for t in truth]


def agreement():
    from sklearn.metrics import cohen_kappa_score
    from statsmodels.stats.inter_rater import aggregate_raters, fleiss_kappa

    rng = random.Random(20240607)
    n = 400
    ids = [f"a{i:04d}" for i in range(n)]
    gold_fine = [rng.choice(HATEFUL) if rng.random() < 0.3 else rng.choice(NOT_HATEFUL)
                 for _ in ids]
    all_fine = HATEFUL + NOT_HATEFUL
    raters = {
        "gold": gold_fine,
        "sonnet": noisy(rng, gold_fine, 0.25, all_fine),
        "gpt": noisy(rng, gold_fine, 0.35, all_fine),
        "gemini": noisy(rng, gold_fine, 0.45, all_fine),
    }
    # A rater with missing items exercises the id intersection.
    partial_ids = ids[: n - 37]
    raters_partial = {"partial": noisy(rng, gold_fine[: n - 37], 0.3, all_fine)}

    out = HERE / "agreement"
    for name, fines in list(raters.items()) + list(raters_partial.items()):
        rows = [label_row(i, family(f), f, name) for i, f in zip(ids if name != "partial" else partial_ids, fines)]
        write_jsonl(out / f"{name}.jsonl", rows)

    expected = {"cohen": {}, "fleiss": {}}
    names = list(raters)
    for level in ("coarse", "fine"):
        conv = (lambda f: family(f)) if level == "coarse" else (lambda f: f)
        for i in range(len(names)):
            for j in range(i + 1, len(names)):
                a = [conv(x) for x in raters[names[i]]]
                b = [conv(x) for x in raters[names[j]]]
                expected["cohen"][f"{level}:{names[i]}:{names[j]}"] = cohen_kappa_score(a, b)
        a = [conv(x) for x in raters["gold"][: n - 37]]
        b = [conv(x) for x in raters_partial["partial"]]
        expected["cohen"][f"{level}:gold:partial"] = cohen_kappa_score(a, b)
        table = [[conv(raters[r][k]) for r in ("sonnet", "gpt", "gemini")] for k in range(n)]
        counts, _ = aggregate_raters(table)
        expected["fleiss"][f"{level}:sonnet,gpt,gemini"] = fleiss_kappa(counts, method="fleiss")
    with open(out / "expected.json", "w") as f:
        json.dump(expected, f, indent=2, sort_keys=True)
        f.write("\n")


# ------------------------------------------------------------------ evaluation

def evaluation():
    from sklearn.metrics import accuracy_score, f1_score, precision_recall_fscore_support

    rng = random.Random(77)
    ids = [f"e{i:04d}" for i in range(300)]
    gold = [rng.choice(HATEFUL) if rng.random() < 0.35 else rng.choice(NOT_HATEFUL) for _ in ids]
    # Never predict "exclusion" so one gold class has no predictions.
    pool = [f for f in HATEFUL + NOT_HATEFUL if f != "exclusion"]
    pred = [rng.choice(pool) if rng.random() < 0.3 or g == "exclusion" else g for g in gold]

    out = HERE / "evaluation"
    write_jsonl(out / "gold.jsonl", [label_row(i, family(g), g, "human") for i, g in zip(ids, gold)])
    write_jsonl(out / "pred.jsonl", [label_row(i, family(p), p, "model") for i, p in zip(ids, pred)])

    expected = {}
    for level in ("coarse", "fine", "fine-hateful"):
        if level == "coarse":
            g = [family(x) for x in gold]
            p = [family(x) for x in pred]
        elif level == "fine":
            g, p = gold, pred
        else:
            keep = [k for k, x in enumerate(gold) if family(x) == "hateful"]
            g = [gold[k] for k in keep]
            p = [pred[k] for k in keep]
        labels = sorted(set(g) | set(p))
        prec, rec, f1, support = precision_recall_fscore_support(g, p, labels=labels, zero_division=0)
        expected[level] = {
            "n": len(g),
            "accuracy": accuracy_score(g, p),
            "macro_f1": f1_score(g, p, labels=labels, average="macro", zero_division=0),
            "per_class": {lab: {"precision": float(prec[k]), "recall": float(rec[k]),
                                "f1": float(f1[k]), "support": int(support[k])}
                          for k, lab in enumerate(labels)},
        }
    with open(out / "expected.json", "w") as f:
        json.dump(expected, f, indent=2, sort_keys=True)
        f.write("\n")


if __name__ == "__main__":
    distribution()
    agreement()
    evaluation()
