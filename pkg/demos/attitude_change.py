"""Tracking attitude change around a policy period, then predicting it.

Part one scores users' vaccine attitudes in windows before and after an
announcement and labels who moved. Part two trains the boosted-tree
predictor on synthetic theme-exposure features whose planted rule ties
negative-theme exposure to attitude drops, and compares it against always
guessing the majority class.

Run from the repository root:  python3 demos/attitude_change.py
"""

import numpy as np

from socialstance import gbdt
from socialstance.corpus import Corpus, Post, StanceLabel
from socialstance.hesitancy import classify_change, hesitancy_score
from socialstance.synthetic import change_benchmark

DAY = 86_400


def build_timeline():
    """Three users: one softens, one hardens, one holds steady."""
    plan = {
        "amelia": (["NG", "NG", "NG"], ["PO", "PO", "NG"]),
        "bruno": (["PO", "PO", "PD"], ["NG", "NG", "PD"]),
        "chan": (["PD", "PO", "NG"], ["PO", "PD", "NG"]),
    }
    posts = []
    for user, (before, after) in plan.items():
        for m, name in enumerate(before):
            posts.append(Post(id=f"{user}-b{m}", author_id=user,
                              timestamp=2 * DAY + m,
                              text="", label=StanceLabel[name]))
        for m, name in enumerate(after):
            posts.append(Post(id=f"{user}-a{m}", author_id=user,
                              timestamp=20 * DAY + m,
                              text="", label=StanceLabel[name]))
    return Corpus(posts)


def main():
    corpus = build_timeline()
    before_window = (0, 10 * DAY)
    after_window = (15 * DAY, 25 * DAY)
    print("attitude change around the announcement:")
    for user in ("amelia", "bruno", "chan"):
        b = hesitancy_score(corpus, user, *before_window)
        a = hesitancy_score(corpus, user, *after_window)
        change = classify_change(b.score, a.score)
        print(f"  {user:7s} {b.score:+.2f} -> {a.score:+.2f}   {change.name}")

    print("\npredicting change from theme exposure:")
    accs, baselines = [], []
    for seed in range(5):
        features, labels = change_benchmark(n_samples=200, seed=seed)
        perm = np.random.default_rng(seed).permutation(len(labels))
        cut = int(0.8 * len(labels))
        tr, te = perm[:cut], perm[cut:]
        model = gbdt.fit(features[tr], labels[tr], gbdt.GbdtConfig())
        accs.append(gbdt.evaluate(model, features[te], labels[te]).accuracy)
        baselines.append(gbdt.majority_baseline_accuracy(labels[tr], labels[te]))
    print(f"  boosted trees     {np.mean(accs):.3f} mean test accuracy (5 seeds)")
    print(f"  majority baseline {np.mean(baselines):.3f}")


if __name__ == "__main__":
    main()
