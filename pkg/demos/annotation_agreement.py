"""Measuring annotator reliability on a simulated labelling round.

Three annotators label 40 posts. Two are careful, one drifts toward the
neutral label on a fraction of items. The report shows overall and per-label
agreement; the drifting label's statistics drop visibly below the rest.

Run from the repository root:  python3 demos/annotation_agreement.py
"""

import json

import numpy as np

from socialstance.metrics import agreement_report

LABELS = ("PO", "NG", "NE", "PD")


def simulate_round(n_items=40, drift=0.3, seed=1):
    rng = np.random.default_rng(seed)
    rows = []
    for item in range(n_items):
        truth = LABELS[int(rng.integers(len(LABELS)))]
        rows.append((f"post{item:03d}", "annotator_a", truth))
        rows.append((f"post{item:03d}", "annotator_b", truth))
        sloppy = "NE" if truth != "NE" and rng.random() < drift else truth
        rows.append((f"post{item:03d}", "annotator_c", sloppy))
    return rows


def main():
    rows = simulate_round()
    report = agreement_report(rows)
    overall = report["overall"]
    print("overall agreement:")
    print(f"  observed pairwise  {overall['average_observed_agreement']:.3f}")
    print(f"  fleiss kappa       {overall['fleiss_kappa']:.3f}")
    print(f"  krippendorff alpha {overall['krippendorff_alpha']:.3f}")
    print("\nper label (one-vs-rest):")
    for label, entry in report["per_label"].items():
        kappa = entry["fleiss_kappa"]
        shown = f"{kappa:.3f}" if kappa is not None else "n/a"
        print(f"  {label}: kappa {shown}")
    print("\nfull report:")
    print(json.dumps(report, indent=2, sort_keys=True))


if __name__ == "__main__":
    main()
