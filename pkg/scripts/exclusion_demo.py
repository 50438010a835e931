"""Exclusion curves for the example experiments under all three model variants.

Writes one CSV per variant next to the given output prefix and prints the
verdicts for the canonical parameter points.
"""
import argparse
from pathlib import Path

from collapsesim import bounds

HERE = Path(__file__).resolve().parent


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--experiments", default=str(HERE / "experiments_example.json"))
    ap.add_argument("--out-prefix", default="exclusion")
    ap.add_argument("--t-csl", type=float, default=1.0)
    ap.add_argument("--omega-c", type=float, default=1e3)
    args = ap.parse_args()

    records = bounds.ingest_experiments(args.experiments)
    variants = [bounds.ModelVariant(), bounds.ModelVariant("dissipative", t_csl=args.t_csl),
                bounds.ModelVariant("colored", omega_c=args.omega_c)]
    for variant in variants:
        report = bounds.build_report(records, variant=variant)
        out = Path(f"{args.out_prefix}_{variant.kind}.csv")
        out.write_text(report.to_csv())
        print(f"== {variant.label()} -> {out}")
        for source, verdicts in report.verdicts.items():
            print(f"  {source:<28} " + "  ".join(f"{k}={v}" for k, v in verdicts.items()))


if __name__ == "__main__":
    main()
