"""Write the bundled demo dataset to a directory.

The dataset is what `tabledcs serve --data DIR` expects: a tables/ folder
of TSV files plus manifest.json with questions and candidate formulas.
"""
import argparse
from pathlib import Path

from tabledcs.demo import write_demo_dataset


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument(
        "out",
        nargs="?",
        default=Path("data"),
        type=Path,
        help="target directory (default: ./data)",
    )
    args = ap.parse_args()
    path = write_demo_dataset(args.out)
    n_tables = len(list((path / "tables").iterdir()))
    print(f"wrote {n_tables} tables and manifest.json under {path}")


if __name__ == "__main__":
    main()
