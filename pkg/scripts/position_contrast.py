"""Report which pairs certify the position multiplier under two families:
the integer-index chain alone, and the chain with super-polynomial surrogate
rungs added. The extra certified pairs are reported, not asserted as theory.
"""

import pathlib
import sys

sys.path.insert(0, str(pathlib.Path(__file__).resolve().parents[1] / "src"))

from interspec.gallery import position_family_contrast


def main() -> None:
    rows = position_family_contrast()
    for label, pairs in rows.items():
        print(f"{label}: {len(pairs)} certified pairs")
        for pair in pairs:
            print(f"  {pair}")


if __name__ == "__main__":
    main()
