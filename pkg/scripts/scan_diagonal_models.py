"""Scan the two diagonal gallery models and write spectrum maps under out/.

The decaying symbol shows a point spectrum accumulating at the origin; the
scale generator shows resolvent cells living only on adjacent-rung pairs.
"""

import pathlib
import sys

sys.path.insert(0, str(pathlib.Path(__file__).resolve().parents[1] / "src"))

from interspec.config import GridSpec, RunConfig
from interspec.gallery import registry
from interspec.resolvent import union_spectrum_scan


def main() -> None:
    out_root = pathlib.Path(__file__).resolve().parents[1] / "out"
    cfg = RunConfig()
    jobs = {
        "diagonal[1/(n+1)]": GridSpec(-0.5, 1.5, 41, -0.5, 0.5, 21),
        "scale-generator": GridSpec(0.0, 7.0, 36, -1.0, 1.0, 9),
    }
    entries = registry()
    for name, grid in jobs.items():
        entry = entries[name]
        smap = union_spectrum_scan(entry.operator, entry.family, grid, cfg)
        covered = sum(smap.union_resolvent)
        target = out_root / name.replace("/", "_")
        target.mkdir(parents=True, exist_ok=True)
        smap.write_csv(str(target / "spectrum.csv"))
        smap.write_json(str(target / "spectrum.json"), config=cfg)
        print(f"{name}: {covered}/{grid.size} grid points covered; "
              f"maps in {target}")


if __name__ == "__main__":
    main()
