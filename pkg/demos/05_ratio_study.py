"""Group disparity as the unprotected:protected ratio grows.

Five seeds take a few minutes; pass a shorter list as the first argument.
"""

import sys
from pathlib import Path

from fairad.harness import ExperimentConfig, format_table, run_ratio_study

cfg_path = Path(__file__).resolve().parents[1] / "configs" / "ratio_study.cfg"
seeds = sys.argv[1] if len(sys.argv) > 1 else "40,41,42,43,44"
ratios = ["1:1", "2:1", "4:1"]

rows = []
for variant in ("plain_ae", "fairad"):
    cfg = ExperimentConfig.from_file(cfg_path, {"variant": variant, "seeds": seeds})
    for report in run_ratio_study(cfg, ratios):
        rows.extend(report.summary_rows())
        s = report.seeds[0]
        print(f"{variant:>9} {report.label}: |U| = {s.n_unprotected}, |P| = {s.n_protected}")
print(format_table(rows))
