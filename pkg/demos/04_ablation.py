"""Variant comparison on 4:1 synthetic data (the shipped ablation config).

Five seeds of every variant take several minutes on one core; pass a
smaller seed list as the first argument, e.g. ``python 04_ablation.py 40,41``.
"""

import sys
from pathlib import Path

from fairad.harness import ExperimentConfig, format_table, run_ablation

cfg_path = Path(__file__).resolve().parents[1] / "configs" / "ablation_synthetic.cfg"
seeds = sys.argv[1] if len(sys.argv) > 1 else "40,41"
cfg = ExperimentConfig.from_file(cfg_path, {"seeds": seeds})

reports = run_ablation(cfg, ["fairad", "fairad_r", "fairad_n", "fairad_d", "fairad_c", "plain_ae"])
rows = [row for r in reports for row in r.summary_rows()]
print(format_table(rows))

# the per-group recalls behind rec_diff
for r in reports:
    m = r.aggregates[0]
    print(f"{r.label:>9}: recall P {m['recall_p']['mean']:.3f}  recall U {m['recall_u']['mean']:.3f}  "
          f"final eps {r.seeds[0].history[-1]['epsilon']:.3f}")
