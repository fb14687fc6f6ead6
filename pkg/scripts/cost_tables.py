#!/usr/bin/env python3
"""Print the cost table rows for all standard targets.

Usage: python3 scripts/cost_tables.py
"""

import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from offline_simon import attacks


def main() -> int:
    for preset in attacks.ESTIMATE_PRESETS:
        record = attacks.estimate_costs(preset=preset)
        parts = []
        for setting in ("q2", "q1"):
            if setting not in record:
                continue
            row = record[setting]
            data = row.get("data_log2", row.get("online_queries"))
            parts.append(f"{setting.upper()}: data={data} time=2^{row['time_log2']:g}")
        print(f"{preset:14s} " + "  ".join(parts))
    return 0


if __name__ == "__main__":
    sys.exit(main())
