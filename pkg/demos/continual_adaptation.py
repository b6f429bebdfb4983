"""An agent adapting to a redesigned app with a bank built on the old one.

Proc% and Stat% are the shares of retrieved memories that still come from
the original bank; they fall as the agent learns the new version online.

Run: python3 demos/continual_adaptation.py
"""

from dualmem.driftsim import evaluate_suite
from dualmem.driftsim.scenarios import adaptation_scenario

result = evaluate_suite(adaptation_scenario(), iterations=3)
print(f"{'pass':>4}{'SR':>8}{'Proc%':>8}{'Stat%':>8}")
for row in result.rows:
    print(f"{row['iteration']:>4}{row['success_rate']:>8.1f}{row['proc_pct']:>8.1f}{row['stat_pct']:>8.1f}")
