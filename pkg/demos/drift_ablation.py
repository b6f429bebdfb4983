"""Memory ablation on a drifting simulated app.

Four agents (no memory, stationary only, procedural only, both) play the
same 30 tasks across five app versions.  Each new version redesigns element
appearance by ``sigma`` and reroutes two navigation edges.

Run: python3 demos/drift_ablation.py
"""

from dualmem.driftsim import evaluate_suite
from dualmem.driftsim.scenarios import SIGMAS, ablation_scenario

AGENTS = ("none", "stationary", "procedural", "both")

print(f"{'sigma':>6}" + "".join(f"{a:>12}" for a in AGENTS))
for sigma in SIGMAS:
    result = evaluate_suite(ablation_scenario(sigma), iterations=4)
    print(f"{sigma:>6}" + "".join(f"{result.mean_success(a):>12.1f}" for a in AGENTS))
