"""Search for regime-condition violations on both built-in channels."""
from cifc.channel import builtin
from cifc.regime import classify_regime

for name in ("asymmetric_clipper", "symmetric_clipper"):
    rep = classify_regime(builtin(name), budget=1000, seed=0)
    print(name)
    for cond, res in rep.conditions.items():
        print(f"  {cond:17s} {res.status.value:16s} violation {res.violation:+.6f}")
