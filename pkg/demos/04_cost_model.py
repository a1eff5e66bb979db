"""Where the work goes: per-phase operation counts vs. the closed forms.

The three sorting phases follow n log^2 n comparator counts and the
routing phase m log m, so a size-n join's cost is predictable to within
a few percent before running it.  cost_report() runs a representative
instance, counts events per phase, and compares each network phase
against its closed-form model.
"""

from oblivjoin import cost_report

for k in (10, 12, 14):
    nt = 1 << k
    cb = cost_report(nt)  # n1 = n2 = m = 2^k
    print(f"\nn1 = n2 = m = 2^{k} = {nt}")
    for line in cb.summary_lines():
        print(" ", line)

cb = cost_report(1 << 14)
shares = cb.shares()
top = max(shares, key=shares.get)
print(f"\nlargest share at 2^14: {top} ({shares[top]:.0%}) — the two input "
      f"sorts dominate, as the model predicts")
assert top == "initial_sorts"
