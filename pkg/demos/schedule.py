#!/usr/bin/env python3
"""Print the dynamic nucleus threshold over a few sentences.

The threshold starts at p on each sentence, shrinks by lambda per token,
and never drops below omega. A generated full stop resets it.
"""

from facdec import dynamic_p

CONFIGS = [
    ("top-p 0.9 (no decay)", 0.9, 1.0, 0.0),
    ("factual 0.9|0.9|0.3", 0.9, 0.9, 0.3),
    ("factual 0.9|0.5|0.3", 0.9, 0.5, 0.3),
    ("factual 0.9|0.9|0.7", 0.9, 0.9, 0.7),
]

print(f"{'t':>3} " + "".join(f"{name:>22}" for name, *_ in CONFIGS))
for t in range(1, 13):
    row = f"{t:>3} "
    for _, p, lam, omega in CONFIGS:
        row += f"{dynamic_p(p, lam, omega, t):>22.6f}"
    print(row)

print()
print("After ~10 tokens the 0.9|0.5|0.3 schedule sits on its floor:")
print("  p_10 =", dynamic_p(0.9, 0.5, 0.3, 10))
print("A sentence end sends t back to 1, so the next sentence opens at")
print("  p_1  =", dynamic_p(0.9, 0.5, 0.3, 1))
