"""Audit the transcribed closed-form polynomials against the Newton oracle.

Every transcribed cubic or quartic is evaluated at the certified estimate.
A display that does not vanish there produces a JSON discrepancy report
next to the re-derived eliminant, which always vanishes.

Run with ``python demos/closed_form_audit.py [MODEL] [SEED]``.
"""
import json
import sys

import numpy as np

from toricmle.birch import solve_birch
from toricmle.closedform import SUPPORTED_MODELS, audit_paper_polynomials
from toricmle.lattice import lookup

labels = [sys.argv[1]] if len(sys.argv) > 1 else list(SUPPORTED_MODELS)
rng = np.random.default_rng(int(sys.argv[2]) if len(sys.argv) > 2 else 0)

for label in labels:
    model = lookup(label).model()
    u = [int(x) for x in rng.integers(1, 1001, size=model.m)]
    p_hat = solve_birch(model, u).p_hat
    print(f"== {label}  counts {u}")
    for entry in audit_paper_polynomials(model, u, p_hat):
        verdict = "holds" if entry["holds"] else "FAILS"
        print(f"   {entry['display']:<40} {verdict:5}  transcribed {entry['residual_at_label']:.1e}"
              f"  derived {entry['derived_residual']:.1e}")
        if entry["discrepancy"] and label == labels[0]:
            print("   " + json.dumps(entry["discrepancy"], sort_keys=True)[:300] + " ...")
