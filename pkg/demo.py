"""
opquad demo script.

Run this directly to see the main interfaces in action:
    python demo.py
"""

import math
import sys

import opquad
from opquad import LAGUERRE
from opquad.core.timer import StageCollector
from opquad.output import formatter


# --- 1. Jacobi matrix and a non-trivial multiplication matrix -----------------

print(formatter.render_matrix(opquad.jacobi_matrix(LAGUERRE, 4)))

m2 = opquad.build_matrix(LAGUERRE, opquad.resolve("sqrt"), 2)
print(formatter.render_matrix(m2))
print(opquad.sign_report(m2))
print()


# --- 2. Gaussian quadrature as the special case g = id ------------------------

rule = opquad.rule_from_matrix(opquad.eigh(opquad.jacobi_matrix(LAGUERRE, 1)))
print(formatter.render_rule(rule))


# --- 3. Integrals through other inside functions ------------------------------

exact = math.sqrt(math.pi) / 2 * math.exp(-0.25)
for g in ("g1", "g2", "g3", "g4"):
    value = opquad.integrate_basic(LAGUERRE, opquad.resolve(g), opquad.compose("f1", g), 20)
    print(f"  {g}  {value:.12f}  error {abs(value - exact):.2e}")
print()


# --- 4. Reweighting an exponentially growing integrand ------------------------

for n in (10, 20, 30):
    value = opquad.integrate_reweighted(LAGUERRE, opquad.resolve("id"),
                                        opquad.resolve("f2"), opquad.resolve("h2"), n)
    print(f"  n={n:<3} {value:.12f}  error {abs(value - math.pi / 2):.2e}")
print()


# --- 5. Improper integral with the endpoint guard -----------------------------

value = opquad.integrate_improper(LAGUERRE, opquad.resolve("id"), opquad.parse("x^(-1/2)"),
                                  c=0.0, p=0.5, n=25)
print(f"  integral of x^(-1/2) e^(-x): {value:.6f} (sqrt(pi) = {math.sqrt(math.pi):.6f})")
print()


# --- 6. A short convergence study ---------------------------------------------

collector = StageCollector()
cfg = opquad.StudyConfig(inside=("g1", "g2"), outside="f2", weighting="h1", n_range=(2, 16, 2))
report = opquad.run_study(cfg, collector=collector, echo=formatter.print_row)
formatter.print_report(report, collector, file=sys.stdout)
