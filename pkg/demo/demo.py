"""
Demo of the term-structure consistency toolkit.

Run from the repository root:

    python demo/demo.py

It prices bonds in the Vasicek preset, checks that the Riccati-solved affine
family is consistent with the model, shows that a mis-specified drift is not,
and scans the Nelson-Siegel family for a model with a small diffusion.
"""
import logging
import sys

sys.path.insert(0, ".")

# pylint: disable=wrong-import-position
from factory import ModelFactory
from consistency.report import residual_report
from nelson_siegel.scan import ns_impossibility_scan
from riccati.closed_form import vasicek_bond_price
from riccati.path import bond_price

logging.basicConfig(level=logging.WARNING)

# Instantiate a model factory
factory = ModelFactory()

# Build the Vasicek model and the affine family solving its Riccati equations
model = factory.construct_model({"preset": "vasicek"})
family = factory.construct_family({"type": "affine"}, model)

# Bond prices from the Riccati solution agree with the closed form
for tau in (1.0, 5.0, 10.0):
    print(
        f"P(tau={tau:4}) Riccati {bond_price(family.maturity, [0.03], tau):.10f}"
        f"  closed form {vasicek_bond_price(0.5, 0.04, 0.02, 0.03, tau):.10f}"
    )

# The family is consistent with the model that generated it ...
report = residual_report(model, family)
print("generating model:", report.summary()["verdict"], f"max |residual| {report.max_abs:.2e}")

# ... and inconsistent with a model whose drift is shifted by 0.01
shifted = factory.construct_model(
    {"preset": "vasicek", "parameters": {"mu": 0.06}}
)
report = residual_report(shifted, family)
print("shifted drift:   ", report.summary()["verdict"], f"max |residual| {report.max_abs:.2e}")

# No non-deterministic model is consistent with the Nelson-Siegel family
for a11 in (0.0, 0.01):
    ns_model = factory.construct_model({"preset": "ns-trivial", "parameters": {"a11": a11}})
    scan = ns_impossibility_scan(ns_model, discrepancy_probes=0)
    print(f"Nelson-Siegel with a11={a11}: {scan.verdict} (max residual {scan.max_residual:.2e})")
