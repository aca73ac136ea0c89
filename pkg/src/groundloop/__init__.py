"""GroundLoop: execution-grounded simulation workbench.

A self-contained two-phase immiscible porous-media simulator acts as the
arbiter of physical validity. Around it: a model-specification engine with
an assumption ledger, an interpret-act-validate orchestration loop, a
reconstruction/divergence auditing toolkit, and a CLI + HTTP service.
"""

__version__ = "0.1.0"
