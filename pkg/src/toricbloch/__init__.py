"""
Exact entanglement and topological-order diagnostics for pure states on the
Bloch sphere spanned by a toric-code ground state and |0...0>.

Closed-form purities (``purity_block``, ``purity_general``) are cross-checked
against an explicit state-vector oracle (``toricbloch.oracle``) on small tori.
"""
from .bloch import BlochAngles, coefficients, named_state, toric_angles, two_level_amplitudes
from .errors import (BlockTooLarge, ConditionViolated, InsufficientPoints, NonRealResidue,
                     NotInPlane, PrecisionTooLow, ScaleTooLarge, SubsetTooLarge)
from .lattice import (BlockRegion, Link, RegionCombinatorics, SigmaCounts, TorusLattice,
                      block_combinatorics, block_sigma, enumerate_block_links,
                      subset_combinatorics)
from .purity import PrecisionPolicy, PurityValue, purity_block, purity_general, sweep

__version__ = "0.1.0"
