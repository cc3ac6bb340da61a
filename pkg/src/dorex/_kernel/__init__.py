"""Kernel backend selection: compiled extension when available, else fallback.

Both backends export the same names with bit-identical outputs; ``BACKEND``
reports which one loaded.
"""

try:
    from . import speedups as _impl

    BACKEND = "compiled"
except ImportError:
    from . import pyfallback as _impl

    BACKEND = "fallback"

Q_ZERO = _impl.Q_ZERO
Q_ONE = _impl.Q_ONE
Q_I = _impl.Q_I
qnorm = _impl.qnorm
qis0 = _impl.qis0
qneg = _impl.qneg
qadd = _impl.qadd
qsub = _impl.qsub
qmul = _impl.qmul
qinv = _impl.qinv
qdiv = _impl.qdiv
row_addmul = _impl.row_addmul
row_scale = _impl.row_scale
reduce_row = _impl.reduce_row
rref_rows = _impl.rref_rows
rank_rows = _impl.rank_rows
solve_in_span = _impl.solve_in_span
