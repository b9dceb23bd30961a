"""Trellis construction for convolutional codes, per-node minimum path
weights, and the code-tree view of block codes used by the tree decoder.
"""

from dataclasses import dataclass, field

import numpy as np

from seqdec.codes import BlockCode, ConvCode

ABSENT = -1


@dataclass
class Trellis:
    """Unrolled (L+m)-section state graph of a ConvCode.

    Level 0 holds only state 0; inputs are forced to 0 from level L on,
    so level L+m again holds only state 0 (the goal node).  next_state
    and outputs are indexed [state][input bit]; outputs are n_out-bit
    patterns (bit i = output line i, matching codeword order).
    """

    code: ConvCode
    L: int
    next_state: tuple
    outputs: tuple
    output_weight: tuple
    reachable: tuple  # per level, sorted tuple of present states
    _dstar: np.ndarray = field(default=None, repr=False)

    @property
    def levels(self) -> int:
        return self.L + self.code.m

    @property
    def num_states(self) -> int:
        return 1 << self.code.m

    def branch_inputs(self, level: int) -> tuple:
        return (0, 1) if level < self.L else (0,)


def build_trellis(code: ConvCode, L: int) -> Trellis:
    """Forward reachability from state 0 with terminated tail levels."""
    if L < 1:
        raise ValueError("L must be >= 1")
    nst = 1 << code.m
    nxt = []
    outs = []
    w = []
    for s in range(nst):
        row_n, row_o, row_w = [], [], []
        for b in (0, 1):
            pattern, ns = code.step(s, b)
            row_n.append(ns)
            row_o.append(pattern)
            row_w.append(bin(pattern).count("1"))
        nxt.append(tuple(row_n))
        outs.append(tuple(row_o))
        w.append(tuple(row_w))

    reachable = [(0,)]
    current = {0}
    for level in range(L + code.m):
        inputs = (0, 1) if level < L else (0,)
        current = {nxt[s][b] for s in current for b in inputs}
        reachable.append(tuple(sorted(current)))
    assert reachable[-1] == (0,)

    return Trellis(code=code, L=L, next_state=tuple(nxt), outputs=tuple(outs),
                   output_weight=tuple(w), reachable=tuple(reachable))


def compute_dstar(trellis: Trellis) -> np.ndarray:
    """Minimum Hamming weight over all paths into each (level, state).

    Dynamic program over the trellis; entry [level, state] is ABSENT for
    unreachable nodes.  The table is cached on the trellis.
    """
    if trellis._dstar is not None:
        return trellis._dstar
    nst = trellis.num_states
    big = np.iinfo(np.int64).max // 2
    table = np.full((trellis.levels + 1, nst), big, dtype=np.int64)
    table[0, 0] = 0
    for level in range(trellis.levels):
        for s in trellis.reachable[level]:
            base = table[level, s]
            for b in trellis.branch_inputs(level):
                ns = trellis.next_state[s][b]
                cand = base + trellis.output_weight[s][b]
                if cand < table[level + 1, ns]:
                    table[level + 1, ns] = cand
    table[table >= big] = ABSENT
    trellis._dstar = table
    return table


def code_tree_successors(code: BlockCode, path):
    """Successors of a code-tree path (a bit prefix of length < n).

    Below level k both labels branch; from level k on the single
    successor bit is fixed by re-encoding the first k bits.
    """
    path = list(path)
    level = len(path)
    if level >= code.n:
        raise ValueError("path already ends at a leaf")
    if level < code.k:
        return [(path + [0], 0), (path + [1], 1)]
    info = 0
    for i in range(code.k):
        info |= int(path[i]) << i
    mask = code.parity_column_masks()[level - code.k]
    bit = bin(info & mask).count("1") & 1
    return [(path + [bit], bit)]
