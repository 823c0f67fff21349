"""Pure-Python automaton kernels.

These mirror ``_ckernels.pyx`` operation for operation and are used when
the compiled module is unavailable (or forced via FIBAUTO_PURE_PYTHON).
All arrays come in as numpy arrays and results go out as numpy arrays;
internally everything is converted to lists for speed.
"""
import time

import numpy as np

from .errors import StateLimitExceeded, TimeLimitExceeded

_CHECK_EVERY = 1024


def _check_deadline(deadline):
    if deadline and time.monotonic() > deadline:
        raise TimeLimitExceeded()


def product(ta, acc_a, ia, pa, dead_a, tb, acc_b, ib, pb, dead_b, ncols, op,
            ctrans, cacc, cinit, cdead, shifts, cap, deadline):
    """Reachable part of the synchronous product of two lifted DFAs.

    A product state is (state of a, state of b, universe code), where the
    code packs the single-track universe state of every tracked track.
    Transitions that leave the universe, and pairs that can never accept,
    go to one shared sink.
    """
    ta = ta.tolist()
    tb = tb.tolist()
    acc_a = acc_a.tolist()
    acc_b = acc_b.tolist()
    pa = pa.tolist()
    pb = pb.tolist()
    dead_a = dead_a.tolist()
    dead_b = dead_b.tolist()
    ctrans = ctrans.tolist()
    cacc = cacc.tolist()
    shifts = list(shifts)
    nt = len(shifts)
    nc = len(ctrans)
    # sink conditions depending only on which side is dead
    f00 = (op >> 0) & 1
    f01 = (op >> 1) & 1
    f10 = (op >> 2) & 1
    sink_both = not f00
    sink_a = not f00 and not f01
    sink_b = not f00 and not f10

    def is_sink(sa, sb):
        da = dead_a[sa]
        db = dead_b[sb]
        return (da and db and sink_both) or (da and sink_a) or (db and sink_b)

    code0 = 0
    mul = 1
    for _ in range(nt):
        code0 += cinit * mul
        mul *= nc
    ids = {}
    order = []
    out_trans = []
    out_acc = []
    sink = -1

    def new_state(key, acc):
        ids[key] = len(out_acc)
        order.append(key)
        out_acc.append(acc)
        if len(out_acc) > cap:
            raise StateLimitExceeded(cap)
        return ids[key]

    def state_acc(sa, sb, code):
        bit = (acc_a[sa] << 1) | acc_b[sb]
        if not (op >> bit) & 1:
            return 0
        c = code
        for _ in range(nt):
            if not cacc[c % nc]:
                return 0
            c //= nc
        return 1

    if is_sink(ia, ib):
        sink = new_state(None, 0)
    else:
        new_state((ia, ib, code0), state_acc(ia, ib, code0))
    i = 0
    while i < len(order):
        if i % _CHECK_EVERY == 0:
            _check_deadline(deadline)
        key = order[i]
        row = [0] * ncols
        if key is None:
            row = [i] * ncols
        else:
            sa, sb, code = key
            rowa = ta[sa]
            rowb = tb[sb]
            for c in range(ncols):
                na = rowa[pa[c]]
                nb = rowb[pb[c]]
                if is_sink(na, nb):
                    tgt = None
                else:
                    # advance the universe code
                    ncode = 0
                    mul = 1
                    rest = code
                    for j in range(nt):
                        cs = ctrans[rest % nc][(c >> shifts[j]) & 1]
                        rest //= nc
                        if cs == cdead:
                            ncode = -1
                            break
                        ncode += cs * mul
                        mul *= nc
                    tgt = None if ncode < 0 else (na, nb, ncode)
                if tgt is None:
                    if sink < 0:
                        sink = new_state(None, 0)
                    row[c] = sink
                else:
                    t = ids.get(tgt)
                    if t is None:
                        t = new_state(tgt, state_acc(na, nb, tgt[2]))
                    row[c] = t
        out_trans.append(row)
        i += 1
    return (np.array(out_trans, dtype=np.int32).reshape(len(out_acc), ncols),
            np.array(out_acc, dtype=np.uint8))


def determinize(ntrans, nacc, init, live, cap, deadline):
    """Subset construction restricted to live (co-reachable) NFA states.

    ``ntrans`` has shape (n, m, w) with -1 padding. The empty subset acts
    as the dead state.
    """
    n, m, w = ntrans.shape
    rows = ntrans.tolist()
    live = live.tolist()
    nacc = nacc.tolist()
    start = tuple(sorted({s for s in init.tolist() if live[s]}))
    ids = {start: 0}
    subsets = [start]
    out_trans = []
    out_acc = []
    i = 0
    while i < len(subsets):
        if i % _CHECK_EVERY == 0:
            _check_deadline(deadline)
        cur = subsets[i]
        out_acc.append(1 if any(nacc[s] for s in cur) else 0)
        row = []
        for c in range(m):
            tgt = set()
            for s in cur:
                for t in rows[s][c]:
                    if t >= 0 and live[t]:
                        tgt.add(t)
            key = tuple(sorted(tgt))
            j = ids.get(key)
            if j is None:
                j = len(subsets)
                ids[key] = j
                subsets.append(key)
                if j >= cap:
                    raise StateLimitExceeded(cap)
            row.append(j)
        out_trans.append(row)
        i += 1
    return (np.array(out_trans, dtype=np.int32).reshape(len(subsets), m),
            np.array(out_acc, dtype=np.uint8))


def _bfs_order(trans, initial):
    n = len(trans)
    m = len(trans[0]) if n else 0
    new_id = [-1] * n
    new_id[initial] = 0
    order = [initial]
    i = 0
    while i < len(order):
        row = trans[order[i]]
        for c in range(m):
            t = row[c]
            if new_id[t] < 0:
                new_id[t] = len(order)
                order.append(t)
        i += 1
    return order, new_id


def minimize(trans, acc, initial):
    """Hopcroft minimization followed by BFS renumbering from the initial state."""
    trans_l = trans.tolist()
    acc_l = acc.tolist()
    # restrict to reachable states first
    order, new_id = _bfs_order(trans_l, initial)
    n = len(order)
    m = trans.shape[1]
    t = [[new_id[x] for x in trans_l[s]] for s in order]
    a = [acc_l[s] for s in order]
    cls = _hopcroft(t, a, n, m)
    nb = max(cls) + 1
    q_trans = [None] * nb
    q_acc = [0] * nb
    for s in range(n):
        b = cls[s]
        if q_trans[b] is None:
            q_trans[b] = [cls[x] for x in t[s]]
            q_acc[b] = a[s]
    order, new_id = _bfs_order(q_trans, cls[0])
    out = [[new_id[x] for x in q_trans[b]] for b in order]
    out_acc = [q_acc[b] for b in order]
    return (np.array(out, dtype=np.int32).reshape(len(order), m),
            np.array(out_acc, dtype=np.uint8))


def _hopcroft(t, a, n, m):
    # predecessor lists per letter
    pred = [[[] for _ in range(n)] for _ in range(m)]
    for s in range(n):
        row = t[s]
        for c in range(m):
            pred[c][row[c]].append(s)
    elems = [s for s in range(n) if a[s]] + [s for s in range(n) if not a[s]]
    nacc = sum(1 for x in a if x)
    loc = [0] * n
    for i, s in enumerate(elems):
        loc[s] = i
    blk = [0] * n
    start = []
    end = []
    if 0 < nacc < n:
        start = [0, nacc]
        end = [nacc, n]
        for i in range(nacc, n):
            blk[elems[i]] = 1
    else:
        start = [0]
        end = [n]
    marked = [0] * len(start)
    in_w = [False] * len(start)
    work = []
    if len(start) == 2:
        w0 = 0 if nacc <= n - nacc else 1
        work.append(w0)
        in_w[w0] = True
    while work:
        b = work.pop()
        in_w[b] = False
        splitter = elems[start[b]:end[b]]
        for c in range(m):
            pc = pred[c]
            touched = []
            for s in splitter:
                for p in pc[s]:
                    bp = blk[p]
                    pos = start[bp] + marked[bp]
                    if loc[p] >= pos:
                        # swap p into the marked prefix of its block
                        q = elems[pos]
                        lp = loc[p]
                        elems[pos] = p
                        loc[p] = pos
                        elems[lp] = q
                        loc[q] = lp
                        if marked[bp] == 0:
                            touched.append(bp)
                        marked[bp] += 1
            for bp in touched:
                k = marked[bp]
                marked[bp] = 0
                size = end[bp] - start[bp]
                if k == size:
                    continue
                nbk = len(start)
                start.append(start[bp])
                end.append(start[bp] + k)
                marked.append(0)
                in_w.append(False)
                start[bp] += k
                for i in range(start[nbk], end[nbk]):
                    blk[elems[i]] = nbk
                if in_w[bp]:
                    in_w[nbk] = True
                    work.append(nbk)
                else:
                    small = nbk if k <= size - k else bp
                    in_w[small] = True
                    work.append(small)
    return blk


def coreachable(trans, acc):
    """Boolean mask of states from which an accepting state is reachable.

    ``trans`` may be (n, m) or (n, m, w) with -1 padding.
    """
    n = trans.shape[0]
    flat = trans.reshape(n, -1).tolist()
    rev = [[] for _ in range(n)]
    for s in range(n):
        for t in flat[s]:
            if t >= 0:
                rev[t].append(s)
    seen = [False] * n
    stack = [s for s in range(n) if acc[s]]
    for s in stack:
        seen[s] = True
    while stack:
        s = stack.pop()
        for p in rev[s]:
            if not seen[p]:
                seen[p] = True
                stack.append(p)
    return np.array(seen, dtype=np.uint8)
