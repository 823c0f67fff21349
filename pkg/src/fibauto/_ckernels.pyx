# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled automaton kernels (product, subset construction, Hopcroft).

Same contracts as ``_pykernels``; results are bit-identical.
"""
import time

import numpy as np
cimport numpy as cnp
from libc.string cimport memcpy
from libcpp.vector cimport vector
from libcpp.unordered_map cimport unordered_map
from libcpp.algorithm cimport sort as cpp_sort

from .errors import StateLimitExceeded, TimeLimitExceeded

cnp.import_array()

ctypedef cnp.int32_t i32
ctypedef cnp.uint8_t u8

cdef int CHECK_EVERY = 1024


cdef inline void _check_deadline(double deadline) except *:
    if deadline > 0 and time.monotonic() > deadline:
        raise TimeLimitExceeded()


def product(i32[:, ::1] ta, u8[::1] acc_a, int ia, i32[::1] pa, u8[::1] dead_a,
            i32[:, ::1] tb, u8[::1] acc_b, int ib, i32[::1] pb, u8[::1] dead_b,
            int ncols, int op, i32[:, ::1] ctrans, u8[::1] cacc, int cinit, int cdead,
            i32[::1] shifts, long long cap, double deadline):
    cdef int nt = shifts.shape[0]
    cdef long long nc = ctrans.shape[0]
    cdef long long nb = tb.shape[0]
    cdef long long ncodes = 1
    cdef int j
    for j in range(nt):
        ncodes *= nc
    cdef bint f00 = (op >> 0) & 1
    cdef bint f01 = (op >> 1) & 1
    cdef bint f10 = (op >> 2) & 1
    cdef bint sink_both = not f00
    cdef bint sink_a = (not f00) and (not f01)
    cdef bint sink_b = (not f00) and (not f10)

    cdef unordered_map[long long, int] ids
    cdef vector[long long] keys      # -1 marks the sink
    cdef vector[i32] out_trans
    cdef vector[u8] out_acc
    cdef int sink = -1
    cdef long long code0 = 0, mul = 1
    for j in range(nt):
        code0 += cinit * mul
        mul *= nc

    cdef long long key, code, rest, ncode, tkey
    cdef int sa, sb, na, nbs, c, cs, t, bit
    cdef bint da, db, ok
    cdef size_t i = 0

    da = dead_a[ia]
    db = dead_b[ib]
    if (da and db and sink_both) or (da and sink_a) or (db and sink_b):
        sink = 0
        keys.push_back(-1)
        out_acc.push_back(0)
    else:
        key = (ia * nb + ib) * ncodes + code0
        ids[key] = 0
        keys.push_back(key)
        out_acc.push_back(_state_acc(acc_a[ia], acc_b[ib], code0, op, nt, nc, cacc))

    while i < keys.size():
        if i % CHECK_EVERY == 0:
            _check_deadline(deadline)
        key = keys[i]
        if key < 0:
            for c in range(ncols):
                out_trans.push_back(<i32>i)
            i += 1
            continue
        code = key % ncodes
        sb = <int>((key // ncodes) % nb)
        sa = <int>((key // ncodes) // nb)
        for c in range(ncols):
            na = ta[sa, pa[c]]
            nbs = tb[sb, pb[c]]
            da = dead_a[na]
            db = dead_b[nbs]
            ok = not ((da and db and sink_both) or (da and sink_a) or (db and sink_b))
            ncode = 0
            if ok:
                mul = 1
                rest = code
                for j in range(nt):
                    cs = ctrans[rest % nc, (c >> shifts[j]) & 1]
                    rest //= nc
                    if cs == cdead:
                        ok = False
                        break
                    ncode += cs * mul
                    mul *= nc
            if not ok:
                if sink < 0:
                    sink = <int>keys.size()
                    keys.push_back(-1)
                    out_acc.push_back(0)
                    if <long long>keys.size() > cap:
                        raise StateLimitExceeded(cap)
                out_trans.push_back(sink)
                continue
            tkey = (na * nb + nbs) * ncodes + ncode
            if ids.count(tkey) == 0:
                t = <int>keys.size()
                ids[tkey] = t
                keys.push_back(tkey)
                out_acc.push_back(_state_acc(acc_a[na], acc_b[nbs], ncode, op, nt, nc, cacc))
                if <long long>keys.size() > cap:
                    raise StateLimitExceeded(cap)
            else:
                t = ids[tkey]
            out_trans.push_back(t)
        i += 1

    cdef Py_ssize_t n = keys.size()
    res = np.empty((n, ncols), dtype=np.int32)
    cdef i32[:, ::1] rv = res
    if n * ncols:
        memcpy(&rv[0, 0], out_trans.data(), n * ncols * sizeof(i32))
    acc = np.empty(n, dtype=np.uint8)
    cdef u8[::1] av = acc
    if n:
        memcpy(&av[0], out_acc.data(), n * sizeof(u8))
    return res, acc


cdef inline u8 _state_acc(u8 xa, u8 xb, long long code, int op, int nt, long long nc, u8[::1] cacc):
    cdef int bit = (xa << 1) | xb
    cdef int j
    if not ((op >> bit) & 1):
        return 0
    for j in range(nt):
        if not cacc[code % nc]:
            return 0
        code //= nc
    return 1


def determinize(i32[:, :, ::1] ntrans, u8[::1] nacc, i32[::1] init, u8[::1] live,
                long long cap, double deadline):
    cdef Py_ssize_t n = ntrans.shape[0]
    cdef Py_ssize_t m = ntrans.shape[1]
    cdef Py_ssize_t w = ntrans.shape[2]
    cdef vector[i32] members      # concatenated subsets
    cdef vector[Py_ssize_t] offsets
    cdef vector[i32] buf
    cdef vector[i32] stamp
    cdef vector[i32] out_trans
    cdef vector[u8] out_acc
    stamp.resize(n, -1)
    ids = {}
    cdef Py_ssize_t i, k, c, x, y
    cdef int s, t, j, stamp_id = 0
    cdef u8 a

    # initial subset
    buf.clear()
    for k in range(init.shape[0]):
        s = init[k]
        if live[s] and stamp[s] != stamp_id:
            stamp[s] = stamp_id
            buf.push_back(s)
    stamp_id += 1
    cpp_sort(buf.begin(), buf.end())
    offsets.push_back(0)
    for k in range(<Py_ssize_t>buf.size()):
        members.push_back(buf[k])
    offsets.push_back(members.size())
    ids[_key(buf)] = 0

    i = 0
    while i < <Py_ssize_t>offsets.size() - 1:
        if i % CHECK_EVERY == 0:
            _check_deadline(deadline)
        a = 0
        for x in range(offsets[i], offsets[i + 1]):
            if nacc[members[x]]:
                a = 1
                break
        out_acc.push_back(a)
        for c in range(m):
            buf.clear()
            for x in range(offsets[i], offsets[i + 1]):
                s = members[x]
                for y in range(w):
                    t = ntrans[s, c, y]
                    if t >= 0 and live[t] and stamp[t] != stamp_id:
                        stamp[t] = stamp_id
                        buf.push_back(t)
            stamp_id += 1
            cpp_sort(buf.begin(), buf.end())
            kb = _key(buf)
            found = ids.get(kb)
            if found is None:
                j = <int>(offsets.size() - 1)
                ids[kb] = j
                for k in range(<Py_ssize_t>buf.size()):
                    members.push_back(buf[k])
                offsets.push_back(members.size())
                if j >= cap:
                    raise StateLimitExceeded(cap)
            else:
                j = found
            out_trans.push_back(j)
        i += 1

    cdef Py_ssize_t nn = offsets.size() - 1
    res = np.empty((nn, m), dtype=np.int32)
    cdef i32[:, ::1] rv = res
    if nn * m:
        memcpy(&rv[0, 0], out_trans.data(), nn * m * sizeof(i32))
    acc = np.empty(nn, dtype=np.uint8)
    cdef u8[::1] av = acc
    if nn:
        memcpy(&av[0], out_acc.data(), nn * sizeof(u8))
    return res, acc


cdef bytes _key(vector[i32]& buf):
    if buf.size() == 0:
        return b""
    return (<char*>buf.data())[:buf.size() * sizeof(i32)]


cdef void _bfs_order(i32[:, ::1] trans, int initial, vector[int]& order, vector[int]& new_id):
    cdef Py_ssize_t n = trans.shape[0]
    cdef Py_ssize_t m = trans.shape[1]
    cdef Py_ssize_t i = 0, c
    cdef int t
    new_id.assign(n, -1)
    order.clear()
    new_id[initial] = 0
    order.push_back(initial)
    while i < <Py_ssize_t>order.size():
        for c in range(m):
            t = trans[order[i], c]
            if new_id[t] < 0:
                new_id[t] = <int>order.size()
                order.push_back(t)
        i += 1


def minimize(i32[:, ::1] trans, u8[::1] acc, int initial):
    cdef Py_ssize_t m = trans.shape[1]
    cdef vector[int] order, new_id
    _bfs_order(trans, initial, order, new_id)
    cdef Py_ssize_t n = order.size()
    cdef Py_ssize_t s, c, i
    t_arr = np.empty((n, m), dtype=np.int32)
    cdef i32[:, ::1] t = t_arr
    a_arr = np.empty(n, dtype=np.uint8)
    cdef u8[::1] a = a_arr
    for s in range(n):
        a[s] = acc[order[s]]
        for c in range(m):
            t[s, c] = new_id[trans[order[s], c]]
    cdef vector[int] cls
    _hopcroft(t, a, cls)
    cdef int nb = 0
    for s in range(n):
        if cls[s] + 1 > nb:
            nb = cls[s] + 1
    q_arr = np.empty((nb, m), dtype=np.int32)
    cdef i32[:, ::1] q = q_arr
    qa_arr = np.zeros(nb, dtype=np.uint8)
    cdef u8[::1] qa = qa_arr
    cdef vector[char] filled
    filled.assign(nb, 0)
    for s in range(n):
        if not filled[cls[s]]:
            filled[cls[s]] = 1
            qa[cls[s]] = a[s]
            for c in range(m):
                q[cls[s], c] = cls[t[s, c]]
    _bfs_order(q, cls[0], order, new_id)
    cdef Py_ssize_t nn = order.size()
    out = np.empty((nn, m), dtype=np.int32)
    cdef i32[:, ::1] o = out
    out_acc = np.empty(nn, dtype=np.uint8)
    cdef u8[::1] oa = out_acc
    for i in range(nn):
        oa[i] = qa[order[i]]
        for c in range(m):
            o[i, c] = new_id[q[order[i], c]]
    return out, out_acc


cdef void _hopcroft(i32[:, ::1] t, u8[::1] a, vector[int]& blk):
    cdef Py_ssize_t n = t.shape[0]
    cdef Py_ssize_t m = t.shape[1]
    cdef Py_ssize_t s, c, i, k, size, x
    # predecessor lists in CSR form, indexed by (letter, target)
    cdef vector[int] cnt
    cnt.assign(m * n + 1, 0)
    for s in range(n):
        for c in range(m):
            cnt[c * n + t[s, c] + 1] += 1
    for i in range(m * n):
        cnt[i + 1] += cnt[i]
    cdef vector[int] pred
    pred.resize(m * n)
    cdef vector[int] fill
    fill.assign(cnt.begin(), cnt.end() - 1)
    for s in range(n):
        for c in range(m):
            k = c * n + t[s, c]
            pred[fill[k]] = <int>s
            fill[k] += 1

    cdef vector[int] elems, loc, start, end, marked, work, touched, splitter
    cdef vector[char] in_w
    elems.reserve(n)
    cdef Py_ssize_t nacc = 0
    for s in range(n):
        if a[s]:
            elems.push_back(<int>s)
            nacc += 1
    for s in range(n):
        if not a[s]:
            elems.push_back(<int>s)
    loc.resize(n)
    for i in range(n):
        loc[elems[i]] = <int>i
    blk.assign(n, 0)
    if 0 < nacc < n:
        start.push_back(0); start.push_back(<int>nacc)
        end.push_back(<int>nacc); end.push_back(<int>n)
        for i in range(nacc, n):
            blk[elems[i]] = 1
    else:
        start.push_back(0)
        end.push_back(<int>n)
    marked.assign(start.size(), 0)
    in_w.assign(start.size(), 0)
    cdef int b, bp, p, q, lp, pos, nbk, small, w0
    if start.size() == 2:
        w0 = 0 if nacc <= n - nacc else 1
        work.push_back(w0)
        in_w[w0] = 1
    while work.size():
        b = work.back()
        work.pop_back()
        in_w[b] = 0
        splitter.assign(elems.begin() + start[b], elems.begin() + end[b])
        for c in range(m):
            touched.clear()
            for x in range(<Py_ssize_t>splitter.size()):
                s = splitter[x]
                for k in range(cnt[c * n + s], cnt[c * n + s + 1]):
                    p = pred[k]
                    bp = blk[p]
                    pos = start[bp] + marked[bp]
                    if loc[p] >= pos:
                        q = elems[pos]
                        lp = loc[p]
                        elems[pos] = p
                        loc[p] = pos
                        elems[lp] = q
                        loc[q] = lp
                        if marked[bp] == 0:
                            touched.push_back(bp)
                        marked[bp] += 1
            for x in range(<Py_ssize_t>touched.size()):
                bp = touched[x]
                k = marked[bp]
                marked[bp] = 0
                size = end[bp] - start[bp]
                if k == size:
                    continue
                nbk = <int>start.size()
                start.push_back(start[bp])
                end.push_back(<int>(start[bp] + k))
                marked.push_back(0)
                in_w.push_back(0)
                start[bp] += <int>k
                for i in range(start[nbk], end[nbk]):
                    blk[elems[i]] = nbk
                if in_w[bp]:
                    in_w[nbk] = 1
                    work.push_back(nbk)
                else:
                    small = nbk if k <= size - k else bp
                    in_w[small] = 1
                    work.push_back(small)


def coreachable(trans, acc):
    cdef Py_ssize_t n = trans.shape[0]
    cdef i32[:, ::1] flat = np.ascontiguousarray(trans.reshape(n, -1), dtype=np.int32)
    cdef u8[::1] av = np.ascontiguousarray(acc, dtype=np.uint8)
    cdef Py_ssize_t w = flat.shape[1]
    cdef vector[int] cnt
    cnt.assign(n + 1, 0)
    cdef Py_ssize_t s, k
    cdef int t, p
    for s in range(n):
        for k in range(w):
            t = flat[s, k]
            if t >= 0:
                cnt[t + 1] += 1
    for s in range(n):
        cnt[s + 1] += cnt[s]
    cdef vector[int] rev
    rev.resize(cnt[n])
    cdef vector[int] fill
    fill.assign(cnt.begin(), cnt.end() - 1)
    for s in range(n):
        for k in range(w):
            t = flat[s, k]
            if t >= 0:
                rev[fill[t]] = <int>s
                fill[t] += 1
    seen_arr = np.zeros(n, dtype=np.uint8)
    cdef u8[::1] seen = seen_arr
    cdef vector[int] stack
    for s in range(n):
        if av[s]:
            seen[s] = 1
            stack.push_back(<int>s)
    while stack.size():
        t = stack.back()
        stack.pop_back()
        for k in range(cnt[t], cnt[t + 1]):
            p = rev[k]
            if not seen[p]:
                seen[p] = 1
                stack.push_back(p)
    return seen_arr
