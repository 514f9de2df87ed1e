"""Hot loops behind metric scoring and evaluation.

Every kernel has a numba implementation (``_nb_*``) and a vectorised numpy
implementation (``_np_*``). The public wrappers dispatch on
:func:`streampredict._accel.use_numba`.

Neighbour-based kinds are numbered as in ``NEIGHBOR_KINDS``.
"""
import numpy as np

from ._accel import njit, use_numba

NEIGHBOR_KINDS = ("CN", "JI", "SI", "AA", "RA", "WCN", "WSI", "WAA", "WRA")
CN, JI, SI, AA, RA, WCN, WSI, WAA, WRA = range(9)

TEMPORAL_KINDS = ("PAE", "PAE_DELTA_S", "PAE_K_L")
PAE, PAE_DELTA_S, PAE_K_L = range(3)

# rows of dense neighbourhood blocks built at once by the numpy path
_BLOCK_CELLS = 1 << 22


# -- neighbourhood metrics ---------------------------------------------------

@njit
def _nb_neighbor_scores(kind, indptr, indices, weights, degree, strength, log_strength, us, vs):
    out = np.zeros(len(us), dtype=np.float64)
    for p in range(len(us)):
        u = us[p]
        v = vs[p]
        i = indptr[u]
        i_end = indptr[u + 1]
        j = indptr[v]
        j_end = indptr[v + 1]
        acc = 0.0
        cn = 0
        while i < i_end and j < j_end:
            a = indices[i]
            b = indices[j]
            if a < b:
                i += 1
            elif b < a:
                j += 1
            else:
                w = a
                cn += 1
                if kind == AA:
                    if degree[w] > 1:
                        acc += 1.0 / np.log(degree[w])
                elif kind == RA:
                    acc += 1.0 / degree[w]
                elif kind == WCN:
                    acc += weights[i] * weights[j]
                elif kind == WSI:
                    acc += weights[i] + weights[j]
                elif kind == WAA:
                    if log_strength[w] > 0.0:
                        acc += 1.0 / log_strength[w]
                elif kind == WRA:
                    if strength[w] > 0.0:
                        acc += 1.0 / strength[w]
                i += 1
                j += 1
        du = degree[u]
        dv = degree[v]
        if kind == CN:
            out[p] = cn
        elif kind == JI:
            union = du + dv - cn
            out[p] = cn / union if union > 0 else 0.0
        elif kind == SI:
            out[p] = 2.0 * cn / (du + dv) if du + dv > 0 else 0.0
        elif kind == WSI:
            den = strength[u] + strength[v]
            out[p] = acc / den if den > 0.0 else 0.0
        else:
            out[p] = acc
    return out


def _dense_rows(rows, indptr, indices, weights, n):
    """Dense (len(rows), n) activity rows of the given nodes."""
    starts = indptr[rows]
    lengths = indptr[rows + 1] - starts
    total = int(lengths.sum())
    block = np.zeros((len(rows), n), dtype=np.float64)
    if total:
        row_ids = np.repeat(np.arange(len(rows)), lengths)
        offsets = np.arange(total) - np.repeat(np.cumsum(lengths) - lengths, lengths)
        flat = np.repeat(starts, lengths) + offsets
        block[row_ids, indices[flat]] = weights[flat]
    return block


def _np_neighbor_scores(kind, indptr, indices, weights, degree, strength, log_strength, us, vs):
    n = len(degree)
    out = np.zeros(len(us), dtype=np.float64)
    if len(us) == 0:
        return out
    with np.errstate(divide="ignore", invalid="ignore"):
        deg = degree.astype(np.float64)
        node_weight = {
            AA: np.where(deg > 1, 1.0 / np.log(np.where(deg > 1, deg, 2.0)), 0.0),
            RA: np.where(deg > 0, 1.0 / np.where(deg > 0, deg, 1.0), 0.0),
            WAA: np.where(log_strength > 0, 1.0 / np.where(log_strength > 0, log_strength, 1.0), 0.0),
            WRA: np.where(strength > 0, 1.0 / np.where(strength > 0, strength, 1.0), 0.0),
        }.get(kind)
    step = max(1, _BLOCK_CELLS // max(n, 1))
    for lo in range(0, len(us), step):
        bu = _dense_rows(us[lo:lo + step], indptr, indices, weights, n)
        bv = _dense_rows(vs[lo:lo + step], indptr, indices, weights, n)
        common = (bu > 0) & (bv > 0)
        if kind in (CN, JI, SI):
            cn = common.sum(axis=1).astype(np.float64)
            du = deg[us[lo:lo + step]]
            dv = deg[vs[lo:lo + step]]
            if kind == CN:
                res = cn
            elif kind == JI:
                union = du + dv - cn
                res = np.divide(cn, union, out=np.zeros_like(cn), where=union > 0)
            else:
                den = du + dv
                res = np.divide(2.0 * cn, den, out=np.zeros_like(cn), where=den > 0)
        elif kind == WCN:
            res = (bu * bv).sum(axis=1)
        elif kind == WSI:
            num = np.where(common, bu + bv, 0.0).sum(axis=1)
            den = strength[us[lo:lo + step]] + strength[vs[lo:lo + step]]
            res = np.divide(num, den, out=np.zeros_like(num), where=den > 0)
        else:
            res = np.where(common, node_weight[None, :], 0.0).sum(axis=1)
        out[lo:lo + step] = res
    return out


def neighbor_scores(kind, adjacency, us, vs):
    """Score node-position pairs ``(us[p], vs[p])`` with a neighbourhood metric."""
    if isinstance(kind, str):
        kind = NEIGHBOR_KINDS.index(kind)
    if kind not in range(len(NEIGHBOR_KINDS)):
        raise ValueError(f"unknown neighbourhood kind {kind!r}")
    us = np.ascontiguousarray(us, dtype=np.int64)
    vs = np.ascontiguousarray(vs, dtype=np.int64)
    fn = _nb_neighbor_scores if use_numba() else _np_neighbor_scores
    return fn(kind, adjacency.indptr, adjacency.indices, adjacency.weights, adjacency.degree,
              adjacency.strength, adjacency.log_strength, us, vs)


# -- temporal metrics --------------------------------------------------------

@njit
def _nb_temporal_scores(kind, param, sorted_codes, sorted_times, queries, omega, fallback_gap):
    out = np.zeros(len(queries), dtype=np.float64)
    for p in range(len(queries)):
        lo = np.searchsorted(sorted_codes, queries[p], side="left")
        hi = np.searchsorted(sorted_codes, queries[p], side="right")
        count = hi - lo
        if count == 0:
            continue
        if kind == PAE:
            out[p] = count
        elif kind == PAE_DELTA_S:
            c = 0
            for q in range(hi - 1, lo - 1, -1):
                t = sorted_times[q]
                if t < omega - param:
                    break
                if t <= omega:
                    c += 1
            out[p] = c
        else:
            # links after omega do not count towards the k most recent
            top = hi
            while top > lo and sorted_times[top - 1] > omega:
                top -= 1
            m = top - lo
            if m == 0:
                continue
            if m > param:
                m = int(param)
            gap = omega - sorted_times[top - m]
            if gap <= 0.0:
                gap = fallback_gap
            out[p] = m / gap
    return out


def _np_temporal_scores(kind, param, sorted_codes, sorted_times, queries, omega, fallback_gap):
    lo = np.searchsorted(sorted_codes, queries, side="left")
    hi = np.searchsorted(sorted_codes, queries, side="right")
    if kind == PAE:
        return (hi - lo).astype(np.float64)
    upto = np.concatenate([[0], np.cumsum(sorted_times <= omega)])
    if kind == PAE_DELTA_S:
        inside = (sorted_times >= omega - param) & (sorted_times <= omega)
        cs = np.concatenate([[0], np.cumsum(inside)])
        return (cs[hi] - cs[lo]).astype(np.float64)
    # per-pair times are sorted, so links at or before omega form a prefix
    m_all = upto[hi] - upto[lo]
    m = np.minimum(m_all, int(param))
    out = np.zeros(len(queries), dtype=np.float64)
    has = m > 0
    if has.any():
        t_m = sorted_times[(lo + m_all - m)[has]]
        gap = omega - t_m
        gap = np.where(gap > 0.0, gap, fallback_gap)
        out[has] = m[has] / gap
    return out


def temporal_scores(kind, param, sorted_codes, sorted_times, queries, omega, fallback_gap):
    """PAE-family scores of the pairs ``queries`` given links sorted by (code, time)."""
    queries = np.ascontiguousarray(queries, dtype=np.int64)
    fn = _nb_temporal_scores if use_numba() else _np_temporal_scores
    return fn(kind, float(param), sorted_codes, sorted_times, queries, float(omega), float(fallback_gap))


# -- fractional confusion ----------------------------------------------------

@njit
def _nb_confusion(pred, actual):
    tp = 0.0
    fp = 0.0
    fn = 0.0
    for i in range(len(pred)):
        p = pred[i]
        a = actual[i]
        if p < a:
            tp += p
            fn += a - p
        else:
            tp += a
            fp += p - a
    return tp, fp, fn


def _np_confusion(pred, actual):
    tp = np.minimum(pred, actual).sum()
    fp = np.maximum(pred - actual, 0.0).sum()
    fn = np.maximum(actual - pred, 0.0).sum()
    return float(tp), float(fp), float(fn)


def confusion_sums(pred, actual):
    """Summed (TP, FP, FN) of aligned predicted and actual count arrays."""
    pred = np.ascontiguousarray(pred, dtype=np.float64)
    actual = np.ascontiguousarray(actual, dtype=np.float64)
    fn = _nb_confusion if use_numba() else _np_confusion
    tp, fp, fn_ = fn(pred, actual)
    return float(tp), float(fp), float(fn_)
