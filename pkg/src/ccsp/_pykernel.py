"""Pure-Python merge kernel.  Must stay behaviourally identical to ``_ckernel.pyx``."""


def sync_projection(events, sync):
    return tuple([e for e in events if e[0] in sync])


def interleavings(a, b, sync):
    """Every merge of event tuples ``a`` and ``b``.

    Events whose channel is in ``sync`` must be taken jointly from both
    sides and be equal; all others interleave freely.  Returns a set of
    tuples, empty when the sides cannot agree.
    """
    n = len(a)
    m = len(b)
    sa = [e[0] in sync for e in a]
    sb = [e[0] in sync for e in b]
    # suffix tables, built from the end; nxt is row i+1
    nxt = None
    for i in range(n, -1, -1):
        row = [None] * (m + 1)
        for j in range(m, -1, -1):
            if i == n and j == m:
                row[j] = {()}
                continue
            out = set()
            if i < n and not sa[i]:
                x = (a[i],)
                for t in nxt[j]:
                    out.add(x + t)
            if j < m and not sb[j]:
                y = (b[j],)
                for t in row[j + 1]:
                    out.add(y + t)
            if i < n and j < m and sa[i] and sb[j] and a[i] == b[j]:
                x = (a[i],)
                for t in nxt[j + 1]:
                    out.add(x + t)
            row[j] = out
        nxt = row
    return nxt[0]
