"""Brute-force oracles, independent of the library's enumerators.

These recompute expected values by direct search so the main code paths
are checked against a second route: plain per-coordinate recursion here
versus the multiset-with-permutations enumerator in the package, and a
dict-based pure-Python closure versus the vectorized one.
"""

from math import isqrt


def raw_pairing(x, y):
    return x[0] * y[0] - sum(a * b for a, b in zip(x[1:], y[1:]))


def _solve(n, target_s, target_q, degree):
    """Vectors b with sum b = target_s and sum b^2 = target_q, raw coords."""
    out = []

    def rec(i, s, q, prefix):
        if i == n:
            if s == 0 and q == 0:
                out.append((degree,) + tuple(-b for b in prefix))
            return
        rem = n - i - 1
        lim = isqrt(q)
        for b in range(-lim, lim + 1):
            s2, q2 = s - b, q - b * b
            if q2 < 0:
                continue
            if rem == 0:
                if s2 == 0 and q2 == 0:
                    out.append((degree,) + tuple(-x for x in prefix + [b]))
                continue
            if s2 * s2 > rem * q2:
                continue
            rec(i + 1, s2, q2, prefix + [b])

    rec(0, target_s, target_q, [])
    return out


def exc_classes_oracle(n, degree_lo=-3, degree_hi=10):
    """All raw coordinate vectors with e.e = -1 and K.e = -1.

    The scan window [-3, 10] strictly contains the Cauchy-Schwarz degree
    interval for every n <= 8.
    """
    out = []
    for a in range(degree_lo, degree_hi + 1):
        out.extend(_solve(n, 3 * a - 1, a * a + 1, a))
    return out


def root_classes_oracle(n):
    """All raw coordinate vectors with r.r = -2 and K.r = 0, n <= 8."""
    out = []
    for a in range(-5, 6):
        out.extend(_solve(n, 3 * a, a * a + 2, a))
    return out


def tuple_closure(gen_mats, limit=1_000_000):
    """Pure-Python breadth-first closure over tuple-of-tuples matrices."""
    dim = len(gen_mats[0])

    def mul(a, b):
        return tuple(tuple(sum(a[i][k] * b[k][j] for k in range(dim))
                           for j in range(dim)) for i in range(dim))

    ident = tuple(tuple(1 if i == j else 0 for j in range(dim))
                  for i in range(dim))
    seen = {ident}
    frontier = [ident]
    while frontier:
        new = []
        for m in frontier:
            for g in gen_mats:
                p = mul(m, g)
                if p not in seen:
                    seen.add(p)
                    new.append(p)
                    if len(seen) > limit:
                        raise RuntimeError("oracle closure limit")
        frontier = new
    return seen


def hexagon_edge_transitive_subgroup_orders():
    """Orders of ALL edge-transitive subgroups of the hexagon symmetries.

    Includes the subgroup generated by the third-turn rotations and the
    vertex reflections, which is edge-transitive but not vertex-transitive;
    the library's transitivity notion excludes it.
    """
    import itertools
    elems = [tuple((i + r) % 6 for i in range(6)) for r in range(6)] + \
            [tuple((c - i) % 6 for i in range(6)) for c in range(6)]
    ident = tuple(range(6))

    def compose(p, q):
        return tuple(p[q[i]] for i in range(6))

    def edge_perm(vp):
        out = []
        for i in range(6):
            a, b = vp[i], vp[(i + 1) % 6]
            out.append(a if (a + 1) % 6 == b else b)
        return tuple(out)

    subgroups = set()
    for gens in [()] + [(g,) for g in elems] + \
            list(itertools.combinations(elems, 2)):
        group = {ident}
        frontier = [ident]
        while frontier:
            new = []
            for x in frontier:
                for g in gens:
                    y = compose(x, g)
                    if y not in group:
                        group.add(y)
                        new.append(y)
            frontier = new
        subgroups.add(frozenset(group))

    orders = []
    for sg in subgroups:
        eperms = [edge_perm(p) for p in sg]
        orbit = {0}
        changed = True
        while changed:
            changed = False
            for p in eperms:
                for x in list(orbit):
                    if p[x] not in orbit:
                        orbit.add(p[x])
                        changed = True
        if len(orbit) == 6:
            orders.append(len(sg))
    return sorted(orders)
