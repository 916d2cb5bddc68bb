"""Dense polynomials over F_p as coefficient lists, lowest degree first."""

from __future__ import annotations


def trim(f: list[int]) -> list[int]:
    while f and f[-1] == 0:
        f = f[:-1]
    return f


def normalize(f, p: int) -> list[int]:
    return trim([c % p for c in f])


def degree(f: list[int]) -> int:
    return len(f) - 1 if f else -1


def evaluate(f: list[int], x: int, p: int) -> int:
    acc = 0
    for c in reversed(f):
        acc = (acc * x + c) % p
    return acc


def mul(f: list[int], g: list[int], p: int) -> list[int]:
    if not f or not g:
        return []
    out = [0] * (len(f) + len(g) - 1)
    for i, a in enumerate(f):
        if a:
            for j, b in enumerate(g):
                out[i + j] += a * b
    return normalize(out, p)


def divmod_poly(f: list[int], g: list[int], p: int) -> tuple[list[int], list[int]]:
    g = normalize(g, p)
    if not g:
        raise ZeroDivisionError("polynomial division by zero")
    r = normalize(f, p)
    inv_lead = pow(g[-1], -1, p)
    q = [0] * max(len(r) - len(g) + 1, 0)
    while len(r) >= len(g):
        shift = len(r) - len(g)
        c = r[-1] * inv_lead % p
        q[shift] = c
        for i, b in enumerate(g):
            r[i + shift] = (r[i + shift] - c * b) % p
        r = trim(r)
    return trim(q), r


def mod(f: list[int], g: list[int], p: int) -> list[int]:
    return divmod_poly(f, g, p)[1]


def gcd(f: list[int], g: list[int], p: int) -> list[int]:
    """Monic gcd."""
    a, b = normalize(f, p), normalize(g, p)
    while b:
        a, b = b, mod(a, b, p)
    if not a:
        return a
    inv = pow(a[-1], -1, p)
    return [c * inv % p for c in a]


def powmod(base: list[int], e: int, m: list[int], p: int) -> list[int]:
    result = [1]
    base = mod(base, m, p)
    while e:
        if e & 1:
            result = mod(mul(result, base, p), m, p)
        base = mod(mul(base, base, p), m, p)
        e >>= 1
    return result


def frobenius_gcd(f: list[int], p: int, k: int = 1) -> list[int]:
    """gcd(f, x^(p^k) - x): the product of the distinct roots of f in F_{p^k}."""
    f = normalize(f, p)
    xp = [0, 1]
    for _ in range(k):
        xp = powmod(xp, p, f, p)
    diff = list(xp) + [0] * max(0, 2 - len(xp))
    diff[1] = (diff[1] - 1) % p
    return gcd(f, diff, p)


def count_roots(f: list[int], p: int, k: int = 1) -> int:
    """Number of distinct roots of f in F_{p^k}."""
    return degree(frobenius_gcd(f, p, k))


def roots_bruteforce(f: list[int], p: int) -> list[int]:
    return [x for x in range(p) if evaluate(f, x, p) == 0]


def roots(f: list[int], p: int) -> list[int]:
    """Roots of f in F_p.  Small fields are searched directly; otherwise the
    split part gcd(f, x^p - x) is found first and then searched only if nonconstant."""
    if p <= 2000:
        return roots_bruteforce(f, p)
    g = frobenius_gcd(f, p)
    if degree(g) <= 0:
        return []
    return _split_roots(g, p)


def _split_roots(g: list[int], p: int) -> list[int]:
    # Cantor-Zassenhaus equal-degree splitting for a product of distinct linears.
    import random

    rng = random.Random(p)
    stack, found = [g], []
    while stack:
        h = stack.pop()
        d = degree(h)
        if d == 0:
            continue
        if d == 1:
            found.append((-h[0]) * pow(h[1], -1, p) % p)
            continue
        if p == 2:
            found.extend(roots_bruteforce(h, p))
            continue
        while True:
            a = rng.randrange(p)
            t = powmod([a, 1], (p - 1) // 2, h, p)
            t = list(t) + [0] * max(0, 1 - len(t))
            t[0] = (t[0] - 1) % p
            s = gcd(h, t, p)
            if 0 < degree(s) < d:
                stack.append(s)
                stack.append(divmod_poly(h, s, p)[0])
                break
    return sorted(found)
