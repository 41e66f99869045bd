"""Independent reference computations for the frozen expected values.

Nothing here imports etalab. Each oracle uses the most direct method
available (raw matrix BFS, brute-force conjugation over whole finite groups,
plain Fourier sums, geometric series) so that agreement with the library is
evidence rather than a tautology.

    python3 tests/oracles.py        # recompute and rewrite tests/data/oracle_values.json
"""

from __future__ import annotations

import cmath
import itertools
import json
import math
from fractions import Fraction
from pathlib import Path

DATA = Path(__file__).parent / "data" / "oracle_values.json"

# --- SL2(Z) by raw matrices ------------------------------------------------------

X = (0, -1, 1, 0)
Y = (0, -1, 1, 1)


def mmul(u, v, N=None):
    a, b, c, d = u
    e, f, g, h = v
    r = (a * e + b * g, a * f + b * h, c * e + d * g, c * f + d * h)
    return tuple(z % N for z in r) if N else r


def minv(u, N=None):
    a, b, c, d = u
    r = (d, -b, -c, a)
    return tuple(z % N for z in r) if N else r


SL2_GENS = {"x": (X, 3), "X": (minv(X), 9), "y": (Y, 2), "Y": (minv(Y), 10)}


def sl2z_ball(radius):
    """matrix -> (length, psi, word) by BFS; psi tracked additively mod 12."""
    I = (1, 0, 0, 1)
    seen = {I: (0, 0, "")}
    frontier = [I]
    for r in range(1, radius + 1):
        nxt = []
        for u in frontier:
            _, p, w = seen[u]
            for s, (g, pg) in SL2_GENS.items():
                v = mmul(u, g)
                if v not in seen:
                    seen[v] = (r, (p + pg) % 12, w + s)
                    nxt.append(v)
        frontier = nxt
    return seen


def sl2z_word_length(target, cap=12):
    b = sl2z_ball(cap)
    return b[target][0] if target in b else None


def sl2z_class_of_x(ball, conj_radius=6):
    """Conjugates h x h^-1 with l(h) <= conj_radius, by brute force."""
    hs = sl2z_ball(conj_radius)
    return {mmul(mmul(h, X), minv(h)) for h in hs}


def sl2_mod(N):
    return [m for m in itertools.product(range(N), repeat=4) if (m[0] * m[3] - m[1] * m[2]) % N == 1 % N]


def conjugate_in_sl2_mod(N, g, h):
    G = sl2_mod(N)
    g = tuple(z % N for z in g)
    h = tuple(z % N for z in h)
    return any(mmul(mmul(k, g, N), minv(k, N), N) == h for k in G)


def congruence_psi_image(N):
    """All of pi(SL2Z) in SL2(Z/N) x Z/12 by closure under the generator images."""
    I = (1 % N, 0, 0, 1 % N)
    start = (I, 0)
    gens = [(tuple(z % N for z in g), p) for g, p in SL2_GENS.values()]
    seen = {start}
    frontier = [start]
    while frontier:
        nxt = []
        for m, p in frontier:
            for g, pg in gens:
                v = (mmul(m, g, N), (p + pg) % 12)
                if v not in seen:
                    seen.add(v)
                    nxt.append(v)
        frontier = nxt
    return seen


def congruence_psi_class(N, u):
    G = congruence_psi_image(N)
    m, p = u
    # Z/12 is abelian, so the psi coordinate is fixed under conjugation
    return {(mmul(mmul(k, m, N), minv(k, N), N), p) for k, _ in G}


def distinguishing_index_sl2z(Ns, F_radius=3):
    ball = sl2z_ball(F_radius)
    cls_x = sl2z_class_of_x(ball)
    # cross-check against the trace/psi description of <x>
    for m, (_, p, _) in ball.items():
        if m in cls_x:
            assert m[0] + m[3] == 0 and p == 3
    ok = []
    for N in Ns:
        cq = congruence_psi_class(N, (tuple(z % N for z in X), 3))
        sep = all(m in cls_x or (tuple(z % N for z in m), p) not in cq for m, (_, p, _) in ball.items())
        ok.append(sep)
    k = len(ok)
    while k > 0 and ok[k - 1]:
        k -= 1
    return k if k < len(ok) else None, ok


def sl2z_injective_radius(quotient_class_test, cap, restrict=None):
    ball = sl2z_ball(cap)
    cls_x = sl2z_class_of_x(ball, conj_radius=cap)
    by_len = sorted(ball.items(), key=lambda kv: kv[1][0])
    for m, (length, p, _) in by_len:
        if restrict and not restrict(m):
            continue
        if quotient_class_test(m, p) and m not in cls_x:
            return length - 1
    return f">= {cap}"


# --- free group -----------------------------------------------------------------

F2_INV = {"a": "A", "A": "a", "b": "B", "B": "b"}


def reduced_words(n):
    out = [""]
    frontier = [""]
    for _ in range(n):
        nxt = []
        for w in frontier:
            for s in "aAbB":
                if w and F2_INV[s] == w[-1]:
                    continue
                nxt.append(w + s)
        out += nxt
        frontier = nxt
    return out


def free_reduce(w):
    st = []
    for s in w:
        if st and F2_INV[s] == st[-1]:
            st.pop()
        else:
            st.append(s)
    return "".join(st)


def free_inverse(w):
    return "".join(F2_INV[s] for s in reversed(w))


def f2_class_count(rep, n, conj_radius=None):
    conj_radius = n if conj_radius is None else conj_radius
    orbit = {free_reduce(h + rep + free_inverse(h)) for h in reduced_words(conj_radius)}
    return sum(1 for w in orbit if len(w) <= n)


def f2_ball(n):
    return 2 * 3**n - 1


# --- integers --------------------------------------------------------------------


def z_injective_radius(k, a, cap):
    for n in range(cap + 1):
        for g in (n, -n):
            if g != a and (g - a) % k == 0:
                return n - 1
    return f">= {cap}"


def z_distinguishing_index(ks, a, F):
    ok = [all(b == a or (b - a) % k != 0 for b in F) for k in ks]
    k = len(ok)
    while k > 0 and ok[k - 1]:
        k -= 1
    return k if k < len(ok) else None


# --- one-component operator: plain Fourier sums -------------------------------------


def kernel_1comp(n, theta, c, t, x, y, J=400):
    """sum over cover frequencies xi_j = 2 pi (j/n + theta): lambda e^{-t^2 lambda^2} e^{i xi (x-y)} / n."""
    s = 0j
    for j in range(-J * n, J * n + 1):
        xi = 2 * math.pi * (j / n + theta)
        lam = xi + c
        s += lam * math.exp(-t * t * lam * lam) * cmath.exp(1j * xi * (x - y)) / n
    return s


def deloc_trace_1comp(n, theta, c, a, t, J=400):
    """int_0^1 K(x, x + a) e^{2 pi i theta a} dx; the integrand is constant in x."""
    return kernel_1comp(n, theta, c, t, 0.0, float(a), J) * cmath.exp(2j * math.pi * theta * a)


def eta_1comp_geometric(n, theta, a):
    """sum_j sign(j + n theta) omega^j / n, omega = e^{-2 pi i a/n}, summed as geometric series."""
    phi = Fraction(theta).limit_denominator(10**6) * n
    omega = cmath.exp(-2j * math.pi * a / n)
    if a % n == 0:
        if phi.denominator == 1:
            return 0j
        frac = phi - math.floor(phi)
        return complex((1 - 2 * frac) / n)
    # positive part: j >= j0, negative part j <= j0 - 1 (minus a zero mode at j = -phi)
    j0 = math.floor(-phi) + 1
    pos = omega**j0 / (1 - omega)
    neg = omega ** (j0 - 1) / (1 - 1 / omega)
    total = pos - neg
    if phi.denominator == 1:
        total += omega ** (-int(phi))
    return total / n


# --- freezing ----------------------------------------------------------------------


def compute_all() -> dict:
    out: dict = {}
    out["sl2z_word_length_x2"] = sl2z_word_length(mmul(X, X))
    out["sl2z_psi_table"] = {w: sl2z_ball(6)[_eval_word(w)][1] for w in ["", "x", "xx", "yyy", "xxx", "y", "yy", "yyyy", "yyyyy"]}
    out["sl2_mod5_x_conj_xinv"] = conjugate_in_sl2_mod(5, X, minv(X))
    out["sl2_mod5_order"] = len(sl2_mod(5))
    out["f2_ball_2"] = f2_ball(2)
    out["f2_ball_counts_4_12"] = [[n, f2_ball(n)] for n in range(4, 13)]
    out["f2_commutator_class_ball_4"] = f2_class_count("abAB", 4)
    out["f2_commutator_class_ball_6"] = f2_class_count("abAB", 6)
    out["z_mod5_radius_class1"] = z_injective_radius(5, 1, 10)
    out["z_mod2_radius_class1"] = z_injective_radius(2, 1, 10)
    out["z_iZ_distinguish_2_to_9"] = z_distinguishing_index(list(range(2, 10)), 1, range(-3, 4))
    Ns = list(range(2, 9))
    k, ok = distinguishing_index_sl2z(Ns)
    out["sl2z_congruence_psi_distinguish"] = {"Ns": Ns, "index": k, "separates": ok}
    out["sl2z_psi_radius_x_cap8"] = sl2z_injective_radius(lambda m, p: _psi_class_test(p), 8)
    out["sl2z_psi_radius_x_cap8_torsion"] = sl2z_injective_radius(lambda m, p: p == 3, 8, restrict=lambda m: abs(m[0] + m[3]) <= 1 or m in ((1, 0, 0, 1), (-1, 0, 0, -1)))
    out["kernel_1comp_n2_t1_x0_y1"] = _c(kernel_1comp(2, 0.25, 0.0, 1.0, 0.0, 1.0))
    out["deloc_1comp_n2_a1_t1"] = _c(deloc_trace_1comp(2, 0.25, 0.0, 1, 1.0))
    out["eta_1comp_theta_quarter"] = {f"{n},{a}": _c(eta_1comp_geometric(n, 0.25, a)) for n in (1, 2, 3, 4) for a in range(n)}
    return out


def _psi_class_test(p):
    # in Z/12 (abelian) the class of psi(x) = 3 is {3}
    return p == 3


def _eval_word(w):
    m = (1, 0, 0, 1)
    for s in w:
        m = mmul(m, SL2_GENS[s][0])
    return m


def _c(z):
    return [z.real, z.imag]


if __name__ == "__main__":
    DATA.parent.mkdir(exist_ok=True)
    DATA.write_text(json.dumps(compute_all(), indent=1, sort_keys=True) + "\n")
    print(f"wrote {DATA}")
