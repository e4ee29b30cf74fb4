"""Regenerates values.json with mpmath at 50 digits.

Independent of the Rust code: the BdG matrix, bulk quartic and periodic
dispersion are written out again here from their definitions.
Run: python3 generate.py > values.json
"""
import json

import mpmath as mp

mp.mp.dps = 50
S3 = mp.sqrt(3)
EDGE_PAIR = dict(m=mp.mpf(3) / 2, t1=mp.mpc(0, 1), t2=mp.mpf(2), d1=mp.mpf(3), d2=mp.mpf(3))
REAL_SKIN = dict(m=mp.mpf(2) / 5, t1=mp.mpf(2), t2=mp.mpf(1), d1=S3, d2=-S3)
EQUAL = dict(m=mp.mpf("0.6"), t1=mp.mpf("1.1"), t2=mp.mpf("1.1"), d1=mp.mpf("0.4"), d2=mp.mpf("0.9"))


def c(z):
    z = mp.mpc(z)
    return [mp.nstr(z.real, 17, strip_zeros=False), mp.nstr(z.imag, 17, strip_zeros=False)]


def bdg(p, sites):
    n = 2 * sites
    h = mp.zeros(n, n)
    for j in range(sites):
        r = 2 * j
        h[r, r] = p["m"]
        h[r + 1, r + 1] = -p["m"]
        if j + 1 < sites:
            q = r + 2
            h[r, q], h[r, q + 1] = p["t1"], p["d1"]
            h[r + 1, q], h[r + 1, q + 1] = -p["d2"], -p["t2"]
            h[q, r], h[q, r + 1] = p["t2"], -p["d1"]
            h[q + 1, r], h[q + 1, r + 1] = p["d2"], -p["t1"]
    return h


def quartic(p, lam):
    """Ascending coefficients of the bulk quartic in x.

    Eliminates a from the two bulk equations
      t2 - a d1 + (m - lam) x + (t1 + a d1) x^2 = 0
      d2 - a t1 - (m + lam) a x - (d2 + a t2) x^2 = 0
    by writing both as A_i + a B_i = 0 and taking A1 B2 - A2 B1.
    """
    m, t1, t2, d1, d2 = (p[k] for k in ("m", "t1", "t2", "d1", "d2"))
    a1 = [t2, m - lam, t1]
    b1 = [-d1, 0, d1]
    a2 = [d2, 0, -d2]
    b2 = [-t1, -(m + lam), -t2]
    out = [mp.mpc(0)] * 5
    for i in range(3):
        for j in range(3):
            out[i + j] += a1[i] * b2[j] - a2[i] * b1[j]
    return out


def roots(asc):
    return mp.polyroots(list(reversed(asc)), maxsteps=200, extraprec=200)


def periodic(p, k):
    ts, td = p["t1"] + p["t2"], p["t1"] - p["t2"]
    shift = mp.mpc(0, 1) * td * mp.sin(k)
    root = mp.sqrt(4 * p["d1"] * p["d2"] * mp.sin(k) ** 2 + (p["m"] + ts * mp.cos(k)) ** 2)
    return shift + root, shift - root


def max_abs_im(p):
    f = lambda k: max(abs(mp.im(z)) for z in periodic(p, k))
    n = 4000
    j = max(range(n), key=lambda j: f(2 * mp.pi * j / n))
    lo, hi = 2 * mp.pi * (j - 1) / n, 2 * mp.pi * (j + 1) / n
    g = (mp.sqrt(5) - 1) / 2
    for _ in range(200):
        x1, x2 = hi - g * (hi - lo), lo + g * (hi - lo)
        if f(x1) < f(x2):
            lo = x1
        else:
            hi = x2
    return f((lo + hi) / 2)


def eigenvalues(p, sites):
    ev = mp.eig(bdg(p, sites), left=False, right=False)
    return sorted(ev, key=lambda z: (float(mp.re(z)), float(mp.im(z))))


out = {
    "real_skin_max_abs_im": mp.nstr(max_abs_im(REAL_SKIN), 17),
    "edge_pair_spectrum_l12": [c(z) for z in eigenvalues(EDGE_PAIR, 12)],
    "equal_hopping_spectrum_l6": [c(z) for z in eigenvalues(EQUAL, 6)],
    "edge_pair_zero_energy_roots": [c(z) for z in roots(quartic(EDGE_PAIR, 0))],
    "real_skin_roots_at_1_0p3i": [c(z) for z in roots(quartic(REAL_SKIN, mp.mpc(1, "0.3")))],
    "real_skin_quartic_at_1_0p3i": [c(z) for z in quartic(REAL_SKIN, mp.mpc(1, "0.3"))],
}
print(json.dumps(out, indent=1))
