#!/usr/bin/env python3
"""Reference-value generator for the divergence test suite.

Every value frozen into the C++ unit and acceptance tests is computed here by an
independent route (mpmath at >= 50 significant digits, sympy symbolic expansion,
or exact rational enumeration).  Run from anywhere:

    python3 tests/oracle/divergence_reference.py

and copy the printed constants into the test sources.  Nothing here shares code
with the C++ implementation.
"""

import itertools
from fractions import Fraction

import mpmath as mp
import sympy as sp

mp.mp.dps = 60

LOG2 = mp.log(2)


def fmt(x, digits=21):
    return mp.nstr(mp.mpf(x), digits, strip_zeros=False)


# ---------------------------------------------------------------------------
# Symmetric binomial vs. integer-discretized Gaussian: exact KL in bits.
# P(i) = C(n,i) 2^-n on {0..n};  Q(i) = Phi((i+1/2-mu)/sigma) - Phi((i-1/2-mu)/sigma)
# on all of Z with mu = n/2, sigma = sqrt(n)/2.  Q sums to 1 over Z exactly.
# ---------------------------------------------------------------------------

def log_binom_half(n):
    """ln P(i) for i = 0..n, incrementally (exact at working precision)."""
    out = [mp.mpf(0)] * (n + 1)
    acc = -n * LOG2  # ln C(n,0) 2^-n
    out[0] = acc
    for i in range(n):
        acc += mp.log(n - i) - mp.log(i + 1)
        out[i + 1] = acc
    return out


def ln_gauss_cell(i, n):
    """ln Q(i) via erfc for stability in both tails."""
    mu = mp.mpf(n) / 2
    sigma = mp.sqrt(mp.mpf(n)) / 2
    a = (i - mp.mpf('0.5') - mu) / (sigma * mp.sqrt(2))
    b = (i + mp.mpf('0.5') - mu) / (sigma * mp.sqrt(2))
    # Q = (erf(b) - erf(a))/2; use erfc on the side away from the mean.
    if a >= 0:
        q = (mp.erfc(a) - mp.erfc(b)) / 2
    elif b <= 0:
        q = (mp.erfc(-b) - mp.erfc(-a)) / 2
    else:
        q = (mp.erf(b) - mp.erf(a)) / 2
    return mp.log(q)


def kl_binom_gauss_bits(n):
    lp = log_binom_half(n)
    total = mp.mpf(0)
    # symmetry: i and n-i contribute equally
    half = n // 2
    for i in range(half):
        total += 2 * mp.exp(lp[i]) * (lp[i] - ln_gauss_cell(i, n))
    total += mp.exp(lp[half]) * (lp[half] - ln_gauss_cell(half, n))
    return total / LOG2


def section_kl_grid():
    print("=" * 72)
    print("KL(Binom(n,1/2) || discretized N(n/2, n/4)) in bits, grid n = 2^8..2^16")
    print("=" * 72)
    for e in (8, 10, 12, 14, 16):
        n = 1 << e
        kl = kl_binom_gauss_bits(n)
        norm = kl * n / mp.mpf(e) ** 2  # log2(n) = e
        print(f"n={n:6d}  KL_bits = {fmt(kl)}   KL*n/log2(n)^2 = {fmt(norm)}")


# ---------------------------------------------------------------------------
# Central/tail split: central region {|z| <= mult*sqrt(log2 n)}, z = 2(i-n/2)/sqrt(n).
# Tail mass is exact binomial CDF (= 0 when the region covers {0..n}).
# ---------------------------------------------------------------------------

def tail_mass(n, mult=10):
    halfwidth = mult * mp.sqrt(mp.log(n, 2)) * mp.sqrt(n) / 2  # in i-units
    lo = mp.mpf(n) / 2 - halfwidth
    # central integers: ceil(lo) .. n - ceil(lo); tail = 2 * P(X <= ceil(lo) - 1)
    import math
    lo_int = int(mp.ceil(lo))
    if lo_int <= 0:
        return mp.mpf(0), 0
    lp = log_binom_half(n)
    # logsumexp over i < lo_int
    mx = lp[lo_int - 1]
    s = mp.mpf(0)
    for i in range(lo_int):
        s += mp.exp(lp[i] - mx)
    return 2 * mp.exp(mx) * s, lo_int


def section_tail_split():
    print("=" * 72)
    print("Central/tail split at multiplier 10 (region |z| <= 10*sqrt(log2 n))")
    print("=" * 72)
    for e in (8, 10, 12, 14, 16):
        n = 1 << e
        t, lo = tail_mass(n)
        if t == 0:
            print(f"n={n:6d}  central covers all of [0,n]; tail = 0 exactly")
        else:
            print(f"n={n:6d}  central i in [{lo},{n-lo}]  tail = {fmt(t)}"
                  f"   log2(tail) = {fmt(mp.log(t, 2))}   log2(1/n^2) = {-2*e}")


# ---------------------------------------------------------------------------
# Small discretized-Gaussian cells and spot values.
# ---------------------------------------------------------------------------

def section_small_cells():
    print("=" * 72)
    print("Spot values")
    print("=" * 72)
    # n=2: Q(1) = Phi(1) - Phi(-1) for N(1, 1/2) cell [0.5, 1.5] -> erf(1/2)
    q1 = mp.erf(mp.mpf(1) / 2)
    print(f"n=2 cell mass Q(1) = erf(1/2) = {fmt(q1)}")
    q0 = (mp.erf(mp.mpf(1) / 2) - mp.erf(mp.mpf(3) / 2)) / -2 + mp.mpf(0)
    # cell [-inf conventions aside: Q(0) for cell [-0.5, 0.5], mu=1, sigma=sqrt(1/2)... keep erf route
    a = (mp.mpf('-0.5') - 1) / mp.sqrt(mp.mpf('0.5')) / mp.sqrt(2)
    b = (mp.mpf('0.5') - 1) / mp.sqrt(mp.mpf('0.5')) / mp.sqrt(2)
    q0 = (mp.erf(b) - mp.erf(a)) / 2
    print(f"n=2 cell mass Q(0) = {fmt(q0)}")
    kl2 = kl_binom_gauss_bits(2)
    print(f"n=2 KL_bits = {fmt(kl2)}")
    # KL((1,0) || (1/2,1/2)) = 1 bit sanity is trivial; skip.


# ---------------------------------------------------------------------------
# Local-limit (Edgeworth-style) correction for the symmetric binomial.
# approx1(i) = 2/sqrt(2 pi n) * exp(-z^2/2), z = 2(i - n/2)/sqrt(n)
# approx2(i) = approx1(i) * (1 + r(z)/n), r from the 4th-cumulant term.
# sympy derives r(z); mpmath measures max-abs errors over |z| <= 3.
# ---------------------------------------------------------------------------

def section_edgeworth():
    print("=" * 72)
    print("Local-limit correction polynomial and measured errors")
    print("=" * 72)
    z, nn = sp.symbols('z n', positive=True)
    # Per-trial cumulants of Bernoulli(1/2): kappa2 = 1/4, kappa3 = 0, kappa4 = -1/8.
    # Standardized excess kurtosis gamma4 = kappa4/kappa2^2 / n = -2/n.
    # Edgeworth density correction: (1 + gamma4/24 * He4(z)) with He4 = z^4-6z^2+3.
    he4 = z ** 4 - 6 * z ** 2 + 3
    r = sp.expand(sp.Rational(-2, 24) * he4)
    print(f"r(z) = {r}   (so order-2 multiplier is 1 + r(z)/n)")
    print(f"coefficients: z^4 -> {r.coeff(z, 4)}, z^2 -> {r.coeff(z, 2)}, "
          f"z^0 -> {r.coeff(z, 0)}")

    for n in (100, 1000, 10000):
        lp = log_binom_half(n)
        pref = 2 / mp.sqrt(2 * mp.pi * n)
        e1 = mp.mpf(0)
        e2 = mp.mpf(0)
        for i in range(n + 1):
            zz = (2 * (mp.mpf(i) - mp.mpf(n) / 2)) / mp.sqrt(n)
            if abs(zz) > 3:
                continue
            exact = mp.exp(lp[i])
            a1 = pref * mp.exp(-zz ** 2 / 2)
            rz = -zz ** 4 / 12 + zz ** 2 / 2 - mp.mpf(1) / 4
            a2 = a1 * (1 + rz / n)
            e1 = max(e1, abs(a1 - exact))
            e2 = max(e2, abs(a2 - exact))
        print(f"n={n:6d}  E1 = {fmt(e1, 12)}  E2 = {fmt(e2, 12)}  "
              f"E1*sqrt(n) = {fmt(e1 * mp.sqrt(n), 8)}  "
              f"E1*n^1.5 = {fmt(e1 * mp.power(n, 1.5), 8)}  "
              f"E2*n^2.5 = {fmt(e2 * mp.power(n, 2.5), 8)}")
    # spot value for unit test: order-2 approx at n=100, i=55
    n = 100
    i = 55
    zz = (2 * (mp.mpf(i) - 50)) / mp.sqrt(n)
    a1 = 2 / mp.sqrt(2 * mp.pi * n) * mp.exp(-zz ** 2 / 2)
    rz = -zz ** 4 / 12 + zz ** 2 / 2 - mp.mpf(1) / 4
    print(f"spot: n=100 i=55 exact = {fmt(mp.exp(log_binom_half(100)[55]))}")
    print(f"spot: n=100 i=55 order1 = {fmt(a1)}")
    print(f"spot: n=100 i=55 order2 = {fmt(a1 * (1 + rz / n))}")
    print(f"spot: n=100 i=50 order1 = {fmt(2 / mp.sqrt(2 * mp.pi * 100))}")


# ---------------------------------------------------------------------------
# Planted-minor likelihood-ratio maximum: exact enumeration over {0,1}^t.
# Truncation window W = [tq - C*sqrt(tq*log2(nm)), tq + C*sqrt(tq*log2(nm))].
# Two null conventions: 'uniform' (uniform on T) and 'conditional'
# (Bernoulli(q)^t conditioned on T); planted marks a uniform k-set S to ones and
# conditions the rest accordingly (T_S adds x_S = 1).
# ---------------------------------------------------------------------------

def ratio_max_enum(t, k, q: Fraction, c_mult, log2nm):
    import math
    center = float(t * q)
    hw = float(c_mult) * math.sqrt(center * log2nm)
    lo, hi = center - hw, center + hw
    subsets = [sum(1 << j for j in s) for s in itertools.combinations(range(t), k)]
    # window membership by weight
    in_w = [lo <= w <= hi for w in range(t + 1)]
    if not any(in_w):
        return None

    popcount = [bin(x).count('1') for x in range(1 << t)]

    # null masses (unnormalized), then normalize
    def masses_null(uniform):
        ms = {}
        for x in range(1 << t):
            w = popcount[x]
            if not in_w[w]:
                continue
            ms[x] = Fraction(1) if uniform else q ** w * (1 - q) ** (t - w)
        z = sum(ms.values())
        return {x: m / z for x, m in ms.items()}

    def masses_planted(uniform):
        # average over S of (uniform on T_S | or Ber conditioned on T_S with x_S=1)
        ms = {x: Fraction(0) for x in range(1 << t)}
        nS = len(subsets)
        for smask in subsets:
            per = {}
            for x in range(1 << t):
                if (x & smask) != smask:
                    continue
                w = popcount[x]
                if not in_w[w]:
                    continue
                per[x] = Fraction(1) if uniform else q ** (w - k) * (1 - q) ** (t - w)
            z = sum(per.values())
            if z == 0:
                continue
            for x, m in per.items():
                ms[x] += m / z / nS
        return ms

    out = {}
    for uniform, name in ((True, 'uniform'), (False, 'conditional')):
        m0 = masses_null(uniform)
        m1 = masses_planted(uniform)
        best = Fraction(0)
        per_weight = {}
        for x, p0 in m0.items():
            r = m1[x] / p0
            w = popcount[x]
            prev = per_weight.get(w)
            assert prev is None or prev == r, "ratio not constant on weight class"
            per_weight[w] = r
            best = max(best, r)
        out[name] = (best, per_weight)
    return out


def section_ratio_enum():
    print("=" * 72)
    print("Likelihood-ratio max, exact enumeration t=16 k=2 q=1/2")
    print("=" * 72)
    # Full window (C=20, log2(nm)=20 -> halfwidth 253 >> 16)
    r = ratio_max_enum(16, 2, Fraction(1, 2), 20, 20)
    for name, (best, pw) in r.items():
        print(f"full window, {name}: max ratio = {best} = {fmt(mp.mpf(best.numerator)/best.denominator)}")
    # Clipped window: C=0.8, log2(nm)=4 -> halfwidth 0.8*sqrt(8*4)=4.525 -> weights 4..12
    r = ratio_max_enum(16, 2, Fraction(1, 2), Fraction(4, 5), 4)
    for name, (best, pw) in r.items():
        print(f"clipped window [4,12], {name}: max ratio = {best} "
              f"= {fmt(mp.mpf(best.numerator)/best.denominator)}")
        ws = sorted(pw)
        print(f"   weights {ws[0]}..{ws[-1]}; ratio at top weight = {pw[ws[-1]]}")


# ---------------------------------------------------------------------------
# Ratio-max closed form and acceptance-grid sweep (k in {2,4,8}, q in {1/4,1/2}).
# Closed form mirrors the weight-class identity; used only to place the grid.
# ---------------------------------------------------------------------------

def ratio_max_closed(t, k, q, c_mult, log2nm, uniform):
    center = t * q
    hw = c_mult * mp.sqrt(t * q * log2nm)
    wlo = max(0, int(mp.ceil(center - hw)))
    whi = min(t, int(mp.floor(center + hw)))
    if wlo > whi:
        return None
    ws = range(wlo, whi + 1)

    def lchoose(a, b):
        if b < 0 or b > a:
            return mp.mpf('-inf')
        return mp.loggamma(a + 1) - mp.loggamma(b + 1) - mp.loggamma(a - b + 1)

    lq, l1q = mp.log(q), mp.log(1 - q)
    if uniform:
        lT = logsumexp([lchoose(t, w) for w in ws])
        lTS = logsumexp([lchoose(t - k, w - k) for w in ws if w >= k])
        best = mp.mpf('-inf')
        for w in ws:
            if w < k:
                continue
            lr = lchoose(w, k) - lchoose(t, k) + lT - lTS
            best = max(best, lr)
        return mp.exp(best)
    else:
        lZ0 = logsumexp([lchoose(t, w) + w * lq + (t - w) * l1q for w in ws])
        lZS = logsumexp([lchoose(t - k, w - k) + (w - k) * lq + (t - w) * l1q
                         for w in ws if w >= k])
        best = mp.mpf('-inf')
        for w in ws:
            if w < k:
                continue
            lr = lchoose(w, k) - lchoose(t, k) - k * lq + lZ0 - lZS
            best = max(best, lr)
        return mp.exp(best)


def logsumexp(vals):
    vals = [v for v in vals if v > mp.mpf('-inf')]
    if not vals:
        return mp.mpf('-inf')
    m = max(vals)
    return m + mp.log(sum(mp.exp(v - m) for v in vals))


def section_grid_sweep():
    print("=" * 72)
    print("Ratio-max grid sweep (C = 20 window, context n = m = 1024, log2(nm) = 20)")
    print("=" * 72)
    log2nm = 20
    for mult in (20, 40, 100, 200):
        row = []
        for k in (2, 4, 8):
            for q in (mp.mpf(1) / 4, mp.mpf(1) / 2):
                t = int(mp.ceil(mult * k * k * log2nm / q))
                cu = ratio_max_closed(t, k, q, 20, log2nm, True)
                cc = ratio_max_closed(t, k, q, 20, log2nm, False)
                row.append((k, float(q), t, float(cu), float(cc)))
        worst = max(max(r[3], r[4]) for r in row)
        print(f"t = {mult}*k^2*log2(nm)/q:  worst c = {worst:.4f}")
        for k, q, t, cu, cc in row:
            print(f"   k={k} q={q:.2f} t={t:8d}  c_uniform={cu:.5f}  c_cond={cc:.5f}")

    # sanity: verify closed form against enumeration at t=16 k=2 q=1/2 clipped window
    cu = ratio_max_closed(16, 2, mp.mpf(1) / 2, mp.mpf(0.8), 4, True)
    cc = ratio_max_closed(16, 2, mp.mpf(1) / 2, mp.mpf(0.8), 4, False)
    print(f"closed-form check t=16 k=2 clipped: uniform={fmt(cu)} cond={fmt(cc)}")


# ---------------------------------------------------------------------------
# Typical-weight truncation: exact complement mass Pr[Bin(t,q) outside window].
# ---------------------------------------------------------------------------

def typical_weight_tail(t, q: Fraction, c_mult, log2nm):
    center = mp.mpf(t) * mp.mpf(q.numerator) / q.denominator
    hw = c_mult * mp.sqrt(center * log2nm)
    wlo = int(mp.ceil(center - hw))
    whi = int(mp.floor(center + hw))
    if wlo <= 0 and whi >= t:
        return mp.mpf(0), (max(wlo, 0), min(whi, t))
    qq = mp.mpf(q.numerator) / q.denominator
    lq, l1q = mp.log(qq), mp.log(1 - qq)

    def lpmf(w):
        return (mp.loggamma(t + 1) - mp.loggamma(w + 1) - mp.loggamma(t - w + 1)
                + w * lq + (t - w) * l1q)

    lo_terms = [lpmf(w) for w in range(0, max(wlo, 0))]
    hi_terms = [lpmf(w) for w in range(whi + 1, t + 1)]
    return mp.exp(logsumexp(lo_terms + hi_terms)), (max(wlo, 0), min(whi, t))


def section_trunc_tails():
    print("=" * 72)
    print("Typical-weight truncation complement masses (exact)")
    print("=" * 72)
    cases = [
        (400, Fraction(1, 2), 20, 20),   # default C: window covers everything
        (400, Fraction(1, 2), 2, 20),    # C=2, log2(nm)=20
        (1000, Fraction(1, 4), 3, 20),   # C=3
        (256, Fraction(1, 2), 20, 20),
    ]
    for t, q, c, l in cases:
        tail, (wlo, whi) = typical_weight_tail(t, q, c, l)
        if tail == 0:
            print(f"t={t} q={q} C={c} log2nm={l}: window [{wlo},{whi}] covers all; tail = 0")
        else:
            print(f"t={t} q={q} C={c} log2nm={l}: window [{wlo},{whi}] tail = {fmt(tail)}")


# ---------------------------------------------------------------------------
# Gaussian mixture ratio: closed form vs. full mixture enumeration at 50 digits.
# Profile v: each coordinate independently alpha w.p. ell/t else 0.
# ratio(x) = prod_j (1 - ell/t + (ell/t) exp(-alpha^2/2) exp(alpha x_j)).
# ---------------------------------------------------------------------------

def section_gaussian_mixture():
    print("=" * 72)
    print("Sparse-mean mixture ratio")
    print("=" * 72)
    t, ell = 4, 2
    alpha = mp.mpf(1) / 2
    x = [mp.mpf(1), mp.mpf(-1), mp.mpf(0), mp.mpf(2)]
    p = mp.mpf(ell) / t
    closed = mp.mpf(1)
    for xj in x:
        closed *= (1 - p + p * mp.exp(-alpha ** 2 / 2) * mp.exp(alpha * xj))
    # enumeration over all 2^t supports with iid weights
    total = mp.mpf(0)
    for mask in range(1 << t):
        wgt = mp.mpf(1)
        dens = mp.mpf(1)
        for j in range(t):
            on = (mask >> j) & 1
            wgt *= p if on else (1 - p)
            mu = alpha if on else mp.mpf(0)
            dens *= mp.exp(-(x[j] - mu) ** 2 / 2) / mp.sqrt(2 * mp.pi)
        total += wgt * dens
    f0 = mp.mpf(1)
    for xj in x:
        f0 *= mp.exp(-xj ** 2 / 2) / mp.sqrt(2 * mp.pi)
    enum = total / f0
    print(f"t=4 ell=2 alpha=1/2 x=(1,-1,0,2): closed = {fmt(closed)}")
    print(f"                                  enum   = {fmt(enum)}")
    print(f"                                  |diff| = {fmt(abs(closed - enum), 5)}")
    x0 = (1 - p + p * mp.exp(-alpha ** 2 / 2)) ** t
    print(f"x = 0 value = {fmt(x0)}")


# ---------------------------------------------------------------------------
# Spiked-covariance density: closed form vs. explicit matrix route in mpmath.
# Sigma_S = I + (alpha/ell) 1_S 1_S^T;  f_S/f_0 = (1+a)^-1/2 exp(theta Y^2/ell),
# theta = alpha/(2(1+alpha)), Y = sum_{j in S} x_j.
# ---------------------------------------------------------------------------

def section_pca_density():
    print("=" * 72)
    print("Spiked-covariance density ratio")
    print("=" * 72)
    t, ell = 6, 2
    alpha = mp.mpf('0.3')
    x = [mp.mpf('0.5'), mp.mpf('-1.2'), mp.mpf('0.3'), mp.mpf('2.0'),
         mp.mpf('-0.7'), mp.mpf('1.1')]
    S = [2, 3]  # second contiguous block of size 2
    sigma = mp.eye(t)
    for a in S:
        for b in S:
            sigma[a, b] += alpha / ell
    det = mp.det(sigma)
    inv = sigma ** -1
    quad = mp.mpf(0)
    for a in range(t):
        for b in range(t):
            quad += x[a] * inv[a, b] * x[b]
    xe = mp.matrix(x)
    f_S = mp.exp(-quad / 2) / mp.sqrt((2 * mp.pi) ** t * det)
    f_0 = mp.exp(-sum(v ** 2 for v in x) / 2) / mp.sqrt((2 * mp.pi) ** t)
    explicit = f_S / f_0
    Y = sum(x[j] for j in S)
    closed = (1 + alpha) ** mp.mpf('-0.5') * mp.exp(alpha / (2 * (1 + alpha)) * Y ** 2 / ell)
    print(f"det(Sigma_S) = {fmt(det)}   (expect 1 + alpha = 1.3)")
    print(f"t=6 ell=2 alpha=0.3 S={{2,3}} x=(0.5,-1.2,0.3,2.0,-0.7,1.1):")
    print(f"   explicit = {fmt(explicit)}")
    print(f"   closed   = {fmt(closed)}")
    print(f"   f_S(x)   = {fmt(f_S)}")
    # mixture ratio example: t=4 ell=2 alpha=0.2 x=(1,1,0,0), blocks {0,1},{2,3}
    t, ell = 4, 2
    alpha = mp.mpf('0.2')
    x = [mp.mpf(1), mp.mpf(1), mp.mpf(0), mp.mpf(0)]
    th = alpha / (2 * (1 + alpha))
    pref = (1 + alpha) ** mp.mpf('-0.5')
    r1 = pref * mp.exp(th * (x[0] + x[1]) ** 2 / ell)
    r2 = pref * mp.exp(th * (x[2] + x[3]) ** 2 / ell)
    print(f"mixture t=4 ell=2 alpha=0.2 x=(1,1,0,0): ratio = {fmt((r1 + r2) / 2)}")
    print(f"   block ratios: {fmt(r1)}, {fmt(r2)};  x=0 value = {fmt(pref)}")


# ---------------------------------------------------------------------------
# Wilson interval at 99% and the normal quantile used by it.
# ---------------------------------------------------------------------------

def section_wilson():
    print("=" * 72)
    print("Wilson 99% interval reference")
    print("=" * 72)
    z = mp.sqrt(2) * mp.erfinv(2 * mp.mpf('0.995') - 1)
    print(f"z_0.995 = {fmt(z)}")
    k, n = 50, 100
    ph = mp.mpf(k) / n
    denom = 1 + z ** 2 / n
    center = (ph + z ** 2 / (2 * n)) / denom
    half = z * mp.sqrt(ph * (1 - ph) / n + z ** 2 / (4 * n ** 2)) / denom
    print(f"wilson(50, 100, 0.99) = [{fmt(center - half)}, {fmt(center + half)}]")
    k = 0
    ph = mp.mpf(k) / n
    center = (ph + z ** 2 / (2 * n)) / denom
    half = z * mp.sqrt(ph * (1 - ph) / n + z ** 2 / (4 * n ** 2)) / denom
    print(f"wilson(0, 100, 0.99)  = [{fmt(center - half)}, {fmt(center + half)}]")
    # Clopper-Pearson upper bound with zero successes: 1 - (1-p)^n = conf
    for nn in (1000, 4600):
        ub = 1 - mp.mpf('0.01') ** (mp.mpf(1) / nn)
        print(f"exact 99% upper bound, 0 of {nn}: {fmt(ub, 10)}")


if __name__ == '__main__':
    section_small_cells()
    section_edgeworth()
    section_ratio_enum()
    section_grid_sweep()
    section_trunc_tails()
    section_gaussian_mixture()
    section_pca_density()
    section_wilson()
    section_tail_split()
    section_kl_grid()
