"""Generate Taylor coefficients of the Riemann-Siegel correction functions.

Writes ``src/hardyz/_rs_coeffs.py``.  The correction functions C_0..C_4 are
expanded in z = p - 1/2 where p is the fractional part of sqrt(t / 2 pi).
Psi(p) = cos(2 pi (p^2 - p - 1/16)) / cos(2 pi p) is entire, so its Taylor
series is obtained exactly by power-series division in multiprecision.
"""
from pathlib import Path

import mpmath as mp

DEGREE = 64
mp.mp.dps = 80


def psi_series(m):
    pi = mp.pi
    c58, s58 = mp.cos(5 * pi / 8), mp.sin(5 * pi / 8)
    # with z = p - 1/2: Psi = -cos(2 pi z^2 - 5 pi / 8) / cos(2 pi z)
    num = [mp.mpf(0)] * (m + 1)
    for j in range(m // 4 + 2):
        if 4 * j <= m:
            num[4 * j] -= (-1) ** j * (2 * pi) ** (2 * j) / mp.factorial(2 * j) * c58
        if 4 * j + 2 <= m:
            num[4 * j + 2] -= (-1) ** j * (2 * pi) ** (2 * j + 1) / mp.factorial(2 * j + 1) * s58
    den = [mp.mpf(0)] * (m + 1)
    for j in range(m // 2 + 1):
        den[2 * j] = (-1) ** j * (2 * pi) ** (2 * j) / mp.factorial(2 * j)
    out = []
    for i in range(m + 1):
        out.append((num[i] - mp.fsum(out[j] * den[i - j] for j in range(i))) / den[0])
    return out


def derivative(c, k):
    for _ in range(k):
        c = [c[i + 1] * (i + 1) for i in range(len(c) - 1)]
    return c


def combine(terms, m):
    out = [mp.mpf(0)] * (m + 1)
    for scale, c in terms:
        for i, v in enumerate(c[: m + 1]):
            out[i] += scale * v
    return out


def main():
    m = DEGREE + 12
    psi = psi_series(m)
    d = [derivative(psi, k) for k in range(13)]
    pi = mp.pi
    cs = [
        combine([(1, d[0])], DEGREE),
        combine([(-1 / (96 * pi**2), d[3])], DEGREE),
        combine([(1 / (64 * pi**2), d[2]), (1 / (18432 * pi**4), d[6])], DEGREE),
        combine([(-1 / (64 * pi**2), d[1]), (-1 / (3840 * pi**4), d[5]),
                 (-1 / (5308416 * pi**6), d[9])], DEGREE),
        combine([(1 / (128 * pi**2), d[0]), (19 / (24576 * pi**4), d[4]),
                 (11 / (5898240 * pi**6), d[8]), (1 / (2038431744 * pi**8), d[12])], DEGREE),
    ]
    lines = [
        '"""Taylor coefficients of the Riemann-Siegel corrections C_0..C_4 in z = p - 1/2.',
        "",
        "Generated by scripts/gen_rs_coeffs.py; do not edit.",
        '"""',
        "import numpy as np",
        "",
        "RS_COEFFS = np.array([",
    ]
    for c in cs:
        # drop trailing terms that cannot matter for |z| <= 1/2
        last = max(i for i, v in enumerate(c) if abs(v) * mp.mpf(2) ** (-i) > mp.mpf(10) ** -20)
        row = [mp.nstr(v, 20) if i <= last else "0.0" for i, v in enumerate(c)]
        lines.append("    [" + ", ".join(row) + "],")
    lines.append("], dtype=np.float64)")
    lines.append("")
    target = Path(__file__).resolve().parents[1] / "src" / "hardyz" / "_rs_coeffs.py"
    target.write_text("\n".join(lines))
    print(f"wrote {target}")


if __name__ == "__main__":
    main()
