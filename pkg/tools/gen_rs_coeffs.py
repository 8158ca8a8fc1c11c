"""Regenerate src/zetalab/_rs_coeffs.py.

The Riemann-Siegel correction functions C0, C1, C2 are polynomials in
x = p - 1/2 (p the fractional part of sqrt(t / 2 pi)).  With
Psi(x) = -cos(2 pi x^2 - 5 pi / 8) / cos(2 pi x):

    C0 = Psi
    C1 = -Psi''' / (96 pi^2)
    C2 = Psi^(6) / (18432 pi^4) + Psi'' / (64 pi^2)

Psi is entire; its Taylor series is obtained by power-series division in
high precision.
"""

from __future__ import annotations

import sys
from pathlib import Path

import mpmath as mp

DEGREE = 90
CUTOFF = mp.mpf("1e-21")  # on |x| <= 1/2 the dropped terms are below this


def psi_series(degree: int) -> list:
    tp = 2 * mp.pi
    num = [mp.mpf(0)] * (degree + 1)
    a, b = mp.cos(5 * mp.pi / 8), mp.sin(5 * mp.pi / 8)
    for j in range(0, degree // 2 + 1):
        # coefficient of y^j = x^{2j} in cos(2 pi y) and sin(2 pi y)
        c = (-1) ** (j // 2) * tp**j / mp.factorial(j)
        num[2 * j] += (a if j % 2 == 0 else b) * c
    den = [mp.mpf(0)] * (degree + 1)
    for j in range(0, degree // 2 + 1):
        den[2 * j] = (-1) ** j * tp ** (2 * j) / mp.factorial(2 * j)
    out = [mp.mpf(0)] * (degree + 1)
    for n in range(degree + 1):
        # -num = out * den
        out[n] = (-num[n] - sum(out[i] * den[n - i] for i in range(n))) / den[0]
    return out


def derivative(c: list, order: int) -> list:
    for _ in range(order):
        c = [i * c[i] for i in range(1, len(c))]
    return c


def trim(c: list) -> list:
    c = list(c)
    while c and abs(c[-1]) * mp.mpf(0.5) ** (len(c) - 1) < CUTOFF:
        c.pop()
    return c


def main(out: Path) -> None:
    mp.mp.dps = 80
    psi = psi_series(DEGREE)
    pi2 = mp.pi**2
    c0 = psi
    c1 = [-v / (96 * pi2) for v in derivative(psi, 3)]
    d6, d2 = derivative(psi, 6), derivative(psi, 2)
    c2 = [d6[i] / (18432 * pi2**2) + d2[i] / (64 * pi2) for i in range(len(d6))]
    lines = [
        '"""Taylor coefficients (ascending powers of x = p - 1/2) of the',
        "Riemann-Siegel correction functions.  Generated by tools/gen_rs_coeffs.py.",
        '"""',
        "",
    ]
    for name, coeffs in (("C0", c0), ("C1", c1), ("C2", c2)):
        coeffs = trim(coeffs)
        lines.append(f"{name} = (")
        lines.extend(f"    {float(v)!r}," for v in coeffs)
        lines.append(")")
        lines.append("")
    out.write_text("\n".join(lines))


if __name__ == "__main__":
    target = Path(sys.argv[1]) if len(sys.argv) > 1 else (
        Path(__file__).resolve().parents[1] / "src" / "zetalab" / "_rs_coeffs.py"
    )
    main(target)
