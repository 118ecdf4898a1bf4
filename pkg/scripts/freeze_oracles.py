"""Regenerate tests/data/oracle_values.json from high-precision mpmath evaluations.

Named reference values (direct summation of the series, numerical u-derivative)
and two independent routes at a set of points are recorded:
  * theta and its derivatives from mpmath.jtheta, from which E1, E2, p and the
    Kronecker function follow;
  * the Weierstrass p from its q-expansion
        p(z) = pi^2 / sin^2(pi z) - (pi^2 / 3) E2(tau) - 8 pi^2 sum n q^n cos(2 pi n z) / (1 - q^n)
    with q = exp(2 pi i tau), which never touches theta.
Run:  python3 scripts/freeze_oracles.py
"""
from __future__ import annotations

import json
from pathlib import Path

import mpmath as mp

mp.mp.dps = 40

TAUS = [mp.mpc(0, 1), mp.mpc("0.3", "0.8")]
ZS = [mp.mpc("0.21", "0.13"), mp.mpc("-0.37", "0.29"), mp.mpc("0.05", "-0.11"), mp.mpc("0.44", "0")]
US = [mp.mpc("0.17", "-0.08"), mp.mpc("-0.23", "0.31")]


def theta_k(z, tau, k=0):
    q = mp.exp(1j * mp.pi * tau)
    return mp.pi ** k * mp.jtheta(1, mp.pi * z, q, k)


def p_qseries(z, tau, terms=200):
    q = mp.exp(2j * mp.pi * tau)
    e2 = 1 - 24 * mp.nsum(lambda n: n * q ** n / (1 - q ** n), [1, terms])
    s = mp.nsum(lambda n: n * q ** n * mp.cos(2 * mp.pi * n * z) / (1 - q ** n), [1, terms])
    return mp.pi ** 2 / mp.sin(mp.pi * z) ** 2 - mp.pi ** 2 / 3 * e2 - 8 * mp.pi ** 2 * s


def theta_direct(z, tau, kmax=500):
    """Plain summation of the defining series over |k| <= kmax."""
    return -mp.fsum(mp.exp(1j * mp.pi * tau * (k + mp.mpf(1) / 2) ** 2
                           + 2j * mp.pi * (z + mp.mpf(1) / 2) * (k + mp.mpf(1) / 2))
                    for k in range(-kmax, kmax + 1))


def kronecker_f(z, u, tau):
    """d/du of the Kronecker function by mpmath numerical differentiation."""
    d1 = theta_k(0, tau, 1)
    return mp.diff(lambda v: d1 * theta_k(z + v, tau) / (theta_k(z, tau) * theta_k(v, tau)), u)


def pair(x):
    return [float(mp.re(x)), float(mp.im(x))]


def main():
    out = []
    for tau in TAUS:
        d1_0, d3_0 = theta_k(0, tau, 1), theta_k(0, tau, 3)
        shift = d3_0 / (3 * d1_0)
        for z in ZS:
            th = [theta_k(z, tau, k) for k in range(4)]
            e1 = th[1] / th[0]
            e2 = e1 ** 2 - th[2] / th[0]
            entry = {"tau": pair(tau), "z": pair(z), "theta": [pair(t) for t in th],
                     "e1": pair(e1), "e2": pair(e2), "wp": pair(e2 + shift),
                     "wp_qseries": pair(p_qseries(z, tau)), "phi": []}
            for u in US:
                phi = d1_0 * theta_k(z + u, tau) / (th[0] * theta_k(u, tau))
                entry["phi"].append({"u": pair(u), "value": pair(phi)})
            out.append(entry)
    tau = mp.mpc(0, 1)
    named = {
        "theta_0.25_tau_i": pair(theta_direct(mp.mpf("0.25"), tau)),
        "dtheta_0_tau_i": pair(theta_k(0, tau, 1)),
        "f_0.3_0.45_tau_i": pair(kronecker_f(mp.mpf("0.3"), mp.mpf("0.45"), tau)),
    }
    path = Path(__file__).resolve().parents[1] / "tests" / "data" / "oracle_values.json"
    path.write_text(json.dumps({"mp_dps": mp.mp.dps, "named": named, "points": out}, indent=1) + "\n")
    print(f"wrote {len(out)} points to {path}")


if __name__ == "__main__":
    main()
