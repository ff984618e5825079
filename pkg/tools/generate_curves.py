#!/usr/bin/env python3
"""Generate the bundled Born-Oppenheimer data file for the hydrogen molecular
ion: the two lowest electronic curves (bound 1s-sigma-g, repulsive 2p-sigma-u)
and the g-u transition dipole, on a dense grid of internuclear distances.

The electronic two-centre Coulomb problem separates in prolate spheroidal
coordinates (xi, eta).  For each R the angular equation is diagonalised in a
parity-reduced Legendre basis, and the radial equation is solved with a Jaffe
series whose minimal solution is selected by backward (Miller) recurrence;
the electronic energy is the root of the n=0 consistency residual.  This is
exact up to quadrature/truncation error (~1e-10 hartree here), so the shipped
table is reproducible to machine precision from this script alone.

Wavefunctions are reassembled from the series to compute the transition
dipole <g| z |u> by Gauss-Legendre (eta) x Simpson (xi) quadrature.

Curves are written shifted so the common dissociation limit, E(H 1s) = -0.5
hartree, sits at zero.  Electronic curves are isotope independent; reduced
mass enters only in the nuclear problem downstream.

Self-checks at the end compare against classic benchmark values.

Usage:  python3 tools/generate_curves.py [--out PATH]
"""

import argparse
import sys
import time

import numpy as np
from numpy.polynomial import legendre as npleg
from scipy.integrate import simpson
from scipy.linalg import eigh_tridiagonal
from scipy.optimize import brentq

# separated-atom electronic energy E(H 1s); defines the energy zero
DISSOCIATION_LIMIT = -0.5

# benchmark electronic energies at R = 2 bohr (Wind / Bates-class values)
BENCH_E_G_R2 = -1.1026342144949
BENCH_E_U_R2 = -0.6675343922024


def angular_eigenpair(p2, parity, basis_size=60):
    """Largest-A eigenpair of d/de[(1-e^2) d/de] + p2*e^2 on e in [-1, 1].

    parity 0 keeps even Legendre orders (gerade), 1 keeps odd (ungerade).
    Returns (A, legendre_coefficients) with coefficients in the classic
    (unnormalised) Legendre convention for numpy.polynomial.legendre.
    """
    ls = np.arange(parity, parity + 2 * basis_size, 2)

    def step(l):
        # <l|eta|l+1> in the orthonormal Legendre basis
        return (l + 1) / np.sqrt((2 * l + 1) * (2 * l + 3))

    up = step(ls)
    down = np.zeros_like(up)
    down[ls > 0] = step(ls[ls > 0] - 1)
    diag = -ls * (ls + 1) + p2 * (up**2 + down**2)
    off = p2 * step(ls[:-1]) * step(ls[:-1] + 1)
    w, v = eigh_tridiagonal(diag, off)
    coeffs = np.zeros(ls[-1] + 1)
    coeffs[ls] = v[:, -1] * np.sqrt((2 * ls + 1) / 2.0)
    if coeffs[parity] < 0:
        coeffs = -coeffs
    return w[-1], coeffs


def jaffe_solution(E, R, parity, n_terms=400):
    """Jaffe-series solution of the radial equation at electronic energy E.

    X(xi) = (xi+1)^sigma exp(-p xi) sum_n g_n x^n with x = (xi-1)/(xi+1),
    p = sqrt(-R^2 E / 2) and sigma = R/p - 1.  The three-term recursion
        (n+1)^2 g_{n+1} + beta_n g_n + (n-1-sigma)^2 g_{n-1} = 0,
        beta_n = -2n^2 + 2n(sigma - 2p) + A + sigma(1 + 2p) - p^2,
    is run backwards to pick out the minimal solution; the returned residual
    is the n=0 consistency condition and vanishes at eigenvalues.
    """
    p = np.sqrt(-R * R * E / 2.0)
    sigma = R / p - 1.0
    A, leg = angular_eigenpair(p * p, parity)
    beta_const = A + sigma * (1.0 + 2.0 * p) - p * p
    g = np.zeros(n_terms + 2)
    g[n_terms] = 1.0
    for n in range(n_terms, 0, -1):
        gamma_n = max((n - 1.0 - sigma) ** 2, 1e-200)
        beta_n = -2.0 * n * n + 2.0 * n * (sigma - 2.0 * p) + beta_const
        g[n - 1] = -((n + 1.0) ** 2 * g[n + 1] + beta_n * g[n]) / gamma_n
        if abs(g[n - 1]) > 1e250:
            g /= abs(g[n - 1])
    # n = 0 consistency: alpha_0 g_1 + beta_0 g_0 = 0 with alpha_0 = 1
    residual = (g[1] + beta_const * g[0]) / max(abs(g[0]), abs(g[1]))
    return g[: n_terms + 1] / g[0], leg, p, sigma, residual


def sector_ground(R, parity, e_floor, e_ceil, scan_step=0.005, guess=None):
    """Lowest electronic eigenvalue of the given parity sector at distance R."""

    def residual(E):
        return jaffe_solution(E, R, parity)[-1]

    if guess is not None:
        # walk mode: bracket around the previous root, widening on failure
        for half in (0.002, 0.01, 0.05):
            lo, hi = guess - half, min(guess + half, -1e-6)
            try:
                if residual(lo) * residual(hi) < 0:
                    return brentq(residual, lo, hi, xtol=1e-13, rtol=8.9e-16)
            except ValueError:
                pass
    e0, r0 = e_floor, residual(e_floor)
    e1 = e_floor + scan_step
    while e1 < e_ceil:
        r1 = residual(e1)
        if np.isfinite(r0) and np.isfinite(r1) and r0 * r1 < 0:
            return brentq(residual, e0, e1, xtol=1e-13, rtol=8.9e-16)
        e0, r0, e1 = e1, r1, e1 + scan_step
    raise RuntimeError(f"no eigenvalue found for R={R} parity={parity}")


def radial_series(xi, g, p, sigma):
    x = (xi - 1.0) / (xi + 1.0)
    acc = np.zeros_like(x)
    for gn in g[::-1]:
        acc = acc * x + gn
    return (xi + 1.0) ** sigma * np.exp(-p * xi) * acc


def point_properties(R, guess_g=None, guess_u=None):
    """Electronic energies and transition dipole at one internuclear distance."""
    e_g = sector_ground(R, 0, -2.05, -0.30, guess=guess_g)
    e_u = sector_ground(R, 1, -0.85 - 1.0 / R, -0.30, guess=guess_u)
    g_g, leg_g, p_g, s_g = jaffe_solution(e_g, R, 0)[:4]
    g_u, leg_u, p_u, s_u = jaffe_solution(e_u, R, 1)[:4]

    xi_max = 1.0 + 45.0 / min(p_g, p_u)
    xi = np.linspace(1.0, xi_max, 8001)
    X_g = radial_series(xi, g_g, p_g, s_g)
    X_u = radial_series(xi, g_u, p_u, s_u)
    nodes, weights = np.polynomial.legendre.leggauss(200)
    Y_g = npleg.legval(nodes, leg_g)
    Y_u = npleg.legval(nodes, leg_u)

    def ixi(f):
        return simpson(f, x=xi)

    def ieta(f):
        return float(np.sum(weights * f))

    # volume element (R/2)^3 (xi^2 - eta^2); z = (R/2) xi eta; 2 pi from phi
    shell = 2.0 * np.pi * (R / 2.0) ** 3
    norm_g = shell * (ixi(X_g**2 * xi**2) * ieta(Y_g**2) - ixi(X_g**2) * ieta(Y_g**2 * nodes**2))
    norm_u = shell * (ixi(X_u**2 * xi**2) * ieta(Y_u**2) - ixi(X_u**2) * ieta(Y_u**2 * nodes**2))
    raw = shell * (R / 2.0) * (
        ixi(X_g * X_u * xi**3) * ieta(Y_g * Y_u * nodes)
        - ixi(X_g * X_u * xi) * ieta(Y_g * Y_u * nodes**3)
    )
    dipole = abs(raw) / np.sqrt(norm_g * norm_u)
    return e_g, e_u, dipole


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default="src/vibcontrol/data/h2plus_bo_curves.dat")
    ap.add_argument("--r-min", type=float, default=0.1)
    ap.add_argument("--r-max", type=float, default=20.0)
    ap.add_argument("--step", type=float, default=0.05)
    args = ap.parse_args(argv)

    r_values = np.round(np.arange(args.r_min, args.r_max + args.step / 2, args.step), 10)
    rows = []
    guess_g = guess_u = None
    t0 = time.time()
    for i, R in enumerate(r_values):
        e_g, e_u, d = point_properties(float(R), guess_g, guess_u)
        guess_g, guess_u = e_g, e_u
        v_g = e_g + 1.0 / R - DISSOCIATION_LIMIT
        v_u = e_u + 1.0 / R - DISSOCIATION_LIMIT
        rows.append((R, v_g, v_u, d))
        if i % 50 == 0:
            print(f"R={R:6.2f}  v_g={v_g:+.8f}  v_u={v_u:+.8f}  d={d:.6f}")
    print(f"solved {len(rows)} points in {time.time() - t0:.1f} s")

    # self-checks against benchmark values and known limits
    by_r = {round(r, 6): (vg, vu, d) for r, vg, vu, d in rows}
    if 2.0 in by_r:
        vg2, vu2, _ = by_r[2.0]
        assert abs(vg2 - (BENCH_E_G_R2 + 0.5 - DISSOCIATION_LIMIT)) < 1e-8, vg2
        assert abs(vu2 - (BENCH_E_U_R2 + 0.5 - DISSOCIATION_LIMIT)) < 1e-8, vu2
    r_last, *last = rows[-1]
    assert abs(last[2] / (r_last / 2.0) - 1.0) < 0.05, "dipole asymptote"
    assert all(vu >= vg for _, vg, vu, _ in rows), "u below g"
    assert abs(rows[-1][2]) < 1e-4, "dissociation limit not reached"

    with open(args.out, "w") as fh:
        fh.write("# Born-Oppenheimer curves for the one-electron homonuclear diatomic\n")
        fh.write("# (H2+ and isotopologues; electronic curves are mass independent).\n")
        fh.write("# Generated by tools/generate_curves.py from the exact two-centre\n")
        fh.write("# Coulomb problem (prolate spheroidal separation, Jaffe series).\n")
        fh.write("# Energies shifted so the dissociation limit E(H 1s) is zero.\n")
        fh.write("# columns: R[bohr]  V_g[hartree]  V_u[hartree]  d[a.u.]\n")
        for R, v_g, v_u, d in rows:
            fh.write(f"{R:7.3f}  {v_g:+.10e}  {v_u:+.10e}  {d:.10e}\n")
    print(f"wrote {args.out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
