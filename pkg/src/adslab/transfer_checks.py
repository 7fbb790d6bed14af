"""Seeded numerical checks of the infinitesimal Pogorelov transfer.

Every check draws random data from ``rng`` and returns the worst residual
over the trials, so a single number certifies each property.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import expm

from .geometry import SL2_BASIS, chart_velocity, homogeneous, isometry_matrix, killing_velocity, mink_form
from .pogorelov import cone_samples, pogorelov_map, psi_inverse_killing, psi_killing, psi_matrix, intertwining_residual
from .rigidity import _length_gradients
from .surface_group import Representation, build_fuchsian_rep, lie_matrix_of, z1_basis


def _random_fuchsian_element(rng, scale: float = 1.0) -> np.ndarray:
    A = expm(sum(c * E for c, E in zip(scale * rng.normal(size=3), SL2_BASIS)))
    return isometry_matrix(A, A)


def _random_cone_point(rng, nappe: int | None = None, rmax: float = 0.9) -> np.ndarray:
    r = rng.uniform(0.05, rmax)
    d = rng.uniform(0.0, 1.5)
    phi = rng.uniform(0, 2 * np.pi)
    s = nappe if nappe is not None else rng.choice([-1.0, 1.0])
    return r * np.array([np.sinh(d) * np.cos(phi), np.sinh(d) * np.sin(phi), s * np.cosh(d)])


def killing_fit_residual(rng, trials: int = 100) -> float:
    """Worst fit residual for Phi of AdS Killing fields and Phi^-1 of Minkowski ones."""
    samples = cone_samples()
    worst = 0.0
    for _ in range(trials):
        _, r1 = psi_killing(rng.normal(size=6), samples)
        _, r2 = psi_inverse_killing(rng.normal(size=6), samples)
        worst = max(worst, r1, r2)
    return float(worst)


def equivariance_residual(rng, trials: int = 100) -> float:
    """Worst |Phi_{gp}(dg v) - dg Phi_p(v)| / |v| for g in G_F."""
    worst = 0.0
    for _ in range(trials):
        g = _random_fuchsian_element(rng, 0.5)
        p = _random_cone_point(rng)
        v = rng.normal(size=3)
        X = homogeneous(p)
        Y = g @ X
        gp = Y[:3] / Y[3]
        dg = lambda w: chart_velocity(Y, g @ np.append(w, 0.0))
        lhs = pogorelov_map(gp, dg(v))
        rhs = dg(pogorelov_map(p, v))
        worst = max(worst, np.linalg.norm(lhs - rhs) / (np.linalg.norm(v) * np.linalg.norm(g, 2)))
    return float(worst)


def segment_transfer_residual(rng, trials: int = 100) -> float:
    """First-order length preservation carried from AdS to Minkowski segments.

    Endpoint velocities are projected to keep the AdS length fixed to first
    order; the Minkowski length variation of their Phi images is reported
    relative to the size of the gradient times the velocities.
    """
    worst = 0.0
    done = 0
    while done < trials:
        s = rng.choice([-1.0, 1.0])
        p, q = _random_cone_point(rng, s), _random_cone_point(rng, s)
        d = q - p
        if mink_form(d, d) < 1e-3:
            continue
        P, Q = homogeneous(p)[None], homogeneous(q)[None]
        gP, gQ, _ = _length_gradients(P, Q, "ads")
        grad = np.concatenate([gP[0, :3], gQ[0, :3]])
        v = rng.normal(size=6)
        v -= (grad @ v) / (grad @ grad) * grad
        wp, wq = pogorelov_map(p, v[:3]), pogorelov_map(q, v[3:])
        mP, mQ, _ = _length_gradients(P, Q, "mink")
        mgrad = np.concatenate([mP[0, :3], mQ[0, :3]])
        w = np.concatenate([wp, wq])
        worst = max(worst, abs(mgrad @ w) / (np.linalg.norm(mgrad) * np.linalg.norm(w)))
        done += 1
    return float(worst)


def automorphicity_residual(rng, trials: int = 100, rho: Representation | None = None) -> float:
    """Transferred velocities of an automorphic AdS deformation stay automorphic.

    For a random Z^1 cocycle tau, vertex p in C and velocity v, the AdS
    velocity at rho(gamma) p is d rho(gamma) v + tau(gamma)(rho(gamma) p).  Its
    Phi image must equal the Minkowski rule applied to (Psi tau, Phi v), for
    every generator gamma.
    """
    rho = rho or build_fuchsian_rep(2)
    coh = z1_basis(rho, "g")
    P = psi_matrix()
    worst = 0.0
    for _ in range(trials):
        tau = (coh.z1 @ rng.normal(size=coh.z1.shape[1])).reshape(-1, 6)
        p = _random_cone_point(rng, rmax=0.8)
        v = rng.normal(size=3)
        X = homogeneous(p)
        for i, g in enumerate(rho.mats):
            Y = g @ X
            gp = Y[:3] / Y[3]
            if mink_form(gp, gp) >= 0 or mink_form(gp, gp) <= -1.0 + 1e-6:
                continue
            ads_vel = chart_velocity(Y, g @ np.append(v, 0.0)) + killing_velocity(lie_matrix_of("g", tau[i]), gp)
            lhs = pogorelov_map(gp, ads_vel)
            wv = pogorelov_map(p, v)
            rhs = chart_velocity(Y, g @ np.append(wv, 0.0)) + killing_velocity(lie_matrix_of("g0", P @ tau[i]), gp)
            scale = np.linalg.norm(g, 2) * (np.linalg.norm(v) + np.linalg.norm(tau[i]))
            worst = max(worst, np.linalg.norm(lhs - rhs) / scale)
    return float(worst)


@dataclass
class TransferSuite:
    killing_fit: float
    equivariance: float
    intertwining: float
    segment_transfer: float
    automorphicity: float
    trials: int

    def as_dict(self):
        return {
            "killing_fit": self.killing_fit,
            "equivariance": self.equivariance,
            "intertwining": self.intertwining,
            "segment_transfer": self.segment_transfer,
            "automorphicity": self.automorphicity,
            "trials": self.trials,
        }


def transfer_suite(seed: int = 0, trials: int = 100) -> TransferSuite:
    rng = np.random.default_rng(seed)
    rho = build_fuchsian_rep(2)
    return TransferSuite(
        killing_fit=killing_fit_residual(rng, trials),
        equivariance=equivariance_residual(rng, trials),
        intertwining=max(intertwining_residual(rng, trials), intertwining_residual(rng, trials, rho)),
        segment_transfer=segment_transfer_residual(rng, trials),
        automorphicity=automorphicity_residual(rng, trials, rho),
        trials=trials,
    )

